"""Joint unsharp measurement of two incompatible observables per subsystem.

Each subsystem carries a four-outcome POVM whose element for outcomes
(w1', w2') is

    (I + gamma_1 w1' n1.sigma + gamma_2 w2' n2.sigma) / 4 .

Its marginals are the unsharp versions (I + gamma w' n.sigma) / 2 of the
two sharp observables, so the measured record carries complete (if noisy)
information about both at once. The full apparatus is the 16-outcome
product of subsystem A's and subsystem B's POVMs. Positivity of every
element is checked numerically at construction; for an orthogonal pair it
is equivalent to gamma_1^2 + gamma_2^2 <= 1.

Outcome ordering convention, used everywhere downstream: a four-tuple
(x, y, u, v) of signs maps to index 8*[x<0] + 4*[y<0] + 2*[u<0] + [v<0],
i.e. lexicographic with +1 sorting before -1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import ConsistencyError, GammaOutOfRange, NotPositive, OutOfRange
from .observables import ObservableSet, ObservableSpec

GAMMA_MIN = 1e-6
PROB_CLAMP_TOL = 1e-12
PROB_SUM_TOL = 1e-10

SIGNS = (+1, -1)
PAIR_ORDER = ((+1, +1), (+1, -1), (-1, +1), (-1, -1))

OUTCOME_ORDER_DOC = (
    "outcomes (x, y, u, v) ordered lexicographically with +1 before -1; "
    "index = 8*[x=-1] + 4*[y=-1] + 2*[u=-1] + [v=-1]"
)


def sign_index(w: int) -> int:
    """0 for +1, 1 for -1."""
    return 0 if w > 0 else 1


def pair_index(w1: int, w2: int) -> int:
    return 2 * sign_index(w1) + sign_index(w2)


@dataclass(frozen=True)
class OutcomeIndex:
    """One joint outcome, four signs (x, y, u, v), each +-1."""

    x: int
    y: int
    u: int
    v: int

    def __post_init__(self):
        for name in ("x", "y", "u", "v"):
            w = getattr(self, name)
            if w not in (-1, 1):
                raise OutOfRange(f"outcome component {name} = {w!r}, must be +1 or -1")

    def to_index(self) -> int:
        return 8 * sign_index(self.x) + 4 * sign_index(self.y) + 2 * sign_index(self.u) + sign_index(self.v)

    @staticmethod
    def from_index(i: int) -> "OutcomeIndex":
        return OUTCOMES[i]

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.x, self.y, self.u, self.v)


def _enumerate_outcomes() -> tuple[OutcomeIndex, ...]:
    out = []
    for x in SIGNS:
        for y in SIGNS:
            for u in SIGNS:
                for v in SIGNS:
                    out.append(OutcomeIndex(x, y, u, v))
    return tuple(out)


OUTCOMES = _enumerate_outcomes()


@dataclass(frozen=True)
class GammaSet:
    """Unsharpness factors of the four marginal observables.

    Each satisfies gamma_min <= |gamma| <= 1. The joint-measurement
    constraint for an orthogonal pair (gamma_1^2 + gamma_2^2 <= 1) is not
    imposed here; it emerges from the positivity check when the POVM is
    actually built.
    """

    gamma_x: float
    gamma_y: float
    gamma_u: float
    gamma_v: float

    def __post_init__(self):
        for name in ("gamma_x", "gamma_y", "gamma_u", "gamma_v"):
            g = float(getattr(self, name))
            if not np.isfinite(g):
                raise GammaOutOfRange(f"{name} = {g!r} is not finite")
            if not (GAMMA_MIN <= abs(g) <= 1.0):
                raise GammaOutOfRange(
                    f"{name} = {g!r}: |gamma| must lie in [{GAMMA_MIN:g}, 1]"
                )
            object.__setattr__(self, name, g)

    @staticmethod
    def equal(gamma: float) -> "GammaSet":
        return GammaSet(gamma, gamma, gamma, gamma)

    def of(self, label) -> float:
        return getattr(self, f"gamma_{label.value}")

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.gamma_x, self.gamma_y, self.gamma_u, self.gamma_v)


def build_joint_povm(
    pair: tuple[ObservableSpec, ObservableSpec],
    gammas: tuple[float, float],
) -> np.ndarray:
    """Four-outcome subsystem POVM for a pair of observables.

    Returns a (4, 2, 2) array in PAIR_ORDER. Raises NotPositive, naming the
    offending outcome pair and eigenvalue, when the unsharpness/angle
    combination leaves the physical region.
    """
    obs1, obs2 = pair
    g1, g2 = float(gammas[0]), float(gammas[1])
    op1 = obs1.operator()
    op2 = obs2.operator()
    elements = np.empty((4, 2, 2), dtype=complex)
    for k, (w1, w2) in enumerate(PAIR_ORDER):
        e = 0.25 * (linalg.I2 + g1 * w1 * op1 + g2 * w2 * op2)
        lam = linalg.min_eigenvalue_hermitian(e)
        if lam < linalg.PSD_TOL:
            raise NotPositive(
                f"joint element({w1:+d},{w2:+d}) has min eigenvalue {lam!r}; "
                f"gammas ({g1}, {g2}) with these directions are unphysical"
            )
        elements[k] = e
    elements.setflags(write=False)
    return elements


def product_povm(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """All 16 products kron(A(x', y'), B(u', v')), canonically ordered."""
    product = np.empty((16, 4, 4), dtype=complex)
    for i, xi in enumerate(OUTCOMES):
        ka = pair_index(xi.x, xi.y)
        kb = pair_index(xi.u, xi.v)
        product[i] = linalg.kron(a[ka], b[kb])
    product.setflags(write=False)
    return product


@dataclass(frozen=True)
class JointPovm:
    """Subsystem POVMs plus their 16-outcome product."""

    gammas: GammaSet
    subsystem_a: np.ndarray  # (4, 2, 2) over (x', y') in PAIR_ORDER
    subsystem_b: np.ndarray  # (4, 2, 2) over (u', v')
    product: np.ndarray  # (16, 4, 4) in canonical outcome order

    def marginal_element(self, label, w: int) -> np.ndarray:
        """Unsharp marginal (I + gamma w n.sigma) / 2 of one observable,
        obtained by summing out the partner outcome."""
        elements = self.subsystem_a if label.value in ("x", "y") else self.subsystem_b
        first = label.value in ("x", "u")
        total = np.zeros((2, 2), dtype=complex)
        for k, (w1, w2) in enumerate(PAIR_ORDER):
            if (w1 if first else w2) == w:
                total = total + elements[k]
        return total


def joint_povm(settings: ObservableSet, gammas: GammaSet) -> JointPovm:
    """Assemble the full measurement for the given settings."""
    a = build_joint_povm((settings.x, settings.y), (gammas.gamma_x, gammas.gamma_y))
    b = build_joint_povm((settings.u, settings.v), (gammas.gamma_u, gammas.gamma_v))
    return JointPovm(gammas, a, b, product_povm(a, b))


def observed_statistics(rho, povm: JointPovm) -> np.ndarray:
    """Outcome probabilities tr[rho * element] for all 16 outcomes.

    Entries within PROB_CLAMP_TOL below zero are clamped; anything more
    negative, or a total off by more than PROB_SUM_TOL, raises
    ConsistencyError since both indicate a broken POVM or state.
    """
    matrix = rho.matrix
    probs = np.empty(16)
    for i in range(16):
        p = linalg.trace_product(matrix, povm.product[i])
        if abs(p.imag) > PROB_SUM_TOL:
            raise ConsistencyError(f"probability {i} has imaginary part {p.imag!r}")
        probs[i] = p.real
    if np.any(probs < -PROB_CLAMP_TOL):
        worst = float(probs.min())
        raise ConsistencyError(f"observed probability {worst!r} below -{PROB_CLAMP_TOL:.0e}")
    probs = np.where(probs < 0.0, 0.0, probs)
    total = float(probs.sum())
    if abs(total - 1.0) > PROB_SUM_TOL:
        raise ConsistencyError(f"observed probabilities sum to {total!r}, expected 1")
    probs.setflags(write=False)
    return probs
