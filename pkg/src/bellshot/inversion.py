"""State-independent inversion from measured outcomes to sharp-observable
statistics.

For each observable the 2x2 kernel

    p(w | w') = (1 + w w' / gamma) / 2

undoes the unsharpness of the corresponding marginal exactly; entries turn
negative as soon as |gamma| < 1, which is what lets the inverted joint
distribution carry negativity. The joint 16x16 kernel is the product of the
four one-observable kernels. Applied to the observed statistics it yields a
signed quasi-distribution whose single-observable marginals, and all four
cross marginals pairing one A observable with one B observable, reproduce
the sharp Born probabilities exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import ConsistencyError, GammaOutOfRange, InvalidDistribution
from .measurement import (
    GAMMA_MIN,
    OUTCOMES,
    PAIR_ORDER,
    JointPovm,
    GammaSet,
    sign_index,
)
from .observables import (
    A_LABELS,
    B_LABELS,
    ObservableLabel,
    SharpPovm,
)

COLUMN_SUM_TOL = 1e-12
QUASI_SUM_TOL = 1e-10
MARGINAL_CLAMP_TOL = 1e-10


def kernel_1d(gamma: float) -> np.ndarray:
    """One-observable inversion table, indexed [w, w'] with +1 first.

    Columns sum to 1; the off-diagonal entries are negative for |gamma| < 1.
    """
    g = float(gamma)
    if not np.isfinite(g) or not (GAMMA_MIN <= abs(g) <= 1.0):
        raise GammaOutOfRange(f"gamma = {gamma!r}: |gamma| must lie in [{GAMMA_MIN:g}, 1]")
    table = np.empty((2, 2))
    for w in (+1, -1):
        for wp in (+1, -1):
            table[sign_index(w), sign_index(wp)] = 0.5 * (1.0 + w * wp / g)
    return table


@dataclass(frozen=True)
class InversionKernel:
    """16x16 quasi-stochastic table p(xi | xi'), factorized per observable."""

    gammas: GammaSet
    table: np.ndarray  # [xi, xi'] in canonical outcome order

    def __post_init__(self):
        t = np.array(self.table, dtype=float)
        if t.shape != (16, 16):
            raise ConsistencyError(f"kernel table shape {t.shape}, expected (16, 16)")
        sums = t.sum(axis=0)
        worst = float(np.max(np.abs(sums - 1.0)))
        if worst > COLUMN_SUM_TOL:
            raise ConsistencyError(f"kernel column sums deviate from 1 by {worst:.3e}")
        t.setflags(write=False)
        object.__setattr__(self, "table", t)


def build_kernel(gammas: GammaSet) -> InversionKernel:
    """Product of the four one-observable kernels over all outcome pairs."""
    kx = kernel_1d(gammas.gamma_x)
    ky = kernel_1d(gammas.gamma_y)
    ku = kernel_1d(gammas.gamma_u)
    kv = kernel_1d(gammas.gamma_v)
    table = np.empty((16, 16))
    for i, xi in enumerate(OUTCOMES):
        for j, xp in enumerate(OUTCOMES):
            table[i, j] = (
                kx[sign_index(xi.x), sign_index(xp.x)]
                * ky[sign_index(xi.y), sign_index(xp.y)]
                * ku[sign_index(xi.u), sign_index(xp.u)]
                * kv[sign_index(xi.v), sign_index(xp.v)]
            )
    return InversionKernel(gammas, table)


@dataclass(frozen=True)
class QuasiDistribution:
    """Signed 16-entry distribution over sharp outcomes, normalized to 1.

    Entries are kept unclamped: negativity is the nonclassicality witness,
    so it must survive untouched.
    """

    entries: np.ndarray

    def __post_init__(self):
        e = np.array(self.entries, dtype=float)
        if e.shape != (16,):
            raise InvalidDistribution(f"quasi-distribution shape {e.shape}, expected (16,)")
        if not np.all(np.isfinite(e)):
            raise InvalidDistribution("quasi-distribution has non-finite entries")
        total = float(e.sum())
        if abs(total - 1.0) > QUASI_SUM_TOL:
            raise InvalidDistribution(f"quasi-distribution sums to {total!r}, expected 1")
        e.setflags(write=False)
        object.__setattr__(self, "entries", e)

    def min_entry(self) -> float:
        return float(self.entries.min())

    def is_negative(self, tol: float = 1e-10) -> bool:
        return self.min_entry() < -tol

    def to_list(self) -> list[float]:
        """Entries in the canonical outcome order (documented in
        measurement.OUTCOME_ORDER_DOC), ready for JSON."""
        return [float(p) for p in self.entries]


def invert_distribution(kernel: InversionKernel, observed) -> QuasiDistribution:
    """Push observed statistics through the kernel: q = table @ observed.

    The kernel's unit column sums make this total-probability preserving
    whatever the input, so the output always sums to what went in.
    """
    p = np.asarray(observed, dtype=float)
    if p.shape != (16,):
        raise InvalidDistribution(f"observed statistics shape {p.shape}, expected (16,)")
    return QuasiDistribution(kernel.table @ p)


def reconstructed_sharp_povm(kernel: InversionKernel, povm: JointPovm, label) -> SharpPovm:
    """Recover the sharp projective POVM of one observable from the unsharp
    marginal of the joint measurement.

    The weighted sum over measured outcomes telescopes the gamma factors
    away, so the result matches the projectors to rounding; SharpPovm
    validation enforces that on construction.
    """
    label = ObservableLabel(label)
    if kernel.gammas != povm.gammas:
        raise ConsistencyError(
            f"kernel gammas {kernel.gammas} do not match POVM gammas {povm.gammas}"
        )
    k1 = kernel_1d(kernel.gammas.of(label))
    elements = []
    for w in (+1, -1):
        total = np.zeros((2, 2), dtype=complex)
        for wp in (+1, -1):
            total = total + k1[sign_index(w), sign_index(wp)] * povm.marginal_element(label, wp)
        elements.append(total)
    return SharpPovm(elements[0], elements[1])


def _marginal_axes(label: ObservableLabel) -> int:
    return {"x": 0, "y": 1, "u": 2, "v": 3}[label.value]


def cross_marginal(q: QuasiDistribution, pair) -> np.ndarray:
    """Two-observable marginal for one A observable and one B observable.

    Returns a (2, 2) array indexed [w_a, w_b] with +1 first. Exactness of
    the inversion guarantees nonnegativity up to rounding; entries within
    MARGINAL_CLAMP_TOL below zero are clamped and anything worse raises.
    """
    label_a, label_b = ObservableLabel(pair[0]), ObservableLabel(pair[1])
    if label_a not in A_LABELS or label_b not in B_LABELS:
        raise ValueError(
            f"cross marginal needs one A observable and one B observable, "
            f"got ({label_a.value}, {label_b.value})"
        )
    grid = q.entries.reshape(2, 2, 2, 2)  # axes x, y, u, v
    keep = (_marginal_axes(label_a), _marginal_axes(label_b))
    drop = tuple(ax for ax in range(4) if ax not in keep)
    out = grid.sum(axis=drop)
    if np.any(out < -MARGINAL_CLAMP_TOL):
        raise ConsistencyError(
            f"cross marginal ({label_a.value}, {label_b.value}) entry "
            f"{float(out.min())!r} below -{MARGINAL_CLAMP_TOL:.0e}"
        )
    return np.where(out < 0.0, 0.0, out)


def single_marginal(q: QuasiDistribution, label) -> np.ndarray:
    """One-observable marginal, a (2,) vector with +1 first."""
    label = ObservableLabel(label)
    grid = q.entries.reshape(2, 2, 2, 2)
    keep = _marginal_axes(label)
    drop = tuple(ax for ax in range(4) if ax != keep)
    out = grid.sum(axis=drop)
    if np.any(out < -MARGINAL_CLAMP_TOL):
        raise ConsistencyError(
            f"marginal {label.value} entry {float(out.min())!r} below -{MARGINAL_CLAMP_TOL:.0e}"
        )
    return np.where(out < 0.0, 0.0, out)
