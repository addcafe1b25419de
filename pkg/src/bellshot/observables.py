"""Sharp dichotomic qubit observables defined by unit Bloch vectors.

Outcome +1 corresponds to the projector along +n, which fixes the sign of
every correlation downstream. The CHSH test uses two observables per
subsystem: X, Y on A and U, V on B.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import linalg
from .errors import NotPSD, OutOfRange

BLOCH_NORM_TOL = 1e-12
PROJECTOR_TOL = 1e-10
COMPLETENESS_TOL = 1e-12


class ObservableLabel(Enum):
    X = "x"
    Y = "y"
    U = "u"
    V = "v"


A_LABELS = (ObservableLabel.X, ObservableLabel.Y)
B_LABELS = (ObservableLabel.U, ObservableLabel.V)


def bloch_operator(n) -> np.ndarray:
    """n . sigma for a real 3-vector n."""
    n = np.asarray(n, dtype=float)
    return n[0] * linalg.SIGMA_X + n[1] * linalg.SIGMA_Y + n[2] * linalg.SIGMA_Z


@dataclass(frozen=True)
class ObservableSpec:
    """A dichotomic observable n . sigma with outcomes +-1."""

    label: ObservableLabel
    bloch: np.ndarray

    def __post_init__(self):
        n = np.asarray(self.bloch, dtype=float)
        if n.shape != (3,) or not np.all(np.isfinite(n)):
            raise OutOfRange(f"bloch vector must be a finite 3-vector, got {self.bloch!r}")
        norm = float(np.linalg.norm(n))
        if abs(norm - 1.0) > BLOCH_NORM_TOL:
            raise OutOfRange(f"observable {self.label.value}: |bloch| = {norm!r}, expected 1")
        n.setflags(write=False)
        object.__setattr__(self, "label", ObservableLabel(self.label))
        object.__setattr__(self, "bloch", n)

    def operator(self) -> np.ndarray:
        return bloch_operator(self.bloch)


@dataclass(frozen=True)
class SharpPovm:
    """Projective two-outcome POVM {E(+1), E(-1)}."""

    element_plus: np.ndarray
    element_minus: np.ndarray

    def __post_init__(self):
        plus = linalg.as_matrix(self.element_plus, 2)
        minus = linalg.as_matrix(self.element_minus, 2)
        for w, e in ((+1, plus), (-1, minus)):
            linalg.require_hermitian(e, what=f"sharp element({w:+d})")
            lam = linalg.min_eigenvalue_hermitian(e)
            if lam < linalg.PSD_TOL:
                raise NotPSD(f"sharp element({w:+d}): min eigenvalue = {lam!r}")
            idem = float(np.max(np.abs(e @ e - e)))
            if idem > PROJECTOR_TOL:
                raise NotPSD(f"sharp element({w:+d}) is not a projector: |E^2 - E| = {idem:.3e}")
        defect = float(np.max(np.abs(plus + minus - linalg.I2)))
        if defect > COMPLETENESS_TOL:
            raise NotPSD(f"sharp elements do not sum to identity: defect {defect:.3e}")
        plus.setflags(write=False)
        minus.setflags(write=False)
        object.__setattr__(self, "element_plus", plus)
        object.__setattr__(self, "element_minus", minus)

    def element(self, w: int) -> np.ndarray:
        return self.element_plus if w > 0 else self.element_minus


def sharp_povm(obs: ObservableSpec) -> SharpPovm:
    """Eigenprojectors (I + w n.sigma) / 2 of the observable."""
    op = obs.operator()
    return SharpPovm(0.5 * (linalg.I2 + op), 0.5 * (linalg.I2 - op))


@dataclass(frozen=True)
class ObservableSet:
    """The four CHSH observables, X and Y on subsystem A, U and V on B."""

    x: ObservableSpec
    y: ObservableSpec
    u: ObservableSpec
    v: ObservableSpec

    def __post_init__(self):
        expected = {
            "x": ObservableLabel.X,
            "y": ObservableLabel.Y,
            "u": ObservableLabel.U,
            "v": ObservableLabel.V,
        }
        for field, label in expected.items():
            got = getattr(self, field).label
            if got is not label:
                raise OutOfRange(f"observable in slot {field!r} carries label {got.value!r}")

    def get(self, label: ObservableLabel) -> ObservableSpec:
        return getattr(self, ObservableLabel(label).value)


def observable_set(x_bloch, y_bloch, u_bloch, v_bloch) -> ObservableSet:
    return ObservableSet(
        ObservableSpec(ObservableLabel.X, x_bloch),
        ObservableSpec(ObservableLabel.Y, y_bloch),
        ObservableSpec(ObservableLabel.U, u_bloch),
        ObservableSpec(ObservableLabel.V, v_bloch),
    )


def chsh_optimal_angles() -> ObservableSet:
    """Canonical maximal-violation configuration for the singlet.

    All vectors lie in the x-z Bloch plane, each subsystem's pair is
    orthogonal, and B's directions bisect A's. The V direction is oriented
    so the minus term of the CHSH combination picks up the flipped
    correlation, giving |S| = 2 sqrt(2) on the singlet.
    """
    r = 1.0 / np.sqrt(2.0)
    return observable_set(
        (0.0, 0.0, 1.0),
        (1.0, 0.0, 0.0),
        (r, 0.0, r),
        (r, 0.0, -r),
    )
