"""Two-qubit density matrices used as test states.

Computational basis order is fixed globally as |00>, |01>, |10>, |11> with
subsystem A first; every matrix literal in the package relies on it.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import linalg
from .errors import NotPSD, NotUnitTrace, OutOfRange

TRACE_TOL = 1e-12


class BellState(Enum):
    PHI_PLUS = "phi_plus"
    PHI_MINUS = "phi_minus"
    PSI_PLUS = "psi_plus"
    PSI_MINUS = "psi_minus"


_BELL_VECTORS = {
    BellState.PHI_PLUS: np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2),
    BellState.PHI_MINUS: np.array([1, 0, 0, -1], dtype=complex) / np.sqrt(2),
    BellState.PSI_PLUS: np.array([0, 1, 1, 0], dtype=complex) / np.sqrt(2),
    BellState.PSI_MINUS: np.array([0, 1, -1, 0], dtype=complex) / np.sqrt(2),
}


@dataclass(frozen=True)
class DensityMatrix:
    """Validated two-qubit state: Hermitian, unit trace, positive semidefinite."""

    matrix: np.ndarray

    def __post_init__(self):
        m = linalg.as_matrix(self.matrix, 4)
        linalg.require_hermitian(m, what="density matrix")
        tr = np.trace(m)
        if abs(tr - 1.0) > TRACE_TOL:
            raise NotUnitTrace(f"density matrix: trace = {tr.real!r}, expected 1")
        lam = linalg.min_eigenvalue_hermitian(m)
        if lam < linalg.PSD_TOL:
            raise NotPSD(f"density matrix: min eigenvalue = {lam!r} below {linalg.PSD_TOL:.0e}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)


def bell_state(which: BellState) -> DensityMatrix:
    """Rank-1 projector onto the named maximally entangled state."""
    v = _BELL_VECTORS[BellState(which)]
    return DensityMatrix(np.outer(v, v.conj()))


def werner_state(eta: float) -> DensityMatrix:
    """eta * singlet + (1 - eta) * I/4. Entangled for eta > 1/3, violates
    CHSH at optimal angles for eta > 1/sqrt(2)."""
    if not (0.0 <= eta <= 1.0):
        raise OutOfRange(f"werner eta = {eta!r} outside [0, 1]")
    singlet = bell_state(BellState.PSI_MINUS).matrix
    return DensityMatrix(eta * singlet + (1.0 - eta) * linalg.I4 / 4.0)


def custom_state(entries) -> DensityMatrix:
    """Validate an arbitrary 4x4 table as a density matrix.

    Raises NotHermitian, NotUnitTrace or NotPSD naming the violated
    invariant and the offending value.
    """
    return DensityMatrix(linalg.as_matrix(entries, 4))


def random_density_matrix(rng: np.random.Generator) -> DensityMatrix:
    """Haar-ish random full-rank state, rho = G G^H / tr(G G^H)."""
    g = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    m = g @ g.conj().T
    return DensityMatrix(m / np.trace(m).real)
