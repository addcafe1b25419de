"""Shared oracles and generators for the test suite.

Oracle matrices here are built with plain numpy (np.kron, np.trace,
np.linalg.eigvalsh) so that library results are always compared against an
independent computation, not against themselves.
"""

import numpy as np
import pytest

from bellshot import GammaSet, observable_set

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)

# projector onto (|01> - |10>)/sqrt(2), written out by hand
SINGLET = np.zeros((4, 4), dtype=complex)
SINGLET[1, 1] = SINGLET[2, 2] = 0.5
SINGLET[1, 2] = SINGLET[2, 1] = -0.5

ROOT_HALF = 1.0 / np.sqrt(2.0)

OPTIMAL_BLOCHS = {
    "x": np.array([0.0, 0.0, 1.0]),
    "y": np.array([1.0, 0.0, 0.0]),
    "u": np.array([ROOT_HALF, 0.0, ROOT_HALF]),
    "v": np.array([ROOT_HALF, 0.0, -ROOT_HALF]),
}


def bloch_matrix(n):
    return n[0] * SX + n[1] * SY + n[2] * SZ


def projector(n, w):
    """Sharp outcome-w projector for direction n, built independently."""
    return 0.5 * (np.eye(2, dtype=complex) + w * bloch_matrix(n))


def random_hermitian(rng, dim):
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return g + g.conj().T


def random_state_matrix(rng):
    g = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_unit(rng):
    v = rng.normal(size=3)
    return v / np.linalg.norm(v)


def admissible_draw(rng):
    """Random settings plus gammas strictly inside the positivity region.

    Worst-case Bloch norm of a subsystem element is
    sqrt(g1^2 + g2^2 + 2 g1 g2 |n1.n2|); pairs exceeding 1 are scaled back.
    """
    blochs = [random_unit(rng) for _ in range(4)]
    gs = list(rng.uniform(0.3, 0.95, size=4))
    for i, j in ((0, 1), (2, 3)):
        c = abs(float(blochs[i] @ blochs[j]))
        worst = np.sqrt(gs[i] ** 2 + gs[j] ** 2 + 2.0 * gs[i] * gs[j] * c)
        if worst > 1.0:
            scale = (1.0 - 1e-9) / worst
            gs[i] *= scale
            gs[j] *= scale
    return observable_set(*blochs), GammaSet(*gs)


@pytest.fixture
def optimal_settings():
    return observable_set(*(OPTIMAL_BLOCHS[k] for k in ("x", "y", "u", "v")))


@pytest.fixture
def root_half_gammas():
    return GammaSet.equal(ROOT_HALF)
