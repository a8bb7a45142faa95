"""Shared dense-matrix oracles, independent of the package's sparse/bitwise code.

Site 1 is the least significant bit and bit value 1 means spin up, so a
single-site operator at ``site`` is kron(I_high, M, I_low) and the 2x2 blocks
are written in the (down, up) ordering.
"""

import numpy as np
import pytest

# 2x2 matrices in the (bit=0 down, bit=1 up) ordering.
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, 1j], [-1j, 0]], dtype=complex)
SZ = np.array([[-1, 0], [0, 1]], dtype=complex)
PAULI = {"x": SX, "y": SY, "z": SZ}


def site_operator(L: int, site: int, M: np.ndarray) -> np.ndarray:
    return np.kron(np.eye(1 << (L - site)), np.kron(M, np.eye(1 << (site - 1))))


def dense_swap(L: int, i: int, j: int) -> np.ndarray:
    dim = 1 << L
    P = np.zeros((dim, dim), dtype=complex)
    for s in range(dim):
        bi = (s >> (i - 1)) & 1
        bj = (s >> (j - 1)) & 1
        t = s if bi == bj else s ^ ((1 << (i - 1)) | (1 << (j - 1)))
        P[t, s] = 1.0
    return P


def dense_spin_spin(L: int, i: int, j: int) -> np.ndarray:
    out = np.zeros((1 << L, 1 << L), dtype=complex)
    for M in (SX, SY, SZ):
        out += 0.25 * site_operator(L, i, M) @ site_operator(L, j, M)
    return out


def dense_channel(L: int, p_s: float, p_x: float = 0.0, p_y: float = 0.0, p_z: float = 0.0) -> np.ndarray:
    """One elementary step of the averaged dynamics as a dense doubled-space matrix."""
    dim = 1 << L
    eye = np.eye(dim, dtype=complex)
    total = np.zeros((dim * dim, dim * dim), dtype=complex)
    for bond in range(1, L):
        swap = dense_swap(L, bond, bond + 1)
        p_plus = 0.5 * (eye + swap)
        pumped = site_operator(L, bond, SZ) @ (0.5 * (eye - swap))
        total += (p_s / (L - 1)) * (np.kron(p_plus, p_plus.conj()) + np.kron(pumped, pumped.conj()))
    p_pauli = 1.0 - p_s
    if p_pauli > 0:
        total += (p_pauli / 2.0) * np.eye(dim * dim)
        for axis, p_mu in (("x", p_x), ("y", p_y), ("z", p_z)):
            if p_mu > 0:
                for site in range(1, L + 1):
                    M = site_operator(L, site, PAULI[axis])
                    total += (p_mu / (2.0 * L)) * np.kron(M, M.conj())
    return total


def random_state_vector(rng: np.random.Generator, L: int) -> np.ndarray:
    v = rng.normal(size=1 << L) + 1j * rng.normal(size=1 << L)
    return v / np.linalg.norm(v)


class FixedDraw:
    """Duck-typed stand-in for a Generator whose .random() returns a constant."""

    def __init__(self, u: float):
        self.u = u

    def random(self) -> float:
        return self.u


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)
