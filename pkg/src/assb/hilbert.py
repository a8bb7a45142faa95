"""Bitstring bases, charge sectors, and reference states for a qubit chain.

Conventions shared by every module: sites are numbered 1..L, site ``i`` lives
on bit ``i - 1`` of the basis-state integer, and bit value 1 means spin up
(``S^z = +1/2``).  States are treated as immutable after construction; no
function in this package mutates amplitude arrays in place.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

#: Cap for dense statevectors (2**24 complex amplitudes).
MAX_QUBITS = 24


def bit_at(bits: int, site: int) -> int:
    """Spin bit at 1-based ``site`` (1 = up)."""
    return (bits >> (site - 1)) & 1


def flip_site(bits: int, site: int) -> int:
    return bits ^ (1 << (site - 1))


def swap_sites(bits: int, i: int, j: int) -> int:
    """Exchange the bits at sites ``i`` and ``j``."""
    bi = (bits >> (i - 1)) & 1
    bj = (bits >> (j - 1)) & 1
    if bi == bj:
        return bits
    return bits ^ ((1 << (i - 1)) | (1 << (j - 1)))


@dataclass(frozen=True, eq=False)
class SectorBasis:
    """Ordered basis of all L-bit strings with exactly N bits set.

    ``states`` is strictly increasing, so the ordinal of a bitstring is
    recovered exactly by binary search.
    """

    L: int
    N: int
    states: np.ndarray = field(repr=False)

    @property
    def size(self) -> int:
        return int(self.states.shape[0])

    @property
    def charge(self) -> float:
        """Total-S^z eigenvalue N - L/2 shared by every member."""
        return self.N - self.L / 2

    def index_of(self, bits: int) -> int:
        k = int(np.searchsorted(self.states, bits))
        if k >= self.size or int(self.states[k]) != int(bits):
            raise KeyError(f"bitstring {bits:#x} is not in the weight-{self.N} sector")
        return k

    def indices_of(self, bits: np.ndarray) -> np.ndarray:
        """Vectorized inverse map; every entry must belong to the sector."""
        idx = np.searchsorted(self.states, bits)
        if np.any(idx >= self.size) or np.any(self.states[np.minimum(idx, self.size - 1)] != bits):
            raise KeyError("bitstring outside this sector")
        return idx

    def same_sector(self, other: "SectorBasis") -> bool:
        return self.L == other.L and self.N == other.N


def sector_basis(L: int, N: int) -> SectorBasis:
    """Enumerate every weight-``N`` bitstring on ``L`` sites in increasing order."""
    if not isinstance(L, (int, np.integer)) or not isinstance(N, (int, np.integer)):
        raise ValueError("L and N must be integers")
    if L < 1 or L > MAX_QUBITS:
        raise ValueError(f"L must be in 1..{MAX_QUBITS}, got {L}")
    if N < 0 or N > L:
        raise ValueError(f"N must be in 0..L={L}, got {N}")
    size = math.comb(L, N)
    states = np.empty(size, dtype=np.int64)
    v = (1 << N) - 1
    for k in range(size):
        states[k] = v
        if k + 1 < size:
            # Gosper's hack: next larger integer with the same popcount.
            u = v & -v
            t = v + u
            v = t | (((v ^ t) // u) >> 2)
    return SectorBasis(L=int(L), N=int(N), states=states)


@dataclass(eq=False)
class PureState:
    """Complex amplitudes over bitstrings, on the full 2**L space or one sector.

    ``basis is None`` means the full computational basis ordered by integer
    value; otherwise amplitudes are indexed by the owning :class:`SectorBasis`.
    Mixing states of different bases in binary operations is an error.
    """

    L: int
    amps: np.ndarray
    basis: SectorBasis | None = None

    def __post_init__(self):
        amps = np.asarray(self.amps, dtype=np.complex128)
        if self.basis is not None:
            if self.basis.L != self.L:
                raise ValueError("basis qubit count does not match state")
            expected = self.basis.size
        else:
            if self.L < 1 or self.L > MAX_QUBITS:
                raise ValueError(f"L must be in 1..{MAX_QUBITS}, got {self.L}")
            expected = 1 << self.L
        if amps.shape != (expected,):
            raise ValueError(f"expected {expected} amplitudes, got {amps.shape}")
        self.amps = amps

    @property
    def dim(self) -> int:
        return self.amps.shape[0]

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def normalized(self) -> "PureState":
        n = self.norm()
        if n < 1e-14:
            raise ValueError("cannot normalize a null state")
        return PureState(self.L, self.amps / n, self.basis)

    def overlap(self, other: "PureState") -> complex:
        """Inner product <self|other>; both states must share a basis."""
        self._check_compatible(other)
        return complex(np.vdot(self.amps, other.amps))

    def fidelity(self, other: "PureState") -> float:
        """|<self|other>|**2 for normalized inputs; phase insensitive."""
        return abs(self.overlap(other)) ** 2

    def to_full(self) -> "PureState":
        """Embed a sector-restricted state into the full 2**L space."""
        if self.basis is None:
            return self
        full = np.zeros(1 << self.L, dtype=np.complex128)
        full[self.basis.states] = self.amps
        return PureState(self.L, full)

    def _check_compatible(self, other: "PureState") -> None:
        if self.L != other.L:
            raise ValueError("states live on different chain lengths")
        a, b = self.basis, other.basis
        if (a is None) != (b is None) or (a is not None and b is not None and not a.same_sector(b)):
            raise ValueError("states use different bases; convert with to_full() first")


def basis_state(L: int, bits: int | str) -> PureState:
    """Computational product state.

    ``bits`` may be the integer index or a string of '0'/'1' characters read
    left to right as sites 1..L ('1' = up), e.g. ``"10"`` is up-down.
    """
    if isinstance(bits, str):
        if len(bits) != L or set(bits) - {"0", "1"}:
            raise ValueError(f"need a string of L={L} characters from '01', got {bits!r}")
        index = sum(1 << k for k, c in enumerate(bits) if c == "1")
    else:
        index = int(bits)
        if not 0 <= index < (1 << L):
            raise ValueError(f"index {index} out of range for L={L}")
    amps = np.zeros(1 << L, dtype=np.complex128)
    amps[index] = 1.0
    return PureState(L, amps)


def neel_state(L: int) -> PureState:
    """Alternating up-down product state at half filling; requires even L."""
    if L % 2 != 0:
        raise ValueError(f"alternating half-filled state needs even L, got {L}")
    index = sum(1 << k for k in range(0, L, 2))  # odd sites up
    return basis_state(L, index)


def dicke_state(L: int, N: int, basis: SectorBasis | None = None) -> PureState:
    """Uniform superposition of all weight-``N`` bitstrings (maximal total spin).

    With ``basis`` given, returns the sector-restricted representation on that
    basis; otherwise a full-space statevector.
    """
    if basis is not None:
        if basis.L != L or basis.N != N:
            raise ValueError("provided basis does not match (L, N)")
        amps = np.full(basis.size, 1.0 / math.sqrt(basis.size), dtype=np.complex128)
        return PureState(L, amps, basis)
    sector = sector_basis(L, N)
    amps = np.zeros(1 << L, dtype=np.complex128)
    amps[sector.states] = 1.0 / math.sqrt(sector.size)
    return PureState(L, amps)


def total_sz(state: PureState) -> float:
    """Expectation of the total S^z (eigenvalues +-1/2 per site)."""
    if state.basis is not None:
        return state.basis.charge
    probs = np.abs(state.amps) ** 2
    idx = np.arange(state.dim, dtype=np.int64)
    n_up = np.zeros(state.dim, dtype=np.float64)
    for b in range(state.L):
        n_up += (idx >> b) & 1
    return float(np.dot(probs, n_up) - 0.5 * state.L * probs.sum())
