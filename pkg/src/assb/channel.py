"""Exact superoperator of the elementary-step dynamics in the doubled space.

A density matrix rho is vectorized row-major, |rho>> = sum_ij rho_ij |i>|j>,
so each Kraus operator K acts as kron(K, K.conj()).  With no x or y
measurements every Kraus operator conserves total S^z, and the dynamics can be
restricted to one charge sector where both copies carry the same weight N;
that block has dimension binomial(L, N)**2 instead of 4**L.

Spectral quantities use dense eigendecomposition for small blocks and ARPACK
for large sparse ones.  Because the superoperator is not normal, the reported
gap bounds the asymptotic decay rate but transient (pseudospectral) effects
can delay relaxation; no pseudospectrum analysis is attempted here.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import ConvergenceError, ResourceLimitError
from .hilbert import SectorBasis, sector_basis
from .trajectory import ModelParams

#: |eigenvalue| >= 1 - UNIT_CIRCLE_TOL counts as a steady (unit-circle) mode.
UNIT_CIRCLE_TOL = 1e-9
#: Dense eigendecomposition is used up to this doubled dimension.
DENSE_EIG_MAX = 5000
DENSE_STEADY_MAX = 2048
#: Full-space (no sector) builds are refused above this qubit count.
FULL_SPACE_MAX_QUBITS = 9
#: Hard cap on the doubled dimension for any build.
DOUBLED_DIM_MAX = 1_500_000


def _basis_states(L: int, basis: SectorBasis | None) -> np.ndarray:
    if basis is None:
        return np.arange(1 << L, dtype=np.int64)
    return basis.states


def _lookup(states: np.ndarray, targets: np.ndarray, basis: SectorBasis | None) -> np.ndarray:
    if basis is None:
        return targets
    return basis.indices_of(targets)


# ---------------------------------------------------------------------------
# Sparse operators on the single-copy space (full or sector basis)


def identity_operator(L: int, basis: SectorBasis | None = None) -> sp.csr_matrix:
    d = (1 << L) if basis is None else basis.size
    return sp.identity(d, dtype=np.complex128, format="csr")


def swap_operator(L: int, i: int, j: int | None = None, basis: SectorBasis | None = None) -> sp.csr_matrix:
    """Two-site SWAP of sites (i, j), defaulting to the bond (i, i+1)."""
    if j is None:
        j = i + 1
    if i == j or not (1 <= i <= L) or not (1 <= j <= L):
        raise ValueError(f"invalid site pair ({i}, {j}) for L={L}")
    src = _basis_states(L, basis)
    differ = (((src >> (i - 1)) ^ (src >> (j - 1))) & 1).astype(np.int64)
    dest = src ^ (differ * ((1 << (i - 1)) | (1 << (j - 1))))
    rows = _lookup(src, dest, basis)
    cols = np.arange(src.size)
    data = np.ones(src.size, dtype=np.complex128)
    return sp.csr_matrix((data, (rows, cols)), shape=(src.size, src.size))


def swap_projector_operator(L: int, bond: int, sign: int, basis: SectorBasis | None = None) -> sp.csr_matrix:
    if sign not in (+1, -1):
        raise ValueError("sign must be +1 or -1")
    if not 1 <= bond <= L - 1:
        raise ValueError(f"bond {bond} out of range 1..{L - 1}")
    return 0.5 * (identity_operator(L, basis) + sign * swap_operator(L, bond, basis=basis))


def sigma_operator(L: int, site: int, axis: str, basis: SectorBasis | None = None) -> sp.csr_matrix:
    """Single-site Pauli matrix; x and y exist only on the full space."""
    if not 1 <= site <= L:
        raise ValueError(f"site {site} out of range 1..{L}")
    src = _basis_states(L, basis)
    n = src.size
    cols = np.arange(n)
    bit = ((src >> (site - 1)) & 1).astype(np.int64)
    if axis == "z":
        return sp.csr_matrix(((2 * bit - 1).astype(np.complex128), (cols, cols)), shape=(n, n))
    if basis is not None:
        raise ValueError(f"sigma^{axis} changes the charge; no sector representation")
    dest = src ^ (1 << (site - 1))
    if axis == "x":
        data = np.ones(n, dtype=np.complex128)
    elif axis == "y":
        # Column s carries <flip(s)|sy|s>: i for spin up at the site, -i for down.
        data = np.where(bit == 1, 1j, -1j).astype(np.complex128)
    else:
        raise ValueError(f"axis must be x, y, or z, got {axis!r}")
    return sp.csr_matrix((data, (dest, cols)), shape=(n, n))


def spin_spin_operator(L: int, i: int, j: int, basis: SectorBasis | None = None) -> sp.csr_matrix:
    """S_i . S_j = (2 SWAP_ij - 1)/4."""
    return 0.25 * (2.0 * swap_operator(L, i, j, basis) - identity_operator(L, basis))


def zz_operator(L: int, i: int, j: int, basis: SectorBasis | None = None) -> sp.csr_matrix:
    if i == j:
        raise ValueError("sites must differ")
    src = _basis_states(L, basis)
    zi = 2 * ((src >> (i - 1)) & 1) - 1
    zj = 2 * ((src >> (j - 1)) & 1) - 1
    cols = np.arange(src.size)
    return sp.csr_matrix(
        ((0.25 * zi * zj).astype(np.complex128), (cols, cols)), shape=(src.size, src.size)
    )


def xy_operator(L: int, i: int, j: int, basis: SectorBasis | None = None) -> sp.csr_matrix:
    """S_i^x S_j^x + S_i^y S_j^y: weight-preserving flip-flop between sites i and j."""
    if i == j:
        raise ValueError("sites must differ")
    src = _basis_states(L, basis)
    anti = (((src >> (i - 1)) ^ (src >> (j - 1))) & 1) == 1
    src_anti = src[anti]
    dest = src_anti ^ ((1 << (i - 1)) | (1 << (j - 1)))
    rows = _lookup(src, dest, basis)
    cols = np.flatnonzero(anti)
    data = np.full(cols.size, 0.5, dtype=np.complex128)
    return sp.csr_matrix((data, (rows, cols)), shape=(src.size, src.size))


def susceptibility_operator(L: int, basis: SectorBasis | None = None) -> sp.csr_matrix:
    """Matrix form of (1/L) sum_ij S_i . S_j including the 3L/4 diagonal part."""
    total = 0.75 * L * identity_operator(L, basis)
    for i in range(1, L + 1):
        for j in range(i + 1, L + 1):
            total = total + 2.0 * spin_spin_operator(L, i, j, basis)
    return (total / L).tocsr()


# ---------------------------------------------------------------------------
# Doubled-space objects


@dataclass(eq=False)
class DoubledVector:
    """Vectorized operator |rho>> with row-major entries rho_ij.

    ``basis is None`` means the full 4**L doubled space; otherwise both copies
    are restricted to the same weight-N sector.
    """

    L: int
    data: np.ndarray = field(repr=False)
    basis: SectorBasis | None = None

    def __post_init__(self):
        d = self.dim_single
        data = np.asarray(self.data, dtype=np.complex128)
        if data.shape != (d * d,):
            raise ValueError(f"expected {d * d} entries, got {data.shape}")
        self.data = data

    @property
    def dim_single(self) -> int:
        return (1 << self.L) if self.basis is None else self.basis.size

    def matrix(self) -> np.ndarray:
        d = self.dim_single
        return self.data.reshape(d, d)

    def trace(self) -> complex:
        d = self.dim_single
        return complex(self.data[:: d + 1].sum())

    def copy_swapped(self) -> np.ndarray:
        """Entries with the two copies exchanged (the transpose in matrix form)."""
        return self.matrix().T.reshape(-1)

    def hermiticity_defect(self) -> float:
        """Max deviation from |rho^dag>> = (T|rho>>)^*; zero for physical states."""
        return float(np.max(np.abs(self.data - self.copy_swapped().conj())))

    def normalized(self) -> "DoubledVector":
        tr = self.trace()
        if abs(tr) < 1e-14:
            raise ValueError("cannot trace-normalize a traceless operator")
        return DoubledVector(self.L, self.data / tr, self.basis)


def vectorize(rho: np.ndarray, L: int | None = None, basis: SectorBasis | None = None) -> DoubledVector:
    """Row-major vectorization of a density matrix on the full or sector basis."""
    rho = np.asarray(rho, dtype=np.complex128)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"need a square matrix, got shape {rho.shape}")
    d = rho.shape[0]
    if basis is not None:
        if d != basis.size:
            raise ValueError("matrix dimension does not match sector size")
        L = basis.L
    else:
        if L is None:
            L = d.bit_length() - 1
        if (1 << L) != d:
            raise ValueError(f"dimension {d} is not 2**L")
    return DoubledVector(L, rho.reshape(-1), basis)


def unvectorize(dvec: DoubledVector) -> np.ndarray:
    return dvec.matrix().copy()


def trace_vector(dim_single: int) -> np.ndarray:
    """<<1| as a dense vector: ones on the doubled-space diagonal positions."""
    v = np.zeros(dim_single * dim_single, dtype=np.complex128)
    v[:: dim_single + 1] = 1.0
    return v


@dataclass(eq=False)
class Superoperator:
    """One elementary time step of the averaged dynamics as a sparse matrix."""

    L: int
    params: ModelParams
    basis: SectorBasis | None
    matrix: sp.csr_matrix = field(repr=False)

    @property
    def dim_single(self) -> int:
        return (1 << self.L) if self.basis is None else self.basis.size

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def _doubled(K: sp.csr_matrix) -> sp.csr_matrix:
    return sp.kron(K, K.conj(), format="csr")


def build_superoperator(params: ModelParams, n_up: int | None = None) -> Superoperator:
    """Assemble the elementary-step channel matrix.

    The SWAP part averages (P+ rho P+) + (sz P- rho P- sz) over the L-1 bonds
    with weight p_s; each Pauli axis contributes (rho + sigma rho sigma)/2 at a
    random site with weight p_mu.  With ``n_up`` given (requires p_x = p_y = 0)
    the matrix is built directly on the charge sector where both copies have
    ``n_up`` up spins.
    """
    L = params.L
    if n_up is not None:
        if params.p_x > 0 or params.p_y > 0:
            raise ValueError("charge sectors exist only when p_x = p_y = 0")
        basis = sector_basis(L, n_up)
        d = basis.size
    else:
        if L > FULL_SPACE_MAX_QUBITS:
            raise ResourceLimitError(
                f"full doubled space needs L <= {FULL_SPACE_MAX_QUBITS}; "
                f"use a charge sector or a smaller chain (got L={L})"
            )
        basis = None
        d = 1 << L
    if d * d > DOUBLED_DIM_MAX:
        raise ResourceLimitError(f"doubled dimension {d * d} exceeds budget {DOUBLED_DIM_MAX}")

    terms: list[sp.csr_matrix] = []
    if params.p_s > 0:
        w = params.p_s / (L - 1)
        for bond in range(1, L):
            p_plus = swap_projector_operator(L, bond, +1, basis)
            pumped = sigma_operator(L, bond, "z", basis) @ swap_projector_operator(L, bond, -1, basis)
            terms.append(w * (_doubled(p_plus) + _doubled(pumped)))
    p_pauli = 1.0 - params.p_s
    if p_pauli > 0:
        terms.append((p_pauli / 2.0) * sp.identity(d * d, dtype=np.complex128, format="csr"))
        for axis, p_mu in (("x", params.p_x), ("y", params.p_y), ("z", params.p_z)):
            if p_mu == 0:
                continue
            w = p_mu / (2.0 * L)
            for site in range(1, L + 1):
                terms.append(w * _doubled(sigma_operator(L, site, axis, basis)))
    matrix = terms[0]
    for t in terms[1:]:
        matrix = matrix + t
    matrix = matrix.tocsr()
    # Every Kraus pair K (x) K* here has real entries; store as real for speed.
    if np.abs(matrix.data.imag).max(initial=0.0) < 1e-15:
        matrix = sp.csr_matrix((matrix.data.real, matrix.indices, matrix.indptr), shape=matrix.shape)
    return Superoperator(L=L, params=params, basis=basis, matrix=matrix)


def evolve(S: Superoperator, rho: DoubledVector, steps: int) -> DoubledVector:
    """Apply ``steps`` elementary channel steps to a vectorized operator."""
    data = rho.data
    for _ in range(steps):
        data = S.matrix @ data
    return DoubledVector(rho.L, np.asarray(data, dtype=np.complex128), rho.basis)


# ---------------------------------------------------------------------------
# Steady states and spectra


def _residual(S: Superoperator, data: np.ndarray) -> float:
    return float(np.abs(S.matrix @ data - data).sum())


def _as_state(S: Superoperator, vec: np.ndarray) -> np.ndarray | None:
    """Hermitize and trace-normalize an eigenvector candidate; None if traceless."""
    d = S.dim_single
    m = vec.reshape(d, d)
    m = 0.5 * (m + m.conj().T)
    tr = m.trace()
    if abs(tr) < 1e-10 * max(1.0, float(np.abs(m).max())):
        return None
    return (m / tr).reshape(-1)


def steady_state(S: Superoperator, atol: float = 1e-10, max_power_iter: int = 200_000) -> DoubledVector:
    """Fixed point of the channel, trace-normalized, with residual below ``atol``.

    Small blocks use a dense eigendecomposition; large ones use ARPACK, falling
    back to power iteration from the maximally mixed state (which converges to
    a genuine density matrix even when the fixed space is degenerate).
    """
    candidates: list[np.ndarray] = []
    if S.dim <= DENSE_STEADY_MAX:
        w, V = np.linalg.eig(S.matrix.toarray())
        near_one = np.flatnonzero(np.abs(w - 1.0) < 1e-6)
        order = near_one[np.argsort(np.abs(w[near_one] - 1.0))]
        candidates.extend(V[:, k] for k in order[:4])
    else:
        try:
            w, V = spla.eigs(S.matrix, k=min(4, S.dim - 2), which="LM", maxiter=50 * S.dim)
            order = np.argsort(np.abs(w - 1.0))
            candidates.extend(V[:, k] for k in order[:2])
        except spla.ArpackError:
            pass
    for vec in candidates:
        state = _as_state(S, np.asarray(vec, dtype=np.complex128))
        if state is not None and _residual(S, state) < atol:
            return DoubledVector(S.L, state, S.basis)

    # Power iteration from the maximally mixed state of the block.
    data = trace_vector(S.dim_single) / S.dim_single
    res = float("inf")
    check_every = 100
    for it in range(0, max_power_iter, check_every):
        for _ in range(check_every):
            data = S.matrix @ data
        data = np.asarray(data, dtype=np.complex128)
        d = S.dim_single
        tr = data[:: d + 1].sum()
        data = data / tr
        res = _residual(S, data)
        if res < atol:
            state = _as_state(S, data)
            return DoubledVector(S.L, state, S.basis)
    raise ConvergenceError(
        f"steady state not converged after {max_power_iter} iterations", residual=res
    )


@dataclass(frozen=True)
class GapResult:
    """Spectral gap of one elementary channel step.

    ``gap`` is 1 - |lambda_2| for the elementary step; ``gap_circuit`` is
    1 - |lambda_2|**L, the equivalent for one circuit step of L elementary
    steps (both come from the same eigenvector).  ``n_steady`` counts
    unit-circle modes.
    """

    gap: float
    gap_circuit: float
    lambda2: complex
    n_steady: int


def spectral_gap(S: Superoperator, expected_steady: int = 1, k: int = 8) -> GapResult:
    """Distance of the subleading spectrum from the unit circle.

    For dimensions above the dense threshold only the ``k`` largest-magnitude
    eigenvalues are computed (ARPACK), enlarging ``k`` until a decaying mode is
    seen.  A steady-space dimension different from ``expected_steady`` is
    reported as a warning, not an error.
    """
    if S.dim <= DENSE_EIG_MAX:
        w = np.linalg.eigvals(S.matrix.toarray())
    else:
        kk = max(k, expected_steady + 2)
        while True:
            w = spla.eigs(
                S.matrix,
                k=min(kk, S.dim - 2),
                which="LM",
                return_eigenvectors=False,
                maxiter=100 * S.dim,
            )
            if np.any(np.abs(w) < 1.0 - UNIT_CIRCLE_TOL) or kk >= 128:
                break
            kk *= 2
    mags = np.abs(w)
    steady = mags >= 1.0 - UNIT_CIRCLE_TOL
    n_steady = int(steady.sum())
    if n_steady != expected_steady:
        warnings.warn(
            f"found {n_steady} unit-circle modes, expected {expected_steady}",
            stacklevel=2,
        )
    decaying = w[~steady]
    if decaying.size == 0:
        raise ConvergenceError("no decaying mode found below the unit circle")
    lam2 = complex(decaying[np.argmax(np.abs(decaying))])
    gap = 1.0 - abs(lam2)
    gap_circuit = 1.0 - abs(lam2) ** S.L
    return GapResult(gap=gap, gap_circuit=gap_circuit, lambda2=lam2, n_steady=n_steady)


def channel_expectation(rho: DoubledVector, O, imag_tol: float = 1e-9) -> float:
    """Tr[O rho] evaluated as <<O^dag|rho>> in the doubled space."""
    if sp.issparse(O):
        O = O.toarray()
    O = np.asarray(O, dtype=np.complex128)
    d = rho.dim_single
    if O.shape != (d, d):
        raise ValueError(f"operator shape {O.shape} does not match state dimension {d}")
    val = complex(np.vdot(O.conj().T.reshape(-1), rho.data))
    if abs(val.imag) > imag_tol:
        raise ValueError(f"expectation has imaginary part {val.imag:.3e}; operator not Hermitian?")
    return float(val.real)


def purity(rho: DoubledVector) -> float:
    """Tr[rho^2] = <<rho|rho>> for a trace-normalized state."""
    tr = rho.trace()
    if abs(tr - 1.0) > 1e-8:
        raise ValueError(f"state is not trace-normalized (trace {tr})")
    return float(np.vdot(rho.data, rho.data).real)


def gap_exponent_fit(pairs) -> tuple[float, float]:
    """Least-squares exponent z of gap ~ L**(-z) from (L, gap) pairs.

    Returns (z, standard error of z from the fit residuals).
    """
    pairs = list(pairs)
    if len(pairs) < 3:
        raise ValueError("need at least 3 points to fit an exponent")
    L = np.array([p[0] for p in pairs], dtype=float)
    gap = np.array([p[1] for p in pairs], dtype=float)
    if np.any(gap <= 0):
        raise ValueError("all gaps must be positive")
    x = np.log(L)
    y = np.log(gap)
    n = x.size
    xbar = x.mean()
    sxx = np.sum((x - xbar) ** 2)
    slope = np.sum((x - xbar) * (y - y.mean())) / sxx
    intercept = y.mean() - slope * xbar
    ssr = np.sum((y - slope * x - intercept) ** 2)
    stderr = np.sqrt(ssr / (n - 2) / sxx) if n > 2 else 0.0
    return float(-slope), float(stderr)
