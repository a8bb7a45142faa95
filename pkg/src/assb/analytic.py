"""Closed-form steady-state values and entanglement combinatorics.

These are independent of the simulators and serve as oracles in tests and as
overlay curves for experiment outputs.  All entropies are in nats; all
binomials go through log-gamma so sizes up to L ~ 10**4 are safe.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import exp, log, pi, sqrt

import numpy as np
import scipy.sparse as sp
from scipy.special import gammaln

from .channel import identity_operator, swap_operator


def steady_chi(L: int) -> float:
    """Ferromagnetic susceptibility of the maximal-spin steady states, (L+2)/4."""
    if L < 1:
        raise ValueError("L must be >= 1")
    return (L + 2) / 4.0


def steady_zz(L: int, Q: float) -> float:
    """<S_i^z S_j^z> (i != j) in the charge-Q steady state: (4Q^2 - L) / (4L(L-1)).

    Holds for the z-dephased dynamics at any dephasing strength; Q may be
    half-integral for odd L.
    """
    if L < 2:
        raise ValueError("L must be >= 2")
    if abs(Q) > L / 2:
        raise ValueError(f"|Q| must be <= L/2, got Q={Q}")
    return (4.0 * Q * Q - L) / (4.0 * L * (L - 1))


def _log_binomial(n, k):
    n = np.asarray(n, dtype=float)
    k = np.asarray(k, dtype=float)
    return gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1)


@dataclass(frozen=True)
class EntanglementSpectrum:
    """Nonzero reduced-density-matrix spectrum of the uniform weight-N state.

    One eigenvalue p_K per number K of up spins in the A block:
    p_K = C(|A|, K) C(|B|, N-K) / C(L, N), hypergeometric in K.
    """

    L: int
    N: int
    A_size: int
    probabilities: np.ndarray = field(repr=False)  # index K = 0 .. min(A_size, N)

    @property
    def k_values(self) -> np.ndarray:
        return np.arange(self.probabilities.size)


def entanglement_spectrum(L: int, N: int, A_size: int) -> EntanglementSpectrum:
    if not 0 <= N <= L:
        raise ValueError(f"N must be in 0..L={L}, got {N}")
    if not 1 <= A_size <= L - 1:
        raise ValueError(f"A_size must be in 1..L-1={L - 1}, got {A_size}")
    B = L - A_size
    K = np.arange(0, min(A_size, N) + 1)
    valid = (N - K) <= B
    logp = np.full(K.size, -np.inf)
    kv = K[valid]
    logp[valid] = (
        _log_binomial(A_size, kv) + _log_binomial(B, N - kv) - _log_binomial(L, N)
    )
    return EntanglementSpectrum(L=L, N=N, A_size=A_size, probabilities=np.exp(logp))


def exact_entropy(L: int, N: int, A_size: int) -> float:
    """Entanglement entropy (nats) of A in the uniform weight-N state: -sum p_K ln p_K."""
    p = entanglement_spectrum(L, N, A_size).probabilities
    p = p[p > 0]
    return float(-np.sum(p * np.log(p)))


def asymptotic_entropy(L: int, a: float, n: float) -> float:
    """Large-L entanglement law (1/2) ln L + (1/2)(ln(2 pi a b n (1-n)) + 1), b = 1-a.

    ``a`` is the A-block fraction and ``n`` the up-spin filling; both must be
    strictly inside (0, 1).
    """
    if not 0.0 < a < 1.0:
        raise ValueError(f"a must be inside (0, 1), got {a}")
    if not 0.0 < n < 1.0:
        raise ValueError(f"n must be inside (0, 1), got {n}")
    if L < 1:
        raise ValueError("L must be >= 1")
    b = 1.0 - a
    return 0.5 * log(L) + 0.5 * (log(2.0 * pi * a * b * n * (1.0 - n)) + 1.0)


def _f(a: float, b: float, n: float, k: float) -> float:
    def xlx(x: float) -> float:
        return x * log(x)

    return (
        xlx(a) + xlx(b) + xlx(n) + xlx(1.0 - n)
        - xlx(k) - xlx(a - k) - xlx(n - k) - xlx(b - n + k)
    )


def _g(a: float, b: float, n: float, k: float) -> float:
    return (
        log(a) + log(b) + log(n) + log(1.0 - n)
        - log(k) - log(a - k) - log(n - k) - log(b - n + k)
    )


def stirling_sandwich(L: int, N: int, A_size: int, K: int) -> tuple[float, float]:
    """Rigorous bounds on the spectral weight p_K from factorial inequalities.

    Uses sqrt(2 pi x)(x/e)^x e^{1/(12x+1)} < x! < sqrt(2 pi x)(x/e)^x e^{1/(12x)}
    termwise, valid when every factorial argument is at least 1; boundary K
    values violating that are rejected.  Returns (lower, upper) with
    lower < p_K < upper.
    """
    B = L - A_size
    for name, value in (("K", K), ("A_size - K", A_size - K), ("N - K", N - K), ("B - N + K", B - N + K)):
        if value < 1:
            raise ValueError(f"factorial argument {name} = {value} must be >= 1; use exact binomials at the boundary")
    a = A_size / L
    b = B / L
    n = N / L
    k = K / L
    base = L * _f(a, b, n, k) + 0.5 * _g(a, b, n, k)
    r1 = (
        1.0 / (1.0 + 12.0 * a * L)
        + 1.0 / (1.0 + 12.0 * b * L)
        + 1.0 / (1.0 + 12.0 * n * L)
        + 1.0 / (1.0 + 12.0 * (1.0 - n) * L)
        - (1.0 / (12.0 * L)) * (1.0 / k + 1.0 / (a - k) + 1.0 / (n - k) + 1.0 / (b - n + k) + 1.0)
    )
    r2 = (
        (1.0 / (12.0 * L)) * (1.0 / a + 1.0 / b + 1.0 / n + 1.0 / (1.0 - n))
        - (
            1.0 / (1.0 + 12.0 * k * L)
            + 1.0 / (1.0 + 12.0 * (a - k) * L)
            + 1.0 / (1.0 + 12.0 * (n - k) * L)
            + 1.0 / (1.0 + 12.0 * (b - n + k) * L)
            + 1.0 / (1.0 + 12.0 * L)
        )
    )
    scale = sqrt(1.0 / (2.0 * pi * L))
    return scale * exp(base + r1), scale * exp(base + r2)


def projected_channel_matrix(L: int, p_z: float) -> sp.csr_matrix:
    """Action of the z-dephased channel on the repetition-code rows <<b,b|.

    On that subspace a doubled SWAP acts exactly like a single-copy SWAP, so
    the matrix is (1+p_z)/2 * I + (1-p_z)/(2(L-1)) * sum_bonds SWAP, indexed by
    computational bitstrings.  Its unit eigenvectors are uniform over each
    fixed-weight class.
    """
    if L < 2 or L > 12:
        raise ValueError("supported for 2 <= L <= 12")
    if not 0.0 <= p_z <= 1.0:
        raise ValueError(f"p_z must be in [0, 1], got {p_z}")
    total = ((1.0 + p_z) / 2.0) * identity_operator(L)
    w = (1.0 - p_z) / (2.0 * (L - 1))
    for bond in range(1, L):
        total = total + w * swap_operator(L, bond)
    return total.tocsr()
