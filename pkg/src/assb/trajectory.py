"""Stochastic pure-state trajectories of the measurement-feedback circuit.

One circuit time step is L elementary steps.  Each elementary step draws, in
this fixed order: (1) the branch selector choosing SWAP-with-feedback versus a
single-site Pauli measurement, (2) the location (bond or site), (3) the Born
sample inside the measurement.  Per-trajectory generators are derived from a
master seed with ``numpy.random.SeedSequence(master, spawn_key=(index,))`` so
ensembles are reproducible regardless of scheduling.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np
from joblib import Parallel, delayed

from . import ops
from .hilbert import PureState, total_sz

PROBABILITY_ATOL = 1e-12

OBSERVABLE_NAMES = (
    "spin_spin",
    "susceptibility",
    "xy_correlation",
    "half_chain_entropy",
    "total_sz",
)

_PAIR_OBSERVABLES = ("spin_spin", "xy_correlation")


@dataclass(frozen=True)
class ModelParams:
    """Circuit mix: SWAP-with-feedback rate p_s and Pauli rates p_x, p_y, p_z."""

    L: int
    p_s: float = 1.0
    p_x: float = 0.0
    p_y: float = 0.0
    p_z: float = 0.0

    def __post_init__(self):
        if self.L < 2:
            raise ValueError("need at least two sites")
        for name in ("p_s", "p_x", "p_y", "p_z"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name}={p} outside [0, 1]")
        total = self.p_s + self.p_x + self.p_y + self.p_z
        if abs(total - 1.0) > PROBABILITY_ATOL:
            raise ValueError(f"probabilities sum to {total}, expected 1")

    @property
    def conserves_charge(self) -> bool:
        """True when total S^z is conserved (no x or y measurements)."""
        return self.p_x == 0.0 and self.p_y == 0.0


@dataclass(frozen=True)
class ObservableSpec:
    """An observable name, its site arguments, and a sampling period in circuit steps."""

    name: str
    i: int | None = None
    j: int | None = None
    period: int = 1

    def __post_init__(self):
        if self.name not in OBSERVABLE_NAMES:
            raise ValueError(f"unknown observable {self.name!r}")
        needs_pair = self.name in _PAIR_OBSERVABLES
        if needs_pair and (self.i is None or self.j is None):
            raise ValueError(f"{self.name} requires sites i and j")
        if not needs_pair and (self.i is not None or self.j is not None):
            raise ValueError(f"{self.name} takes no site arguments")
        if self.period < 1:
            raise ValueError("period must be >= 1")

    @property
    def label(self) -> str:
        if self.name in _PAIR_OBSERVABLES:
            return f"{self.name}({self.i},{self.j})"
        return self.name

    def value(self, state: PureState) -> float:
        if self.name == "spin_spin":
            return spin_spin(state, self.i, self.j)
        if self.name == "susceptibility":
            return susceptibility(state)
        if self.name == "xy_correlation":
            return xy_correlation(state, self.i, self.j)
        if self.name == "half_chain_entropy":
            return half_chain_entropy(state)
        return total_sz(state)


@dataclass(frozen=True)
class TrajectoryRecord:
    """One trajectory: its seed, parameters, sampled series, and a state checksum."""

    seed: int
    params: ModelParams
    series: tuple = field(repr=False)  # ordered (time, label, value) triples
    final_state_digest: str = ""

    def times(self, label: str) -> np.ndarray:
        return np.array([t for t, name, _ in self.series if name == label], dtype=np.int64)

    def values(self, label: str) -> np.ndarray:
        return np.array([v for _, name, v in self.series if name == label], dtype=np.float64)

    def schedule(self) -> tuple:
        return tuple((t, name) for t, name, _ in self.series)


# ---------------------------------------------------------------------------
# Pure-state observables


def spin_spin(state: PureState, i: int, j: int) -> float:
    """<S_i . S_j> computed from the two-site SWAP expectation, (2<SWAP> - 1)/4."""
    ops._require_full(state)
    if i == j:
        raise ValueError("sites must differ")
    ops._check_site(state.L, i)
    ops._check_site(state.L, j)
    swapped = ops._apply_swap(state.amps, state.L, i, j)
    return float((2.0 * np.vdot(state.amps, swapped).real - 1.0) / 4.0)


def susceptibility(state: PureState) -> float:
    """Ferromagnetic susceptibility (1/L) sum_ij <S_i . S_j>, diagonal included."""
    ops._require_full(state)
    L = state.L
    off_diag = 0.0
    for i in range(1, L + 1):
        for j in range(i + 1, L + 1):
            off_diag += 2.0 * spin_spin(state, i, j)
    return (off_diag + 0.75 * L) / L


def xy_correlation(state: PureState, i: int, j: int) -> float:
    """<S_i^x S_j^x + S_i^y S_j^y>: a spin flip-flop acting on anti-aligned pairs."""
    ops._require_full(state)
    if i == j:
        raise ValueError("sites must differ")
    ops._check_site(state.L, i)
    ops._check_site(state.L, j)
    idx = np.arange(state.dim, dtype=np.int64)
    anti = (((idx >> (i - 1)) ^ (idx >> (j - 1))) & 1) == 1
    mask = (1 << (i - 1)) | (1 << (j - 1))
    flipped = state.amps[idx ^ mask]
    return float(0.5 * np.vdot(state.amps[anti], flipped[anti]).real)


def half_chain_entropy(state: PureState) -> float:
    """Von Neumann entropy (nats) of the first L/2 sites via Schmidt decomposition."""
    ops._require_full(state)
    if state.L % 2 != 0:
        raise ValueError("half-chain bipartition needs even L")
    half = state.L // 2
    # Sites 1..L/2 are the low bits, so the fast (last) axis is the A block.
    m = state.amps.reshape(1 << half, 1 << half)
    p = np.linalg.svd(m, compute_uv=False) ** 2
    p = p[p > 1e-18]
    return float(-np.sum(p * np.log(p)))


# ---------------------------------------------------------------------------
# Dynamics


def elementary_step(
    state: PureState, params: ModelParams, rng: np.random.Generator
) -> tuple[PureState, str]:
    """One randomly placed measurement (with feedback for SWAPs); returns an event label."""
    L = params.L
    u = rng.random()
    if u < params.p_s:
        bond = 1 + int(rng.integers(L - 1))
        state, outcome = ops.swap_measure_with_feedback(state, bond, rng)
        return state, f"swap{outcome.sign:+d}@{bond}"
    if u < params.p_s + params.p_x:
        axis = "x"
    elif u < params.p_s + params.p_x + params.p_y:
        axis = "y"
    else:
        axis = "z"
    site = 1 + int(rng.integers(L))
    state, outcome = ops.pauli_measure(state, site, axis, rng)
    return state, f"{axis}{outcome.sign:+d}@{site}"


def _digest(state: PureState) -> str:
    return hashlib.sha256(np.ascontiguousarray(state.amps).tobytes()).hexdigest()


def run_trajectory(
    params: ModelParams,
    initial: PureState,
    steps: int,
    observables: list[ObservableSpec],
    seed: int,
) -> TrajectoryRecord:
    """Run ``steps`` circuit steps (steps * L elementary steps) from ``initial``.

    Observables are sampled after whole circuit steps (and at t=0) whenever the
    step index is a multiple of their period.  Fully deterministic given the
    seed.
    """
    if steps < 0:
        raise ValueError("steps must be >= 0")
    if initial.L != params.L:
        raise ValueError("initial state size does not match params.L")
    rng = np.random.default_rng(seed)
    state = initial.normalized()
    series: list[tuple[int, str, float]] = []

    def sample(t: int) -> None:
        for spec in observables:
            if t % spec.period == 0:
                series.append((t, spec.label, spec.value(state)))

    sample(0)
    for t in range(1, steps + 1):
        for _ in range(params.L):
            state, _label = elementary_step(state, params, rng)
        sample(t)
    return TrajectoryRecord(
        seed=int(seed),
        params=params,
        series=tuple(series),
        final_state_digest=_digest(state),
    )


def trajectory_seeds(master_seed: int, count: int) -> list[int]:
    """Independent 64-bit per-trajectory seeds from a splittable seed tree."""
    return [
        int(np.random.SeedSequence(master_seed, spawn_key=(k,)).generate_state(1, np.uint64)[0])
        for k in range(count)
    ]


def run_ensemble(
    params: ModelParams,
    initial: PureState,
    steps: int,
    observables: list[ObservableSpec],
    n_trajectories: int,
    master_seed: int,
    n_jobs: int = 1,
) -> list[TrajectoryRecord]:
    """Run independent trajectories; results are ordered by trajectory index."""
    seeds = trajectory_seeds(master_seed, n_trajectories)
    if n_jobs == 1:
        return [run_trajectory(params, initial, steps, observables, s) for s in seeds]
    return Parallel(n_jobs=n_jobs)(
        delayed(run_trajectory)(params, initial, steps, observables, s) for s in seeds
    )


def ensemble_average(
    records: list[TrajectoryRecord], label: str
) -> list[tuple[int, float, float]]:
    """Pointwise mean and standard error of one observable across trajectories.

    All records must share parameters and sampling schedule.
    """
    if not records:
        raise ValueError("no records")
    first = records[0]
    for r in records[1:]:
        if r.params != first.params or r.schedule() != first.schedule():
            raise ValueError("records disagree in parameters or sampling schedule")
    times = first.times(label)
    if times.size == 0:
        raise ValueError(f"observable {label!r} was not sampled")
    values = np.stack([r.values(label) for r in records])  # (n_records, n_times)
    mean = values.mean(axis=0)
    if len(records) > 1:
        err = values.std(axis=0, ddof=1) / np.sqrt(len(records))
    else:
        err = np.zeros_like(mean)
    return [(int(t), float(m), float(e)) for t, m, e in zip(times, mean, err)]


def is_saturated(values: np.ndarray, stderrs: np.ndarray | None = None) -> bool:
    """Steady-state heuristic: the last-quarter mean moved by less than one
    standard error relative to the preceding quarter.

    With ``stderrs`` given (ensemble means), the error scale is the typical
    statistical error of a point; otherwise it is estimated from the spread of
    the last-quarter values.
    """
    values = np.asarray(values, dtype=float)
    q = values.size // 4
    if q < 2:
        return False
    last, prev = values[-q:], values[-2 * q : -q]
    if stderrs is not None:
        sigma = float(np.mean(np.asarray(stderrs, dtype=float)[-q:]))
    else:
        sigma = last.std(ddof=1) / np.sqrt(q)
    return bool(abs(last.mean() - prev.mean()) < max(sigma, 1e-15))
