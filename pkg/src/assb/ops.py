"""Projective measurements, gates, and measurement-with-feedback primitives.

All operations act on full-space pure states (``basis is None``); charge-sector
bookkeeping is handled by the superoperator machinery instead.  Random numbers
always come from an explicit ``numpy.random.Generator``; each sampling
primitive consumes exactly one uniform draw, so streams are reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import sqrt

import numpy as np

from .errors import NumericalError
from .hilbert import PureState

#: Branch probabilities below this are treated as exactly zero when sampling,
#: so a null vector is never normalized.
ZERO_BRANCH = 1e-14

PAULI_AXES = ("x", "y", "z")


@dataclass(frozen=True)
class MeasurementOutcome:
    """Recorded result of a single projective measurement."""

    sign: int
    probability: float
    feedback_applied: bool = False

    def __post_init__(self):
        if self.sign not in (+1, -1):
            raise ValueError(f"sign must be +1 or -1, got {self.sign}")
        if not -1e-12 <= self.probability <= 1 + 1e-12:
            raise ValueError(f"probability {self.probability} outside [0, 1]")
        if self.feedback_applied and self.sign != -1:
            raise ValueError("feedback is applied only on the -1 outcome")


def _require_full(state: PureState) -> None:
    if state.basis is not None:
        raise ValueError("operation requires a full-space state; use to_full()")


def _check_site(L: int, site: int) -> None:
    if not 1 <= site <= L:
        raise ValueError(f"site {site} out of range 1..{L}")


def _check_bond(L: int, bond: int) -> None:
    if not 1 <= bond <= L - 1:
        raise ValueError(f"bond {bond} out of range 1..{L - 1}")


def _check_sign(sign: int) -> None:
    if sign not in (+1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign}")


def _swapped_indices(L: int, i: int, j: int) -> np.ndarray:
    """Index permutation realizing the two-site SWAP of sites i and j."""
    idx = np.arange(1 << L, dtype=np.int64)
    differ = ((idx >> (i - 1)) ^ (idx >> (j - 1))) & 1
    return idx ^ (differ * ((1 << (i - 1)) | (1 << (j - 1))))


def _apply_swap(amps: np.ndarray, L: int, i: int, j: int) -> np.ndarray:
    return amps[_swapped_indices(L, i, j)]


def _apply_pauli(amps: np.ndarray, L: int, site: int, axis: str) -> np.ndarray:
    idx = np.arange(1 << L, dtype=np.int64)
    bit = (idx >> (site - 1)) & 1
    if axis == "z":
        return amps * (2 * bit - 1)
    flipped = amps[idx ^ (1 << (site - 1))]
    if axis == "x":
        return flipped
    if axis == "y":
        # <down|sy|up> = i, <up|sy|down> = -i with bit 1 = up.
        return np.where(bit == 1, -1j * flipped, 1j * flipped)
    raise ValueError(f"axis must be one of {PAULI_AXES}, got {axis!r}")


def apply_sigma_z(state: PureState, site: int) -> PureState:
    """Phase-flip every amplitude with spin down at ``site``; norm is exact."""
    _require_full(state)
    _check_site(state.L, site)
    return PureState(state.L, _apply_pauli(state.amps, state.L, site, "z"))


def apply_swap_projector(state: PureState, bond: int, sign: int) -> tuple[PureState, float]:
    """Apply (1 +- SWAP)/2 on sites (bond, bond+1).

    Returns the unnormalized projected state and its squared norm (the Born
    probability of that outcome); the caller normalizes.
    """
    _require_full(state)
    _check_bond(state.L, bond)
    _check_sign(sign)
    swapped = _apply_swap(state.amps, state.L, bond, bond + 1)
    new = 0.5 * (state.amps + sign * swapped)
    prob = float(np.vdot(new, new).real)
    return PureState(state.L, new), prob


def apply_pauli_projector(state: PureState, site: int, axis: str, sign: int) -> tuple[PureState, float]:
    """Apply (1 +- sigma^axis)/2 at ``site``; returns (unnormalized state, probability)."""
    _require_full(state)
    _check_site(state.L, site)
    _check_sign(sign)
    rotated = _apply_pauli(state.amps, state.L, site, axis)
    new = 0.5 * (state.amps + sign * rotated)
    prob = float(np.vdot(new, new).real)
    return PureState(state.L, new), prob


def _sample_binary(p_plus: float, p_minus: float, rng: np.random.Generator) -> int:
    """Born-sample +-1; the draw is consumed even for deterministic outcomes."""
    u = rng.random()
    if p_plus < ZERO_BRANCH and p_minus < ZERO_BRANCH:
        raise NumericalError("both measurement branches have vanishing probability")
    if p_minus < ZERO_BRANCH:
        return +1
    if p_plus < ZERO_BRANCH:
        return -1
    return +1 if u < p_plus else -1


def swap_measure_with_feedback(
    state: PureState, bond: int, rng: np.random.Generator
) -> tuple[PureState, MeasurementOutcome]:
    """Measure SWAP on (bond, bond+1); on the -1 outcome apply sigma^z to site ``bond``.

    The feedback maps the measured two-site singlet into the m=0 triplet.
    Input must be normalized; the returned state is normalized.
    """
    plus, p_plus = apply_swap_projector(state, bond, +1)
    minus, p_minus = apply_swap_projector(state, bond, -1)
    sign = _sample_binary(p_plus, p_minus, rng)
    if sign == +1:
        post = PureState(state.L, plus.amps / sqrt(p_plus))
        return post, MeasurementOutcome(+1, p_plus, feedback_applied=False)
    post = apply_sigma_z(PureState(state.L, minus.amps / sqrt(p_minus)), bond)
    return post, MeasurementOutcome(-1, p_minus, feedback_applied=True)


def pauli_measure(
    state: PureState, site: int, axis: str, rng: np.random.Generator
) -> tuple[PureState, MeasurementOutcome]:
    """Born-sampled single-site Pauli measurement; no feedback."""
    plus, p_plus = apply_pauli_projector(state, site, axis, +1)
    minus, p_minus = apply_pauli_projector(state, site, axis, -1)
    sign = _sample_binary(p_plus, p_minus, rng)
    branch, prob = (plus, p_plus) if sign == +1 else (minus, p_minus)
    post = PureState(state.L, branch.amps / sqrt(prob))
    return post, MeasurementOutcome(sign, prob, feedback_applied=False)


def ancilla_cswap_measure(
    state: PureState, bond: int, rng: np.random.Generator
) -> tuple[PureState, MeasurementOutcome]:
    """SWAP measurement realized with an explicit ancilla and a controlled SWAP.

    The ancilla starts in |+>, controls a SWAP of (bond, bond+1), and is then
    measured in the x basis; "even" (+1) corresponds to the |+> result.  The
    ancilla is discarded afterward, so the returned register state matches a
    direct SWAP measurement outcome-by-outcome.  No feedback is applied here.
    """
    _require_full(state)
    _check_bond(state.L, bond)
    n = state.dim
    # (L+1)-qubit vector; the ancilla occupies the top bit, index = a * 2**L + s.
    joint = np.concatenate([state.amps, state.amps]) / sqrt(2.0)
    # Controlled SWAP firing on the ancilla-down branch.
    joint[:n] = joint[:n][_swapped_indices(state.L, bond, bond + 1)]
    sys_plus = (joint[n:] + joint[:n]) / sqrt(2.0)   # <+| on the ancilla
    sys_minus = (joint[n:] - joint[:n]) / sqrt(2.0)  # <-| on the ancilla
    p_plus = float(np.vdot(sys_plus, sys_plus).real)
    p_minus = float(np.vdot(sys_minus, sys_minus).real)
    sign = _sample_binary(p_plus, p_minus, rng)
    branch, prob = (sys_plus, p_plus) if sign == +1 else (sys_minus, p_minus)
    post = PureState(state.L, branch / sqrt(prob))
    return post, MeasurementOutcome(sign, prob, feedback_applied=False)
