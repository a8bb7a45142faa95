"""Experiment runner: configs, presets, and figure-ready CSV/JSON tables.

Configs are flat ``key = value`` text (JSON is accepted as an alternative);
every output file starts with a header carrying the config hash, the seed, and
the tool version, and is byte-identical across reruns unless ``--stamp`` adds
a timestamp.  Exit codes: 0 success, 1 numerical failure, 2 config error,
3 resource budget exceeded.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import re
import sys
from dataclasses import dataclass, field, fields

import numpy as np
from joblib import Parallel, delayed

from . import __version__, analytic, channel, ops, scaling, trajectory
from .errors import ConfigError, NumericalError, ResourceLimitError
from .hilbert import PureState, basis_state, dicke_state, neel_state
from .trajectory import ModelParams, ObservableSpec

KINDS = ("trajectory", "channel-steady", "channel-gap", "entanglement-exact", "collapse", "validate")
PERTURBATION_AXES = ("p_z", "p_xy")
COLLAPSE_OBSERVABLES = ("purity", "xy_correlation", "spin_spin")

EXIT_OK = 0
EXIT_NUMERICAL = 1
EXIT_CONFIG = 2
EXIT_RESOURCE = 3


# ---------------------------------------------------------------------------
# Configuration


@dataclass
class ExperimentConfig:
    kind: str
    l_list: list[int] = field(default_factory=list)
    p_s: float = 1.0
    p_x: float = 0.0
    p_y: float = 0.0
    p_z: float = 0.0
    q: float | None = None
    n_up: int | None = None
    initial: str = "neel"
    steps: str = "0"
    trajectories: int = 100
    observables: str = "susceptibility"
    observables_period: int = 1
    p_grid: list[float] = field(default_factory=list)
    perturbation: str = "p_z"
    observable: str = "purity"
    scale_correction: bool = False
    a_size: int | None = None
    expected_steady: int = 1
    input: str | None = None
    seed: int = 0
    out: str | None = None
    format: str = "csv"
    threads: int | None = None
    stamp: bool = False

    def resolved_threads(self) -> int:
        if self.threads is not None:
            return self.threads
        env = os.environ.get("ASSB_THREADS", "").strip()
        if env:
            try:
                return max(1, int(env))
            except ValueError as exc:
                raise ConfigError(f"ASSB_THREADS={env!r} is not an integer") from exc
        return 1

    def out_path(self) -> str:
        if self.out:
            return self.out
        ext = "json" if self.format == "json" else "csv"
        return f"{self.kind}.{ext}"

    def canonical_items(self) -> list[tuple[str, str]]:
        items = []
        for f in fields(self):
            if f.name in ("stamp", "threads", "out"):
                continue
            items.append((f.name, repr(getattr(self, f.name))))
        return sorted(items)

    def config_hash(self) -> str:
        blob = "\n".join(f"{k}={v}" for k, v in self.canonical_items())
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


def _to_int(key: str, value) -> int:
    try:
        return int(str(value).strip())
    except ValueError as exc:
        raise ConfigError(f"{key}: expected an integer, got {value!r}") from exc


def _to_float(key: str, value) -> float:
    try:
        return float(str(value).strip())
    except ValueError as exc:
        raise ConfigError(f"{key}: expected a number, got {value!r}") from exc


def _to_bool(key: str, value) -> bool:
    if isinstance(value, bool):
        return value
    text = str(value).strip().lower()
    if text in ("true", "1", "yes", "on"):
        return True
    if text in ("false", "0", "no", "off"):
        return False
    raise ConfigError(f"{key}: expected a boolean, got {value!r}")


def _to_int_list(key: str, value) -> list[int]:
    if isinstance(value, (list, tuple)):
        return [_to_int(key, v) for v in value]
    text = str(value).strip()
    m = re.fullmatch(r"(-?\d+)\s*\.\.\s*(-?\d+)", text)
    if m:
        lo, hi = int(m.group(1)), int(m.group(2))
        if hi < lo:
            raise ConfigError(f"{key}: empty range {text!r}")
        return list(range(lo, hi + 1))
    return [_to_int(key, part) for part in text.split(",") if part.strip()]


def _to_float_list(key: str, value) -> list[float]:
    if isinstance(value, (list, tuple)):
        return [_to_float(key, v) for v in value]
    return [_to_float(key, part) for part in str(value).split(",") if part.strip()]


_CONVERTERS = {
    "kind": lambda k, v: str(v).strip(),
    "l": _to_int_list,
    "p_s": _to_float,
    "p_x": _to_float,
    "p_y": _to_float,
    "p_z": _to_float,
    "q": _to_float,
    "n_up": _to_int,
    "initial": lambda k, v: str(v).strip(),
    "steps": lambda k, v: str(v).strip(),
    "trajectories": _to_int,
    "observables": lambda k, v: str(v).strip(),
    "observables_period": _to_int,
    "p_grid": _to_float_list,
    "perturbation": lambda k, v: str(v).strip(),
    "observable": lambda k, v: str(v).strip(),
    "scale_correction": _to_bool,
    "a_size": _to_int,
    "expected_steady": _to_int,
    "input": lambda k, v: str(v).strip(),
    "seed": _to_int,
    "out": lambda k, v: str(v).strip(),
    "format": lambda k, v: str(v).strip().lower(),
    "threads": _to_int,
    "stamp": _to_bool,
}


def config_from_mapping(mapping: dict) -> ExperimentConfig:
    data = {}
    for raw_key, raw_value in mapping.items():
        key = str(raw_key).strip().lower()
        if key not in _CONVERTERS:
            raise ConfigError(f"unknown config key {key!r}")
        data["l_list" if key == "l" else key] = _CONVERTERS[key](key, raw_value)
    if "kind" not in data:
        raise ConfigError("missing required key 'kind'")
    cfg = ExperimentConfig(**data)
    _validate_config(cfg)
    return cfg


def _validate_config(cfg: ExperimentConfig) -> None:
    if cfg.kind not in KINDS:
        raise ConfigError(f"kind must be one of {KINDS}, got {cfg.kind!r}")
    if cfg.format not in ("csv", "json"):
        raise ConfigError(f"format must be csv or json, got {cfg.format!r}")
    for name in ("p_s", "p_x", "p_y", "p_z"):
        p = getattr(cfg, name)
        if not 0.0 <= p <= 1.0:
            raise ConfigError(f"{name}={p} outside [0, 1]")
    total = cfg.p_s + cfg.p_x + cfg.p_y + cfg.p_z
    if abs(total - 1.0) > 1e-9:
        raise ConfigError(f"p_s + p_x + p_y + p_z = {total}, expected 1")
    if cfg.perturbation not in PERTURBATION_AXES:
        raise ConfigError(f"perturbation must be one of {PERTURBATION_AXES}")
    if cfg.kind == "collapse" and cfg.observable not in COLLAPSE_OBSERVABLES:
        raise ConfigError(f"observable must be one of {COLLAPSE_OBSERVABLES}")
    if cfg.kind != "validate" and cfg.kind != "collapse" and not cfg.l_list:
        raise ConfigError(f"kind={cfg.kind} requires key 'l'")
    if cfg.kind == "collapse" and not cfg.input and not cfg.l_list:
        raise ConfigError("collapse requires 'l' (or 'input' pointing at a points CSV)")
    if cfg.kind == "trajectory" and cfg.trajectories < 1:
        raise ConfigError("trajectories must be >= 1")
    for L in cfg.l_list:
        if L < 2:
            raise ConfigError(f"l entries must be >= 2, got {L}")


def parse_config_text(text: str) -> dict:
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            return json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON config: {exc}") from exc
    mapping: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, _, value = line.partition("=")
        mapping[key.strip()] = value.strip()
    return mapping


def load_config(path: str) -> ExperimentConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return config_from_mapping(parse_config_text(text))


# ---------------------------------------------------------------------------
# Presets (desk-scale experiment definitions)

PRESETS: dict[str, dict] = {
    "baseline-gap": dict(kind="channel-gap", l="4..9", p_s=1.0, q=0.0),
    "baseline-entropy": dict(
        kind="trajectory",
        l="6,8,10,12",
        initial="neel",
        steps="8*L",
        trajectories=100,
        observables="half_chain_entropy",
        observables_period=1,
    ),
    "u1-purity-collapse": dict(
        kind="collapse",
        observable="purity",
        l="4..8",
        q=0.0,
        perturbation="p_z",
        p_grid="0.01,0.02,0.05,0.1,0.2,0.3",
    ),
    "u1-xy-collapse": dict(
        kind="collapse",
        observable="xy_correlation",
        scale_correction=True,
        l="4..8",
        q=0.0,
        perturbation="p_z",
        p_grid="0.01,0.02,0.05,0.1,0.2,0.3",
    ),
    "nonu1-collapse": dict(
        kind="collapse",
        observable="spin_spin",
        l="4..8",
        perturbation="p_xy",
        p_grid="0.01,0.02,0.05,0.08,0.12,0.2",
    ),
    "single-pauli": dict(kind="channel-gap", l="3..6", p_s=0.9, p_x=0.1, expected_steady=2),
}


def preset(name: str) -> ExperimentConfig:
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}; known: {', '.join(sorted(PRESETS))}")
    return config_from_mapping(dict(PRESETS[name]))


# ---------------------------------------------------------------------------
# Shared helpers


def _n_up_for(L: int, cfg: ExperimentConfig) -> int | None:
    """Sector filling from q or n_up; odd-L half filling rounds down."""
    if cfg.n_up is not None:
        if not 0 <= cfg.n_up <= L:
            raise ConfigError(f"n_up={cfg.n_up} outside 0..{L}")
        return cfg.n_up
    if cfg.q is None:
        return None
    x = cfg.q + L / 2
    n = int(math.floor(x + 1e-9))
    if not 0 <= n <= L:
        raise ConfigError(f"q={cfg.q} has no sector for L={L}")
    return n


def _steps_for(expr: str, L: int) -> int:
    if not re.fullmatch(r"[0-9L+*() ]+", expr):
        raise ConfigError(f"steps must be an integer expression in L, got {expr!r}")
    value = eval(expr, {"__builtins__": {}}, {"L": L})  # noqa: S307 - sanitized above
    return int(value)


def _initial_state(cfg: ExperimentConfig, L: int) -> PureState:
    spec = cfg.initial.strip().lower()
    if spec == "neel":
        return neel_state(L)
    if spec == "dicke":
        n = _n_up_for(L, cfg)
        return dicke_state(L, L // 2 if n is None else n)
    if set(spec) <= {"0", "1"} and len(spec) == L:
        return basis_state(L, spec)
    raise ConfigError(f"initial={cfg.initial!r} is not neel/dicke or an L-bit pattern")


def _parse_observables(cfg: ExperimentConfig, L: int) -> list[ObservableSpec]:
    specs = []
    chunks = re.findall(r"\w+\s*\([^)]*\)|\w+", cfg.observables)
    if re.sub(r"[\s,]", "", "".join(chunks)) != re.sub(r"[\s,]", "", cfg.observables):
        # leftovers mean something did not parse as name or name(i,j)
        raise ConfigError(f"cannot parse observables {cfg.observables!r}")
    for chunk in chunks:
        chunk = chunk.strip()
        m = re.fullmatch(r"(\w+)\s*\(\s*(\w+)\s*,\s*(\w+)\s*\)", chunk)
        if m:
            name = m.group(1)
            i = L if m.group(2) == "L" else _to_int("observables", m.group(2))
            j = L if m.group(3) == "L" else _to_int("observables", m.group(3))
            specs.append(ObservableSpec(name, i=i, j=j, period=cfg.observables_period))
        else:
            specs.append(ObservableSpec(chunk, period=cfg.observables_period))
    if not specs:
        raise ConfigError("no observables given")
    return specs


def _grid_params(cfg: ExperimentConfig, L: int, p: float | None) -> ModelParams:
    if p is None:
        return ModelParams(L, cfg.p_s, cfg.p_x, cfg.p_y, cfg.p_z)
    if cfg.perturbation == "p_z":
        return ModelParams(L, p_s=1.0 - p, p_z=p)
    return ModelParams(L, p_s=1.0 - 2.0 * p, p_x=p, p_y=p)


def _steady_point(cfg_L: int, params: ModelParams, n_up: int | None) -> dict:
    """Steady-state observables for one (L, params) grid point."""
    L = cfg_L
    S = channel.build_superoperator(params, n_up=n_up)
    rho = channel.steady_state(S)
    basis = S.basis
    chi = channel.channel_expectation(rho, channel.susceptibility_operator(L, basis))
    ss = channel.channel_expectation(rho, channel.spin_spin_operator(L, 1, L, basis))
    xy = channel.channel_expectation(rho, channel.xy_operator(L, 1, L, basis))
    zz = channel.channel_expectation(rho, channel.zz_operator(L, 1, L, basis))
    return dict(
        L=L,
        p_s=params.p_s,
        p_x=params.p_x,
        p_y=params.p_y,
        p_z=params.p_z,
        n_up=n_up if n_up is not None else float("nan"),
        chi=chi,
        spin_spin_1L=ss,
        xy_1L=xy,
        zz_1L=zz,
        purity=channel.purity(rho),
    )


def _sweep(cfg: ExperimentConfig) -> list[dict]:
    jobs = []
    for L in cfg.l_list:
        n_up = _n_up_for(L, cfg)
        grid = cfg.p_grid if cfg.p_grid else [None]
        for p in grid:
            params = _grid_params(cfg, L, p)
            sector = n_up if params.conserves_charge else None
            jobs.append((L, params, sector, p))
    n_jobs = cfg.resolved_threads()
    results = Parallel(n_jobs=n_jobs)(
        delayed(_steady_point)(L, params, sector) for L, params, sector, _ in jobs
    )
    for row, (_, _, _, p) in zip(results, jobs):
        row["p"] = float("nan") if p is None else p
    return results


# ---------------------------------------------------------------------------
# Kind drivers: each returns (columns, rows, extra)


def _run_trajectory_kind(cfg: ExperimentConfig):
    columns = ["L", "time", "observable", "mean", "stderr", "n", "saturated"]
    rows = []
    for L in cfg.l_list:
        params = ModelParams(L, cfg.p_s, cfg.p_x, cfg.p_y, cfg.p_z)
        specs = _parse_observables(cfg, L)
        records = trajectory.run_ensemble(
            params,
            _initial_state(cfg, L),
            _steps_for(cfg.steps, L),
            specs,
            cfg.trajectories,
            master_seed=cfg.seed,
            n_jobs=cfg.resolved_threads(),
        )
        for spec in specs:
            series = trajectory.ensemble_average(records, spec.label)
            sat = trajectory.is_saturated(
                np.array([m for _, m, _ in series]), np.array([e for _, _, e in series])
            )
            for t, mean, err in series:
                rows.append((L, t, spec.label, mean, err, len(records), int(sat)))
    return columns, rows, {}


def _run_channel_steady(cfg: ExperimentConfig):
    columns = ["L", "p", "p_s", "p_x", "p_y", "p_z", "n_up", "chi", "spin_spin_1L", "xy_1L", "zz_1L", "purity"]
    rows = [tuple(r[c] for c in columns) for r in _sweep(cfg)]
    return columns, rows, {}


def _run_channel_gap(cfg: ExperimentConfig):
    columns = ["L", "p_s", "p_x", "p_y", "p_z", "n_up", "gap", "gap_circuit", "lambda2_abs", "n_steady"]
    rows = []
    gaps = []
    for L in cfg.l_list:
        params = ModelParams(L, cfg.p_s, cfg.p_x, cfg.p_y, cfg.p_z)
        n_up = _n_up_for(L, cfg) if params.conserves_charge else None
        S = channel.build_superoperator(params, n_up=n_up)
        res = channel.spectral_gap(S, expected_steady=cfg.expected_steady)
        rows.append(
            (
                L,
                params.p_s,
                params.p_x,
                params.p_y,
                params.p_z,
                n_up if n_up is not None else float("nan"),
                res.gap,
                res.gap_circuit,
                abs(res.lambda2),
                res.n_steady,
            )
        )
        gaps.append((L, res))
    extra = {"note": "channel is non-normal; transient decay can outlast 1/gap"}
    if len(gaps) >= 3:
        z_el, z_el_err = channel.gap_exponent_fit([(L, r.gap) for L, r in gaps])
        z_ci, z_ci_err = channel.gap_exponent_fit([(L, r.gap_circuit) for L, r in gaps])
        extra.update(
            fit_z_elementary=z_el,
            fit_z_elementary_stderr=z_el_err,
            fit_z_circuit=z_ci,
            fit_z_circuit_stderr=z_ci_err,
        )
    return columns, rows, extra


def _run_entanglement_exact(cfg: ExperimentConfig):
    columns = ["L", "n_up", "a_size", "exact_nats", "asymptotic_nats", "difference"]
    rows = []
    for L in cfg.l_list:
        n_up = _n_up_for(L, cfg)
        if n_up is None:
            n_up = L // 2
        a_size = cfg.a_size if cfg.a_size is not None else L // 2
        exact = analytic.exact_entropy(L, n_up, a_size)
        if 0 < n_up < L:
            asym = analytic.asymptotic_entropy(L, a_size / L, n_up / L)
        else:
            asym = float("nan")
        rows.append((L, n_up, a_size, exact, asym, exact - asym))
    return columns, rows, {}


def _collapse_observable(row: dict, cfg: ExperimentConfig) -> float:
    if cfg.observable == "purity":
        return row["purity"]
    if cfg.observable == "xy_correlation":
        y = row["xy_1L"]
        if cfg.scale_correction:
            y *= (row["L"] - 1) / row["L"]
        return y
    return row["spin_spin_1L"]


def read_points_csv(path: str) -> list[scaling.CollapsePoint]:
    points = []
    with open(path, encoding="utf-8") as fh:
        header: list[str] | None = None
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if header is None:
                header = [c.strip() for c in line.split(",")]
                for required in ("L", "p", "y", "sigma"):
                    if required not in header:
                        raise ConfigError(f"{path}: missing column {required!r}")
                continue
            values = dict(zip(header, line.split(",")))
            points.append(
                scaling.CollapsePoint(
                    L=int(values["L"]),
                    p=float(values["p"]),
                    y=float(values["y"]),
                    sigma=float(values["sigma"]),
                )
            )
    if not points:
        raise ConfigError(f"{path}: no data rows")
    return points


def _run_collapse(cfg: ExperimentConfig):
    if cfg.input:
        points = read_points_csv(cfg.input)
    else:
        if not cfg.p_grid:
            raise ConfigError("collapse requires p_grid when computing points")
        points = [
            scaling.CollapsePoint(L=row["L"], p=row["p"], y=_collapse_observable(row, cfg), sigma=0.0)
            for row in _sweep(cfg)
        ]
    result = scaling.collapse_fit(points, seed=cfg.seed)
    columns = ["L", "p", "y", "sigma", "x_scaled"]
    rows = [
        (pt.L, pt.p, pt.y, pt.sigma, pt.L ** (1.0 / result.nu) * pt.p) for pt in points
    ]
    extra = dict(
        nu=result.nu,
        nu_stderr=result.nu_stderr,
        cost=result.cost,
        ambiguous=int(result.ambiguous),
        observable=cfg.observable,
    )
    return columns, rows, extra


def _run_validate(cfg: ExperimentConfig):
    """Cross-module consistency suite; each check pits two independent routes."""
    rng = np.random.default_rng(cfg.seed)
    checks: list[tuple[str, bool, str]] = []

    def record(name: str, ok: bool, detail: str = "") -> None:
        checks.append((name, bool(ok), detail))

    # Vectorization round trip and the trace inner-product identity.
    A = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    B = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    lhs = np.trace(A.conj().T @ B)
    rhs = np.vdot(channel.vectorize(A).data, channel.vectorize(B).data)
    record("doubled_inner_product", abs(lhs - rhs) < 1e-12, f"|diff|={abs(lhs - rhs):.2e}")
    rt = channel.unvectorize(channel.vectorize(B))
    record("vectorize_round_trip", np.allclose(rt, B, atol=1e-15))

    # Trace preservation of representative channels.
    for label, params, n_up in (
        ("sector", ModelParams(4, p_s=0.9, p_z=0.1), 2),
        ("full", ModelParams(3, p_s=0.7, p_x=0.1, p_y=0.1, p_z=0.1), None),
    ):
        S = channel.build_superoperator(params, n_up=n_up)
        one = channel.trace_vector(S.dim_single)
        defect = float(np.abs(S.matrix.conj().T @ one - one).max())
        record(f"trace_preservation_{label}", defect < 1e-10, f"defect={defect:.2e}")

    # Ancilla-based SWAP measurement versus direct projectors.
    worst = 0.0
    for _ in range(25):
        amps = rng.normal(size=16) + 1j * rng.normal(size=16)
        state = PureState(4, amps).normalized()
        _, p_direct = ops.apply_swap_projector(state, 2, +1)
        post_a, out_a = ops.ancilla_cswap_measure(state, 2, np.random.default_rng(1))
        direct_post, _ = ops.apply_swap_projector(state, 2, out_a.sign)
        fid = abs(np.vdot(direct_post.amps / np.linalg.norm(direct_post.amps), post_a.amps)) ** 2
        worst = max(worst, abs(out_a.probability - (p_direct if out_a.sign > 0 else 1 - p_direct)), 1 - fid)
    record("ancilla_vs_direct", worst < 1e-12, f"worst={worst:.2e}")

    # Left action of the z-dephased channel on repetition-code rows.
    L, p_z = 4, 0.3
    S = channel.build_superoperator(ModelParams(L, p_s=1 - p_z, p_z=p_z))
    proj = analytic.projected_channel_matrix(L, p_z).toarray()
    d = 1 << L
    worst = 0.0
    for b in range(d):
        row = np.asarray(S.matrix[b * d + b].todense()).ravel()
        expected = np.zeros(d * d, dtype=np.complex128)
        expected[(np.arange(d)) * d + np.arange(d)] = proj[b]
        worst = max(worst, float(np.abs(row - expected).max()))
    record("dephased_row_projection", worst < 1e-12, f"worst={worst:.2e}")

    # Trajectory ensemble versus exact channel evolution (4 sigma, L=3).
    params = ModelParams(3, p_s=0.8, p_z=0.2)
    initial = basis_state(3, "101")
    S = channel.build_superoperator(params)
    rho = channel.vectorize(np.outer(initial.amps, initial.amps.conj()))
    obs = channel.spin_spin_operator(3, 1, 3)
    specs = [ObservableSpec("spin_spin", i=1, j=3, period=1)]
    records = trajectory.run_ensemble(params, initial, 3, specs, 2000, cfg.seed, n_jobs=cfg.resolved_threads())
    series = trajectory.ensemble_average(records, "spin_spin(1,3)")
    ok = True
    detail = []
    for t, mean, err in series[1:]:
        exact = channel.channel_expectation(channel.evolve(S, rho, 3 * t), obs)
        pull = abs(mean - exact) / max(err, 1e-12)
        detail.append(f"t={t}:{pull:.1f}s")
        ok = ok and pull < 4.0
    record("trajectory_vs_channel", ok, " ".join(detail))

    columns = ["check", "passed", "detail"]
    rows = [(name, int(okay), detail) for name, okay, detail in checks]
    n_fail = sum(1 for _, okay, _ in checks if not okay)
    extra = {"passed": len(checks) - n_fail, "failed": n_fail}
    for name, okay, detail in checks:
        print(f"[validate] {name}: {'PASS' if okay else 'FAIL'} {detail}")
    return columns, rows, extra


_DRIVERS = {
    "trajectory": _run_trajectory_kind,
    "channel-steady": _run_channel_steady,
    "channel-gap": _run_channel_gap,
    "entanglement-exact": _run_entanglement_exact,
    "collapse": _run_collapse,
    "validate": _run_validate,
}


# ---------------------------------------------------------------------------
# Output


def _fmt(value) -> str:
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def _header_line(cfg: ExperimentConfig) -> str:
    line = f"# config_hash={cfg.config_hash()} seed={cfg.seed} version={__version__}"
    if cfg.stamp:
        import datetime

        line += f" timestamp={datetime.datetime.now().isoformat()}"
    return line


def write_output(cfg: ExperimentConfig, columns, rows, extra) -> str:
    path = cfg.out_path()
    if cfg.format == "json":
        payload = {
            "config_hash": cfg.config_hash(),
            "seed": cfg.seed,
            "version": __version__,
            "columns": list(columns),
            "rows": [list(r) for r in rows],
            "extra": extra,
        }
        if cfg.stamp:
            import datetime

            payload["timestamp"] = datetime.datetime.now().isoformat()
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=1, sort_keys=True, default=_fmt)
            fh.write("\n")
        return path
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(_header_line(cfg) + "\n")
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")
        for key in sorted(extra):
            fh.write(f"# {key}={_fmt(extra[key])}\n")
    return path


def run(cfg: ExperimentConfig) -> int:
    columns, rows, extra = _DRIVERS[cfg.kind](cfg)
    path = write_output(cfg, columns, rows, extra)
    print(f"wrote {path} ({len(rows)} rows)")
    for key in sorted(k for k in extra if k != "note"):
        print(f"  {key} = {_fmt(extra[key])}")
    if cfg.kind == "validate" and extra.get("failed", 0):
        return EXIT_NUMERICAL
    return EXIT_OK


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="assb",
        description="Run adaptive SWAP-measurement circuit experiments.",
    )
    parser.add_argument("--config", help="path to a key=value or JSON config file")
    parser.add_argument("--preset", help=f"named experiment: {', '.join(sorted(PRESETS))}")
    parser.add_argument("--seed", type=int, help="master seed (overrides config)")
    parser.add_argument("--out", help="output path (overrides config)")
    parser.add_argument("--format", choices=("csv", "json"), help="output format")
    parser.add_argument("--threads", type=int, help="worker count (or env ASSB_THREADS)")
    parser.add_argument("--stamp", action="store_true", help="add a timestamp to the output header")
    args = parser.parse_args(argv)

    try:
        if bool(args.config) == bool(args.preset):
            raise ConfigError("provide exactly one of --config or --preset")
        cfg = load_config(args.config) if args.config else preset(args.preset)
        if args.seed is not None:
            cfg.seed = args.seed
        if args.out:
            cfg.out = args.out
        if args.format:
            cfg.format = args.format
        if args.threads is not None:
            cfg.threads = args.threads
        cfg.stamp = bool(args.stamp)
        _validate_config(cfg)
        return run(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ResourceLimitError as exc:
        print(f"resource budget exceeded: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
