"""Named experiment runners: SINR sweeps, activation fractions and ROC sets.

Runners take scenario parameters in configuration units (dB) so that sweep
variables such as ``alpha_max_db`` can be varied directly; each row is
converted through :func:`config.scenario_from_params`.
"""

from __future__ import annotations

import csv
import json
import logging
import math
import subprocess
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from .config import merge_params, scenario_from_params
from .detection import HypothesisSamples, RocCurve, build_roc, run_hypothesis_mc
from .errors import SwarmIsacError
from .geometry import build_layout
from .optimizer import LINEARIZED, optimize
from .sinr import sensing_sinr_mc

log = logging.getLogger(__name__)

SWEEP_KEYS = {"alpha_max_db": "alpha_max_db", "N": "N", "l_AD": "l_AD_m"}


def to_db(x: float) -> float:
    return 10.0 * math.log10(x) if x > 0 else -math.inf


@dataclass
class SweepSpec:
    variable: str
    values: Sequence[float]
    fixed: dict[str, Any] = field(default_factory=dict)
    mc_trials: int = 0
    seed: int = 0
    include_rr: bool = False
    variant: str = LINEARIZED
    workers: int = 1

    def __post_init__(self):
        if self.variable not in SWEEP_KEYS:
            raise ValueError(f"sweep variable must be one of {sorted(SWEEP_KEYS)}")
        vals = list(self.values)
        if not vals:
            raise ValueError("sweep values must be non-empty")
        if any(b <= a for a, b in zip(vals, vals[1:])):
            raise ValueError("sweep values must be strictly increasing")
        self.values = vals
        merge_params(self.fixed)  # validates keys early

    def params_at(self, value) -> dict[str, Any]:
        p = dict(self.fixed)
        p[SWEEP_KEYS[self.variable]] = value
        return p


@dataclass
class SweepRow:
    value: float
    gamma_s_approx_db: float
    gamma_s_mc_db: float
    mc_stderr_db: float
    active_count: int
    lambda_star: float
    runtime_ms: float
    error: str = ""


@dataclass
class SweepResult:
    spec: SweepSpec
    rows: list[SweepRow]

    COLUMNS = ("value", "gamma_s_approx_db", "gamma_s_mc_db", "mc_stderr_db",
               "active_count", "lambda_star", "error")

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.rows], dtype=float)


def _sweep_row(spec: SweepSpec, value) -> SweepRow:
    t0 = time.perf_counter()
    try:
        s = scenario_from_params(spec.params_at(value))
        lay = build_layout(s)
        res = optimize(s, lay, variant=spec.variant)
        mc_db = se_db = math.nan
        if spec.mc_trials:
            mc = sensing_sinr_mc(s, lay, res.power, res.alpha, spec.mc_trials,
                                 spec.include_rr, spec.seed)
            mc_db = to_db(mc.estimate)
            se_db = 10.0 / math.log(10) * mc.stderr / mc.estimate
        return SweepRow(float(value), to_db(res.gamma_s), mc_db, se_db,
                        int(res.active_set.size), res.lambda_star,
                        (time.perf_counter() - t0) * 1e3)
    except (SwarmIsacError, ValueError) as exc:
        log.warning("sweep row %s=%s failed: %s", spec.variable, value, exc)
        return SweepRow(float(value), math.nan, math.nan, math.nan, 0, math.nan,
                        (time.perf_counter() - t0) * 1e3, f"{type(exc).__name__}: {exc}")


def sweep_sensing_sinr(spec: SweepSpec) -> SweepResult:
    """Optimized sensing SINR (closed form and, optionally, Monte-Carlo) per sweep value.

    Failed rows carry an ``error`` string and NaN metrics; the sweep goes on.
    """
    if spec.workers > 1:
        with ThreadPoolExecutor(max_workers=spec.workers) as pool:
            rows = list(pool.map(lambda v: _sweep_row(spec, v), spec.values))
    else:
        rows = [_sweep_row(spec, v) for v in spec.values]
    return SweepResult(spec, rows)


def activation_threshold(spec: SweepSpec) -> list[tuple[float, float | None]]:
    """Fraction of repeaters at full gain for every sweep value (None when N = 0)."""
    out = []
    for v in spec.values:
        s = scenario_from_params(spec.params_at(v))
        if s.N == 0:
            out.append((float(v), None))
            continue
        res = optimize(s, build_layout(s), variant=spec.variant)
        out.append((float(v), res.fraction_active))
    return out


@dataclass
class RocRun:
    label: str
    params: dict[str, Any]
    curve: RocCurve
    samples: HypothesisSamples
    active_count: int


def doubled_alpha_db(alpha_db: float, convention: str) -> float:
    """dB value whose linear amplitude gain is twice that of ``alpha_db``."""
    step = 10.0 if convention == "amplitude" else 20.0
    return alpha_db + step * math.log10(2.0)


def default_roc_configs(base: dict[str, Any]) -> list[tuple[str, dict[str, Any]]]:
    p = merge_params(base)
    N, a_db = p["N"], p["alpha_max_db"]
    return [
        ("no-repeaters", {"N": 0}),
        (f"N={N}", {}),
        (f"N={2 * N}", {"N": 2 * N}),
        (f"N={N},2x-alpha", {"alpha_max_db": doubled_alpha_db(a_db, p["alpha_db_convention"])}),
    ]


def roc_experiment(
    base: dict[str, Any],
    configs: list[tuple[str, dict[str, Any]]] | None = None,
    trials: int = 5000,
    seed: int = 0,
    include_rr: bool = False,
    variant: str = LINEARIZED,
    workers: int = 1,
    grid_size: int = 200,
) -> list[RocRun]:
    """Run the paired-hypothesis Monte-Carlo and ROC for every configuration.

    All configurations share ``seed``: trial ``i`` sees the same RCS, user
    channel, symbols and AP noise everywhere (common random numbers).
    """
    configs = configs if configs is not None else default_roc_configs(base)
    runs = []
    for label, ov in configs:
        params = merge_params(base, ov)
        s = scenario_from_params(params)
        lay = build_layout(s)
        res = optimize(s, lay, variant=variant)
        samples = run_hypothesis_mc(s, lay, res.power, res.alpha, trials, include_rr, seed, workers)
        curve = build_roc(samples.t_h1, samples.t_h0, grid_size, seed=seed, label=label)
        runs.append(RocRun(label, params, curve, samples, int(res.active_set.size)))
    return runs


# ---------------------------------------------------------------------------
# output files


def _git_describe() -> str:
    try:
        out = subprocess.run(["git", "describe", "--always", "--dirty"], capture_output=True,
                             text=True, timeout=5, cwd=Path(__file__).parent)
        return out.stdout.strip() or "unknown"
    except (OSError, subprocess.SubprocessError):
        return "unknown"


def new_stem(out_dir: Path, experiment: str) -> str:
    """Timestamped file stem that does not collide with anything in ``out_dir``."""
    ts = datetime.now(timezone.utc).strftime("%Y%m%dT%H%M%S%fZ")
    stem = f"{experiment}_{ts}"
    k = 1
    while any(out_dir.glob(stem + "*")):
        stem = f"{experiment}_{ts}-{k}"
        k += 1
    return stem


def _fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def write_csv(path: Path, header: Sequence[str], rows) -> Path:
    with path.open("x", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for r in rows:
            w.writerow([_fmt(v) for v in r])
    return path


def write_manifest(path: Path, payload: dict[str, Any]) -> Path:
    payload = dict(payload)
    payload.setdefault("version", _git_describe())
    with path.open("x") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True, default=_json_default)
        fh.write("\n")
    return path


def _json_default(o):
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.floating,)):
        return float(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, Path):
        return str(o)
    raise TypeError(type(o).__name__)


def sweep_rows_for_csv(result: SweepResult):
    return [tuple(getattr(r, c) for c in SweepResult.COLUMNS) for r in result.rows]


def spec_dict(spec: SweepSpec) -> dict[str, Any]:
    d = asdict(spec)
    d["values"] = [float(v) for v in spec.values]
    return d
