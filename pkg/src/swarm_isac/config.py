"""Run configuration and the only place where dB quantities become linear.

Config files are JSON. Scenario keys carry their unit in the name
(``*_dbm``, ``*_db``, ``*_dbsm``, ``*_m``, ``*_hz``, ``*_rad``); everything
handed to the rest of the package is linear SI.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .errors import ConfigError
from .geometry import Scenario
from .mc import default_workers

EXPERIMENTS = ("sinr-sweep", "activation", "roc", "optimize-once", "validate-sinr")

DEFAULT_SEED = 20251015

# alpha_max_db readings: "amplitude" -> alpha = 10^(dB/10), t = alpha^2 = 10^(dB/5);
# "power" -> t = alpha^2 = 10^(dB/10).
ALPHA_DB_CONVENTIONS = ("amplitude", "power")

BASELINE: dict[str, Any] = {
    "M": 100,
    "N": 50,
    "f_c_hz": 15e9,
    "l_AD_m": 500.0,
    "l_AU_m": 100.0,
    "l_A1_m": 250.0,
    "repeater_span_m": 400.0,
    "d_m": None,  # None -> repeater_span_m / N
    "theta_rad": math.pi / 6,
    "sigma_rcs_dbsm": -10.0,
    "sigma_r2_dbm": -124.0,
    "sigma_ap2_dbm": -110.0,
    "sigma_ue2_dbm": -110.0,
    "alpha_max_db": 60.0,
    "alpha_db_convention": "amplitude",
    "gamma_ue_req_db": 15.0,
    "rho_max_dbm": 33.0,
}

_INT_KEYS = {"M", "N"}
_POSITIVE_KEYS = {"f_c_hz", "l_AD_m", "l_AU_m", "l_A1_m", "repeater_span_m"}


def dbm_to_watts(dbm: float) -> float:
    return 10.0 ** ((dbm - 30.0) / 10.0)


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


def alpha_max_from_db(db: float, convention: str = "amplitude") -> float:
    """Linear amplitude gain for a repeater gain quoted in dB."""
    if convention == "amplitude":
        return 10.0 ** (db / 10.0)
    if convention == "power":
        return 10.0 ** (db / 20.0)
    raise ConfigError(f"unit out of range: alpha_db_convention={convention!r}")


def _coerce(key: str, value: Any) -> Any:
    if key == "alpha_db_convention":
        if value not in ALPHA_DB_CONVENTIONS:
            raise ConfigError(f"unit out of range: {key}={value!r}")
        return value
    if key == "d_m":
        if value is None or value == "auto":
            return None
    try:
        v = float(value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"unit out of range: {key}={value!r} is not a number") from exc
    if not math.isfinite(v):
        raise ConfigError(f"unit out of range: {key}={value!r}")
    if key in _INT_KEYS:
        if v != int(v) or v < (1 if key == "M" else 0):
            raise ConfigError(f"unit out of range: {key}={value!r}")
        return int(v)
    if key in _POSITIVE_KEYS and v <= 0:
        raise ConfigError(f"unit out of range: {key}={value!r} must be > 0")
    if key == "d_m" and v <= 0:
        raise ConfigError(f"unit out of range: {key}={value!r} must be > 0")
    if key == "theta_rad" and not 0 <= v <= math.pi:
        raise ConfigError(f"unit out of range: {key}={value!r} must lie in [0, pi]")
    return v


def merge_params(base: dict[str, Any], overrides: dict[str, Any] | None = None) -> dict[str, Any]:
    """Validate and merge scenario parameters (dB units); rejects unknown keys."""
    out = dict(BASELINE)
    for src in (base, overrides or {}):
        for k, v in src.items():
            if k not in BASELINE:
                raise ConfigError(f"unknown key: {k!r}")
            out[k] = _coerce(k, v)
    return out


def scenario_from_params(params: dict[str, Any]) -> Scenario:
    """Convert a (dB-unit) parameter dict to a linear :class:`Scenario`."""
    p = merge_params(params)
    N = p["N"]
    d = p["d_m"] if p["d_m"] is not None else (p["repeater_span_m"] / N if N > 0 else 0.0)
    return Scenario(
        M=p["M"],
        N=N,
        f_c=p["f_c_hz"],
        l_AD=p["l_AD_m"],
        l_AU=p["l_AU_m"],
        l_A1=p["l_A1_m"],
        d=d,
        theta=p["theta_rad"],
        sigma_rcs_mean=db_to_linear(p["sigma_rcs_dbsm"]),
        sigma_r2=dbm_to_watts(p["sigma_r2_dbm"]),
        sigma_ap2=dbm_to_watts(p["sigma_ap2_dbm"]),
        sigma_ue2=dbm_to_watts(p["sigma_ue2_dbm"]),
        alpha_max=alpha_max_from_db(p["alpha_max_db"], p["alpha_db_convention"]),
        gamma_ue_req=db_to_linear(p["gamma_ue_req_db"]),
        rho_max=dbm_to_watts(p["rho_max_dbm"]),
    )


def baseline_scenario(**overrides) -> Scenario:
    return scenario_from_params(overrides)


@dataclass
class RunConfig:
    scenario_params: dict[str, Any]
    experiment: str
    overrides: dict[str, Any] = field(default_factory=dict)
    seed: int = DEFAULT_SEED
    out_dir: Path = Path("runs")
    trials: int | None = None
    workers: int = 1
    include_rr: bool = False
    variant: str = "linearized"
    experiment_options: dict[str, Any] = field(default_factory=dict)

    @property
    def scenario(self) -> Scenario:
        return scenario_from_params(self.scenario_params)


_TOP_KEYS = {"scenario", "experiment", "seed", "trials", "out_dir", "workers",
             "include_rr", "dinkelbach_variant", "options"}


def parse_override(text: str) -> tuple[str, Any]:
    if "=" not in text:
        raise ConfigError(f"override must look like KEY=VALUE, got {text!r}")
    k, v = text.split("=", 1)
    k = k.strip()
    try:
        value = json.loads(v)
    except json.JSONDecodeError:
        value = v.strip()
    return k, value


def parse_config(
    path: str | Path | None = None,
    *,
    experiment: str | None = None,
    overrides: list[str] | dict[str, Any] | None = None,
    seed: int | None = None,
    trials: int | None = None,
    out_dir: str | Path | None = None,
    workers: int | None = None,
    include_rr: bool | None = None,
    variant: str | None = None,
) -> RunConfig:
    """Build a :class:`RunConfig` from an optional JSON file plus explicit flags.

    Flags take precedence over the file; ``overrides`` are applied on top of
    the file's ``scenario`` block.

    Raises:
        ConfigError: unknown key, unit out of range, or missing field.
    """
    doc: dict[str, Any] = {}
    if path is not None:
        p = Path(path)
        if not p.exists():
            raise ConfigError(f"missing required field: config file {p} does not exist")
        doc = json.loads(p.read_text())
        if not isinstance(doc, dict):
            raise ConfigError("config file must hold a JSON object")
        unknown = set(doc) - _TOP_KEYS
        if unknown:
            raise ConfigError(f"unknown key: {sorted(unknown)[0]!r}")
    scen = doc.get("scenario", {})
    if isinstance(overrides, dict):
        ov = dict(overrides)
    else:
        ov = dict(parse_override(o) for o in (overrides or []))
    params = merge_params(scen, ov)

    exp = experiment if experiment is not None else doc.get("experiment")
    if exp is None:
        raise ConfigError("missing required field: experiment")
    if exp not in EXPERIMENTS:
        raise ConfigError(f"unknown experiment: {exp!r}")
    var = variant if variant is not None else doc.get("dinkelbach_variant", "linearized")
    if var not in ("linearized", "paper-typo"):
        raise ConfigError(f"unit out of range: dinkelbach_variant={var!r}")
    cfg = RunConfig(
        scenario_params=params,
        experiment=exp,
        overrides=ov,
        seed=int(seed if seed is not None else doc.get("seed", DEFAULT_SEED)),
        out_dir=Path(out_dir if out_dir is not None else doc.get("out_dir", "runs")),
        trials=trials if trials is not None else doc.get("trials"),
        workers=int(workers if workers is not None else doc.get("workers", default_workers())),
        include_rr=bool(include_rr if include_rr is not None else doc.get("include_rr", False)),
        variant=var,
        experiment_options=dict(doc.get("options", {})),
    )
    if cfg.trials is not None and int(cfg.trials) < 1:
        raise ConfigError("unit out of range: trials must be >= 1")
    # fail early on physically invalid scenarios
    cfg.scenario
    return cfg
