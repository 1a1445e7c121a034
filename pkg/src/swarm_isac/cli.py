"""Command-line entry point.

Example::

    swarm-isac --experiment optimize-once --set N=20 --set alpha_max_db=50
    swarm-isac --config runs/fig2.json --out runs/ --workers 4
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from dataclasses import asdict, replace
from pathlib import Path
from typing import Any

import numpy as np

from . import experiments as ex
from .config import EXPERIMENTS, RunConfig, parse_config
from .errors import SwarmIsacError
from .geometry import build_layout
from .optimizer import optimize
from .sinr import sinr_report

log = logging.getLogger("swarm_isac")

SWEEP_N_VALUES = (10, 25, 50, 100)


def _bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"expected a boolean, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="swarm-isac", description=__doc__.splitlines()[0])
    p.add_argument("--config", type=Path, help="JSON run configuration")
    p.add_argument("--experiment", help=f"one of: {', '.join(EXPERIMENTS)}")
    p.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                   help="scenario override in config units, repeatable")
    p.add_argument("--seed", type=int)
    p.add_argument("--trials", type=int)
    p.add_argument("--out", type=Path, help="output directory (default: runs)")
    p.add_argument("--workers", type=int, help="worker threads (default: all cores; 1 = sequential)")
    p.add_argument("--include-rr", type=_bool, metavar="BOOL",
                   help="solve the inter-repeater feedback loop in Monte-Carlo runs")
    p.add_argument("--dinkelbach-variant", choices=("paper-typo", "linearized"))
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def _emit(obj: dict[str, Any]) -> None:
    print(json.dumps(obj, default=ex._json_default, sort_keys=True))


def _base_manifest(cfg: RunConfig) -> dict[str, Any]:
    return {
        "experiment": cfg.experiment,
        "scenario": cfg.scenario_params,
        "overrides": cfg.overrides,
        "seed": cfg.seed,
        "trials": cfg.trials,
        "include_rr": cfg.include_rr,
        "dinkelbach_variant": cfg.variant,
        "options": cfg.experiment_options,
    }


def _sweep_spec(cfg: RunConfig, default_trials: int) -> ex.SweepSpec:
    opts = cfg.experiment_options
    var = opts.get("variable", "alpha_max_db")
    if "values" in opts:
        values = opts["values"]
    else:
        lo, hi, step = opts.get("range", [0.0, 80.0, 1.0])
        values = list(np.arange(lo, hi + step / 2, step))
    trials = cfg.trials if cfg.trials is not None else default_trials
    return ex.SweepSpec(variable=var, values=values, fixed=cfg.scenario_params,
                        mc_trials=int(trials), seed=cfg.seed, include_rr=cfg.include_rr,
                        variant=cfg.variant, workers=cfg.workers)


def _sweep_n_values(cfg: RunConfig, spec: ex.SweepSpec) -> list:
    """Repeater counts to sweep over: option ``N_values``, an explicit N, or the default set."""
    if spec.variable == "N":
        return ["swept"]
    if "N_values" in cfg.experiment_options:
        return [int(n) for n in cfg.experiment_options["N_values"]]
    if "N" in cfg.overrides:
        return [cfg.scenario_params["N"]]
    return list(SWEEP_N_VALUES)


def run(cfg: RunConfig) -> list[Path]:
    """Execute one experiment and write its CSV, manifest and timing files."""
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    stem = ex.new_stem(out, cfg.experiment)
    manifest = _base_manifest(cfg)
    timing: dict[str, Any] = {}
    files: list[Path] = []

    if cfg.experiment == "sinr-sweep":
        spec = _sweep_spec(cfg, default_trials=0)
        n_values = _sweep_n_values(cfg, spec)
        rows, manifest["sweeps"], timing["runtime_ms"] = [], [], {}
        for n in n_values:
            if spec.variable != "N":
                spec = replace(spec, fixed={**spec.fixed, "N": n})
            res = ex.sweep_sensing_sinr(spec)
            rows += [(n, *r) for r in ex.sweep_rows_for_csv(res)]
            manifest["sweeps"].append(ex.spec_dict(spec))
            timing["runtime_ms"][str(n)] = [r.runtime_ms for r in res.rows]
            for r in res.rows:
                _emit({"N": n, "value": r.value, "gamma_s_approx_db": r.gamma_s_approx_db,
                       "gamma_s_mc_db": r.gamma_s_mc_db, "active": r.active_count,
                       "error": r.error})
        files.append(ex.write_csv(out / f"{stem}.csv", ("N", *ex.SweepResult.COLUMNS), rows))

    elif cfg.experiment == "activation":
        spec = _sweep_spec(cfg, default_trials=0)
        table = ex.activation_threshold(spec)
        rows = [(v, "n/a" if f is None else f) for v, f in table]
        files.append(ex.write_csv(out / f"{stem}.csv", ("value", "fraction_at_full_gain"), rows))
        manifest["sweep"] = ex.spec_dict(spec)
        for v, f in rows:
            _emit({"value": v, "fraction_at_full_gain": f})

    elif cfg.experiment == "roc":
        trials = cfg.trials if cfg.trials is not None else 5000
        configs = cfg.experiment_options.get("configs")
        if configs is not None:
            configs = [(c["label"], c.get("overrides", {})) for c in configs]
        runs = ex.roc_experiment(cfg.scenario_params, configs, trials=int(trials), seed=cfg.seed,
                                 include_rr=cfg.include_rr, variant=cfg.variant,
                                 workers=cfg.workers)
        manifest["curves"] = []
        for i, r in enumerate(runs):
            f = r.curve.write_csv(out / f"{stem}_{i:02d}.csv")
            files.append(f)
            manifest["curves"].append({"label": r.label, "file": f.name,
                                       "active_count": r.active_count, "params": r.params})
            _emit({"label": r.label, "active": r.active_count,
                   "p_d@p_fa=0.1": r.curve.p_d_at(0.1)})

    elif cfg.experiment == "optimize-once":
        s = cfg.scenario
        lay = build_layout(s)
        res = optimize(s, lay, variant=cfg.variant)
        rows = [(n, res.t[n], res.alpha[n], int(res.t[n] == res.t_max)) for n in range(s.N)]
        files.append(ex.write_csv(out / f"{stem}.csv", ("repeater", "t", "alpha", "active"), rows))
        summary = {
            "t": res.t, "active_set": res.active_set, "lambda_star": res.lambda_star,
            "gamma_s_db": ex.to_db(res.gamma_s), "rho_s_w": res.power.rho_s,
            "rho_c_w": res.power.rho_c, "iterations": res.iterations,
            "converged": res.converged,
        }
        manifest["result"] = summary
        _emit(summary)

    elif cfg.experiment == "validate-sinr":
        s = cfg.scenario
        lay = build_layout(s)
        res = optimize(s, lay, variant=cfg.variant)
        trials = int(cfg.trials if cfg.trials is not None else 10_000)
        rep = sinr_report(s, lay, res.power, res.alpha, trials, cfg.seed, cfg.workers)
        summary = {f"{k}_db" if k.startswith("gamma") else k: v for k, v in asdict(rep).items()}
        for k in list(summary):
            if k.endswith("_db"):
                summary[k] = ex.to_db(summary[k]) if summary[k] == summary[k] else math.nan
        summary["self_loop_to_noise_db"] = ex.to_db(summary.pop("self_loop_to_noise"))
        summary["mc_stderr_db"] = 10 / math.log(10) * rep.mc_stderr / rep.gamma_s_norr
        summary["mc_stderr_no_loop_db"] = 10 / math.log(10) * rep.mc_stderr_no_loop / rep.gamma_s_no_loop
        del summary["mc_stderr"], summary["mc_stderr_no_loop"]
        rows = [tuple(summary.values())]
        files.append(ex.write_csv(out / f"{stem}.csv", tuple(summary), rows))
        manifest["result"] = summary
        _emit(summary)

    manifest["files"] = [f.name for f in files]
    files.append(ex.write_manifest(out / f"{stem}.manifest.json", manifest))
    if timing:
        with (out / f"{stem}.timing.json").open("x") as fh:
            json.dump(timing, fh)
        files.append(out / f"{stem}.timing.json")
    return files


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = parse_config(
            args.config,
            experiment=args.experiment,
            overrides=args.overrides,
            seed=args.seed,
            trials=args.trials,
            out_dir=args.out,
            workers=args.workers,
            include_rr=args.include_rr,
            variant=args.dinkelbach_variant,
        )
        files = run(cfg)
    except (SwarmIsacError, ValueError, OSError) as exc:
        err = {"error": type(exc).__name__, "message": str(exc)}
        print(json.dumps(err), file=sys.stderr)
        return 2
    for f in files:
        log.info("wrote %s", f)
    return 0


if __name__ == "__main__":
    sys.exit(main())
