"""Energy detector, paired-hypothesis Monte-Carlo and ROC curves."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .channel import static_channels, steering
from .geometry import Layout, Scenario
from .mc import run_chunks
from .signal import PowerSplit, check_gains, draw_trials, simulate_batch


def test_statistic(y_AP: np.ndarray, theta: float) -> float | np.ndarray:
    """``|v^H y|^2`` with the unit-norm combiner ``v = a(theta)/||a(theta)||``.

    ``y_AP`` may be a single snapshot (M,) or a stack (T, M).
    """
    y = np.asarray(y_AP)
    M = y.shape[-1]
    v = steering(theta, M) / np.sqrt(M)
    out = np.abs(y @ v.conj()) ** 2
    return float(out) if out.ndim == 0 else out


test_statistic.__test__ = False  # keep pytest from collecting it


@dataclass(frozen=True)
class HypothesisSamples:
    t_h1: np.ndarray
    t_h0: np.ndarray
    seed: int


def run_hypothesis_mc(
    s: Scenario,
    lay: Layout,
    pw: PowerSplit,
    alpha,
    trials: int,
    include_rr: bool,
    seed: int,
    workers: int = 1,
) -> HypothesisSamples:
    """Detector statistics under target-present and target-absent hypotheses.

    Both hypotheses see the same per-trial channel, symbol and noise draws;
    the null hypothesis only removes the two drone links. The same gain
    vector is used under both hypotheses.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    alpha = check_gains(alpha)
    st = static_channels(s, lay)
    beta_AU = st.gains_unit.beta_AU

    def block(a, b):
        d = draw_trials(s, beta_AU, seed, a, b)
        h1 = simulate_batch(st, pw, alpha, d, include_rr, target=True)
        h0 = simulate_batch(st, pw, alpha, d, include_rr, target=False)
        return test_statistic(h1.y_AP, s.theta), test_statistic(h0.y_AP, s.theta)

    parts = run_chunks(block, trials, workers)
    t1 = np.concatenate([p[0] for p in parts])
    t0 = np.concatenate([p[1] for p in parts])
    return HypothesisSamples(t_h1=t1, t_h0=t0, seed=seed)


@dataclass(frozen=True)
class RocCurve:
    thresholds: np.ndarray
    p_fa: np.ndarray
    p_d: np.ndarray
    trials: int
    seed: int
    label: str = ""

    def p_d_at(self, p_fa: float) -> float:
        """Detection probability at the smallest threshold with false-alarm <= ``p_fa``."""
        ok = np.flatnonzero(self.p_fa <= p_fa + 1e-15)
        if ok.size == 0:
            return 0.0
        return float(self.p_d[ok].max())

    def write_csv(self, path: str | Path) -> Path:
        path = Path(path)
        with path.open("x", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["threshold", "p_fa", "p_d"])
            for row in zip(self.thresholds, self.p_fa, self.p_d):
                w.writerow([repr(float(v)) for v in row])
        return path


def build_roc(t_h1, t_h0, grid_size: int = 200, seed: int = 0, label: str = "") -> RocCurve:
    """Empirical ROC for the rule "declare target if T > tau".

    Thresholds are every pooled sample value plus ``grid_size`` pooled
    quantiles, bracketed by -inf (everything detected) and the pooled max
    (nothing detected).
    """
    t1 = np.asarray(t_h1, dtype=float)
    t0 = np.asarray(t_h0, dtype=float)
    if t1.size == 0 or t0.size == 0:
        raise ValueError("need non-empty samples under both hypotheses")
    pooled = np.concatenate([t1, t0])
    q = np.quantile(pooled, np.linspace(0.0, 1.0, max(grid_size, 2)))
    taus = np.unique(np.concatenate([[-np.inf], q, pooled]))
    s1 = np.sort(t1)
    s0 = np.sort(t0)
    # fraction strictly above tau
    p_d = 1.0 - np.searchsorted(s1, taus, side="right") / s1.size
    p_fa = 1.0 - np.searchsorted(s0, taus, side="right") / s0.size
    return RocCurve(taus, p_fa, p_d, trials=int(max(t1.size, t0.size)), seed=seed, label=label)


def p_d_at_fa(t_h1: np.ndarray, t_h0: np.ndarray, p_fa: float) -> float:
    """Empirical detection probability with the threshold set on the null samples."""
    s0 = np.sort(np.asarray(t_h0))
    k = int(np.floor(p_fa * s0.size))
    # threshold so that exactly k null samples exceed it
    tau = s0[s0.size - k - 1] if k < s0.size else -np.inf
    return float(np.mean(np.asarray(t_h1) > tau))
