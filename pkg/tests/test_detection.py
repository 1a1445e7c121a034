import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import kstest

from swarm_isac.channel import steering
from swarm_isac.config import baseline_scenario
from swarm_isac.detection import build_roc, p_d_at_fa, run_hypothesis_mc, test_statistic
from swarm_isac.geometry import build_layout
from swarm_isac.optimizer import optimize
from swarm_isac.signal import PowerSplit


def test_matched_direction():
    a = steering(0.7, 64)
    assert test_statistic(a, 0.7) == pytest.approx(64.0, rel=1e-12)


def test_orthogonal_direction():
    M = 16
    a = steering(0.7, M)
    y = np.random.default_rng(0).standard_normal(M) + 0j
    y -= a * np.vdot(a, y) / M
    assert test_statistic(y, 0.7) == pytest.approx(0.0, abs=1e-20)


@settings(max_examples=50, deadline=None)
@given(phase=st.floats(0, 2 * math.pi), seed=st.integers(0, 1000))
def test_phase_invariance_and_nonnegative(phase, seed):
    rng = np.random.default_rng(seed)
    y = rng.standard_normal(12) + 1j * rng.standard_normal(12)
    t = test_statistic(y, 1.1)
    assert t >= 0
    assert test_statistic(y * np.exp(1j * phase), 1.1) == pytest.approx(t, rel=1e-12)


def test_noise_mean():
    rng = np.random.default_rng(1)
    sigma2 = 3.0
    y = np.sqrt(sigma2 / 2) * (rng.standard_normal((100_000, 10)) + 1j * rng.standard_normal((100_000, 10)))
    assert test_statistic(y, 0.4).mean() == pytest.approx(sigma2, rel=0.02)


def test_stacked_matches_single():
    rng = np.random.default_rng(2)
    y = rng.standard_normal((5, 8)) + 1j * rng.standard_normal((5, 8))
    stacked = test_statistic(y, 0.3)
    assert np.allclose(stacked, [test_statistic(r, 0.3) for r in y])


def test_null_without_repeaters_is_exponential(small):
    s, lay = small
    samples = run_hypothesis_mc(s, lay, PowerSplit(1, 1), np.zeros(s.N), 4000, False, seed=3)
    assert kstest(samples.t_h0 / s.sigma_ap2, "expon").pvalue > 0.01


def test_no_target_hypotheses_coincide(small):
    s, lay = small
    s0 = s.with_(sigma_rcs_mean=0.0)
    r = run_hypothesis_mc(s0, lay, PowerSplit(1, 1), np.ones(s.N), 2000, False, seed=4)
    np.testing.assert_array_equal(r.t_h1, r.t_h0)


def test_target_raises_mean_energy_without_repeaters():
    s = baseline_scenario(N=0)
    lay = build_layout(s)
    res = optimize(s, lay)
    r = run_hypothesis_mc(s, lay, res.power, res.alpha, 5000, False, seed=5)
    assert r.t_h1.mean() > r.t_h0.mean()


def test_hypothesis_mc_worker_invariant(small):
    s, lay = small
    a = run_hypothesis_mc(s, lay, PowerSplit(1, 1), np.ones(s.N), 1100, False, seed=6, workers=1)
    b = run_hypothesis_mc(s, lay, PowerSplit(1, 1), np.ones(s.N), 1100, False, seed=6, workers=4)
    np.testing.assert_array_equal(a.t_h1, b.t_h1)
    np.testing.assert_array_equal(a.t_h0, b.t_h0)


def test_roc_identical_samples_diagonal():
    x = np.random.default_rng(7).exponential(size=3000)
    roc = build_roc(x, x.copy())
    np.testing.assert_array_equal(roc.p_d, roc.p_fa)


def test_roc_separated_samples_reach_corner():
    rng = np.random.default_rng(8)
    roc = build_roc(rng.uniform(10, 11, 500), rng.uniform(0, 1, 500))
    assert np.any((roc.p_fa == 0) & (roc.p_d == 1))


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10_000), n1=st.integers(1, 300), n0=st.integers(1, 300),
       grid=st.integers(2, 50))
def test_roc_monotone_and_bounded(seed, n1, n0, grid):
    rng = np.random.default_rng(seed)
    roc = build_roc(rng.exponential(2.0, n1), rng.exponential(1.0, n0), grid)
    assert roc.thresholds.size == roc.p_fa.size == roc.p_d.size
    assert np.all(np.diff(roc.thresholds) > 0)
    assert np.all(np.diff(roc.p_fa) <= 0) and np.all(np.diff(roc.p_d) <= 0)
    for p in (roc.p_fa, roc.p_d):
        assert np.all((p >= 0) & (p <= 1))
    assert roc.p_fa[0] == 1.0 and roc.p_d[0] == 1.0
    assert roc.p_fa[-1] == 0.0 and roc.p_d[-1] == 0.0


def test_p_d_at_fa_agrees_with_curve():
    rng = np.random.default_rng(9)
    t1, t0 = rng.exponential(3.0, 5000), rng.exponential(1.0, 5000)
    roc = build_roc(t1, t0)
    for pfa in (0.01, 0.05, 0.1, 0.5):
        assert roc.p_d_at(pfa) == pytest.approx(p_d_at_fa(t1, t0, pfa), abs=1e-12)
        # exponential oracle: p_d = p_fa^(1/3)
        assert p_d_at_fa(t1, t0, pfa) == pytest.approx(pfa ** (1 / 3), abs=0.03)


def test_p_d_spread_shrinks_with_trials(small):
    s, lay = small
    s = s.with_(sigma_rcs_mean=0.02)
    alpha = np.ones(s.N)
    spreads = []
    for trials in (500, 1000):
        vals = []
        for rep in range(20):
            r = run_hypothesis_mc(s, lay, PowerSplit(1, 1), alpha, trials, False, seed=100 + rep)
            vals.append(p_d_at_fa(r.t_h1, r.t_h0, 0.1))
        spreads.append(np.std(vals, ddof=1))
    assert spreads[1] / spreads[0] == pytest.approx(1 / math.sqrt(2), abs=0.3)


def test_roc_csv_roundtrip(tmp_path):
    rng = np.random.default_rng(10)
    roc = build_roc(rng.exponential(2, 100), rng.exponential(1, 100), seed=3)
    path = roc.write_csv(tmp_path / "roc.csv")
    data = np.genfromtxt(path, delimiter=",", names=True)
    assert data.dtype.names == ("threshold", "p_fa", "p_d")
    np.testing.assert_array_equal(data["p_d"], roc.p_d)
    np.testing.assert_array_equal(data["threshold"], roc.thresholds)
    with pytest.raises(FileExistsError):
        roc.write_csv(path)


def test_roc_rejects_empty():
    with pytest.raises(ValueError):
        build_roc([], [1.0])
