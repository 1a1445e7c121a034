"""Closed-form user / sensing SINR and their Monte-Carlo counterparts."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import PathGains, path_gains, static_channels
from .geometry import Layout, Scenario
from .mc import run_chunks
from .signal import PowerSplit, check_gains, check_stability, draw_trials, simulate_batch


def user_sinr_closed(s: Scenario, pw: PowerSplit, beta_AU: float) -> float:
    """``rho_c M beta_AU / (rho_s beta_AU + sigma_UE^2)``."""
    return pw.rho_c * s.M * beta_AU / (pw.rho_s * beta_AU + s.sigma_ue2)


def sensing_sinr_approx(s: Scenario, betas: PathGains, pw: PowerSplit, alpha) -> float:
    """Approximate sensing SINR with the inter-repeater coupling neglected.

    Numerator: direct plus repeater-relayed drone echoes; denominator:
    amplified repeater noise plus AP noise. ``betas`` should be evaluated at
    the mean RCS (the expression is linear in the RCS).
    """
    t = check_gains(alpha) ** 2
    num = betas.beta_AD + np.sum(t * betas.beta_An * betas.beta_ADn)
    den = s.sigma_r2 * np.sum(t * betas.beta_An) + s.sigma_ap2
    return float((pw.rho_s * s.M + pw.rho_c) * num / den)


def ratio_stderr(u: np.ndarray, v: np.ndarray) -> float:
    """Delta-method standard error of ``mean(u) / mean(v)``."""
    n = u.size
    if n < 2:
        return float("nan")
    mu, mv = u.mean(), v.mean()
    cov = np.cov(np.vstack([u, v]), ddof=1)
    r = mu / mv
    var = (cov[0, 0] - 2 * r * cov[0, 1] + r * r * cov[1, 1]) / (mv * mv * n)
    return float(np.sqrt(max(var, 0.0)))


@dataclass(frozen=True)
class SensingMC:
    """Monte-Carlo sensing SINR with the interference broken down by source.

    ``estimate`` counts amplified repeater noise and AP noise as interference
    (the terms the closed form keeps); ``estimate_full`` additionally counts
    the AP -> repeater -> AP self-loop of the transmitted signal.
    """

    estimate: float
    stderr: float
    estimate_full: float
    stderr_full: float
    useful_power: float
    self_loop_power: float
    repeater_noise_power: float
    ap_noise_power: float
    trials: int
    include_rr: bool

    @property
    def self_loop_to_noise(self) -> float:
        return self.self_loop_power / (self.repeater_noise_power + self.ap_noise_power)


def _norm2(z: np.ndarray) -> np.ndarray:
    return np.einsum("ij,ij->i", z.real, z.real) + np.einsum("ij,ij->i", z.imag, z.imag)


def sensing_sinr_mc(
    s: Scenario,
    lay: Layout,
    pw: PowerSplit,
    alpha,
    trials: int,
    include_rr: bool,
    seed: int,
    workers: int = 1,
) -> SensingMC:
    """Ratio of sample means of useful and interference energy at the AP.

    Each trial redraws the Swerling RCS, the Rayleigh user channel (and hence
    both precoders), the symbols and all noises.

    Raises:
        UnstableRepeaterLoop: ``include_rr`` with an unstable gain vector.
    """
    if trials < 100:
        raise ValueError("need at least 100 trials")
    alpha = check_gains(alpha)
    st = static_channels(s, lay)
    beta_AU = st.gains_unit.beta_AU

    def block(a, b):
        rx = simulate_batch(st, pw, alpha, draw_trials(s, beta_AU, seed, a, b), include_rr)
        return np.stack([
            _norm2(rx.drone_echo + rx.repeater_useful),
            _norm2(rx.repeater_self_loop),
            _norm2(rx.repeater_noise + rx.ap_noise),
            _norm2(rx.repeater_self_loop + rx.repeater_noise + rx.ap_noise),
            _norm2(rx.repeater_noise),
            _norm2(rx.ap_noise),
        ])

    acc = np.concatenate(run_chunks(block, trials, workers), axis=1)
    useful, loop, noise, full, rnoise, apnoise = acc
    return SensingMC(
        estimate=float(useful.mean() / noise.mean()),
        stderr=ratio_stderr(useful, noise),
        estimate_full=float(useful.mean() / full.mean()),
        stderr_full=ratio_stderr(useful, full),
        useful_power=float(useful.mean()),
        self_loop_power=float(loop.mean()),
        repeater_noise_power=float(rnoise.mean()),
        ap_noise_power=float(apnoise.mean()),
        trials=trials,
        include_rr=include_rr,
    )


def user_sinr_mc(s: Scenario, lay: Layout, pw: PowerSplit, trials: int, seed: int) -> tuple[float, float]:
    """Monte-Carlo user SINR with the null-space sensing precoder.

    Returns:
        ``(estimate, stderr)``. With perfect CSI the sensing beam leaks
        nothing to the UE, so this exceeds :func:`user_sinr_closed`.
    """
    st = static_channels(s, lay)
    beta_AU = st.gains_unit.beta_AU
    d = draw_trials(s, beta_AU, seed, 0, trials)
    rx = simulate_batch(st, pw, np.zeros(s.N), d)
    h = d.h_AU
    sig = np.abs(np.sum(h * np.sqrt(pw.rho_c) * rx.w_c, axis=1)) ** 2
    intf = np.abs(np.sum(h * np.sqrt(pw.rho_s) * rx.w_s, axis=1) + d.n_UE) ** 2
    return float(sig.mean() / intf.mean()), ratio_stderr(sig, intf)


@dataclass(frozen=True)
class SinrReport:
    """User and sensing SINR at one operating point.

    ``gamma_s_full`` solves the inter-repeater feedback loop (NaN when the
    loop is unstable); ``gamma_s_norr`` ignores the coupling but keeps the
    self-loop as interference; ``gamma_s_no_loop`` also drops the self-loop,
    which is the interference the closed form ``gamma_s_approx`` keeps.
    """

    gamma_ue_closed: float
    gamma_ue_mc: float
    gamma_s_full: float
    gamma_s_norr: float
    gamma_s_no_loop: float
    gamma_s_approx: float
    mc_trials: int
    mc_stderr: float
    mc_stderr_no_loop: float
    self_loop_to_noise: float
    stability_radius: float


def sinr_report(
    s: Scenario,
    lay: Layout,
    pw: PowerSplit,
    alpha,
    trials: int,
    seed: int,
    workers: int = 1,
) -> SinrReport:
    """Closed forms and Monte-Carlo estimates of every SINR at ``(pw, alpha)``."""
    alpha = check_gains(alpha)
    st = static_channels(s, lay)
    betas = path_gains(s, lay, s.sigma_rcs_mean)
    stable, radius = check_stability(st.H_RR, alpha)
    norr = sensing_sinr_mc(s, lay, pw, alpha, trials, False, seed, workers)
    full = math.nan
    if stable:
        full = sensing_sinr_mc(s, lay, pw, alpha, trials, True, seed, workers).estimate_full
    ue, _ = user_sinr_mc(s, lay, pw, trials, seed)
    return SinrReport(
        gamma_ue_closed=user_sinr_closed(s, pw, betas.beta_AU),
        gamma_ue_mc=ue,
        gamma_s_full=full,
        gamma_s_norr=norr.estimate_full,
        gamma_s_no_loop=norr.estimate,
        gamma_s_approx=sensing_sinr_approx(s, betas, pw, alpha),
        mc_trials=trials,
        mc_stderr=norr.stderr_full,
        mc_stderr_no_loop=norr.stderr,
        self_loop_to_noise=norr.self_loop_to_noise,
        stability_radius=radius,
    )
