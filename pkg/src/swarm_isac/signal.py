"""Precoders and the transmit -> repeater loop -> receive signal chain.

Single-realization functions (``receive_ap`` etc.) work on explicit channel
matrices. :func:`simulate_batch` evaluates the same chain for many trials at
once from the rank-one channel factors and is what the Monte-Carlo code uses;
the test-suite checks the two paths agree.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .channel import ChannelSet, StaticChannels, draw_rayleigh, draw_rcs, steering
from .errors import SingularSystem, UnservableSensingDirection, UnstableRepeaterLoop
from .geometry import Scenario

STABILITY_MARGIN = 1e-6
RESIDUAL_TOL = 1e-9
QPSK = np.exp(1j * (np.pi / 4 + np.pi / 2 * np.arange(4)))


@dataclass(frozen=True)
class Precoders:
    w_c: np.ndarray
    w_s: np.ndarray


@dataclass(frozen=True)
class PowerSplit:
    rho_s: float
    rho_c: float

    @property
    def total(self) -> float:
        return self.rho_s + self.rho_c


@dataclass(frozen=True)
class ApRx:
    """Received AP snapshot and its additive decomposition."""

    y_AP: np.ndarray
    drone_echo: np.ndarray
    repeater_useful: np.ndarray
    repeater_self_loop: np.ndarray
    repeater_noise: np.ndarray
    ap_noise: np.ndarray

    @property
    def useful(self) -> np.ndarray:
        return self.drone_echo + self.repeater_useful

    @property
    def interference(self) -> np.ndarray:
        return self.repeater_self_loop + self.repeater_noise + self.ap_noise


def check_gains(alpha, alpha_max: float | None = None) -> np.ndarray:
    alpha = np.asarray(alpha, dtype=float)
    if np.any(alpha < 0):
        raise ValueError("repeater gains must be non-negative")
    if alpha_max is not None and np.any(alpha > alpha_max * (1 + 1e-12)):
        raise ValueError("repeater gain above alpha_max")
    return alpha


def make_precoders(h_AU_hat: np.ndarray, theta: float) -> Precoders:
    """MRT user precoder and a null-space-projected sensing precoder.

    The sensing beam ``a*(theta)/||a||`` is projected onto the orthogonal
    complement of ``conj(h)`` so that ``h^T w_s = 0`` (the UE sees ``h^T x``),
    then renormalized to unit norm.

    Raises:
        UnservableSensingDirection: if nothing is left after projection.
    """
    h = np.asarray(h_AU_hat, dtype=complex)
    hn = np.linalg.norm(h)
    if hn == 0:
        raise ValueError("user channel estimate must be non-zero")
    w_c = h.conj() / hn
    a = steering(theta, h.size)
    u = a.conj() / np.linalg.norm(a)
    # w_c is the unit vector spanning conj(h)
    p = u - w_c * np.vdot(w_c, u)
    pn = np.linalg.norm(p)
    if pn < 1e-12:
        raise UnservableSensingDirection("sensing direction lies in the user channel span")
    w_s = p / pn
    # one re-orthogonalization pass pushes the leakage down to rounding level
    w_s = w_s - w_c * np.vdot(w_c, w_s)
    w_s /= np.linalg.norm(w_s)
    return Precoders(w_c=w_c, w_s=w_s)


def transmit(p: Precoders, pw: PowerSplit, s_s: complex, s_c: complex) -> np.ndarray:
    """Baseband AP snapshot ``sqrt(rho_s) w_s s_s + sqrt(rho_c) w_c s_c``."""
    return np.sqrt(pw.rho_s) * p.w_s * s_s + np.sqrt(pw.rho_c) * p.w_c * s_c


def check_stability(H_RR: np.ndarray, alpha) -> tuple[bool, float]:
    """Spectral radius of the loop gain ``diag(alpha) H_RR``.

    Returns:
        ``(stable, radius)`` with ``stable`` true iff radius < 1 - 1e-6.
    """
    alpha = np.asarray(alpha, dtype=float)
    if alpha.size == 0 or not np.any(alpha):
        return True, 0.0
    radius = float(np.max(np.abs(np.linalg.eigvals(alpha[:, None] * H_RR))))
    return radius < 1.0 - STABILITY_MARGIN, radius


def _loop_matrix(H_RR: np.ndarray, alpha: np.ndarray) -> np.ndarray:
    return np.eye(alpha.size) - alpha[:, None] * H_RR


def solve_repeater_tx(ch: ChannelSet, alpha, x: np.ndarray, n_R: np.ndarray) -> np.ndarray:
    """Repeater output ``(I - Phi H_RR)^{-1} Phi (H_AR^T x + H_ADR^T x + n_R)``.

    Raises:
        UnstableRepeaterLoop: spectral radius of ``Phi H_RR`` is not below one.
        SingularSystem: the linear solve failed or its residual is too large.
    """
    alpha = check_gains(alpha)
    stable, radius = check_stability(ch.H_RR, alpha)
    if not stable:
        raise UnstableRepeaterLoop(radius)
    drive = ch.H_AR.T @ x + ch.H_ADR.T @ x + n_R
    rhs = alpha * drive
    if alpha.size == 0:
        return rhs
    A = _loop_matrix(ch.H_RR, alpha)
    try:
        y = np.linalg.solve(A, rhs)
    except np.linalg.LinAlgError as exc:
        raise SingularSystem(str(exc)) from exc
    fixed_point = alpha * (drive + ch.H_RR @ y)
    scale = max(np.linalg.norm(y), np.finfo(float).tiny)
    if np.linalg.norm(y - fixed_point) > RESIDUAL_TOL * scale:
        raise SingularSystem("feedback solve residual above tolerance")
    return y


def _repeater_operator(H_RR, alpha: np.ndarray, include_rr: bool):
    """Return a callable z -> K z with K = (I - Phi H_RR)^{-1} Phi or K = Phi."""
    if not include_rr or alpha.size == 0:
        return lambda z: alpha * z
    stable, radius = check_stability(H_RR, alpha)
    if not stable:
        raise UnstableRepeaterLoop(radius)
    try:
        lu = scipy.linalg.lu_factor(_loop_matrix(H_RR, alpha), check_finite=True)
    except (ValueError, np.linalg.LinAlgError) as exc:
        raise SingularSystem(str(exc)) from exc

    def apply(z):
        # z is (..., N); solve along the last axis
        rhs = np.moveaxis(alpha * z, -1, 0)
        out = scipy.linalg.lu_solve(lu, rhs.reshape(alpha.size, -1))
        return np.moveaxis(out.reshape(rhs.shape), 0, -1)

    return apply


def receive_ap(
    ch: ChannelSet,
    alpha,
    x: np.ndarray,
    n_R: np.ndarray,
    n_AP: np.ndarray,
    include_rr: bool = True,
) -> ApRx:
    """AP snapshot with its five additive components.

    With ``include_rr=False`` the inter-repeater coupling is ignored and the
    repeaters simply apply ``Phi``.
    """
    alpha = check_gains(alpha)
    K = _repeater_operator(ch.H_RR, alpha, include_rr)
    useful_in = ch.H_ADR.T @ x
    loop_in = ch.H_AR.T @ x
    drone_echo = ch.H_AD @ x
    rep_useful = ch.H_AR @ K(useful_in)
    rep_loop = ch.H_AR @ K(loop_in)
    rep_noise = ch.H_AR @ K(np.asarray(n_R, dtype=complex))
    y = drone_echo + rep_useful + rep_loop + rep_noise + n_AP
    return ApRx(y, drone_echo, rep_useful, rep_loop, rep_noise, np.asarray(n_AP))


def receive_ue(ch: ChannelSet, x: np.ndarray, n_UE: complex) -> complex:
    return complex(ch.h_AU @ x + n_UE)


# ---------------------------------------------------------------------------
# batched Monte-Carlo path


@dataclass(frozen=True)
class TrialDraws:
    """Random inputs for a block of trials, one row per trial."""

    rcs: np.ndarray  # (T,)
    h_AU: np.ndarray  # (T, M)
    s_s: np.ndarray  # (T,)
    s_c: np.ndarray  # (T,)
    n_R: np.ndarray  # (T, N)
    n_AP: np.ndarray  # (T, M)
    n_UE: np.ndarray  # (T,)

    def __len__(self):
        return self.rcs.size


def trial_rng(seed: int, index: int) -> np.random.Generator:
    """Independent stream for trial ``index``; any partition of trials reproduces it."""
    return np.random.default_rng([int(seed), int(index)])


def draw_trial(s: Scenario, beta_AU: float, rng: np.random.Generator):
    """Draw one trial in a fixed order: RCS, UE channel, symbols, noises.

    Repeater noise comes last so that configurations differing only in N
    share every other random input.
    """
    rcs = draw_rcs(s.sigma_rcs_mean, rng)
    h = draw_rayleigh(beta_AU, s.M, rng)
    sym = QPSK[rng.integers(0, 4, size=2)]
    n_AP = draw_rayleigh(s.sigma_ap2, s.M, rng)
    n_UE = draw_rayleigh(s.sigma_ue2, 1, rng)[0]
    n_R = draw_rayleigh(s.sigma_r2, s.N, rng)
    return rcs, h, sym[0], sym[1], n_R, n_AP, n_UE


def draw_trials(s: Scenario, beta_AU: float, seed: int, start: int, stop: int) -> TrialDraws:
    rows = [draw_trial(s, beta_AU, trial_rng(seed, i)) for i in range(start, stop)]
    if not rows:
        z = np.zeros(0)
        return TrialDraws(z, np.zeros((0, s.M), complex), z.astype(complex), z.astype(complex),
                          np.zeros((0, s.N), complex), np.zeros((0, s.M), complex), z.astype(complex))
    cols = list(zip(*rows))
    return TrialDraws(
        rcs=np.array(cols[0]),
        h_AU=np.stack(cols[1]),
        s_s=np.array(cols[2]),
        s_c=np.array(cols[3]),
        n_R=np.stack(cols[4]).reshape(len(rows), s.N),
        n_AP=np.stack(cols[5]),
        n_UE=np.array(cols[6]),
    )


def batch_precoders(h_AU: np.ndarray, a_theta: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Row-wise :func:`make_precoders` for a (T, M) stack of user channels."""
    u = a_theta.conj() / np.linalg.norm(a_theta)
    w_c = h_AU.conj() / np.linalg.norm(h_AU, axis=1, keepdims=True)
    p = u[None, :] - w_c * (w_c.conj() @ u)[:, None]
    pn = np.linalg.norm(p, axis=1, keepdims=True)
    if np.any(pn < 1e-12):
        raise UnservableSensingDirection("sensing direction lies in the user channel span")
    w_s = p / pn
    w_s = w_s - w_c * np.sum(w_c.conj() * w_s, axis=1, keepdims=True)
    w_s /= np.linalg.norm(w_s, axis=1, keepdims=True)
    return w_c, w_s


@dataclass(frozen=True)
class BatchRx:
    """Per-trial AP components, each (T, M)."""

    drone_echo: np.ndarray
    repeater_useful: np.ndarray
    repeater_self_loop: np.ndarray
    repeater_noise: np.ndarray
    ap_noise: np.ndarray
    x: np.ndarray
    w_s: np.ndarray
    w_c: np.ndarray

    @property
    def y_AP(self) -> np.ndarray:
        return (self.drone_echo + self.repeater_useful + self.repeater_self_loop
                + self.repeater_noise + self.ap_noise)


def simulate_batch(
    st: StaticChannels,
    pw: PowerSplit,
    alpha,
    draws: TrialDraws,
    include_rr: bool = False,
    target: bool = True,
) -> BatchRx:
    """Vectorized :func:`receive_ap` over a block of trials.

    Args:
        st: deterministic channel factors (drone links at unit RCS).
        pw: power split.
        alpha: repeater amplitude gains, length N.
        draws: per-trial random inputs.
        include_rr: solve the inter-repeater feedback loop.
        target: ``False`` removes both drone links (null hypothesis) while
            keeping every other random input identical.
    """
    alpha = check_gains(alpha)
    K = _repeater_operator(st.H_RR, alpha, include_rr)
    w_c, w_s = batch_precoders(draws.h_AU, st.a_theta)
    x = (np.sqrt(pw.rho_s) * w_s * draws.s_s[:, None]
         + np.sqrt(pw.rho_c) * w_c * draws.s_c[:, None])
    a, a0 = st.a_theta, st.a_0
    aTx = x @ a
    a0Tx = x @ a0
    amp = np.sqrt(draws.rcs) if target else np.zeros_like(draws.rcs)
    drone = (amp * st.g_AD * aTx)[:, None] * a[None, :]
    useful_in = (amp * aTx)[:, None] * st.g_ADR[None, :]
    loop_in = a0Tx[:, None] * st.g_AR[None, :]
    if alpha.size:
        c_useful = K(useful_in) @ st.g_AR
        c_loop = K(loop_in) @ st.g_AR
        c_noise = K(draws.n_R) @ st.g_AR
    else:
        c_useful = c_loop = c_noise = np.zeros(len(draws), complex)
    return BatchRx(
        drone_echo=drone,
        repeater_useful=c_useful[:, None] * a0[None, :],
        repeater_self_loop=c_loop[:, None] * a0[None, :],
        repeater_noise=c_noise[:, None] * a0[None, :],
        ap_noise=draws.n_AP,
        x=x,
        w_s=w_s,
        w_c=w_c,
    )
