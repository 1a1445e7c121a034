"""Steering vectors, large-scale fading and channel realizations.

Deterministic line-of-sight phases use ``exp(-j 2 pi f_c tau)`` with
``tau = path_length / c``, i.e. one full cycle per wavelength of path.
The drone return uses a Swerling-1 RCS: one exponential draw per trial,
shared by the AP-drone-AP and AP-drone-repeater links.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import Layout, Scenario

FOUR_PI = 4.0 * np.pi


def steering(theta: float, M: int) -> np.ndarray:
    """ULA steering vector ``[1, e^{j pi cos theta}, ..., e^{j (M-1) pi cos theta}]``."""
    if M < 1:
        raise ValueError("M must be >= 1")
    return np.exp(1j * np.pi * np.arange(M) * np.cos(theta))


def _los_phase(path_length, wavelength: float):
    # reduce modulo one cycle before exponentiating: path lengths are ~1e4 wavelengths
    cycles = np.mod(np.asarray(path_length, dtype=float) / wavelength, 1.0)
    return np.exp(-2j * np.pi * cycles)


@dataclass(frozen=True)
class PathGains:
    beta_AD: float
    beta_An: np.ndarray
    beta_ADn: np.ndarray
    beta_AU: float
    beta_nnp: np.ndarray  # zero on the diagonal


def path_gains(s: Scenario, lay: Layout, sigma_rcs: float) -> PathGains:
    """Free-space and radar-equation path gains for every link.

    Args:
        s: scenario (wavelength is taken from ``s.f_c``).
        lay: node layout.
        sigma_rcs: radar cross section used for the two drone-bounce links, m^2.
    """
    lam2 = s.wavelength**2
    beta_AD = sigma_rcs * lam2 / (FOUR_PI**3 * lay.l_AD**4)
    beta_An = lam2 / (FOUR_PI * lay.l_An) ** 2
    beta_ADn = sigma_rcs * lam2 / (FOUR_PI**3 * (lay.l_AD * lay.l_Dn) ** 2)
    beta_AU = lam2 / (FOUR_PI * lay.ue_distance) ** 2
    with np.errstate(divide="ignore"):
        beta_nnp = np.where(lay.l_nnp > 0, lam2 / (FOUR_PI * lay.l_nnp) ** 2, 0.0)
    return PathGains(beta_AD, beta_An, beta_ADn, beta_AU, beta_nnp)


def draw_rcs(mean_rcs: float, rng: np.random.Generator) -> float:
    """Swerling-1 RCS draw: exponential with the given mean."""
    if mean_rcs < 0:
        raise ValueError("mean RCS must be >= 0")
    # always consume one variate so the stream layout does not depend on the mean
    e = rng.standard_exponential()
    return float(mean_rcs * e)


@dataclass(frozen=True)
class StaticChannels:
    """Deterministic part of every channel, with the drone links at unit RCS.

    ``H_AD = sqrt(rcs) * g_AD * a a^T``, ``H_AR = a0 g_AR^T`` and
    ``H_ADR = sqrt(rcs) * a g_ADR^T``.
    """

    a_theta: np.ndarray
    a_0: np.ndarray
    g_AD: complex
    g_AR: np.ndarray
    g_ADR: np.ndarray
    H_RR: np.ndarray
    gains_unit: PathGains  # path gains evaluated at sigma_rcs = 1


def static_channels(s: Scenario, lay: Layout) -> StaticChannels:
    lam = s.wavelength
    pg = path_gains(s, lay, 1.0)
    g_AD = np.sqrt(pg.beta_AD) * _los_phase(2.0 * lay.l_AD, lam)
    g_AR = np.sqrt(pg.beta_An) * _los_phase(lay.l_An, lam)
    g_ADR = np.sqrt(pg.beta_ADn) * _los_phase(lay.l_AD + lay.l_Dn, lam)
    H_RR = np.sqrt(pg.beta_nnp) * _los_phase(lay.l_nnp, lam)
    np.fill_diagonal(H_RR, 0.0)
    return StaticChannels(
        a_theta=steering(s.theta, s.M),
        a_0=steering(0.0, s.M),
        g_AD=complex(g_AD),
        g_AR=g_AR,
        g_ADR=g_ADR,
        H_RR=H_RR,
        gains_unit=pg,
    )


@dataclass(frozen=True)
class ChannelSet:
    """One channel realization."""

    H_AD: np.ndarray  # (M, M)
    H_AR: np.ndarray  # (M, N)
    H_ADR: np.ndarray  # (M, N)
    H_RR: np.ndarray  # (N, N)
    h_AU: np.ndarray  # (M,)
    gains: PathGains
    sigma_rcs_draw: float
    a_theta: np.ndarray

    def without_target(self) -> "ChannelSet":
        """Copy with both drone links removed (null hypothesis)."""
        return ChannelSet(
            H_AD=np.zeros_like(self.H_AD),
            H_AR=self.H_AR,
            H_ADR=np.zeros_like(self.H_ADR),
            H_RR=self.H_RR,
            h_AU=self.h_AU,
            gains=self.gains,
            sigma_rcs_draw=0.0,
            a_theta=self.a_theta,
        )


def draw_rayleigh(beta: float, M: int, rng: np.random.Generator) -> np.ndarray:
    """i.i.d. CN(0, beta) vector."""
    z = rng.standard_normal((M, 2))
    return np.sqrt(beta / 2.0) * (z[:, 0] + 1j * z[:, 1])


def realize_channels(
    s: Scenario,
    lay: Layout,
    rng: np.random.Generator,
    static: StaticChannels | None = None,
) -> ChannelSet:
    """Draw one realization: Swerling RCS first, then the Rayleigh UE link."""
    st = static if static is not None else static_channels(s, lay)
    rcs = draw_rcs(s.sigma_rcs_mean, rng)
    pg = path_gains(s, lay, rcs)
    h_AU = draw_rayleigh(pg.beta_AU, s.M, rng)
    amp = np.sqrt(rcs)
    a, a0 = st.a_theta, st.a_0
    return ChannelSet(
        H_AD=amp * st.g_AD * np.outer(a, a),
        H_AR=np.outer(a0, st.g_AR),
        H_ADR=amp * np.outer(a, st.g_ADR),
        H_RR=st.H_RR,
        h_AU=h_AU,
        gains=pg,
        sigma_rcs_draw=rcs,
        a_theta=a,
    )
