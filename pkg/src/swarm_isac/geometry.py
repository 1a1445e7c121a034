"""Scenario parameters and planar placement of AP, repeaters, UE and drone.

The AP sits at the origin with its ULA along the x axis. Repeaters lie on the
positive x axis (the direction the AP->repeater steering vector a(0) points
to) and the drone sits at angle ``theta`` from that axis at range ``l_AD``.
Everything here is in linear SI units; dB handling lives in :mod:`config`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import GeometryError

SPEED_OF_LIGHT = 299_792_458.0  # m/s


@dataclass(frozen=True)
class Scenario:
    """Physical parameters of one system configuration (linear units).

    Attributes:
        M: AP antennas.
        N: number of repeaters.
        f_c: carrier frequency (Hz).
        l_AD, l_AU, l_A1: AP-drone, AP-UE and AP-first-repeater distances (m).
        d: inter-repeater spacing (m).
        theta: drone angle from the ULA axis (rad).
        sigma_rcs_mean: mean radar cross section (m^2).
        sigma_r2, sigma_ap2, sigma_ue2: noise powers at repeater, AP, UE (W).
        alpha_max: maximum amplitude gain of a repeater (linear).
        gamma_ue_req: user SINR requirement (linear).
        rho_max: transmit power budget (W).
    """

    M: int
    N: int
    f_c: float
    l_AD: float
    l_AU: float
    l_A1: float
    d: float
    theta: float
    sigma_rcs_mean: float
    sigma_r2: float
    sigma_ap2: float
    sigma_ue2: float
    alpha_max: float
    gamma_ue_req: float
    rho_max: float

    def __post_init__(self):
        if int(self.M) != self.M or self.M < 1:
            raise GeometryError(f"M must be a positive integer, got {self.M}")
        if int(self.N) != self.N or self.N < 0:
            raise GeometryError(f"N must be a non-negative integer, got {self.N}")
        for name in ("f_c", "l_AD", "l_AU", "l_A1"):
            if not getattr(self, name) > 0:
                raise GeometryError(f"{name} must be > 0, got {getattr(self, name)}")
        if self.N > 0 and not self.d > 0:
            raise GeometryError(f"d must be > 0 when N > 0, got {self.d}")
        for name in ("sigma_r2", "sigma_ap2", "sigma_ue2", "rho_max"):
            if not getattr(self, name) > 0:
                raise GeometryError(f"{name} must be > 0, got {getattr(self, name)}")
        if self.sigma_rcs_mean < 0:
            raise GeometryError("sigma_rcs_mean must be >= 0")
        if self.alpha_max < 0 or self.gamma_ue_req < 0:
            raise GeometryError("alpha_max and gamma_ue_req must be >= 0")
        if not 0.0 <= self.theta <= math.pi:
            raise GeometryError(f"theta must lie in [0, pi], got {self.theta}")

    @property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / self.f_c

    def with_(self, **changes) -> "Scenario":
        return replace(self, **changes)


@dataclass(frozen=True)
class Layout:
    """Positions (m) and all pairwise distances used by the channel models."""

    ap_position: np.ndarray
    ula_axis: np.ndarray
    repeater_positions: np.ndarray  # (N, 2)
    drone_position: np.ndarray
    ue_distance: float
    l_An: np.ndarray  # (N,)
    l_Dn: np.ndarray  # (N,)
    l_nnp: np.ndarray  # (N, N)
    l_AD: float


def build_layout(s: Scenario) -> Layout:
    """Place the nodes in the plane and compute every distance."""
    if s.N > 0 and not s.d > 0:
        raise GeometryError("repeater spacing d must be positive")
    ap = np.zeros(2)
    axis = np.array([1.0, 0.0])
    l_An = s.l_A1 + np.arange(s.N) * s.d
    reps = np.outer(l_An, axis)
    drone = s.l_AD * np.array([math.cos(s.theta), math.sin(s.theta)])
    l_Dn = np.linalg.norm(drone[None, :] - reps, axis=1)
    idx = np.arange(s.N)
    # exact multiples of d keep the matrix symmetric with an exact zero diagonal
    l_nnp = np.abs(idx[:, None] - idx[None, :]) * s.d
    return Layout(
        ap_position=ap,
        ula_axis=axis,
        repeater_positions=reps,
        drone_position=drone,
        ue_distance=s.l_AU,
        l_An=l_An,
        l_Dn=l_Dn,
        l_nnp=l_nnp.astype(float),
        l_AD=float(s.l_AD),
    )
