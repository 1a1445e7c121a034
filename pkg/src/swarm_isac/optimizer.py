"""Repeater gain optimization.

For a fixed power split, maximizing the approximate sensing SINR over the
squared gains ``t_n = alpha_n^2 in [0, alpha_max^2]`` is the linear-fractional
program

    max_t (beta_AD + sum_n c_n t_n) / (sigma_AP^2 + sigma_r^2 sum_n b_n t_n)

with ``c_n = beta_An beta_ADn`` and ``b_n = beta_An``. Dinkelbach's method
turns it into a sequence of linear problems over the box, each solved
elementwise at a vertex.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .channel import PathGains, path_gains
from .errors import InfeasibleUERequirement
from .geometry import Layout, Scenario
from .signal import PowerSplit

log = logging.getLogger(__name__)

LINEARIZED = "linearized"
PAPER_TYPO = "paper-typo"
VARIANTS = (LINEARIZED, PAPER_TYPO)


def power_split(s: Scenario, beta_AU: float) -> PowerSplit:
    """Full-budget split giving the user exactly its SINR requirement.

    Raises:
        InfeasibleUERequirement: when ``rho_max < b``.
    """
    a = s.gamma_ue_req / s.M
    b = s.gamma_ue_req * s.sigma_ue2 / (s.M * beta_AU)
    if s.rho_max < b:
        raise InfeasibleUERequirement(
            f"infeasible UE requirement: rho_max={s.rho_max:.6g} W < b={b:.6g} W")
    rho_c = (a * s.rho_max + b) / (1 + a)
    rho_s = (s.rho_max - b) / (1 + a)
    return PowerSplit(rho_s=rho_s, rho_c=rho_c)


def ratio(t: np.ndarray, betas: PathGains, sigma_r2: float, sigma_ap2: float) -> float:
    num = betas.beta_AD + np.dot(betas.beta_An * betas.beta_ADn, t)
    den = sigma_ap2 + sigma_r2 * np.dot(betas.beta_An, t)
    return float(num / den)


@dataclass
class OptimizerResult:
    """Output of :func:`dinkelbach` / :func:`optimize`.

    ``lambda_star`` is the optimal value of the reduced ratio (no power
    factor); ``gamma_s`` is the full approximate sensing SINR at the optimum.
    """

    t: np.ndarray
    power: PowerSplit
    lambda_star: float
    gamma_s: float
    iterations: int
    residuals: list[float]
    lambdas: list[float]
    active_set: np.ndarray
    converged: bool
    variant: str = LINEARIZED
    t_max: float = 0.0

    @property
    def alpha(self) -> np.ndarray:
        return np.sqrt(self.t)

    @property
    def fraction_active(self) -> float:
        n = self.t.size
        return float("nan") if n == 0 else self.active_set.size / n


def dinkelbach(
    s: Scenario,
    betas: PathGains,
    pw: PowerSplit,
    tol: float = 1e-12,
    max_iter: int = 100,
    variant: str = LINEARIZED,
) -> OptimizerResult:
    """Dinkelbach iteration for the squared repeater gains.

    Each step picks ``t_n = alpha_max^2`` where the linearized coefficient
    ``beta_An beta_ADn - lam sigma_r^2 beta_An`` is strictly positive and 0
    otherwise (``variant="paper-typo"`` drops ``sigma_r^2`` from that test),
    then sets ``lam`` to the ratio at the new point. The loop stops once the
    residual ``F(lam) / (lam D(t))`` is at most ``tol``, where
    ``F(lam) = max_t N(t) - lam D(t)``.
    """
    if variant not in VARIANTS:
        raise ValueError(f"unknown Dinkelbach variant {variant!r}")
    if tol <= 0:
        raise ValueError("tol must be positive")
    if s.alpha_max <= 0:
        raise ValueError("alpha_max must be positive")
    T = s.alpha_max**2
    c = betas.beta_An * betas.beta_ADn
    b = betas.beta_An
    sr2, sap2 = s.sigma_r2, s.sigma_ap2
    power_factor = pw.rho_s * s.M + pw.rho_c

    lam = betas.beta_AD / sap2
    lambdas = [lam]
    residuals: list[float] = []
    t_lam = np.zeros(b.size)  # vertex whose ratio is the current lam
    t = t_lam
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        if variant == LINEARIZED:
            coef = c - lam * sr2 * b
        else:
            coef = c - lam * b
        t = np.where(coef > 0, T, 0.0)
        num = betas.beta_AD + np.dot(c, t)
        den = sap2 + sr2 * np.dot(b, t)
        F = num - lam * den
        scale = lam * den
        res = F / scale if scale > 0 else F
        residuals.append(float(res))
        if res <= tol:
            converged = True
            # rounding can flip a coefficient sitting at zero; never return a worse vertex
            if F < 0:
                t = t_lam
            break
        new = num / den
        if variant == LINEARIZED and new < lam * (1 - 1e-12):
            raise RuntimeError("Dinkelbach ratio decreased; the subproblem was not solved exactly")
        lam = new
        t_lam = t
        lambdas.append(lam)
    if not converged:
        log.warning("Dinkelbach not converged after %d iterations (residual %.3g)", it, residuals[-1])
    lam_star = ratio(t, betas, sr2, sap2)
    return OptimizerResult(
        t=t,
        power=pw,
        lambda_star=lam_star,
        gamma_s=power_factor * lam_star,
        iterations=it,
        residuals=residuals,
        lambdas=lambdas,
        active_set=np.flatnonzero(t == T),
        converged=converged,
        variant=variant,
        t_max=T,
    )


def brute_force_oracle(
    betas: PathGains,
    sigma_r2: float,
    sigma_ap2: float,
    alpha_max: float,
    chunk: int = 1 << 14,
) -> tuple[np.ndarray, float]:
    """Enumerate every vertex of ``{0, alpha_max^2}^N`` (N <= 20).

    Ties go to fewer active repeaters, then to the lower vertex index.

    Returns:
        ``(t_best, ratio_best)`` where the ratio omits the power factor.
    """
    N = betas.beta_An.size
    if N > 20:
        raise ValueError("brute force limited to N <= 20")
    T = alpha_max**2
    c = betas.beta_An * betas.beta_ADn * T
    b = betas.beta_An * T
    shifts = np.arange(N)
    best = (-np.inf, 0, 0)  # (value, -popcount, -index) maximized lexicographically
    for start in range(0, 1 << N, chunk):
        idx = np.arange(start, min(start + chunk, 1 << N))
        bits = ((idx[:, None] >> shifts) & 1).astype(float)
        vals = (betas.beta_AD + bits @ c) / (sigma_ap2 + sigma_r2 * (bits @ b))
        vmax = vals.max()
        if vmax < best[0]:
            continue
        cand = np.flatnonzero(vals == vmax)
        pops = bits[cand].sum(axis=1)
        k = cand[np.lexsort((idx[cand], pops))[0]]
        key = (float(vmax), -int(bits[k].sum()), -int(idx[k]))
        if key > best:
            best = key
    index = -best[2]
    t_best = ((index >> shifts) & 1) * T
    return t_best.astype(float), best[0]


def optimize(
    s: Scenario,
    lay: Layout,
    betas: PathGains | None = None,
    tol: float = 1e-12,
    max_iter: int = 100,
    variant: str = LINEARIZED,
) -> OptimizerResult:
    """Power split followed by Dinkelbach; checks every constraint on the way out."""
    if betas is None:
        betas = path_gains(s, lay, s.sigma_rcs_mean)
    pw = power_split(s, betas.beta_AU)
    res = dinkelbach(s, betas, pw, tol=tol, max_iter=max_iter, variant=variant)
    T = s.alpha_max**2
    if not np.all((res.t >= 0) & (res.t <= T)):
        raise RuntimeError("repeater gain outside [0, alpha_max^2]")
    if pw.rho_s < 0 or pw.rho_c < 0 or pw.total > s.rho_max * (1 + 1e-12):
        raise RuntimeError("power split violates the budget")
    gamma_ue = pw.rho_c * s.M * betas.beta_AU / (pw.rho_s * betas.beta_AU + s.sigma_ue2)
    if gamma_ue < s.gamma_ue_req * (1 - 1e-9):
        raise RuntimeError("power split misses the user SINR requirement")
    return res
