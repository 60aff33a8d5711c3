"""Canonical asymptotically Robertson-Walker background family.

The conformal ambient metric is -(dx^0)^2 + sigma_ij(x^0, x) dx^i dx^j on
(a, 0) x S_0, with conformal factor exp(2*(f + psi)).  The family is chosen so
that every defining ARW condition is an exact identity:

    f(tau)   = (1/gamma_tilde) * log(gamma_tilde * sqrt(m) * (-tau))
    psi      = eps * (-tau)^p_psi * cos(k.x)
    sigma_ij = (1 + delta * (-tau)^p_sigma) * delta_ij

so |f'|^2 exp(2*gamma_tilde*f) == m and f'' + gamma_tilde*|f'|^2 == 0 hold
pointwise, exp(psi) -> 1 and sigma -> delta_ij as tau -> 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateMetric, OutOfRange
from .grid import Grid, identity_field


@dataclass(frozen=True)
class BackgroundParams:
    """Parameters of the canonical ARW family.

    ``gamma_tilde = (n + omega - 2)/2`` and ``gamma = gamma_tilde/n`` are
    always derived, never stored.
    """

    n: int
    omega: float
    mass_m: float = 1.0
    epsilon: float = 0.0
    psi_mode: tuple = (1,)
    p_psi: int = 2
    delta: float = 0.0
    p_sigma: int = 2
    a: float = -2.0

    def __post_init__(self):
        if self.n not in (1, 2):
            raise ValueError(f"spatial dimension must be 1 or 2, got {self.n}")
        if self.n + self.omega - 2 <= 0:
            raise ValueError(
                f"need n + omega - 2 > 0, got {self.n + self.omega - 2}"
            )
        if self.mass_m <= 0:
            raise ValueError("mass_m must be positive")
        if self.epsilon < 0:
            raise ValueError("epsilon must be nonnegative")
        if self.delta < 0:
            raise ValueError("delta must be nonnegative")
        # p_psi >= 0 is accepted here so that validate_arw can exhibit the
        # failure of a non-decaying psi; admissible families have p_psi >= 2.
        if self.p_psi < 0:
            raise ValueError("p_psi must be nonnegative")
        if self.p_sigma < 2:
            raise ValueError("p_sigma must be at least 2")
        if self.a >= 0:
            raise ValueError("past endpoint a must be negative")
        if self.delta * abs(self.a) ** self.p_sigma >= 1:
            raise ValueError("delta * |a|^p_sigma must stay below 1")
        mode = tuple(int(k) for k in np.atleast_1d(self.psi_mode))
        if len(mode) != self.n:
            raise ValueError(f"psi_mode must have {self.n} components")
        object.__setattr__(self, "psi_mode", mode)

    @property
    def gamma_tilde(self):
        return 0.5 * (self.n + self.omega - 2.0)

    @property
    def gamma(self):
        return self.gamma_tilde / self.n


def _check_tau(params, tau):
    tau = np.asarray(tau, dtype=float)
    if np.any(tau >= 0.0) or np.any(tau <= params.a):
        raise OutOfRange(
            f"tau must satisfy {params.a} < tau < 0"
        )
    return tau


def f_eval(params, tau):
    """Conformal factor f and its first two tau-derivatives at tau.

    Accepts scalars or arrays; all three identities of the canonical family
    (mass identity, vanishing f'' + gamma_tilde |f'|^2, -f' > 0) hold exactly.
    """
    tau = _check_tau(params, tau)
    gt = params.gamma_tilde
    f = np.log(gt * math.sqrt(params.mass_m) * (-tau)) / gt
    fp = 1.0 / (gt * tau)
    fpp = -1.0 / (gt * tau * tau)
    return f, fp, fpp


def exp_2f(params, tau):
    """exp(2 f(tau)) via the closed form (gamma_tilde sqrt(m) (-tau))^(2/gt).

    Computed directly from the power law so it stays accurate when f -> -inf.
    """
    tau = _check_tau(params, tau)
    gt = params.gamma_tilde
    return (gt * math.sqrt(params.mass_m) * (-tau)) ** (2.0 / gt)


def _mode_fields(params, grid):
    phase = sum(k * x for k, x in zip(params.psi_mode, grid.coords))
    q = np.cos(phase)
    dq = np.stack(
        [-k * np.sin(phase) for k in params.psi_mode], axis=-1
    )
    return q, dq


def psi_eval(params, tau, grid):
    """psi, its tau-derivative, and its spatial gradient at coordinate time tau.

    ``tau`` may be scalar or a scalar field on ``grid`` (graph composition).
    """
    tau = _check_tau(params, tau)
    eps, p = params.epsilon, params.p_psi
    q, dq = _mode_fields(params, grid)
    amp = eps * (-tau) ** p
    amp_tau = -eps * p * (-tau) ** (p - 1) if p > 0 else np.zeros_like(tau * 1.0)
    psi = amp * q
    psi_tau = amp_tau * q
    psi_x = np.asarray(amp)[..., None] * dq
    return psi, psi_tau, psi_x


def sigma_scale(params, tau):
    """Conformal-scale factor s(tau) of sigma_ij = s * delta_ij and ds/dtau."""
    tau = _check_tau(params, tau)
    d, p = params.delta, params.p_sigma
    s = 1.0 + d * (-tau) ** p
    s_dot = -d * p * (-tau) ** (p - 1)
    if np.any(s <= 0.0):
        raise DegenerateMetric("sigma scale factor is not positive")
    return s, s_dot


def sigma_eval(params, tau, grid):
    """Spatial metric sigma_ij, its tau-derivative, and its inverse on ``grid``."""
    s, s_dot = sigma_scale(params, tau)
    eye = identity_field(grid)
    s = np.broadcast_to(np.asarray(s), grid.shape)[..., None, None]
    s_dot = np.broadcast_to(np.asarray(s_dot), grid.shape)[..., None, None]
    return s * eye, s_dot * eye, eye / s


@dataclass(frozen=True)
class ConditionCheck:
    name: str
    passed: bool
    worst_tau: float
    worst_value: float
    detail: str


@dataclass(frozen=True)
class ValidationReport:
    params: BackgroundParams
    checks: tuple

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def lines(self):
        out = []
        for c in self.checks:
            status = "PASS" if c.passed else "FAIL"
            out.append(
                f"{status}  {c.name:28s} worst tau={c.worst_tau:+.3e} "
                f"value={c.worst_value:.3e}  {c.detail}"
            )
        return out


def validate_arw(params, n_samples=48):
    """Check the defining ARW conditions on a geometric tau-sequence toward 0."""
    taus = -np.geomspace(abs(params.a) / 2.0, 1e-8, n_samples)
    f, fp, fpp = f_eval(params, taus)
    gt = params.gamma_tilde
    checks = []

    def record(name, values, tol, detail):
        """Pass iff every value is <= tol; worst case is the largest value."""
        values = np.asarray(values, dtype=float)
        idx = int(np.argmax(values))
        checks.append(
            ConditionCheck(
                name=name,
                passed=bool(np.all(values <= tol)),
                worst_tau=float(taus[min(idx, len(taus) - 1)]),
                worst_value=float(values[idx]),
                detail=detail,
            )
        )

    record("f_prime_negative", fp, -1e-300, "-f' > 0 on the whole range")

    mass = fp**2 * exp_2f(params, taus) ** gt
    record(
        "mass_identity", np.abs(mass - params.mass_m), 1e-12,
        f"|f'|^2 e^(2 gamma_tilde f) = m = {params.mass_m}",
    )

    record(
        "f_second_identity", np.abs(fpp + gt * fp**2) * taus**2, 1e-12,
        "f'' + gamma_tilde |f'|^2 = 0 (residual scaled by tau^2)",
    )

    # |D^m f| / |f'|^m for the closed form equals (m-1)! * gamma_tilde^(m-1)
    ratios = []
    for m in range(1, 5):
        dmf = math.factorial(m - 1) / (gt * np.abs(taus) ** m)
        ratios.append(dmf / np.abs(fp) ** m)
    bound = math.factorial(3) * max(gt, 1.0) ** 3 + 1.0
    record(
        "derivative_bounds", np.concatenate(ratios), bound,
        f"|D^m f| <= c_m |f'|^m for m <= 4 (c_m = {bound:g})",
    )

    grid = Grid(n=params.n, points_per_axis=16)
    sup_psi = np.array(
        [np.max(np.abs(psi_eval(params, t, grid)[0])) for t in taus]
    )
    if params.epsilon == 0.0:
        decaying = True
    else:
        monotone = bool(np.all(np.diff(sup_psi) <= 1e-15))
        vanishing = bool(sup_psi[-1] <= 1e-6 * sup_psi[0])
        decaying = monotone and vanishing
    idx = int(np.argmax(sup_psi))
    checks.append(
        ConditionCheck(
            "psi_limit", decaying, float(taus[idx]), float(sup_psi[idx]),
            "e^psi -> 1 monotonically as tau -> 0",
        )
    )

    sigma_gap = np.array([params.delta * (-t) ** params.p_sigma for t in taus])
    record(
        "sigma_limit", sigma_gap[-1:], 1e-10,
        "sigma_ij -> sigma_bar_ij as tau -> 0",
    )

    return ValidationReport(params=params, checks=tuple(checks))
