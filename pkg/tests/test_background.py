import numpy as np
import pytest

from arwflow.background import (
    BackgroundParams,
    exp_2f,
    f_eval,
    psi_eval,
    sigma_eval,
    sigma_scale,
    validate_arw,
)
from arwflow.errors import OutOfRange
from arwflow.grid import Grid


def canonical(n=2, omega=2.0, **kw):
    kw.setdefault("psi_mode", (1,) if n == 1 else (1, 0))
    return BackgroundParams(n=n, omega=omega, **kw)


def test_exponent_values():
    p = canonical()  # n=2, omega=2 -> gamma_tilde = 1, gamma = 1/2
    assert p.gamma_tilde == 1.0
    assert p.gamma == 0.5
    p1 = canonical(n=1, omega=3.0)
    assert p1.gamma_tilde == 1.0
    assert p1.gamma == 1.0


def test_f_eval_closed_form_point():
    # gamma_tilde = 1, m = 1, tau = -1: f = log(1) = 0, f' = -1, f'' = -1
    p = canonical()
    f, fp, fpp = f_eval(p, -1.0)
    assert f == 0.0
    assert fp == -1.0
    assert fpp == -1.0
    assert exp_2f(p, -1.0) == 1.0


def test_f_identities_hold_exactly():
    p = canonical(n=1, omega=4.5, mass_m=2.0)
    taus = -np.geomspace(1.0, 1e-7, 40)
    f, fp, fpp = f_eval(p, taus)
    gt = p.gamma_tilde
    assert np.max(np.abs(fp**2 * np.exp(2.0 * gt * f) - p.mass_m)) < 1e-12
    assert np.max(np.abs(fpp + gt * fp**2) * taus**2) < 1e-12
    # f' < 0 and f -> -inf toward the singularity
    assert np.all(fp < 0.0)
    assert f[-1] < -8.0


def test_f_derivatives_match_finite_differences():
    p = canonical(mass_m=3.0)
    tau = -0.7
    errs = []
    for h in (1e-3, 5e-4):
        fm = f_eval(p, tau - h)[0]
        fp_ = f_eval(p, tau + h)[0]
        errs.append(abs((fp_ - fm) / (2 * h) - f_eval(p, tau)[1]))
    assert errs[0] / errs[1] > 3.5  # second-order centered difference


def test_psi_eval_vanishing_amplitude():
    p = canonical(epsilon=0.0)
    grid = Grid(n=2, points_per_axis=16)
    psi, psi_tau, psi_x = psi_eval(p, -0.3, grid)
    assert np.max(np.abs(psi)) == 0.0
    assert np.max(np.abs(psi_tau)) == 0.0
    assert np.max(np.abs(psi_x)) == 0.0


def test_psi_eval_point_values():
    # eps = 0.1, p_psi = 2, tau = -0.5: psi = 0.025 cos(x), psi_tau = -0.1 cos(x)
    p = canonical(n=1, omega=3.0, epsilon=0.1, psi_mode=(1,))
    grid = Grid(n=1, points_per_axis=32)
    x = grid.coords[0]
    psi, psi_tau, psi_x = psi_eval(p, -0.5, grid)
    assert np.max(np.abs(psi - 0.025 * np.cos(x))) < 1e-15
    assert np.max(np.abs(psi_tau + 0.1 * np.cos(x))) < 1e-15
    assert np.max(np.abs(psi_x[..., 0] + 0.025 * np.sin(x))) < 1e-15


def test_psi_bounded_by_power_law():
    p = canonical(epsilon=0.05, psi_mode=(2, 1), p_psi=3)
    grid = Grid(n=2, points_per_axis=16)
    for tau in (-1.5, -0.3, -1e-4):
        psi = psi_eval(p, tau, grid)[0]
        assert np.max(np.abs(psi)) <= 0.05 * abs(tau) ** 3 + 1e-15


def test_psi_tau_matches_finite_difference():
    p = canonical(n=1, omega=3.0, epsilon=0.2, p_psi=3)
    grid = Grid(n=1, points_per_axis=16)
    tau, h = -0.6, 1e-5
    fd = (psi_eval(p, tau + h, grid)[0] - psi_eval(p, tau - h, grid)[0]) / (2 * h)
    assert np.max(np.abs(fd - psi_eval(p, tau, grid)[1])) < 1e-8


def test_sigma_scale_point_values():
    # delta = 0.2, p_sigma = 2, tau = -1: s = 1.2, s_dot = -0.4
    p = canonical(delta=0.2, a=-2.0)
    s, s_dot = sigma_scale(p, -1.0)
    assert abs(s - 1.2) < 1e-15
    assert abs(s_dot - (-0.4)) < 1e-15


def test_sigma_eval_structure():
    p = canonical(delta=0.1)
    grid = Grid(n=2, points_per_axis=16)
    sigma, sigma_dot, sigma_inv = sigma_eval(p, -0.5, grid)
    s = 1.0 + 0.1 * 0.25
    assert np.max(np.abs(sigma[..., 0, 0] - s)) < 1e-15
    assert np.max(np.abs(sigma[..., 0, 1])) == 0.0
    assert np.max(np.abs(np.einsum("...ij,...jk->...ik", sigma, sigma_inv)
                         - np.eye(2))) < 1e-14
    fd = (sigma_eval(p, -0.5 + 1e-6, grid)[0] - sigma_eval(p, -0.5 - 1e-6, grid)[0]) / 2e-6
    assert np.max(np.abs(fd - sigma_dot)) < 1e-8


def test_sigma_flat_limit():
    p = canonical(delta=0.3, a=-1.0)
    sigma = sigma_eval(p, -1e-9, Grid(n=2, points_per_axis=16))[0]
    assert np.max(np.abs(sigma - np.eye(2))) < 1e-15


def test_tau_domain_enforced():
    p = canonical(a=-2.0)
    for bad in (0.0, 0.5, -2.0, -3.0):
        with pytest.raises(OutOfRange):
            f_eval(p, bad)


def test_constructor_validation():
    with pytest.raises(ValueError):
        canonical(n=1, omega=1.0)  # n + omega - 2 <= 0
    with pytest.raises(ValueError):
        canonical(mass_m=0.0)
    with pytest.raises(ValueError):
        canonical(epsilon=-0.1)
    with pytest.raises(ValueError):
        canonical(p_sigma=1)
    with pytest.raises(ValueError):
        canonical(a=0.5)
    with pytest.raises(ValueError):
        canonical(delta=0.5, p_sigma=2, a=-2.0)  # 0.5 * 4 >= 1
    with pytest.raises(ValueError):
        canonical(n=2, psi_mode=(1,))


def test_validate_arw_canonical_families_pass():
    for p in (
        canonical(),
        canonical(n=1, omega=3.0, epsilon=0.01, psi_mode=(1,), delta=0.01),
        canonical(n=2, omega=4.0, mass_m=2.5, epsilon=0.02, psi_mode=(1, 1),
                  delta=0.05),
    ):
        report = validate_arw(p)
        assert report.passed, "\n".join(report.lines())


def test_validate_arw_flags_non_decaying_psi():
    bad = canonical(epsilon=0.1, psi_mode=(1, 0), p_psi=0)
    report = validate_arw(bad)
    assert not report.passed
    failed = [c.name for c in report.checks if not c.passed]
    assert failed == ["psi_limit"]
    assert any("FAIL" in line and "psi_limit" in line for line in report.lines())
