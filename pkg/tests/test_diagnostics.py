import numpy as np
import pytest

from arwflow.background import BackgroundParams
from arwflow.diagnostics import (
    Collector,
    DiagnosticsRecord,
    compute_residuals,
    fit_rate,
    metric_target_coefficient,
    read_csv,
    umbilicity_defect,
    write_csv,
    write_summary_json,
)
from arwflow.errors import FitUndefined, NotReady
from arwflow.flow import FlowConfig, run
from arwflow.functionals import CurvatureFunctional
from arwflow.grid import Grid

from conftest import record_at


def synthetic_records(func, ts):
    out = []
    for t in ts:
        out.append(DiagnosticsRecord(
            t=float(t), osc_u_tilde=0.0, min_u_tilde=-0.5, max_u_tilde=-0.5,
            sup_Du=0.0, F_times_minus_u_err=0.0, umbilicity_sup=0.0,
            umbilicity_ratio=float(func(t)), metric_error=0.0,
            R1=0.0, R2=0.0, R3=0.0, dt=0.01, steps=1,
        ))
    return out


def homogeneous_collector(t_max=5.0):
    params = BackgroundParams(n=2, omega=2.0, psi_mode=(1, 0))
    grid = Grid(n=2, points_per_axis=16)
    functional = CurvatureFunctional("mean", 2)
    collector = Collector(params, grid)
    config = FlowConfig(t_max=t_max, output_interval=0.5)
    run(np.full(grid.shape, -0.5), config, params, grid, functional,
        sink=collector)
    return collector.finalize(), collector


def test_fit_rate_exact_exponential():
    ts = np.linspace(0.0, 10.0, 60)
    fit = fit_rate(synthetic_records(lambda t: 3.0 * np.exp(-t), ts),
                   "umbilicity_ratio", window=(2.0, 10.0), predicted=-1.0)
    assert not fit.converged
    assert abs(fit.fitted + 1.0) < 1e-10
    assert fit.rel_deviation < 1e-10


def test_fit_rate_perturbed_exponential():
    ts = np.linspace(0.0, 10.0, 120)
    fit = fit_rate(
        synthetic_records(lambda t: 3.0 * np.exp(-t) * (1.0 + 0.01 * np.sin(t)), ts),
        "umbilicity_ratio", window=(0.0, 10.0), predicted=-1.0)
    assert abs(fit.fitted + 1.0) < 0.01


def test_fit_rate_converged_below_floor():
    ts = np.linspace(20.0, 30.0, 20)
    fit = fit_rate(synthetic_records(lambda t: 1e-14, ts), "umbilicity_ratio",
                   predicted=-1.0)
    assert fit.converged
    assert fit.fitted is None


def test_fit_rate_undefined_cases():
    ts = np.linspace(0.0, 10.0, 20)
    with pytest.raises(FitUndefined):  # nonpositive above the floor
        fit_rate(synthetic_records(lambda t: np.cos(t), ts), "umbilicity_ratio")
    with pytest.raises(FitUndefined):  # empty window
        fit_rate(synthetic_records(lambda t: np.exp(-t), ts),
                 "umbilicity_ratio", window=(40.0, 50.0))


def test_homogeneous_run_diagnostics_vanish():
    records, _ = homogeneous_collector()
    for rec in records:
        assert rec.umbilicity_sup == 0.0
        assert rec.metric_error < 1e-9
        assert rec.F_times_minus_u_err < 1e-10
        assert rec.R1 < 1e-10 and rec.R2 < 1e-10 and rec.R3 < 1e-10
        assert rec.osc_u_tilde == 0.0


def test_metric_target_coefficient_value():
    # gamma_tilde = 1, m = 1, u_tilde = -0.5: coefficient is 0.25
    params = BackgroundParams(n=2, omega=2.0, psi_mode=(1, 0))
    assert abs(metric_target_coefficient(params, -0.5) - 0.25) < 1e-15


def test_umbilicity_defect_of_manufactured_umbilic_bundle():
    class FakeBundle:
        conf_h_mix = np.broadcast_to(3.0 * np.eye(2), (4, 4, 2, 2))
        conf_H = np.full((4, 4), 6.0)

    assert np.max(umbilicity_defect(FakeBundle())) == 0.0


def test_initial_record_oscillation(perturbed_n2_run):
    cfg, records, summary = perturbed_n2_run
    u0 = cfg.initial_height()
    assert abs(records[0].t) < 1e-12
    assert abs(records[0].osc_u_tilde - (np.max(u0) - np.min(u0))) < 1e-12


def test_residuals_need_history():
    records, collector = homogeneous_collector(t_max=1.0)
    with pytest.raises(NotReady):
        compute_residuals(records[:1], collector.snapshots[:1], collector.params)


def test_csv_round_trip(tmp_path):
    records, _ = homogeneous_collector(t_max=2.0)
    path = tmp_path / "series.csv"
    write_csv(records[:3], path)
    back = read_csv(path)
    assert len(back) == 3
    for a, b in zip(records[:3], back):
        assert a == b  # repr round-trip keeps every float bit-exact


def test_csv_empty_is_header_only(tmp_path):
    path = tmp_path / "empty.csv"
    write_csv([], path)
    lines = path.read_text().strip().splitlines()
    assert len(lines) == 1
    assert lines[0].startswith("t,osc_u_tilde")


def test_summary_json(tmp_path, perturbed_n2_run):
    import json

    from arwflow.runner import summarize
    cfg, records, summary = perturbed_n2_run
    path = tmp_path / "summary.json"
    write_summary_json(summary, path)
    data = json.loads(path.read_text())
    assert "fitted" in data["rates"]["umbilicity_ratio"]
    assert "checks" in data and "config" in data


def test_residual_tail_decay(perturbed_n2_run):
    """Documented gap: the limit identities behind R1 and R2 are not attained
    by the dynamics (the rescaled gradient freezes), so the required 1e-4
    decay factor cannot be reached.  Kept failing on purpose."""
    cfg, records, summary = perturbed_n2_run
    base = record_at(records, 1.0)
    tail = [r for r in records if r.t > 20.0]
    assert all(r.R1 < 1e-4 * base.R1 for r in tail)
    assert all(r.R2 < 1e-4 * base.R2 for r in tail)


def test_residual_pointwise_sign_agreement():
    """Documented gap, same cause as test_residual_tail_decay: the measured
    (||Du||^2)' e^{2 gamma t} settles on -2 gamma ||D u_tilde||^2 <= 0 while
    2 gamma Lap(u_tilde) u_tilde keeps both signs, so pointwise sign
    agreement in the tail fails.  Kept failing on purpose."""
    params = BackgroundParams(n=1, omega=3.0, epsilon=0.01, psi_mode=(1,),
                              delta=0.01)
    grid = Grid(n=1, points_per_axis=64)
    functional = CurvatureFunctional("mean", 1)
    collector = Collector(params, grid)
    x = grid.coords[0]
    config = FlowConfig(t_max=25.0, output_interval=0.5)
    run(-0.5 + 0.05 * np.sin(x), config, params, grid, functional,
        sink=collector)
    snaps = collector.snapshots
    gamma = params.gamma
    agreements = []
    for i in range(len(snaps) - 2):
        lo, mid, hi = snaps[i], snaps[i + 1], snaps[i + 2]
        if mid.t <= 20.0:
            continue
        ddu2 = (hi.du2_g - lo.du2_g) / (hi.t - lo.t)
        measured = ddu2 * np.exp(2.0 * gamma * mid.t)
        target = 2.0 * gamma * mid.lap_w * mid.w
        agreements.append(np.all(np.sign(measured) == np.sign(target)))
    assert agreements and all(agreements)
