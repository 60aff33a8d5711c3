"""Run orchestration shared by the CLI and the test harness: execute a
configured flow, collect diagnostics, fit rates, and assemble the summary."""

from __future__ import annotations

from . import diagnostics as diag
from . import flow
from .errors import FitUndefined

METRIC_FLOOR = 1e-12  # below this, metric_error is treated as converged


def _rate_block(records, quantity, predicted, window):
    try:
        fit = diag.fit_rate(records, quantity, window=window, predicted=predicted)
    except FitUndefined:
        return {"fitted": None, "predicted": predicted, "rel_deviation": None,
                "converged": False, "error": "fit undefined"}
    return {
        "fitted": fit.fitted,
        "predicted": fit.predicted,
        "rel_deviation": fit.rel_deviation,
        "converged": fit.converged,
        "n_samples": fit.n_samples,
    }


def monotone_above_floor(values, floor=METRIC_FLOOR):
    """True when the sequence decreases wherever it sits above the roundoff
    floor; entries at or below the floor count as converged."""
    prev = None
    for v in values:
        if v <= floor:
            continue
        if prev is not None and v > prev:
            return False
        prev = v
    return True


def summarize(records, summary, cfg):
    """Assemble the machine-readable run summary dictionary."""
    params = cfg.background
    t0, t_end = records[0].t, records[-1].t
    window = (t0 + 2.0 * (t_end - t0) / 3.0, t_end)

    rates = {
        "umbilicity_ratio": _rate_block(
            records, "umbilicity_ratio", -2.0 * params.gamma, window
        ),
    }
    sharper = params.n + params.omega - 4.0
    if sharper > 0:
        rates["umbilicity_sup"] = _rate_block(
            records, "umbilicity_sup", -sharper / (2.0 * params.n), window
        )

    last_third = [r for r in records if r.t >= window[0] - 1e-9]
    osc0 = records[0].osc_u_tilde
    final = records[-1]

    baseline = next((r for r in records if abs(r.t - 1.0) < 1e-9), None)
    tail = [r for r in records if r.t >= t_end - (t_end - t0) / 6.0 - 1e-9]
    if baseline is not None and baseline.R1 > 0 and baseline.R2 > 0:
        r1_ratio = max(r.R1 for r in tail) / baseline.R1
        r2_ratio = max(r.R2 for r in tail) / baseline.R2
    else:
        r1_ratio = r2_ratio = None

    checks = {
        "osc_final_small": final.osc_u_tilde <= 1e-3,
        "osc_decayed_100x": osc0 == 0.0 or final.osc_u_tilde <= 0.01 * osc0,
        "metric_error_final": final.metric_error <= 1e-4,
        "metric_error_monotone": monotone_above_floor(
            [r.metric_error for r in last_third]
        ),
        "F_times_minus_u_final": final.F_times_minus_u_err <= 1e-4,
        "residuals_decayed": (
            r1_ratio is not None and r1_ratio <= 1e-3 and r2_ratio <= 1e-3
        ),
        "resolved": summary.resolved,
    }
    checks["all"] = all(checks.values())

    return {
        "config": cfg.echo(),
        "run": {
            "stop_reason": summary.stop_reason,
            "t_final": summary.t_final,
            "osc_final": summary.osc_final,
            "steps_accepted": summary.steps_accepted,
            "steps_rejected": summary.steps_rejected,
            "max_tail_fraction": summary.max_tail_fraction,
        },
        "final": {
            "osc_u_tilde": final.osc_u_tilde,
            "min_u_tilde": final.min_u_tilde,
            "max_u_tilde": final.max_u_tilde,
            "metric_error": final.metric_error,
            "F_times_minus_u_err": final.F_times_minus_u_err,
            "umbilicity_sup": final.umbilicity_sup,
            "umbilicity_ratio": final.umbilicity_ratio,
        },
        "residual_decay": {"R1_ratio": r1_ratio, "R2_ratio": r2_ratio},
        "rates": rates,
        "checks": checks,
    }


def run_experiment(cfg, sink=None, write_outputs=True):
    """Execute one configured run; returns (records, summary_dict)."""
    params = cfg.background
    grid = cfg.grid
    functional = cfg.functional()
    collector = diag.Collector(params, grid)

    def tee(state, bundle, dt, steps):
        collector(state, bundle, dt, steps)
        if sink is not None:
            sink(state, bundle, dt, steps)

    run_summary = flow.run(
        cfg.initial_height(), cfg.flow, params, grid, functional, sink=tee
    )
    records = collector.finalize()
    summary = summarize(records, run_summary, cfg)

    if write_outputs:
        csv_path, json_path = cfg.output_paths()
        diag.write_csv(records, csv_path)
        diag.write_summary_json(summary, json_path)
    return records, summary
