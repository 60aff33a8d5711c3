"""Observables of the asymptotic regime, their recording, and
post-processing (residuals of the limit identities, log-linear rate fits,
CSV/JSON emission)."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from .errors import FitUndefined, NotReady
from .geometry import laplacian_induced

CSV_COLUMNS = (
    "t", "osc_u_tilde", "min_u_tilde", "max_u_tilde", "sup_Du",
    "F_times_minus_u_err", "umbilicity_sup", "umbilicity_ratio",
    "metric_error", "R1", "R2", "R3", "dt", "steps",
)

FIT_FLOOR = 1e-9  # below this a decaying quantity counts as converged


@dataclass
class DiagnosticsRecord:
    t: float
    osc_u_tilde: float
    min_u_tilde: float
    max_u_tilde: float
    sup_Du: float
    F_times_minus_u_err: float
    umbilicity_sup: float
    umbilicity_ratio: float
    metric_error: float
    R1: float
    R2: float
    R3: float
    dt: float
    steps: int

    def row(self):
        return [getattr(self, name) for name in CSV_COLUMNS]


@dataclass
class Snapshot:
    """Per-record field data needed for the time-differenced residuals."""

    t: float
    du2_g: np.ndarray          # ||Du||^2 in the induced metric
    lap_w: np.ndarray          # Laplace-Beltrami of the rescaled height
    w: np.ndarray


def umbilicity_defect(bundle):
    """sup-norm field of the trace-free part of the conformal shape operator."""
    n = bundle.conf_h_mix.shape[-1]
    eye = np.eye(n)
    defect = bundle.conf_h_mix - (bundle.conf_H / n)[..., None, None] * eye
    return np.max(np.abs(defect), axis=(-2, -1))


def metric_target_coefficient(params, w):
    """(gamma_tilde^2 m)^(1/gamma_tilde) * (-u_tilde)^(2/gamma_tilde)."""
    gt = params.gamma_tilde
    return (gt**2 * params.mass_m) ** (1.0 / gt) * (-w) ** (2.0 / gt)


def observe(state, bundle, params, grid, dt_current=0.0, step_count=0,
            rescaled=True):
    """One DiagnosticsRecord plus the Snapshot used later for residuals."""
    t = state.t
    gamma = params.gamma
    w = state.w if rescaled else state.w * np.exp(gamma * t)

    f_times_u = bundle.F * (-bundle.u)
    defect = umbilicity_defect(bundle)
    umb_ratio = float(np.max(defect / bundle.conf_H))

    n = grid.n
    target = metric_target_coefficient(params, w)
    rescaled_metric = np.exp(2.0 * t / n) * bundle.g_breve
    eye = np.eye(n)
    metric_err = float(
        np.max(np.abs(rescaled_metric - target[..., None, None] * eye))
    )

    lap_w = laplacian_induced(w, bundle, grid)
    record = DiagnosticsRecord(
        t=float(t),
        osc_u_tilde=float(np.max(w) - np.min(w)),
        min_u_tilde=float(np.min(w)),
        max_u_tilde=float(np.max(w)),
        sup_Du=float(np.max(bundle.du2_sigma)),
        F_times_minus_u_err=float(np.max(np.abs(f_times_u - 1.0 / gamma))),
        umbilicity_sup=float(np.max(defect)),
        umbilicity_ratio=umb_ratio,
        metric_error=metric_err,
        R1=0.0, R2=0.0, R3=0.0,
        dt=float(dt_current),
        steps=int(step_count),
    )
    snap = Snapshot(t=float(t), du2_g=bundle.du2_g, lap_w=lap_w, w=np.asarray(w))
    return record, snap


def compute_residuals(records, snapshots, params):
    """Fill R1-R3 in place from centered time differences of the snapshots.

    R1: (||Du||^2)' e^{2 gamma t} vs 2 gamma Lap(u_tilde) u_tilde
    R2: (vtilde^2)' e^{2 gamma t} vs -2 gamma ||D u_tilde||^2
    R3: ||D u_tilde||^2 + Lap(u_tilde) u_tilde (both sides vanish in the limit)

    vtilde^2 = 1 + ||Du||^2, so its time derivative is differenced on
    ||Du||^2 directly, avoiding cancellation against the constant 1.
    """
    if len(records) < 2:
        raise NotReady("need at least two records for time differencing")
    gamma = params.gamma
    m = len(records)
    for i, (rec, snap) in enumerate(zip(records, snapshots)):
        lo = max(i - 1, 0)
        hi = min(i + 1, m - 1)
        dt = snapshots[hi].t - snapshots[lo].t
        ddu2 = (snapshots[hi].du2_g - snapshots[lo].du2_g) / dt
        scale = np.exp(2.0 * gamma * snap.t)
        lap_uu = snap.lap_w * snap.w
        dtilde2 = scale * snap.du2_g  # ||D u_tilde||^2 = e^{2 gamma t} ||Du||^2
        rec.R1 = float(np.max(np.abs(ddu2 * scale - 2.0 * gamma * lap_uu)))
        rec.R2 = float(np.max(np.abs(ddu2 * scale + 2.0 * gamma * dtilde2)))
        rec.R3 = float(np.max(np.abs(dtilde2 + lap_uu)))
    return records


@dataclass(frozen=True)
class RateFit:
    quantity: str
    window: tuple
    fitted: Optional[float]
    predicted: Optional[float]
    rel_deviation: Optional[float]
    converged: bool
    n_samples: int


def fit_rate(records, quantity, window=None, predicted=None):
    """Least-squares slope of ln(quantity) against t over the window.

    If the quantity sits below FIT_FLOOR everywhere in the window it is
    reported as converged without a fit; nonpositive values above the floor
    raise FitUndefined.
    """
    ts = np.array([r.t for r in records])
    qs = np.array([getattr(r, quantity) for r in records])
    if window is None:
        t1 = ts[0] + 2.0 * (ts[-1] - ts[0]) / 3.0
        window = (t1, ts[-1])
    mask = (ts >= window[0] - 1e-9) & (ts <= window[1] + 1e-9)
    ts, qs = ts[mask], qs[mask]
    if len(ts) < 2:
        raise FitUndefined(f"window {window} holds fewer than two records")
    if np.max(qs) < FIT_FLOOR:
        return RateFit(quantity, tuple(window), None, predicted, None,
                       converged=True, n_samples=len(ts))
    if np.any(qs <= 0.0):
        raise FitUndefined(f"{quantity} is nonpositive inside the fit window")
    slope, _ = np.polyfit(ts, np.log(qs), 1)
    rel = abs(slope - predicted) / abs(predicted) if predicted else None
    return RateFit(quantity, tuple(window), float(slope), predicted, rel,
                   converged=False, n_samples=len(ts))


class Collector:
    """Diagnostics sink for flow.run: records every emitted snapshot."""

    def __init__(self, params, grid, rescaled=True):
        self.params = params
        self.grid = grid
        self.rescaled = rescaled
        self.records: List[DiagnosticsRecord] = []
        self.snapshots: List[Snapshot] = []

    def __call__(self, state, bundle, dt, step_count):
        rec, snap = observe(
            state, bundle, self.params, self.grid,
            dt_current=dt, step_count=step_count, rescaled=self.rescaled,
        )
        self.records.append(rec)
        self.snapshots.append(snap)

    def finalize(self):
        if len(self.records) >= 2:
            compute_residuals(self.records, self.snapshots, self.params)
        return self.records


def write_csv(records, path):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for rec in records:
            writer.writerow([repr(v) if isinstance(v, float) else v
                             for v in rec.row()])


def read_csv(path):
    records = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            kwargs = {k: float(row[k]) for k in CSV_COLUMNS if k != "steps"}
            kwargs["steps"] = int(row["steps"])
            records.append(DiagnosticsRecord(**kwargs))
    return records


def write_summary_json(summary_dict, path):
    with open(path, "w") as fh:
        json.dump(summary_dict, fh, indent=2)
        fh.write("\n")
