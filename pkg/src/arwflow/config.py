"""Run configuration: plain key-value files with dotted section keys.

Example::

    background.n = 2
    background.omega = 2.0
    grid.points_per_axis = 64
    flow.curvature = mean
    initial.u0_mean = -0.5
    initial.u0_modes = 1,0:0.05
    output.csv_path = run.csv

``u0_modes`` is a semicolon-separated list of ``wavevector:amplitude``
entries, each adding ``amplitude * sin(k . x)`` to the initial height.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .background import BackgroundParams
from .errors import ConfigError
from .flow import FlowConfig
from .functionals import CurvatureFunctional
from .grid import FD4, SPECTRAL, Grid

_SCHEMES = {"spectral": SPECTRAL, "fd4": FD4, FD4: FD4}

DEFAULTS = {
    "background.n": "2",
    "background.omega": "2.0",
    "background.mass_m": "1.0",
    "background.epsilon": "0.0",
    "background.psi_mode": "1",
    "background.p_psi": "2",
    "background.delta": "0.0",
    "background.p_sigma": "2",
    "background.a": "-2.0",
    "grid.points_per_axis": "64",
    "grid.scheme": "spectral",
    "flow.curvature": "mean",
    "flow.t_max": "30.0",
    "flow.dt_initial": "1e-3",
    "flow.dt_max": "0.05",
    "flow.safety": "0.2",
    "flow.spacelike_margin": "1e-3",
    "flow.F_min": "1e-6",
    "flow.output_interval": "0.25",
    "flow.stop_osc": "",
    "initial.u0_mean": "-0.5",
    "initial.u0_modes": "",
    "output.csv_path": "run.csv",
    "output.json_path": "run.json",
}


@dataclass(frozen=True)
class RunConfig:
    background: BackgroundParams
    grid: Grid
    flow: FlowConfig
    curvature: str
    u0_mean: float
    u0_modes: Tuple[Tuple[Tuple[int, ...], float], ...]
    csv_path: str
    json_path: str
    raw: Tuple[Tuple[str, str], ...]  # normalized key-value pairs, sorted

    def functional(self):
        return CurvatureFunctional(kind=self.curvature, n=self.background.n)

    def initial_height(self):
        x = self.grid.coords
        u0 = np.full(self.grid.shape, self.u0_mean)
        for kvec, amp in self.u0_modes:
            phase = sum(k * xi for k, xi in zip(kvec, x))
            u0 = u0 + amp * np.sin(phase)
        return u0

    def output_paths(self):
        """CSV/JSON paths, honoring the ARWFLOW_OUTDIR override."""
        outdir = os.environ.get("ARWFLOW_OUTDIR")
        if not outdir:
            return self.csv_path, self.json_path
        return (
            os.path.join(outdir, os.path.basename(self.csv_path)),
            os.path.join(outdir, os.path.basename(self.json_path)),
        )

    def echo(self):
        return {key: value for key, value in self.raw}


def _parse_wavevector(text, n, where):
    try:
        parts = tuple(int(p) for p in text.split(","))
    except ValueError as exc:
        raise ConfigError(f"{where}: bad wave vector {text!r}") from exc
    if len(parts) != n:
        raise ConfigError(
            f"{where}: wave vector {text!r} needs {n} components"
        )
    return parts


def _parse_modes(text, n, where):
    modes = []
    for chunk in filter(None, (c.strip() for c in text.split(";"))):
        if ":" not in chunk:
            raise ConfigError(
                f"{where}: mode entry {chunk!r} must look like 'k:amplitude'"
            )
        kpart, apart = chunk.rsplit(":", 1)
        kvec = _parse_wavevector(kpart.strip(), n, where)
        try:
            amp = float(apart)
        except ValueError as exc:
            raise ConfigError(f"{where}: bad amplitude {apart!r}") from exc
        modes.append((kvec, amp))
    return tuple(modes)


def _get(values, lines, key, cast, where="config"):
    text = values[key]
    line = lines.get(key, "?")
    try:
        return cast(text)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(
            f"{where} line {line}: cannot parse {key} = {text!r}: {exc}"
        ) from exc


def from_mapping(mapping, where="config"):
    """Build a RunConfig from a flat dotted-key mapping (strings or numbers)."""
    values = dict(DEFAULTS)
    lines = {}
    for key, value in mapping.items():
        if key not in DEFAULTS:
            raise ConfigError(f"{where}: unknown key {key!r}")
        values[key] = "" if value is None else str(value)

    def get(key, cast):
        return _get(values, lines, key, cast, where)

    n = get("background.n", int)
    try:
        params = BackgroundParams(
            n=n,
            omega=get("background.omega", float),
            mass_m=get("background.mass_m", float),
            epsilon=get("background.epsilon", float),
            psi_mode=_parse_wavevector(values["background.psi_mode"], n,
                                       f"{where}: background.psi_mode"),
            p_psi=get("background.p_psi", int),
            delta=get("background.delta", float),
            p_sigma=get("background.p_sigma", int),
            a=get("background.a", float),
        )
        grid = Grid(
            n=n,
            points_per_axis=get("grid.points_per_axis", int),
            scheme=_SCHEMES.get(values["grid.scheme"], values["grid.scheme"]),
        )
        stop_osc_text = values["flow.stop_osc"].strip()
        flow_cfg = FlowConfig(
            t_max=get("flow.t_max", float),
            dt_initial=get("flow.dt_initial", float),
            dt_max=get("flow.dt_max", float),
            safety=get("flow.safety", float),
            spacelike_margin=get("flow.spacelike_margin", float),
            F_min=get("flow.F_min", float),
            output_interval=get("flow.output_interval", float),
            stop_osc=float(stop_osc_text) if stop_osc_text else None,
        )
        curvature = values["flow.curvature"].strip()
        CurvatureFunctional(kind=curvature, n=n)  # validates the name
    except ValueError as exc:
        raise ConfigError(f"{where}: {exc}") from exc

    u0_mean = get("initial.u0_mean", float)
    if u0_mean >= 0.0:
        raise ConfigError(f"{where}: initial.u0_mean: u must be negative")
    modes = _parse_modes(values["initial.u0_modes"], n,
                         f"{where}: initial.u0_modes")

    raw = tuple(sorted(values.items()))
    return RunConfig(
        background=params, grid=grid, flow=flow_cfg, curvature=curvature,
        u0_mean=u0_mean, u0_modes=modes,
        csv_path=values["output.csv_path"], json_path=values["output.json_path"],
        raw=raw,
    )


def parse_config(path):
    """Parse a key-value configuration file into a RunConfig."""
    mapping = {}
    lines = {}
    try:
        with open(path) as fh:
            for lineno, rawline in enumerate(fh, start=1):
                line = rawline.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ConfigError(
                        f"{path} line {lineno}: expected 'key = value', got {line!r}"
                    )
                key, value = (part.strip() for part in line.split("=", 1))
                if key not in DEFAULTS:
                    raise ConfigError(f"{path} line {lineno}: unknown key {key!r}")
                if key in mapping:
                    raise ConfigError(f"{path} line {lineno}: duplicate key {key!r}")
                mapping[key] = value
                lines[key] = lineno
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return from_mapping(mapping, where=str(path))
