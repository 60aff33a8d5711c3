"""Inverse curvature flows of spacelike graph hypersurfaces in
asymptotically Robertson-Walker spacetimes: desk-scale simulation and
verification of the rescaled-height asymptotics."""

from .background import BackgroundParams, f_eval, psi_eval, sigma_eval, validate_arw
from .config import RunConfig, from_mapping, parse_config
from .diagnostics import Collector, DiagnosticsRecord, fit_rate
from .flow import FlowConfig, RunSummary, StepResult, rhs, run, step
from .functionals import CurvatureFunctional, principal_curvatures
from .geometry import (
    GeometryBundle,
    GraphState,
    build_geometry,
    laplacian_induced,
    second_fundamental_ambient,
)
from .grid import Grid
from .runner import run_experiment

__all__ = [
    "BackgroundParams", "Collector", "CurvatureFunctional", "DiagnosticsRecord",
    "FlowConfig", "GeometryBundle", "GraphState", "Grid", "RunConfig",
    "RunSummary", "StepResult", "build_geometry", "f_eval", "fit_rate",
    "from_mapping", "laplacian_induced", "parse_config",
    "principal_curvatures", "psi_eval", "rhs", "run", "run_experiment",
    "second_fundamental_ambient", "sigma_eval", "step", "validate_arw",
]

__version__ = "0.1.0"
