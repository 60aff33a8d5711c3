"""Degree-one homogeneous curvature functions of the shifted second
fundamental form, normalized so that F(1, ..., 1) = n."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateMetric, OutsideCone
from .grid import sym_det

MEAN = "mean"
GAUSS_ROOT = "gauss_root"


def principal_curvatures(hcheck, g):
    """Generalized eigenvalues of the pencil (hcheck, g), sorted ascending.

    g must be positive definite; for n=2 the 2x2 pencil is solved in closed
    form through its characteristic polynomial.
    """
    hcheck = np.asarray(hcheck, dtype=float)
    g = np.asarray(g, dtype=float)
    n = g.shape[-1]
    det_g = sym_det(g)
    if np.any(det_g <= 0.0) or np.any(np.diagonal(g, axis1=-2, axis2=-1) <= 0.0):
        raise DegenerateMetric("metric of the eigenvalue pencil must be positive definite")
    if n == 1:
        return (hcheck[..., 0, 0] / g[..., 0, 0])[..., None]
    # det(hcheck - kappa g) = a kappa^2 + b kappa + c
    a = det_g
    b = -(
        hcheck[..., 0, 0] * g[..., 1, 1]
        + hcheck[..., 1, 1] * g[..., 0, 0]
        - 2.0 * hcheck[..., 0, 1] * g[..., 0, 1]
    )
    c = sym_det(hcheck)
    disc = np.maximum(b * b - 4.0 * a * c, 0.0)
    root = np.sqrt(disc)
    k1 = (-b - root) / (2.0 * a)
    k2 = (-b + root) / (2.0 * a)
    return np.stack([k1, k2], axis=-1)


@dataclass(frozen=True)
class CurvatureFunctional:
    kind: str
    n: int

    def __post_init__(self):
        if self.kind not in (MEAN, GAUSS_ROOT):
            raise ValueError(f"unknown curvature functional {self.kind!r}")
        if self.n not in (1, 2):
            raise ValueError("dimension must be 1 or 2")

    def evaluate(self, kappa):
        """F(kappa) per grid point; kappa has trailing axis of length n."""
        kappa = np.asarray(kappa, dtype=float)
        if kappa.shape[-1] != self.n:
            raise ValueError(
                f"expected {self.n} principal curvatures, got {kappa.shape[-1]}"
            )
        if self.kind == MEAN:
            return np.sum(kappa, axis=-1)
        if np.any(kappa <= 0.0):
            raise OutsideCone(
                "n-th root of the Gaussian curvature needs all principal "
                "curvatures positive"
            )
        return self.n * np.prod(kappa, axis=-1) ** (1.0 / self.n)
