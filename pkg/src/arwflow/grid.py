"""Periodic spatial domain (circle or flat 2-torus) and calculus on sampled fields.

Scalar fields are arrays of shape ``grid.shape``; covector fields carry a
trailing axis of length ``n``; symmetric 2-tensors a trailing ``(n, n)`` block
that is kept symmetric by construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import DegenerateMetric, InvalidField

SPECTRAL = "spectral"
FD4 = "finite_difference_4th_order"


def require_finite(arr, name="field"):
    arr = np.asarray(arr, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise InvalidField(f"{name} contains non-finite values")
    return arr


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid on S^1 (n=1) or the flat square torus (n=2)."""

    n: int
    points_per_axis: int
    period: float = 2.0 * np.pi
    scheme: str = SPECTRAL

    def __post_init__(self):
        if self.n not in (1, 2):
            raise ValueError(f"spatial dimension must be 1 or 2, got {self.n}")
        if self.points_per_axis < 16:
            raise ValueError("need at least 16 points per axis")
        if self.period <= 0:
            raise ValueError("period must be positive")
        if self.scheme not in (SPECTRAL, FD4):
            raise ValueError(f"unknown derivative scheme {self.scheme!r}")

    @property
    def shape(self):
        return (self.points_per_axis,) * self.n

    @property
    def dx(self):
        return self.period / self.points_per_axis

    @cached_property
    def coords(self):
        """Coordinate arrays, one per axis, broadcast to ``shape``."""
        x = np.arange(self.points_per_axis) * self.dx
        if self.n == 1:
            return (x,)
        return tuple(np.meshgrid(x, x, indexing="ij"))

    @cached_property
    def _wavenumbers(self):
        n_pts = self.points_per_axis
        k = 2.0 * np.pi / self.period * np.fft.fftfreq(n_pts, d=1.0 / n_pts)
        return k

    def _deriv_spectral(self, f, axis):
        n_pts = self.points_per_axis
        k = self._wavenumbers.copy()
        if n_pts % 2 == 0:
            k[n_pts // 2] = 0.0  # drop the Nyquist mode of the derivative
        fh = np.fft.fft(f, axis=axis)
        shape = [1] * f.ndim
        shape[axis] = n_pts
        fh *= 1j * k.reshape(shape)
        return np.fft.ifft(fh, axis=axis).real

    def _deriv_fd4(self, f, axis):
        h = self.dx
        return (
            np.roll(f, 2, axis=axis)
            - 8.0 * np.roll(f, 1, axis=axis)
            + 8.0 * np.roll(f, -1, axis=axis)
            - np.roll(f, -2, axis=axis)
        ) / (12.0 * h)

    def partial_derivative(self, f, axis):
        """d f / d x^axis with the grid's scheme (periodic wrap)."""
        f = require_finite(f, "scalar field")
        if f.shape != self.shape:
            raise InvalidField(f"field shape {f.shape} does not match grid {self.shape}")
        if not 0 <= axis < self.n:
            raise ValueError(f"axis {axis} out of range for n={self.n}")
        if self.scheme == SPECTRAL:
            return self._deriv_spectral(f, axis)
        return self._deriv_fd4(f, axis)

    def gradient(self, f):
        """Coordinate gradient, shape ``shape + (n,)``."""
        return np.stack([self.partial_derivative(f, a) for a in range(self.n)], axis=-1)

    def hessian_coordinates(self, f):
        """Raw coordinate Hessian d^2 f / dx^i dx^j, shape ``shape + (n, n)``.

        Built by repeated first derivatives; symmetric because the periodic
        derivative operators commute.
        """
        grad = [self.partial_derivative(f, a) for a in range(self.n)]
        out = np.empty(self.shape + (self.n, self.n))
        for i in range(self.n):
            for j in range(i, self.n):
                dij = self.partial_derivative(grad[i], j)
                out[..., i, j] = dij
                out[..., j, i] = dij
        return out

    def integrate(self, f, vol):
        """Integral of f against the volume element of the metric ``vol``."""
        f = require_finite(f, "integrand")
        det = sym_det(vol)
        if np.any(det <= 0.0) or np.any(np.diagonal(vol, axis1=-2, axis2=-1) <= 0.0):
            raise DegenerateMetric("volume metric is not positive definite")
        return float(np.sum(f * np.sqrt(det)) * self.dx**self.n)

    def oscillation(self, f):
        f = require_finite(f, "scalar field")
        return float(np.max(f) - np.min(f))

    def spectral_tail_fraction(self, f):
        """Energy fraction carried by modes above 2/3 of the Nyquist index.

        Used as an under-resolution flag: smooth, resolved fields keep this
        far below 1e-8.
        """
        fh = np.fft.fftn(f)
        energy = np.abs(fh) ** 2
        total = energy.sum() - energy[(0,) * self.n]  # mean carries no shape
        if total <= 0.0:
            return 0.0
        n_pts = self.points_per_axis
        idx = np.abs(np.fft.fftfreq(n_pts, d=1.0 / n_pts))
        cutoff = (2.0 / 3.0) * (n_pts // 2)
        if self.n == 1:
            tail = idx > cutoff
        else:
            tail = (idx[:, None] > cutoff) | (idx[None, :] > cutoff)
        return float(energy[tail].sum() / total)


def sym_det(a):
    """Determinant of a field of symmetric 1x1 or 2x2 matrices."""
    a = np.asarray(a)
    n = a.shape[-1]
    if n == 1:
        return a[..., 0, 0]
    return a[..., 0, 0] * a[..., 1, 1] - a[..., 0, 1] * a[..., 1, 0]


def sym_inv(a):
    """Closed-form inverse of a field of symmetric 1x1 or 2x2 matrices."""
    a = np.asarray(a)
    det = sym_det(a)
    if np.any(det == 0.0):
        raise DegenerateMetric("singular symmetric tensor")
    n = a.shape[-1]
    out = np.empty_like(a)
    if n == 1:
        out[..., 0, 0] = 1.0 / a[..., 0, 0]
        return out
    out[..., 0, 0] = a[..., 1, 1] / det
    out[..., 1, 1] = a[..., 0, 0] / det
    out[..., 0, 1] = -a[..., 0, 1] / det
    out[..., 1, 0] = -a[..., 1, 0] / det
    return out


def identity_field(grid):
    """Kronecker delta as a symmetric tensor field on ``grid``."""
    out = np.zeros(grid.shape + (grid.n, grid.n))
    for i in range(grid.n):
        out[..., i, i] = 1.0
    return out
