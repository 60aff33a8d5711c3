"""Pointwise geometry of the spacelike graph M(t) = graph u(t, .).

Everything is computed in the conformal ambient metric
-(dx^0)^2 + sigma_ij(x^0, x) dx^i dx^j, with the past-directed unit normal
nu = -vtilde * (1, sigma^{ij} u_j).  The physical ("breve") quantities are
recovered through the conformal factor exp(f + psi).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import background as bg
from .errors import FlowDegenerate, InvalidField, NotSpacelike
from .functionals import CurvatureFunctional, principal_curvatures
from .grid import Grid, require_finite, sym_det, sym_inv


@dataclass(frozen=True)
class GraphState:
    """Flow unknown: rescaled height w = u * exp(gamma t) at flow time t."""

    t: float
    w: np.ndarray

    def height(self, params, rescaled=True):
        """Physical height u; equals w itself when the state is unrescaled."""
        if not rescaled:
            return self.w
        return self.w * np.exp(-params.gamma * self.t)


def check_state(state, params, grid, margin=1e-3, rescaled=True):
    """Validate the GraphState invariants; returns the height u."""
    w = require_finite(state.w, "height field")
    if w.shape != grid.shape:
        raise InvalidField(f"height shape {w.shape} does not match grid {grid.shape}")
    if np.any(w >= 0.0):
        raise NotSpacelike("rescaled height must be strictly negative")
    u = state.height(params, rescaled)
    if np.any(u <= params.a) or np.any(u >= 0.0):
        raise NotSpacelike(f"height must stay inside ({params.a}, 0)")
    s, _ = bg.sigma_scale(params, u)
    du = grid.gradient(u)
    du2_sigma = np.sum(du * du, axis=-1) / s
    if np.any(du2_sigma >= 1.0 - margin):
        raise NotSpacelike(
            f"spacelike margin violated: sup |Du|^2_sigma = {float(np.max(du2_sigma)):.3e}"
        )
    return u


@dataclass(frozen=True)
class GeometryBundle:
    """Immutable snapshot of all pointwise quantities of one graph."""

    t: float
    u: np.ndarray            # height
    Du: np.ndarray           # coordinate gradient u_i
    du2_sigma: np.ndarray    # sigma^{ij} u_i u_j
    v: np.ndarray
    vtilde: np.ndarray
    u_check: np.ndarray      # sigma^{ij} u_j
    sigma: np.ndarray
    sigma_dot: np.ndarray
    g: np.ndarray            # induced metric -u_i u_j + sigma_ij
    g_inv: np.ndarray
    hbar: np.ndarray         # -sigma_dot / 2
    h: np.ndarray            # second fundamental form
    hcheck: np.ndarray       # shifted form h - vtilde f' g + (psi_a nu^a) g
    H: np.ndarray            # g^{ij} h_ij
    F: np.ndarray            # curvature speed on hcheck
    kappa: np.ndarray        # principal curvatures, sorted, shape (.., n)
    psi_nu: np.ndarray       # psi_alpha nu^alpha
    fp: np.ndarray           # f'(u)
    e2psit: np.ndarray       # exp(2 (f + psi))
    conf_H: np.ndarray       # exp(-(f+psi)) * F (breve mean curvature proxy)
    conf_h_mix: np.ndarray   # exp(-(f+psi)) * hcheck^j_i
    g_breve: np.ndarray      # exp(2 (f+psi)) * g_ij

    @property
    def du2_g(self):
        """Induced-metric gradient norm g^{ij} u_i u_j = vtilde^2 - 1."""
        return np.einsum("...ij,...i,...j->...", self.g_inv, self.Du, self.Du)


def christoffel(grid, g, g_inv):
    """Christoffel symbols of a metric field: Gamma[..., k, i, j]."""
    n = grid.n
    dg = np.empty(grid.shape + (n, n, n))
    for i in range(n):
        for j in range(i, n):
            for m in range(n):
                d = grid.partial_derivative(g[..., i, j], m)
                dg[..., i, j, m] = d
                dg[..., j, i, m] = d
    # Gamma_{lij} = (d_i g_jl + d_j g_il - d_l g_ij) / 2
    low = 0.5 * (
        np.einsum("...jli->...lij", dg)
        + np.einsum("...ilj->...lij", dg)
        - np.einsum("...ijl->...lij", dg)
    )
    return np.einsum("...kl,...lij->...kij", g_inv, low)


def build_geometry(state, params, grid, functional, margin=1e-3, rescaled=True):
    """All geometric quantities of the graph, with background at tau = u(x)."""
    u = check_state(state, params, grid, margin=margin, rescaled=rescaled)
    n = grid.n

    f, fp, _ = bg.f_eval(params, u)
    psi, psi_tau, psi_x = bg.psi_eval(params, u, grid)
    s, s_dot = bg.sigma_scale(params, u)

    du = grid.gradient(u)
    du2_sigma = np.sum(du * du, axis=-1) / s
    v = np.sqrt(1.0 - du2_sigma)
    vtilde = 1.0 / v
    u_check = du / s[..., None]

    eye = np.zeros(grid.shape + (n, n))
    for i in range(n):
        eye[..., i, i] = 1.0
    sigma = s[..., None, None] * eye
    sigma_dot = s_dot[..., None, None] * eye

    g = sigma - du[..., :, None] * du[..., None, :]
    g_inv = eye / s[..., None, None] + (
        vtilde**2
    )[..., None, None] * u_check[..., :, None] * u_check[..., None, :]

    hbar = -0.5 * sigma_dot

    hess = grid.hessian_coordinates(u)
    gamma_g = christoffel(grid, g, g_inv)
    u_cov = hess - np.einsum("...kij,...k->...ij", gamma_g, du)

    h = v[..., None, None] * (-u_cov + hbar)
    H = np.einsum("...ij,...ij->...", g_inv, h)

    psi_nu = -vtilde * (psi_tau + np.sum(psi_x * u_check, axis=-1))

    shift = (-vtilde * fp + psi_nu)[..., None, None]
    hcheck = h + shift * g

    kappa = principal_curvatures(hcheck, g)
    F = functional.evaluate(kappa)
    if np.any(F <= 0.0):
        raise FlowDegenerate(
            f"curvature speed must stay positive, min F = {float(np.min(F)):.3e}"
        )

    e2f = bg.exp_2f(params, u)
    e2psit = e2f * np.exp(2.0 * psi)
    epsit_inv = 1.0 / np.sqrt(e2psit)

    hcheck_mix = np.einsum("...jk,...ik->...ij", g_inv, hcheck)  # [..., i, j] = hcheck_i^j
    conf_h_mix = epsit_inv[..., None, None] * hcheck_mix
    conf_H = epsit_inv * F
    g_breve = e2psit[..., None, None] * g

    return GeometryBundle(
        t=state.t, u=u, Du=du, du2_sigma=du2_sigma, v=v, vtilde=vtilde,
        u_check=u_check, sigma=sigma, sigma_dot=sigma_dot, g=g, g_inv=g_inv,
        hbar=hbar, h=h, hcheck=hcheck, H=H, F=F, kappa=kappa, psi_nu=psi_nu,
        fp=fp, e2psit=e2psit, conf_H=conf_H, conf_h_mix=conf_h_mix,
        g_breve=g_breve,
    )


def second_fundamental_ambient(state, params, grid, margin=1e-3, rescaled=True):
    """Second fundamental form straight from the ambient Gauss formula.

    Independent of build_geometry's covariant-Hessian route: uses the
    Christoffel symbols of the ambient product metric (Gamma^0_ij =
    sigma_dot_ij / 2, Gamma^i_0j = sigma^{ik} sigma_dot_kj / 2, flat spatial
    part) along the embedding x -> (u(x), x).
    """
    u = check_state(state, params, grid, margin=margin, rescaled=rescaled)
    n = grid.n

    s, s_dot = bg.sigma_scale(params, u)
    du = grid.gradient(u)
    du2_sigma = np.sum(du * du, axis=-1) / s
    vtilde = 1.0 / np.sqrt(1.0 - du2_sigma)
    hess = grid.hessian_coordinates(u)

    eye = np.zeros(grid.shape + (n, n))
    for i in range(n):
        eye[..., i, i] = 1.0

    # ambient acceleration along the embedding: time component A^0_ij and
    # spatial A^k_ij = (s_dot/s)/2 * (u_i delta^k_j + u_j delta^k_i)
    a0 = hess + 0.5 * s_dot[..., None, None] * eye
    a_spatial = np.zeros(grid.shape + (n, n, n))
    for k in range(n):
        for i in range(n):
            for j in range(n):
                term = np.zeros(grid.shape)
                if j == k:
                    term = term + du[..., i]
                if i == k:
                    term = term + du[..., j]
                a_spatial[..., k, i, j] = 0.5 * (s_dot / s) * term

    a_dot_du = np.einsum("...kij,...k->...ij", a_spatial, du)
    return -vtilde[..., None, None] * (a0 - a_dot_du)


def laplacian_induced(f_scalar, bundle, grid):
    """Laplace-Beltrami operator of the induced metric applied to a scalar."""
    det = sym_det(bundle.g)
    if np.any(det <= 0.0):
        raise InvalidField("induced metric lost positive definiteness")
    sqrt_g = np.sqrt(det)
    grad = grid.gradient(f_scalar)
    flux = sqrt_g[..., None] * np.einsum("...ij,...j->...i", bundle.g_inv, grad)
    div = sum(
        grid.partial_derivative(flux[..., i], i) for i in range(grid.n)
    )
    return div / sqrt_g


def normal_vector(bundle):
    """Past-directed unit normal components (nu^0, nu^i)."""
    nu0 = -bundle.vtilde
    nui = -bundle.vtilde[..., None] * bundle.u_check
    return nu0, nui
