"""Dirichlet solvers on the sector: the explicit Green's-function quadrature
for the Laplacian, its gradient kernel, and sparse log-polar discretizations
of both the Laplacian and the drifted operator

    L(psi) = psi_zz + psi_ee - psi_e / (1 + eta),          (eta = r - 1)

with an independent fixed-point route L = Delta - drift for cross-checking.

Complex powers are evaluated in log-polar form, exp((ln R + i*t)/beta) with
t = atan2(z, eta) in [0, beta*pi], so the principal branch is never at risk.
"""

from __future__ import annotations

import math
import warnings

import numpy as np
from scipy.sparse import csc_matrix
from scipy.sparse.linalg import splu

from .diffops import grad_cartesian, hessian_cartesian
from .errors import (
    DomainError,
    InsufficientResolutionError,
    InvalidParameterError,
    SingularityError,
    TruncationError,
)
from .grids import Field2D, PolarGrid

__all__ = ["green", "kernel_K", "poisson_quadrature", "velocity_bound_check",
           "l_solve", "vanishing_exponent", "factorized_operator"]

_TWO_PI = 2.0 * math.pi


def _cpow(x, p):
    """x^p by log-polar composition; x complex with arg in [0, pi)."""
    x = np.asarray(x, dtype=complex)
    r = np.abs(x)
    t = np.arctan2(x.imag, x.real)
    with np.errstate(divide="ignore"):
        ln_r = np.log(r)
    return np.exp(p * (ln_r + 1j * t))


def _check_in_sector(x, beta: float, name: str) -> None:
    x = np.asarray(x, dtype=complex)
    t = np.arctan2(x.imag, x.real)
    tol = 1e-12
    if np.any((t < -tol) | (t > beta * math.pi + tol)):
        raise DomainError(f"{name} outside the closed sector of opening {beta}*pi")


def green(x, y, beta: float, validate: bool = True):
    """Dirichlet Green's function of the Laplacian on the sector.

    (1/2pi) * ln(|x^(1/b) - y^(1/b)| / |conj(x)^(1/b) - y^(1/b)|); nonpositive,
    zero when either argument sits on a boundary ray.
    """
    if not (0.0 < beta < 0.5):
        raise InvalidParameterError(f"beta={beta} outside (0, 1/2)")
    if validate:
        _check_in_sector(x, beta, "x")
        _check_in_sector(y, beta, "y")
        if np.any(np.asarray(x) == np.asarray(y)):
            raise SingularityError("green(x, y) requires x != y")
    X = _cpow(x, 1.0 / beta)
    Y = _cpow(y, 1.0 / beta)
    num = np.abs(X - Y)
    den = np.abs(np.conj(X) - Y)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.log(num / den) / _TWO_PI
    return out


def kernel_K(x, y, beta: float, validate: bool = True):
    """Gradient kernel of the sector Green's function.

    Returns the complex number d(eta)G + i * dzG, assembled from the closed
    form -x^(1/b-1)/(4 pi b) * (conj(Y)-Y) / ((X-conj(Y))(X-Y)); that closed
    form is the Wirtinger x-derivative of ``green``, so the Cartesian gradient
    is twice its conjugate. Vanishes when y lies on a boundary ray.
    """
    if not (0.0 < beta < 0.5):
        raise InvalidParameterError(f"beta={beta} outside (0, 1/2)")
    if validate:
        _check_in_sector(x, beta, "x")
        _check_in_sector(y, beta, "y")
        if np.any(np.asarray(x) == np.asarray(y)):
            raise SingularityError("kernel_K(x, y) requires x != y")
    X = _cpow(x, 1.0 / beta)
    Y = _cpow(y, 1.0 / beta)
    Xp = _cpow(x, 1.0 / beta - 1.0) / beta
    K = -Xp / (4.0 * math.pi) * (np.conj(Y) - Y) / ((X - np.conj(Y)) * (X - Y))
    return 2.0 * np.conj(K)


def _support_arrays(f: Field2D):
    """Nonzero sources as (complex points, weighted values); enforces the
    truncation rule supp(f) in {R < r_max/2} and zero outer two rings."""
    grid = f.grid
    if np.any(f.values[-2:, :] != 0.0):
        raise TruncationError("source is nonzero on the outer two radial rings")
    R, _ = grid.mesh()
    if np.any((np.abs(f.values) > 0.0) & (R >= 0.5 * grid.spec.r_max)):
        raise TruncationError("source support reaches R >= r_max/2")
    eta, z = grid.cartesian()
    pts = (eta + 1j * z).ravel()
    w = grid.area_weights().ravel()
    vals = f.values.ravel()
    idx = np.flatnonzero(vals != 0.0)
    return pts, idx, vals, w


def poisson_quadrature(f: Field2D) -> Field2D:
    """psi(x) = sum over cells of G(x, y) f(y) area(y).

    The log-singular self cell is replaced by the analytic average of the
    singular part over an equal-area disk, which restores second order.
    """
    grid = f.grid
    beta = grid.spec.beta
    pts, src_idx, vals, w = _support_arrays(f)
    n = pts.size
    psi = np.zeros(n)
    if src_idx.size == 0:
        return Field2D(grid, psi.reshape(grid.nr, grid.ntheta))
    ys = pts[src_idx]
    fw = vals[src_idx] * w[src_idx]
    Y = _cpow(ys, 1.0 / beta)
    chunk = max(1, 4_000_000 // max(src_idx.size, 1))
    for start in range(0, n, chunk):
        xs = pts[start:start + chunk]
        X = _cpow(xs, 1.0 / beta)[:, None]
        num = np.abs(X - Y[None, :])
        den = np.abs(np.conj(X) - Y[None, :])
        with np.errstate(divide="ignore", invalid="ignore"):
            Gmat = np.log(num / den) / _TWO_PI
        # self cells: average of (1/2pi) ln|x-y| over an equal-area disk
        tgt_global = np.arange(start, min(start + chunk, n))
        hit = np.isin(tgt_global, src_idx)
        if np.any(hit):
            rows = np.flatnonzero(hit)
            cols = np.searchsorted(src_idx, tgt_global[rows])
            x_self = xs[rows]
            rho = np.sqrt(w[tgt_global[rows]] / math.pi)
            Xs = _cpow(x_self, 1.0 / beta)
            dXs = np.abs(_cpow(x_self, 1.0 / beta - 1.0)) / beta
            # sources on a boundary ray contribute nothing (G(., y) = 0 there)
            on_ray = np.abs(Xs.imag) <= 1e-14 * np.abs(Xs)
            with np.errstate(divide="ignore"):
                reg = -np.log(np.abs(np.conj(Xs) - Xs)) / _TWO_PI
            cell = (np.log(dXs * rho) - 0.5) / _TWO_PI + reg
            Gmat[rows, cols] = np.where(on_ray, 0.0, cell)
        psi[start:start + chunk] = Gmat @ fw
    return Field2D(grid, psi.reshape(grid.nr, grid.ntheta))


def gradient_quadrature(f: Field2D):
    """(d(eta) psi, dz psi) by kernel quadrature.

    The antisymmetric self-cell singularity averages to zero over a centered
    disk; only the smooth image part of the self cell is kept.
    """
    grid = f.grid
    beta = grid.spec.beta
    pts, src_idx, vals, w = _support_arrays(f)
    n = pts.size
    gpsi = np.zeros(n, dtype=complex)
    if src_idx.size == 0:
        zz = np.zeros((grid.nr, grid.ntheta))
        return zz, zz.copy()
    ys = pts[src_idx]
    fw = vals[src_idx] * w[src_idx]
    Y = _cpow(ys, 1.0 / beta)
    chunk = max(1, 2_000_000 // max(src_idx.size, 1))
    for start in range(0, n, chunk):
        xs = pts[start:start + chunk]
        X = _cpow(xs, 1.0 / beta)[:, None]
        Xp = (_cpow(xs, 1.0 / beta - 1.0) / beta)[:, None]
        K = -Xp / (4.0 * math.pi) * (np.conj(Y) - Y)[None, :] / (
            (X - np.conj(Y)[None, :]) * (X - Y[None, :]))
        Kmat = 2.0 * np.conj(K)
        tgt_global = np.arange(start, min(start + chunk, n))
        hit = np.isin(tgt_global, src_idx)
        if np.any(hit):
            rows = np.flatnonzero(hit)
            cols = np.searchsorted(src_idx, tgt_global[rows])
            Xs = X[rows, 0]
            Xps = Xp[rows, 0]
            on_ray = np.abs(Xs.imag) <= 1e-14 * np.abs(Xs)
            with np.errstate(divide="ignore", invalid="ignore"):
                K_img = -Xps / (4.0 * math.pi * (Xs - np.conj(Xs)))
            Kmat[rows, cols] = np.where(on_ray, 0.0, 2.0 * np.conj(K_img))
        gpsi[start:start + chunk] = Kmat @ fw
    shape = (grid.nr, grid.ntheta)
    return gpsi.real.reshape(shape), gpsi.imag.reshape(shape)


def velocity_bound_check(f: Field2D) -> float:
    """sup over the grid of |grad psi(x)| / (|x| sup|f|); 0 for f = 0."""
    sup_f = float(np.max(np.abs(f.values)))
    if sup_f == 0.0:
        return 0.0
    deta, dz = gradient_quadrature(f)
    R, _ = f.grid.mesh()
    ratio = np.hypot(deta, dz) / (R * sup_f)
    return float(np.max(ratio))


# ---------------------------------------------------------------------------
# Sparse log-polar discretizations

_FACT_CACHE: dict = {}


def _grid_key(grid: PolarGrid):
    return (grid.spec.epsilon, grid.spec.r_max, grid.nr, grid.ntheta, grid.r_min)


def _build_matrix(grid: PolarGrid, operator: str) -> csc_matrix:
    """Row-scaled operator: psi_ss + psi_tt - c1 psi_s + c2 psi_t = R^2 f,
    with (c1, c2) = R/(1+eta) * (cos t, sin t) for "l", zero for "laplace".
    Homogeneous Dirichlet on all four grid edges."""
    nr, nt = grid.nr, grid.ntheta
    ds, dt = grid.ds, grid.dtheta
    R, T = grid.mesh()
    eta = R * np.cos(T)
    if operator == "l":
        c1 = R * np.cos(T) / (1.0 + eta)
        c2 = R * np.sin(T) / (1.0 + eta)
    elif operator == "laplace":
        c1 = np.zeros_like(R)
        c2 = np.zeros_like(R)
    else:
        raise InvalidParameterError(f"unknown operator {operator!r}")

    def node(i, j):
        return i * nt + j

    rows, cols, data = [], [], []
    for i in range(nr):
        for j in range(nt):
            k = node(i, j)
            if i == 0 or i == nr - 1 or j == 0 or j == nt - 1:
                rows.append(k)
                cols.append(k)
                data.append(1.0)
                continue
            a_s = 1.0 / (ds * ds)
            a_t = 1.0 / (dt * dt)
            b_s = c1[i, j] / (2.0 * ds)
            b_t = c2[i, j] / (2.0 * dt)
            rows += [k, k, k, k, k]
            cols += [node(i - 1, j), node(i + 1, j),
                     node(i, j - 1), node(i, j + 1), k]
            data += [a_s + b_s, a_s - b_s,
                     a_t - b_t, a_t + b_t,
                     -2.0 * a_s - 2.0 * a_t]
    return csc_matrix((data, (rows, cols)), shape=(nr * nt, nr * nt))


def factorized_operator(grid: PolarGrid, operator: str):
    """LU factorization of the log-polar stencil, cached per grid."""
    key = (_grid_key(grid), operator)
    fact = _FACT_CACHE.get(key)
    if fact is None:
        fact = splu(_build_matrix(grid, operator))
        if len(_FACT_CACHE) > 32:
            _FACT_CACHE.clear()
        _FACT_CACHE[key] = fact
    return fact


def _dirichlet_solve(grid: PolarGrid, operator: str, rhs_values: np.ndarray) -> np.ndarray:
    R, _ = grid.mesh()
    b = (R * R * rhs_values).ravel().copy()
    nr, nt = grid.nr, grid.ntheta
    b = b.reshape(nr, nt)
    b[0, :] = 0.0
    b[-1, :] = 0.0
    b[:, 0] = 0.0
    b[:, -1] = 0.0
    sol = factorized_operator(grid, operator).solve(b.ravel())
    return sol.reshape(nr, nt)


def l_solve(f: Field2D, method: str = "fd") -> Field2D:
    """Solve L(psi) = f with psi = 0 on the truncated-sector boundary.

    method "fd": direct sparse solve. method "iterate": fixed point
    psi <- Delta^-1 (f + psi_e / (1+eta)), falling back to "fd" with a
    warning if the relative increment grows three times in a row.
    """
    grid = f.grid
    if method == "fd":
        return Field2D(grid, _dirichlet_solve(grid, "l", f.values))
    if method != "iterate":
        raise InvalidParameterError(f"unknown method {method!r}")
    eta, _ = grid.cartesian()
    psi = np.zeros_like(f.values)
    prev_rel = np.inf
    growth = 0
    for _ in range(200):
        deta, _dz = grad_cartesian(Field2D(grid, psi))
        rhs = f.values + deta / (1.0 + eta)
        new = _dirichlet_solve(grid, "laplace", rhs)
        scale = max(float(np.max(np.abs(new))), 1e-300)
        rel = float(np.max(np.abs(new - psi))) / scale
        psi = new
        if rel < 1e-9:
            return Field2D(grid, psi)
        if rel > prev_rel:
            growth += 1
            if growth >= 3:
                warnings.warn("l_solve iteration diverged; falling back to fd",
                              RuntimeWarning, stacklevel=2)
                return l_solve(f, method="fd")
        else:
            growth = 0
        prev_rel = rel
    warnings.warn("l_solve iteration hit the cap; falling back to fd",
                  RuntimeWarning, stacklevel=2)
    return l_solve(f, method="fd")


def vanishing_exponent(f: Field2D, alpha: float, skip: int = 2):
    """Fitted decay exponent of sup_theta |D^2 psi| over the inner decade.

    Solves L(psi) = f directly, differentiates on the graded grid, and fits
    log sup|D^2 psi| against log R over [radii[skip], 10*radii[skip]].
    Returns None when D^2 psi vanishes identically.
    """
    grid = f.grid
    psi = l_solve(f, method="fd")
    dee, dez, dzz = hessian_cartesian(psi)
    d2 = np.maximum(np.maximum(np.abs(dee), np.abs(dez)), np.abs(dzz))
    per_radius = d2.max(axis=1)
    if float(per_radius.max()) == 0.0:
        return None
    radii = grid.radii
    r0 = radii[skip]
    sel = np.flatnonzero((radii >= r0) & (radii <= 10.0 * r0))
    if sel.size < 8:
        raise InsufficientResolutionError(
            f"only {sel.size} radial nodes in the inner decade; need >= 8")
    y = per_radius[sel]
    if np.any(y <= 0.0):
        return None
    slope, _ = np.polyfit(np.log(radii[sel]), np.log(y), 1)
    return float(slope)
