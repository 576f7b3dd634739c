"""Finite differences on the log-polar grid (uniform in s = ln R and theta).

All stencils are second order: central inside, one-sided at the edges.
Cartesian derivatives use the chain rule
    d/d(eta) = (cos t / R) d/ds - (sin t / R) d/dt,
    d/dz     = (sin t / R) d/ds + (cos t / R) d/dt.
"""

from __future__ import annotations

import numpy as np

from .grids import Field2D, PolarGrid

__all__ = ["d_s", "d_theta", "grad_cartesian", "hessian_cartesian"]


def _d_axis(v: np.ndarray, h: float, axis: int) -> np.ndarray:
    v = np.moveaxis(v, axis, 0)
    out = np.empty_like(v)
    out[1:-1] = (v[2:] - v[:-2]) / (2.0 * h)
    out[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h)
    out[-1] = (3.0 * v[-1] - 4.0 * v[-2] + v[-3]) / (2.0 * h)
    return np.moveaxis(out, 0, axis)


def d_s(values: np.ndarray, grid: PolarGrid) -> np.ndarray:
    return _d_axis(values, grid.ds, axis=0)


def d_theta(values: np.ndarray, grid: PolarGrid) -> np.ndarray:
    return _d_axis(values, grid.dtheta, axis=1)


def grad_cartesian(field: Field2D):
    """(d/d(eta), d/dz) of a field as value arrays."""
    grid = field.grid
    R, T = grid.mesh()
    fs = d_s(field.values, grid)
    ft = d_theta(field.values, grid)
    cos, sin = np.cos(T), np.sin(T)
    deta = (cos * fs - sin * ft) / R
    dz = (sin * fs + cos * ft) / R
    return deta, dz


def hessian_cartesian(field: Field2D):
    """(psi_ee, psi_ez, psi_zz) by nested first differences."""
    grid = field.grid
    deta, dz = grad_cartesian(field)
    dee, dez = grad_cartesian(Field2D(grid, deta))
    dze, dzz = grad_cartesian(Field2D(grid, dz))
    return dee, 0.5 * (dez + dze), dzz
