#!/usr/bin/env python3
"""Convergence table for the sector Poisson solvers.

Builds a manufactured stream function that vanishes at the corner and on
the sector walls, applies the degenerate operator symbolically, and
measures the discrete error of both the Green-kernel quadrature and the
finite-difference solve across a sequence of grids.

Usage:
    python scripts/elliptic_convergence.py [--epsilon 1.0] [--r-max 4.0]
"""

import argparse

import numpy as np
import sympy as sp

from sectoreuler.elliptic import l_solve, poisson_quadrature
from sectoreuler.grids import Field2D, make_polar_grid, make_sector


def manufactured(spec):
    """Return (psi, L psi, Laplacian psi) as numpy-callable functions."""
    R, T = sp.symbols("R T", positive=True)
    eta = R * sp.cos(T)
    z = R * sp.sin(T)
    chi = sp.exp(-((R / (0.2 * spec.r_max)) ** 4))
    psi = R ** 2 * sp.sin(T) * sp.sin(spec.l - T) * chi

    def polar_lap(expr):
        return (sp.diff(expr, R, 2) + sp.diff(expr, R) / R
                + sp.diff(expr, T, 2) / R ** 2)

    lap = sp.simplify(polar_lap(psi))
    lpsi = sp.simplify(lap - (sp.diff(psi, R) * sp.cos(T)
                              - sp.diff(psi, T) * sp.sin(T) / R) / (1 + eta))
    fns = [sp.lambdify((R, T), e, "numpy") for e in (psi, lpsi, lap)]
    return fns


def clean(values, grid):
    """Zero round-off residue and the outer rings outside the support rule."""
    out = np.where(np.abs(values) < 1e-14, 0.0, values)
    out[grid.radii > 0.5 * grid.spec.r_max, :] = 0.0
    return out


def errors(spec, nr, ntheta, psi_fn, lpsi_fn, lap_fn):
    grid = make_polar_grid(spec, nr, ntheta)
    RR = grid.radii[:, None]
    TT = grid.thetas[None, :]
    exact = psi_fn(RR, TT)
    row = []
    for source_fn, solver in ((lap_fn, poisson_quadrature),
                              (lpsi_fn, lambda f: l_solve(f, method="fd"))):
        f = Field2D(grid, clean(source_fn(RR, TT), grid))
        approx = solver(f)
        row.append(float(np.max(np.abs(approx.values - exact))))
    return row


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--epsilon", type=float, default=1.0)
    ap.add_argument("--r-max", type=float, default=4.0)
    ap.add_argument("--grids", type=int, nargs="+", default=[32, 64, 128])
    args = ap.parse_args()

    spec = make_sector(args.epsilon, args.r_max)
    psi_fn, lpsi_fn, lap_fn = manufactured(spec)

    print(f"epsilon = {args.epsilon}  (l = {spec.l:.6f})")
    print(f"{'nr x ntheta':>12} {'quadrature':>12} {'fd solve':>12}")
    rows = []
    for nr in args.grids:
        ntheta = nr // 2 + 1
        row = errors(spec, nr, ntheta, psi_fn, lpsi_fn, lap_fn)
        rows.append(row)
        print(f"{nr:>6} x {ntheta:<5} {row[0]:>12.4e} {row[1]:>12.4e}")

    errs = np.array(rows)
    for j, label in enumerate(("quadrature", "fd solve")):
        order = np.polyfit(np.log(args.grids), -np.log(errs[:, j]), 1)[0]
        print(f"{label}: fitted order {order:.2f}")


if __name__ == "__main__":
    main()
