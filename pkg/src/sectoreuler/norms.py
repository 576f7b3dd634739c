"""Sampled estimates of the scale-invariant Hölder norms.

The norm is sup|f| plus the weighted seminorm
    sup |  |x|^a f(x) - |x'|^a f(x')  | / |x - x'|^a
with |x| measured from the corner (eta, z) = (0, 0).  The estimator takes the
max over a deterministic pair sample and is a lower bound of the true norm;
budgets extend the sample by prefix, so estimates never decrease with budget.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameterError
from .grids import Field2D

__all__ = ["NormEstimate", "circ_norm", "classical_norm", "product_rule_check"]

_SEED = 20260826


@dataclass(frozen=True)
class NormEstimate:
    """Lower-bound estimate of a scale-invariant Hölder norm."""

    sup_part: float
    seminorm_part: float
    total: float
    alpha: float
    pair_count: int
    center: tuple = (0.0, 0.0)


def _pair_stream(grid, budget: int):
    """Deterministic pair sample: 70% same-annulus pairs ordered by angular
    gap, 30% seeded cross-annulus pairs.  Each part is a prefix of a fixed
    stream, so growing the budget only extends the sample."""
    nr, nt = grid.nr, grid.ntheta
    w_budget = (7 * budget) // 10
    ii_a, jj_a, ii_b, jj_b = [], [], [], []
    count = 0
    for gap in range(1, nt):
        if count >= w_budget:
            break
        j = np.arange(nt - gap)
        for i in range(nr):
            if count >= w_budget:
                break
            ii_a.append(np.full(j.size, i))
            jj_a.append(j)
            ii_b.append(np.full(j.size, i))
            jj_b.append(j + gap)
            count += j.size
    if count > 0:
        ia = np.concatenate(ii_a)[:w_budget]
        ja = np.concatenate(jj_a)[:w_budget]
        ib = np.concatenate(ii_b)[:w_budget]
        jb = np.concatenate(jj_b)[:w_budget]
    else:  # pragma: no cover - degenerate single-angle grid
        ia = ja = ib = jb = np.empty(0, dtype=int)
    rng = np.random.default_rng(_SEED)
    parts_a, parts_b, parts_ja, parts_jb = [ia], [ib], [ja], [jb]
    count = ia.size
    while count < budget:
        m = min(budget - count, 65536)
        ca = rng.integers(0, nr, m)
        cb = rng.integers(0, nr, m)
        cja = rng.integers(0, nt, m)
        cjb = rng.integers(0, nt, m)
        keep = (ca != cb) | (cja != cjb)
        parts_a.append(ca[keep])
        parts_ja.append(cja[keep])
        parts_b.append(cb[keep])
        parts_jb.append(cjb[keep])
        count += int(keep.sum())
    return (np.concatenate(parts_a)[:budget], np.concatenate(parts_ja)[:budget],
            np.concatenate(parts_b)[:budget], np.concatenate(parts_jb)[:budget])


def _seminorm(f: Field2D, alpha: float, pair_budget: int, weighted: bool) -> tuple:
    grid = f.grid
    ia, ja, ib, jb = _pair_stream(grid, pair_budget)
    eta, z = grid.cartesian()
    R, _ = grid.mesh()
    v = f.values
    xa = eta[ia, ja] + 1j * z[ia, ja]
    xb = eta[ib, jb] + 1j * z[ib, jb]
    sep = np.abs(xa - xb)
    ok = sep > 0.0
    if weighted:
        num = np.abs(R[ia, ja] ** alpha * v[ia, ja] - R[ib, jb] ** alpha * v[ib, jb])
    else:
        num = np.abs(v[ia, ja] - v[ib, jb])
    quot = np.where(ok, num / np.where(ok, sep, 1.0) ** alpha, 0.0)
    return float(np.max(quot)) if quot.size else 0.0, int(ok.sum())


def circ_norm(f: Field2D, alpha: float, pair_budget: int = 10_000) -> NormEstimate:
    """Scale-invariant Hölder norm estimate over a deterministic pair sample."""
    if not (0.0 < alpha <= 1.0):
        raise InvalidParameterError(f"alpha={alpha} outside (0, 1]")
    if pair_budget < 10_000:
        raise InvalidParameterError("pair_budget must be at least 10^4")
    sup = float(np.max(np.abs(f.values)))
    semi, used = _seminorm(f, alpha, pair_budget, weighted=True)
    return NormEstimate(sup_part=sup, seminorm_part=semi, total=sup + semi,
                        alpha=alpha, pair_count=used)


def classical_norm(f: Field2D, alpha: float, pair_budget: int = 10_000) -> NormEstimate:
    """Classical C^alpha estimate: same sampler, weight |x|^a dropped."""
    if not (0.0 < alpha <= 1.0):
        raise InvalidParameterError(f"alpha={alpha} outside (0, 1]")
    if pair_budget < 10_000:
        raise InvalidParameterError("pair_budget must be at least 10^4")
    sup = float(np.max(np.abs(f.values)))
    semi, used = _seminorm(f, alpha, pair_budget, weighted=False)
    return NormEstimate(sup_part=sup, seminorm_part=semi, total=sup + semi,
                        alpha=alpha, pair_count=used)


def product_rule_check(f: Field2D, h: Field2D, alpha: float,
                       pair_budget: int = 20_000) -> float:
    """est||f h||_{C^a} / (est||h||_{circ a} * est||f||_{C^a}).

    Requires f to vanish at the corner; the corner value is estimated by
    linear-in-R extrapolation of the two innermost rings to R = 0, so a
    factor like R*sin(theta) passes regardless of where the grid starts.
    """
    r0, r1 = f.grid.radii[0], f.grid.radii[1]
    corner = f.values[0, :] - r0 * (f.values[1, :] - f.values[0, :]) / (r1 - r0)
    inner = float(np.max(np.abs(corner)))
    sup_f = float(np.max(np.abs(f.values)))
    if sup_f == 0.0:
        return 0.0
    if inner >= 1e-8 * sup_f + 1e-300:
        raise InvalidParameterError("f must vanish at the corner")
    fh = Field2D(f.grid, f.values * h.values)
    n_fh = classical_norm(fh, alpha, pair_budget).total
    n_h = circ_norm(h, alpha, pair_budget).total
    n_f = classical_norm(f, alpha, pair_budget).total
    denom = n_h * n_f
    return n_fh / denom if denom > 0 else math.inf
