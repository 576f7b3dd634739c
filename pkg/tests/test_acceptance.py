"""Acceptance gate: one check per release criterion, one printed verdict line
per criterion (visible even under output capture)."""

import math
import time

import numpy as np
import pytest

import sectoreuler as se
from sectoreuler import cli
from sectoreuler.elliptic import (
    green,
    kernel_K,
    l_solve,
    poisson_quadrature,
    vanishing_exponent,
)
from sectoreuler.grids import Field2D, make_polar_grid, make_sector
from sectoreuler.norms import circ_norm

from conftest import report_at
from test_elliptic import _clean_source, _manufactured, _random_interior_points
from test_norms import holder_norm_1d
from test_onedim import endpoint_identity_residual


def _verdict(capsys, name, ok, detail):
    with capsys.disabled():
        print(f"{name} {'PASS' if ok else 'FAIL'} {detail}")
    assert ok, f"{name}: {detail}"


def _fit_order(hs, errs):
    return float(np.polyfit(np.log(hs), np.log(errs), 1)[0])


def test_a1_angular_poisson(capsys):
    # closed forms at n=1025 with one Richardson level; plain-solve order
    comb_err = 0.0
    for g_fn, G_fn, l in (
        (lambda th: np.ones_like(th),
         lambda th, l: (1 - np.cos(2 * th) - math.tan(l) * np.sin(2 * th)) / 4,
         1.0),
        (lambda th: np.sin(2 * th),
         lambda th, l: -th * np.cos(2 * th) / 4,
         math.pi / 4),
    ):
        grid = se.AngularGrid(1.0, l, 1025, np.linspace(0.0, l, 1025))
        G = se.solve_angular_poisson(g_fn(grid.theta), grid, richardson=True)
        comb_err = max(comb_err, float(np.max(np.abs(G - G_fn(grid.theta, l)))))
    ns = [129, 257, 513]
    errs = []
    for n in ns:
        grid = se.AngularGrid(1.0, 1.0, n, np.linspace(0.0, 1.0, n))
        G = se.solve_angular_poisson(np.ones(n), grid)
        exact = (1 - np.cos(2 * grid.theta)
                 - math.tan(1.0) * np.sin(2 * grid.theta)) / 4
        errs.append(float(np.max(np.abs(G - exact))))
    order = _fit_order([1.0 / (n - 1) for n in ns], errs)
    ok = comb_err <= 1e-8 and 1.8 <= order <= 2.5
    _verdict(capsys, "A1", ok,
             f"closed-form err={comb_err:.2e} (<=1e-8) order={order:.2f}")


def test_a2_blowup_run(capsys, blowup_1d_refined):
    grid = se.make_grid(1.0, 513)
    t0 = time.time()
    res = se.run_1d(grid, np.zeros(513), grid.theta ** 2, stop_factor=18.0)
    wall = time.time() - t0
    first_nz = next(d.sup_abs_g for d in res.series if d.sup_abs_g > 0)
    growth = max(d.sup_abs_g for d in res.series) / first_nz
    t_star, r2 = se.onedim.estimate_blowup_time(res.series)
    t_star_ref, _ = se.onedim.estimate_blowup_time(blowup_1d_refined.series)
    shift = abs(t_star_ref - t_star) / t_star
    ok = (growth >= 1e3 and math.isfinite(t_star) and r2 >= 0.99
          and shift < 0.05 and wall <= 60.0)
    _verdict(capsys, "A2", ok,
             f"growth={growth:.0f} T*={t_star:.4f} R2={r2:.4f} "
             f"shift={shift:.2%} wall={wall:.1f}s")


def test_a3_sign_invariants(capsys, blowup_1d):
    worst = 0.0
    run_sup_g = run_sup_P = 0.0
    ok = True
    for d in blowup_1d.series:
        run_sup_g = max(run_sup_g, d.sup_abs_g)
        run_sup_P = max(run_sup_P, abs(d.P_at_l))
        floor_g = -1e-6 * max(run_sup_g, 1.0)
        floor_P = -1e-6 * max(run_sup_P, 1.0)
        for v, floor in ((d.min_g, floor_g), (d.min_dg, floor_g),
                         (d.min_P, floor_P), (d.min_dP, floor_P),
                         (d.min_P_plus_Ppp, floor_P)):
            worst = min(worst, v)
            ok = ok and v >= floor
    _verdict(capsys, "A3", ok, f"most negative monotone value={worst:.2e}")


def test_a4_endpoint_identity(capsys):
    r1 = endpoint_identity_residual(2e-3, t_end=1.07)
    r2 = endpoint_identity_residual(1e-3, t_end=1.07)
    order = math.log2(r1 / r2)
    ok = order >= 1.8
    _verdict(capsys, "A4", ok,
             f"residual {r1:.2e}->{r2:.2e} under dt halving, order={order:.2f}")


def test_a5_green_function(capsys):
    details = []
    ok = True
    for eps in (1.0, math.sqrt(3.0), 0.25):
        spec = make_sector(eps, 4.0)
        rng = np.random.default_rng(17)
        y = _random_interior_points(spec, rng, 1000)
        x = _random_interior_points(spec, rng, 1000)
        scale = max(float(np.max(np.abs(green(x, y, spec.beta)))), 1.0)
        bdry = 0.0
        for th_b in (0.0, spec.l):
            xb = rng.uniform(0.05, 3.0, 200) * np.exp(1j * th_b)
            bdry = max(bdry, float(np.max(np.abs(green(xb, y[:200], spec.beta)))))
        sym = float(np.max(np.abs(green(x, y, spec.beta)
                                  - green(y, x, spec.beta))))
        xs = _random_interior_points(spec, rng, 64, r_lo=0.3, r_hi=2.0)
        ys = _random_interior_points(spec, rng, 64, r_lo=0.3, r_hi=2.0)
        keep = np.abs(xs - ys) > 0.2
        xs, ys = xs[keep], ys[keep]
        K = kernel_K(xs, ys, spec.beta)
        hs, errs = [2e-3, 1e-3, 5e-4], []
        for h in hs:
            fd = ((green(xs + h, ys, spec.beta) - green(xs - h, ys, spec.beta))
                  + 1j * (green(xs + 1j * h, ys, spec.beta)
                          - green(xs - 1j * h, ys, spec.beta))) / (2 * h)
            errs.append(float(np.max(np.abs(K - fd))))
        order = _fit_order(hs, errs)
        ok = ok and bdry <= 1e-10 * scale and sym <= 1e-12 and order >= 1.8
        details.append(f"eps={eps:.3g}: bdry={bdry:.1e} sym={sym:.1e} "
                       f"fd_order={order:.2f}")
    _verdict(capsys, "A5", ok, "; ".join(details))


def test_a6_manufactured(capsys):
    spec = make_sector(1.0, 4.0)
    psi_fn, lap_fn, l_fn = _manufactured(spec)

    def errors(solver, fn, sizes):
        errs = []
        for nr, nt in sizes:
            grid = make_polar_grid(spec, nr, nt, r_min=4e-3)
            exact = Field2D.from_function(grid, psi_fn)
            got = solver(_clean_source(grid, fn))
            errs.append(float(np.max(np.abs(got.values - exact.values))))
        return errs

    eq = errors(poisson_quadrature, lap_fn, [(48, 25), (96, 49)])
    order_q = math.log2(eq[0] / eq[1])
    efd = errors(lambda f: l_solve(f, method="fd"), l_fn,
                 [(64, 33), (128, 65), (256, 129)])
    order_fd = math.log2(efd[-2] / efd[-1])
    grid = make_polar_grid(spec, 128, 65, r_min=4e-3)
    src = _clean_source(grid, l_fn)
    it = l_solve(src, method="iterate")
    fd = l_solve(src, method="fd")
    gap = float(np.max(np.abs(it.values - fd.values)))
    ok = order_q >= 1.8 and order_fd >= 1.8 and gap <= 2.0 * efd[-2]
    _verdict(capsys, "A6", ok,
             f"quadrature order={order_q:.2f} fd order={order_fd:.2f} "
             f"fd/iterate gap={gap:.2e} (<= {2.0 * efd[-2]:.2e})")


def test_a7_vanishing_corollary(capsys):
    spec = make_sector(1.0, 4.0)
    grid = make_polar_grid(spec, 256, 129, r_min=4e-4)
    R, T = grid.mesh()
    f = Field2D(grid, np.sqrt(R) * np.sin(math.pi * T / spec.l)
                * np.exp(-((R / 0.8) ** 4)))
    f.values[-2:, :] = 0.0
    slope = vanishing_exponent(f, alpha=0.5)
    flat = Field2D(grid, np.where(R < 1.5, 1.0, 0.0) * np.ones_like(T))
    flat.values[-2:, :] = 0.0
    slope_flat = vanishing_exponent(flat, alpha=0.5)
    ok = slope >= 0.4 and slope_flat <= 0.1
    _verdict(capsys, "A7", ok,
             f"decaying-source slope={slope:.3f} (>=0.4), "
             f"flat contrast={slope_flat:.3f} (<=0.1)")


def test_a8_conservation(capsys, blowup_2d, noswirl_2d):
    half = [r for r in blowup_2d.reports if r.t <= 0.5 * blowup_2d.t_star + 1e-9]
    e0 = half[0].energy
    de = max(abs(r.energy - e0) / e0 for r in half)
    lo0, hi0 = half[0].q2_min, half[0].q2_max
    q2_scale = max(abs(lo0), abs(hi0))
    q2 = max(max(lo0 - r.q2_min, r.q2_max - hi0, 0.0) for r in half) / q2_scale
    corner = max(abs(r.corner_u_drift) for r in half)
    ns = noswirl_2d.reports
    s0, l0 = ns[0].sup_omega_over_r, ns[0].l1_omega
    d_sup = max(abs(r.sup_omega_over_r - s0) / s0 for r in ns)
    d_l1 = max(abs(r.l1_omega - l0) / l0 for r in ns)
    ok = (de <= 1e-2 and q2 <= 1e-3 and corner <= 1e-6
          and d_sup <= 5e-3 and d_l1 <= 5e-3 and noswirl_2d.status == "t_end")
    _verdict(capsys, "A8", ok,
             f"energy drift={de:.2e} q2 violation={q2:.2e} corner={corner:.2e}; "
             f"no-swirl sup drift={d_sup:.2e} L1 drift={d_l1:.2e}")


def test_a9_shadowing(capsys, blowup_2d):
    details = []
    ok = True
    for frac in (0.25, 0.5):
        rep = report_at(blowup_2d, frac * blowup_2d.t_star)
        e = rep.sup_err_per_radius
        decreasing = all(a > b for a, b in zip(e, e[1:]))
        ok = ok and decreasing and rep.fitted_alpha > 0
        details.append(f"{frac}T*: errs=down({decreasing}) "
                       f"alpha={rep.fitted_alpha:.2f}")
    _verdict(capsys, "A9", ok, "; ".join(details))


def test_a10_bkm(capsys, blowup_2d):
    bkm = [r.bkm_accumulator for r in blowup_2d.reports]
    nondec = all(b >= a for a, b in zip(bkm, bkm[1:]))
    b_half = report_at(blowup_2d, 0.5 * blowup_2d.t_star).bkm_accumulator
    b_late = report_at(blowup_2d, 0.95 * blowup_2d.t_star).bkm_accumulator
    factor = b_late / b_half
    ok = nondec and factor >= 5.0
    _verdict(capsys, "A10", ok,
             f"nondecreasing={nondec} growth 0.5->0.95 T* = {factor:.1f}x")


def test_a11_norms(capsys):
    grid = make_polar_grid(make_sector(1.0, 4.0), 96, 128, r_min=1e-3)
    T = grid.mesh()[1]
    q = lambda th: np.sin(6.0 * th)
    est = circ_norm(Field2D(grid, q(T)), 0.5, pair_budget=200_000)
    oracle = holder_norm_1d(grid.thetas, q(grid.thetas), 0.5)
    dev = abs(est.total - oracle) / oracle
    scaled = circ_norm(Field2D(grid, -2.5 * q(T)), 0.5, pair_budget=200_000)
    exact_scaling = scaled.total == pytest.approx(2.5 * est.total, rel=1e-14)
    lo = circ_norm(Field2D(grid, q(T)), 0.5, pair_budget=50_000)
    monotone = est.seminorm_part >= lo.seminorm_part - 1e-15
    ok = dev <= 0.10 and exact_scaling and monotone
    _verdict(capsys, "A11", ok,
             f"homogeneous dev={dev:.2%} scaling exact={exact_scaling} "
             f"budget monotone={monotone}")


def test_a12_determinism(capsys, tmp_path):
    outs = []
    for name in ("r1", "r2"):
        out = tmp_path / name
        code = cli.main(["--scenario", "onedim-blowup", "--n", "257",
                         "--out", str(out)])
        assert code == cli.EXIT_BLOWUP
        outs.append(out)
    same = all((outs[0] / f).read_bytes() == (outs[1] / f).read_bytes()
               for f in ("diagnostics.csv", "final_state.csv"))
    _verdict(capsys, "A12", same, "repeated runs byte-identical: "
             f"{same}")
