"""Configuration and orchestration of the scenario runs.

Config files are plain-text key=value with '#' comments; command-line flags
override file values (with a warning).  Unknown keys are rejected in strict
mode.  Exit codes: 0 clean finish, 2 config error, 3 I/O error, 10 blow-up
detected (the expected success for blow-up scenarios), 11 CFL exhaustion,
12 solver failure.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields as dataclass_fields, replace

import numpy as np

from . import axisym, elliptic, onedim, runio
from .errors import CflExhaustedError, ConfigError, SectorEulerError
from .grids import Field2D, make_polar_grid, make_sector

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_BLOWUP = 10
EXIT_CFL = 11
EXIT_SOLVER = 12

SCENARIOS = ("onedim-blowup", "axis-onedim", "elliptic-validate",
             "axisym-blowup", "axisym-noswirl")
PRESETS = ("paper-blowup", "custom")


@dataclass
class RunConfig:
    scenario: str = ""
    epsilon: float = 1.0
    n: int = 513
    nr: int = 128
    ntheta: int = 64
    r_max: float = 4.0
    r_min: float = 0.0          # 0 -> default grading (1e-4 * r_max)
    alpha: float = 0.5
    dt_max: float = 5e-3
    t_end: float = 0.0          # 0 -> scenario default
    t_frac: float = 0.5
    record_every: int = 10
    preset: str = "paper-blowup"
    g0_file: str = ""
    P0_file: str = ""
    out: str = "out"
    snapshot_every: int = 0     # 0 -> no snapshots

    def validate(self) -> None:
        if self.scenario not in SCENARIOS:
            raise ConfigError(f"scenario must be one of {SCENARIOS}, "
                              f"got {self.scenario!r}")
        if not (self.epsilon > 0):
            raise ConfigError(f"invalid value for key 'epsilon': {self.epsilon}")
        for key in ("n", "nr", "ntheta", "record_every"):
            if getattr(self, key) <= 0:
                raise ConfigError(f"invalid value for key '{key}': {getattr(self, key)}")
        for key in ("r_max", "alpha", "dt_max", "t_frac"):
            if getattr(self, key) <= 0:
                raise ConfigError(f"invalid value for key '{key}': {getattr(self, key)}")
        if self.preset not in PRESETS:
            raise ConfigError(f"preset must be one of {PRESETS}, got {self.preset!r}")
        if self.preset == "custom" and self.scenario != "elliptic-validate":
            if not self.g0_file or not self.P0_file:
                raise ConfigError("preset 'custom' requires keys 'g0_file' and 'P0_file'")


_FIELD_TYPES = {f.name: f.type for f in dataclass_fields(RunConfig)}


def _coerce(key: str, raw: str):
    kind = _FIELD_TYPES[key]
    if kind == "int":
        return int(raw)
    if kind == "float":
        return float(raw)
    return raw


def _read_config_file(path: str) -> dict:
    if not os.path.exists(path):
        raise ConfigError(f"config file not found: {path}")
    out = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key=value, got {line!r}")
            key, _, value = line.partition("=")
            out[key.strip()] = value.strip()
    return out


def parse_config(path: str | None = None, flags: dict | None = None,
                 strict: bool = True) -> RunConfig:
    """Merge file values and flag overrides into a validated RunConfig.

    Flags win over file values; a warning is emitted on each conflict.
    Unknown keys raise in strict mode.
    """
    flags = dict(flags or {})
    raw = _read_config_file(path) if path else {}
    merged = {}
    for key, value in raw.items():
        if key not in _FIELD_TYPES:
            if strict:
                raise ConfigError(f"unknown config key: '{key}'")
            continue
        try:
            merged[key] = _coerce(key, value)
        except ValueError as exc:
            raise ConfigError(f"invalid value for key '{key}': {value!r}") from exc
    for key, value in flags.items():
        if value is None:
            continue
        if key not in _FIELD_TYPES:
            raise ConfigError(f"unknown flag key: '{key}'")
        if key in merged and merged[key] != value:
            warnings.warn(f"flag --{key.replace('_', '-')}={value} overrides "
                          f"config file value {merged[key]}", stacklevel=2)
        merged[key] = value
    cfg = RunConfig(**merged)
    if cfg.scenario == "":
        raise ConfigError("missing required key: 'scenario'")
    cfg.validate()
    return cfg


def _manifest_entries(cfg: RunConfig) -> dict:
    return {f.name: getattr(cfg, f.name) for f in dataclass_fields(RunConfig)}


def _initial_profiles(cfg: RunConfig, theta: np.ndarray):
    if cfg.preset == "paper-blowup":
        return np.zeros(theta.size), theta ** 2
    g0 = np.loadtxt(cfg.g0_file)
    P0 = np.loadtxt(cfg.P0_file)
    if g0.shape != theta.shape or P0.shape != theta.shape:
        raise ConfigError("custom g0/P0 arrays must match the angular node count")
    return g0, P0


def _default_t_end(cfg: RunConfig) -> float:
    if cfg.t_end > 0:
        return cfg.t_end
    return 2.0 if cfg.scenario == "axisym-noswirl" else 50.0


def _run_onedim(cfg: RunConfig, outdir: str, system: str) -> int:
    grid = onedim.make_grid(cfg.epsilon, cfg.n)
    g0, P0 = _initial_profiles(cfg, grid.theta)
    try:
        res = onedim.run_1d(grid, g0, P0, system=system, dt_max=cfg.dt_max,
                            t_end=_default_t_end(cfg),
                            record_every=cfg.record_every)
    except CflExhaustedError:
        return EXIT_CFL
    runio.write_diagnostics_1d_csv(os.path.join(outdir, "diagnostics.csv"),
                                   res.series)
    runio.write_final_state_csv(os.path.join(outdir, "final_state.csv"),
                                res.state)
    if res.status == "blowup":
        return EXIT_BLOWUP
    if res.status == "cfl-exhausted":
        return EXIT_CFL
    return EXIT_OK


def _run_elliptic_validate(cfg: RunConfig, outdir: str) -> int:
    """Manufactured-solution convergence table for the sparse L solve and the
    Green's-function quadrature, plus the 1D closed forms."""
    import sympy as sp

    eps = cfg.epsilon
    spec = make_sector(eps, cfg.r_max)
    l = spec.l
    Rs, Ts = sp.symbols("R T", positive=True)
    chi = sp.exp(-((Rs / (0.2 * cfg.r_max)) ** 4))
    psi_m = Rs ** 2 * sp.sin(Ts) * sp.sin(l - Ts) * chi
    lap = (sp.diff(psi_m, Rs, 2) + sp.diff(psi_m, Rs) / Rs
           + sp.diff(psi_m, Ts, 2) / Rs ** 2)
    eta = Rs * sp.cos(Ts)
    deta = sp.cos(Ts) * sp.diff(psi_m, Rs) - sp.sin(Ts) * sp.diff(psi_m, Ts) / Rs
    lpsi = lap - deta / (1 + eta)
    f_lap = sp.lambdify((Rs, Ts), sp.simplify(lap), "numpy")
    f_l = sp.lambdify((Rs, Ts), sp.simplify(lpsi), "numpy")
    psi_fn = sp.lambdify((Rs, Ts), psi_m, "numpy")

    rows = []
    errs_fd, errs_q = [], []
    sizes = [(32, 17), (64, 33), (128, 65)]
    for nr, nt in sizes:
        grid = make_polar_grid(spec, nr, nt, r_min=1e-3 * cfg.r_max)
        exact = Field2D.from_function(grid, psi_fn)
        fd = elliptic.l_solve(Field2D.from_function(grid, f_l), method="fd")
        errs_fd.append(float(np.max(np.abs(fd.values - exact.values))))
        fq = Field2D.from_function(grid, f_lap)
        fq.values[np.abs(fq.values) < 1e-14] = 0.0
        fq.values[-2:, :] = 0.0
        quad = elliptic.poisson_quadrature(fq)
        errs_q.append(float(np.max(np.abs(quad.values - exact.values))))
        rows.append((nr, nt, errs_fd[-1], errs_q[-1]))
    order_fd = math.log2(errs_fd[-2] / errs_fd[-1])
    order_q = math.log2(errs_q[-2] / errs_q[-1])
    with open(os.path.join(outdir, "convergence.csv"), "w", encoding="utf-8") as fh:
        fh.write("nr,ntheta,err_l_fd,err_quadrature\n")
        for nr, nt, e1, e2 in rows:
            fh.write(f"{nr},{nt},{runio.format_float(e1)},{runio.format_float(e2)}\n")
        fh.write(f"# fitted_order_l_fd={order_fd}\n")
        fh.write(f"# fitted_order_quadrature={order_q}\n")
    return EXIT_OK if (order_fd >= 1.8 and order_q >= 1.8) else EXIT_SOLVER


def _run_axisym(cfg: RunConfig, outdir: str, noswirl: bool) -> int:
    snap_dir = os.path.join(outdir, "snapshots")
    counter = {"k": 0}

    def snapshot(state):
        if cfg.snapshot_every <= 0:
            return
        if counter["k"] % cfg.snapshot_every == 0:
            os.makedirs(snap_dir, exist_ok=True)
            base = os.path.join(snap_dir, f"omega_{counter['k']:06d}")
            runio.write_field(base, state.omega)
        counter["k"] += 1

    if noswirl:
        res = axisym.run_axisym_noswirl(epsilon=cfg.epsilon, nr=cfg.nr,
                                        ntheta=cfg.ntheta, r_max=cfg.r_max,
                                        t_end=_default_t_end(cfg),
                                        dt_max=cfg.dt_max,
                                        record_every=cfg.record_every,
                                        snapshot_cb=snapshot)
    else:
        t_end = cfg.t_end if cfg.t_end > 0 else None
        res = axisym.run_axisym_blowup(epsilon=cfg.epsilon, nr=cfg.nr,
                                       ntheta=cfg.ntheta, r_max=cfg.r_max,
                                       t_frac=cfg.t_frac, t_end=t_end,
                                       dt_max=cfg.dt_max,
                                       record_every=cfg.record_every,
                                       snapshot_cb=snapshot)
    runio.write_shadow_csv(os.path.join(outdir, "diagnostics.csv"), res.reports)
    runio.write_field(os.path.join(outdir, "omega_final"), res.state.omega)
    runio.write_field(os.path.join(outdir, "u_final"), res.state.u)
    if res.status == "support-escape":
        return EXIT_SOLVER
    if noswirl:
        return EXIT_OK
    return EXIT_BLOWUP if math.isfinite(res.t_star) else EXIT_OK


def run(cfg: RunConfig) -> int:
    """Execute one scenario; writes the manifest first, artifacts after."""
    outdir = cfg.out
    try:
        os.makedirs(outdir, exist_ok=True)
        probe = os.path.join(outdir, ".write_probe")
        with open(probe, "w") as fh:
            fh.write("ok")
        os.remove(probe)
    except OSError as exc:
        print(f"output directory not writable: {exc}", file=sys.stderr)
        return EXIT_IO
    runio.write_manifest(os.path.join(outdir, "manifest.txt"),
                         _manifest_entries(cfg))
    try:
        if cfg.scenario == "onedim-blowup":
            return _run_onedim(cfg, outdir, "boussinesq")
        if cfg.scenario == "axis-onedim":
            return _run_onedim(cfg, outdir, "axis")
        if cfg.scenario == "elliptic-validate":
            return _run_elliptic_validate(cfg, outdir)
        if cfg.scenario == "axisym-blowup":
            return _run_axisym(cfg, outdir, noswirl=False)
        if cfg.scenario == "axisym-noswirl":
            return _run_axisym(cfg, outdir, noswirl=True)
    except CflExhaustedError:
        return EXIT_CFL
    except SectorEulerError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    raise AssertionError("unreachable")  # pragma: no cover


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="sectoreuler",
        description="Scenario runner for the sector-domain Euler simulator.")
    p.add_argument("--config", metavar="PATH")
    p.add_argument("--scenario", choices=SCENARIOS)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--n", type=int)
    p.add_argument("--nr", type=int)
    p.add_argument("--ntheta", type=int)
    p.add_argument("--r-max", type=float, dest="r_max")
    p.add_argument("--alpha", type=float)
    p.add_argument("--dt-max", type=float, dest="dt_max")
    p.add_argument("--t-end", type=float, dest="t_end")
    p.add_argument("--t-frac", type=float, dest="t_frac")
    p.add_argument("--record-every", type=int, dest="record_every")
    p.add_argument("--preset", choices=PRESETS)
    p.add_argument("--g0-file", dest="g0_file")
    p.add_argument("--P0-file", dest="P0_file")
    p.add_argument("--snapshot-every", type=int, dest="snapshot_every")
    p.add_argument("--out", metavar="DIR")
    p.add_argument("--sweep", metavar="KEY=V1,V2,...")
    p.add_argument("--no-strict", action="store_false", dest="strict",
                   default=True, help="ignore unknown config-file keys")
    return p


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    flag_keys = [f.name for f in dataclass_fields(RunConfig)]
    flags = {k: getattr(args, k) for k in flag_keys if getattr(args, k, None) is not None}
    try:
        cfg = parse_config(args.config, flags, strict=args.strict)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if not args.sweep:
        return run(cfg)
    key, _, values = args.sweep.partition("=")
    if key not in flag_keys or not values:
        print(f"config error: bad sweep spec {args.sweep!r}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        parsed = [_coerce(key, v) for v in values.split(",")]
    except ValueError:
        print(f"config error: bad sweep values {values!r}", file=sys.stderr)
        return EXIT_CONFIG
    configs = []
    for v in parsed:
        sub = replace(cfg, **{key: v, "out": os.path.join(cfg.out, f"{key}={v}")})
        sub.validate()
        configs.append(sub)
    with ThreadPoolExecutor(max_workers=min(4, len(configs))) as pool:
        codes = list(pool.map(run, configs))
    bad = [c for c in codes if c not in (EXIT_OK, EXIT_BLOWUP)]
    return bad[0] if bad else EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
