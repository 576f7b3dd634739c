"""On-disk formats: diagnostics CSV, plain-text manifests, and the Field2D
binary snapshot format (key=value header file plus flat little-endian
float64 payload, row-major with radius outer and angle inner)."""

from __future__ import annotations

import os
from dataclasses import asdict

import numpy as np

from .axisym import ShadowReport
from .grids import Field2D, PolarGrid, make_polar_grid, make_sector
from .onedim import BlowupDiagnostics1D

__all__ = ["format_float", "write_diagnostics_1d_csv", "write_final_state_csv",
           "write_shadow_csv", "write_manifest", "read_manifest",
           "write_field", "read_field", "field_to_csv"]


def format_float(x: float) -> str:
    """Shortest round-trip decimal form; '.' decimal separator."""
    return repr(float(x))


def _write_csv(path, header, rows):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(format_float(v) for v in row) + "\n")


def write_diagnostics_1d_csv(path, series: list) -> None:
    header = BlowupDiagnostics1D.field_names()
    rows = [[getattr(d, name) for name in header] for d in series]
    _write_csv(path, header, rows)


def write_final_state_csv(path, state) -> None:
    header = ["theta", "g", "P", "G"]
    rows = zip(state.grid.theta, state.g, state.P, state.G)
    _write_csv(path, header, rows)


def write_shadow_csv(path, reports: list) -> None:
    """ShadowReport rows with probe errors flattened into their own columns."""
    if not reports:
        raise ValueError("no reports to write")
    probes = reports[0].probe_radii
    scalar_names = [k for k in asdict(reports[0])
                    if k not in ("probe_radii", "sup_err_per_radius")]
    header = scalar_names + [f"sup_err_r{p:g}" for p in probes]
    rows = []
    for rep in reports:
        d = asdict(rep)
        rows.append([d[k] for k in scalar_names] + list(rep.sup_err_per_radius))
    _write_csv(path, header, rows)


def write_manifest(path, entries: dict) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for key, value in entries.items():
            fh.write(f"{key}={value}\n")


def read_manifest(path) -> dict:
    out = {}
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, _, value = line.partition("=")
            out[key.strip()] = value.strip()
    return out


def write_field(basepath, field: Field2D) -> None:
    """Write <basepath>.hdr (key=value) and <basepath>.bin (flat float64 LE)."""
    grid = field.grid
    write_manifest(str(basepath) + ".hdr", {
        "nr": grid.nr,
        "ntheta": grid.ntheta,
        "epsilon": format_float(grid.spec.epsilon),
        "r_min": format_float(grid.r_min),
        "r_max": format_float(grid.spec.r_max),
        "grading": format_float(grid.grading),
    })
    field.values.astype("<f8").ravel().tofile(str(basepath) + ".bin")


def read_field(basepath) -> Field2D:
    hdr = read_manifest(str(basepath) + ".hdr")
    nr = int(hdr["nr"])
    ntheta = int(hdr["ntheta"])
    spec = make_sector(float(hdr["epsilon"]), float(hdr["r_max"]))
    grid = make_polar_grid(spec, nr, ntheta, r_min=float(hdr["r_min"]))
    values = np.fromfile(str(basepath) + ".bin", dtype="<f8")
    return Field2D(grid, values.reshape(nr, ntheta))


def field_to_csv(path, field: Field2D) -> None:
    """Long-form export: R, theta, eta, z, value."""
    R, T = field.grid.mesh()
    eta, z = field.grid.cartesian()
    header = ["R", "theta", "eta", "z", "value"]
    rows = zip(R.ravel(), T.ravel(), eta.ravel(), z.ravel(),
               field.values.ravel())
    _write_csv(path, header, rows)
