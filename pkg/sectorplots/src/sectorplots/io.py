"""Readers for the simulator's documented output formats.

The simulator writes three kinds of artifacts:

* diagnostics CSV — comma-separated, one header line, float columns
  written with ``repr`` (round-trip decimals);
* ``.hdr`` / ``.bin`` field snapshots — a ``key=value`` header describing
  a geometrically graded polar grid, and a flat little-endian float64
  array of shape (nr, ntheta);
* manifests — ``key=value`` lines, ``#`` comments.

Everything here parses those files from their bytes alone; this package
never imports the simulator.
"""

from dataclasses import dataclass

import numpy as np


class ParseError(ValueError):
    """Malformed input file; the message names the offending line."""


class EmptyInputError(ValueError):
    """Input parsed but holds no data rows."""


@dataclass(frozen=True)
class Table:
    """A diagnostics CSV in memory: named float columns of equal length."""

    path: str
    columns: dict

    def __getitem__(self, name: str) -> np.ndarray:
        if name not in self.columns:
            raise KeyError(f"{self.path}: no column '{name}' "
                           f"(has {sorted(self.columns)})")
        return self.columns[name]

    def __contains__(self, name: str) -> bool:
        return name in self.columns

    @property
    def nrows(self) -> int:
        return next(iter(self.columns.values())).size


def read_table(path) -> Table:
    path = str(path)
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise ParseError(f"{path}:1: empty file, expected a header line")
    header = [c.strip() for c in lines[0].split(",")]
    if len(set(header)) != len(header) or any(not c for c in header):
        raise ParseError(f"{path}:1: malformed header: {lines[0]!r}")
    rows = []
    for k, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != len(header):
            raise ParseError(f"{path}:{k}: expected {len(header)} fields, "
                             f"got {len(parts)}")
        try:
            rows.append([float(p) for p in parts])
        except ValueError as exc:
            raise ParseError(f"{path}:{k}: {exc}") from None
    if not rows:
        raise EmptyInputError(f"{path}: header only, no data rows")
    data = np.array(rows, dtype=float)
    return Table(path, {name: data[:, j] for j, name in enumerate(header)})


def read_manifest(path) -> dict:
    out = {}
    with open(path, "r", encoding="utf-8") as fh:
        for k, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ParseError(f"{path}:{k}: expected key=value, got {line!r}")
            out[key.strip()] = value.strip()
    return out


@dataclass(frozen=True)
class FieldSnapshot:
    """A 2D scalar on a polar sector grid, reconstructed from .hdr/.bin."""

    epsilon: float
    opening: float          # sector opening angle, arctan(1/epsilon)
    radii: np.ndarray       # (nr,) geometric from r_min to r_max
    thetas: np.ndarray      # (ntheta,) uniform on [0, opening]
    values: np.ndarray      # (nr, ntheta)


def read_field(basepath) -> FieldSnapshot:
    base = str(basepath)
    hdr = read_manifest(base + ".hdr")
    try:
        nr = int(hdr["nr"])
        ntheta = int(hdr["ntheta"])
        epsilon = float(hdr["epsilon"])
        r_min = float(hdr["r_min"])
        r_max = float(hdr["r_max"])
    except (KeyError, ValueError) as exc:
        raise ParseError(f"{base}.hdr: {exc}") from None
    values = np.fromfile(base + ".bin", dtype="<f8")
    if values.size != nr * ntheta:
        raise ParseError(f"{base}.bin: expected {nr * ntheta} float64 values, "
                         f"got {values.size}")
    opening = float(np.arctan2(1.0, epsilon))
    return FieldSnapshot(
        epsilon=epsilon,
        opening=opening,
        radii=np.geomspace(r_min, r_max, nr),
        thetas=np.linspace(0.0, opening, ntheta),
        values=values.reshape(nr, ntheta),
    )


def fit_blowup_time(t: np.ndarray, sup: np.ndarray) -> tuple[float, float]:
    """Extrapolate the singularity time from a growing sup series.

    Fits 1/sup linearly in t over the last quartile of the rows and
    returns (t_star, r_squared) — the same fit the simulator reports.
    """
    t = np.asarray(t, dtype=float)
    sup = np.asarray(sup, dtype=float)
    if t.size < 8:
        raise EmptyInputError("series too short for a blow-up fit")
    k = max(4, t.size // 4)
    tail_t, tail_sup = t[-k:], sup[-k:]
    if np.any(tail_sup <= 0):
        raise ValueError("sup series not positive over its last quartile")
    y = 1.0 / tail_sup
    slope, intercept = np.polyfit(tail_t, y, 1)
    if slope >= 0:
        raise ValueError("1/sup is not decaying; no singularity ahead")
    resid = y - (slope * tail_t + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - float(np.sum(resid ** 2)) / ss_tot
    return float(-intercept / slope), r2
