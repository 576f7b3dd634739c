"""Figure rendering with JSON metadata sidecars.

Each render writes one raster image and one ``.json`` sidecar next to it.
Numeric results shown on the figure (fitted times, slopes, drifts) are
duplicated into the sidecar so tests and scripts can assert on them
without image diffing. Renders never touch their inputs; with
``timestamp=False`` a re-render is byte-identical.
"""

import json
import os
from dataclasses import dataclass
from datetime import datetime, timezone

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .io import EmptyInputError, fit_blowup_time, read_field, read_table

KINDS = ("blowup-curve", "sign-invariants", "shadow-decay",
         "field-heatmap", "conservation")

SIGN_COLUMNS = ("min_g", "min_dg", "min_P", "min_dP", "min_P_plus_Ppp")


@dataclass(frozen=True)
class PlotSpec:
    """One figure request: inputs, kind, destination, axis scales."""

    kind: str
    inputs: tuple
    out: str
    xscale: str = "linear"
    yscale: str = "linear"
    timestamp: bool = True
    dpi: int = 150

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown figure kind: '{self.kind}' "
                             f"(choose from {', '.join(KINDS)})")
        if not self.inputs:
            raise ValueError("at least one input path is required")
        for p in self.inputs:
            probe = p if os.path.exists(p) else p + ".hdr"
            if not os.path.exists(probe):
                raise FileNotFoundError(f"input not found: {p}")


def _new_axes(spec: PlotSpec):
    fig, ax = plt.subplots(figsize=(6.0, 4.0), constrained_layout=True)
    ax.set_xscale(spec.xscale)
    ax.set_yscale(spec.yscale)
    return fig, ax


def _blowup_curve(spec: PlotSpec, ax):
    tab = read_table(spec.inputs[0])
    t, sup = tab["t"], tab["sup_abs_g"]
    t_star, r2 = fit_blowup_time(t, sup)
    ax.semilogy(t, np.maximum(sup, 1e-300), color="tab:blue",
                label=r"$\sup|g|$")
    ax.axvline(t_star, color="k", ls="--", lw=1.0,
               label=rf"$T^* = {t_star:.4f}$")
    twin = ax.twinx()
    pos = sup > 0
    twin.plot(t[pos], 1.0 / sup[pos], color="tab:orange",
              label=r"$1/\sup|g|$")
    twin.set_ylabel(r"$1/\sup|g|$", color="tab:orange")
    twin.set_ylim(bottom=0.0)
    ax.set_xlabel("t")
    ax.set_ylabel(r"$\sup|g|$", color="tab:blue")
    ax.legend(loc="upper left", fontsize=8)
    return {"t_star": t_star, "r_squared": r2, "rows": int(tab.nrows),
            "final_sup": float(sup[-1])}


def _sign_invariants(spec: PlotSpec, ax):
    tab = read_table(spec.inputs[0])
    t = tab["t"]
    meta = {}
    for name in SIGN_COLUMNS:
        ax.plot(t, tab[name], lw=1.2, label=name.replace("_", " "))
        meta[f"min_over_run_{name}"] = float(np.min(tab[name]))
    ax.axhline(0.0, color="k", lw=0.8)
    ax.set_xlabel("t")
    ax.set_ylabel("tracked minima")
    ax.set_yscale("symlog", linthresh=1e-8)
    ax.legend(fontsize=7, ncol=2)
    meta["rows"] = int(tab.nrows)
    return meta


def _probe_columns(tab):
    pairs = []
    for name in tab.columns:
        if name.startswith("sup_err_r"):
            pairs.append((float(name[len("sup_err_r"):]), name))
    if not pairs:
        raise EmptyInputError(f"{tab.path}: no sup_err_r* probe columns")
    return sorted(pairs, reverse=True)


def _shadow_decay(spec: PlotSpec, ax):
    tab = read_table(spec.inputs[0])
    pairs = _probe_columns(tab)
    radii = np.array([p for p, _ in pairs])
    meta = {"probe_radii": radii.tolist(), "rows": int(tab.nrows)}
    picks = {"mid-run": tab.nrows // 2, "final": tab.nrows - 1}
    for label, k in picks.items():
        errs = np.array([tab[name][k] for _, name in pairs])
        if np.all(errs > 0):
            slope = float(np.polyfit(np.log(radii), np.log(errs), 1)[0])
            meta[f"alpha_{label.replace('-', '_')}"] = slope
            label = f"{label} (t={tab['t'][k]:.3f}, slope {slope:.2f})"
        ax.loglog(radii, np.maximum(errs, 1e-300), "o-", label=label)
        meta[f"errors_{k}"] = errs.tolist()
    ax.set_xlabel("probe radius R")
    ax.set_ylabel(r"$\sup$ profile error")
    ax.legend(fontsize=8)
    return meta


def _field_heatmap(spec: PlotSpec, ax):
    base = spec.inputs[0]
    if base.endswith(".hdr") or base.endswith(".bin"):
        base = base[:-4]
    snap = read_field(base)
    R, T = np.meshgrid(snap.radii, snap.thetas, indexing="ij")
    eta, z = R * np.cos(T), R * np.sin(T)
    vmax = float(np.max(np.abs(snap.values))) or 1.0
    mesh = ax.pcolormesh(eta, z, snap.values, cmap="RdBu_r",
                         vmin=-vmax, vmax=vmax, shading="gouraud")
    r_max = float(snap.radii[-1])
    for angle in (0.0, snap.opening):
        ax.plot([0.0, r_max * np.cos(angle)], [0.0, r_max * np.sin(angle)],
                color="k", lw=1.2)
    ax.set_aspect("equal")
    ax.set_xlabel(r"$\eta$")
    ax.set_ylabel("z")
    ax.figure.colorbar(mesh, ax=ax, shrink=0.85)
    return {"epsilon": snap.epsilon, "opening_angle": snap.opening,
            "nr": int(snap.radii.size), "ntheta": int(snap.thetas.size),
            "abs_max": vmax}


def _conservation(spec: PlotSpec, ax):
    tab = read_table(spec.inputs[0])
    t, energy = tab["t"], tab["energy"]
    e0 = energy[0] if energy[0] != 0 else 1.0
    drift = np.abs(energy - energy[0]) / abs(e0)
    ax.plot(t, drift, color="tab:blue", label="relative energy drift")
    ax.set_xlabel("t")
    ax.set_ylabel("|E(t) - E(0)| / E(0)", color="tab:blue")
    meta = {"max_energy_drift": float(np.max(drift)), "rows": int(tab.nrows)}
    if "bkm_accumulator" in tab:
        twin = ax.twinx()
        twin.plot(t, tab["bkm_accumulator"], color="tab:red",
                  label="BKM accumulator")
        twin.set_ylabel("BKM accumulator", color="tab:red")
        meta["bkm_final"] = float(tab["bkm_accumulator"][-1])
    ax.legend(loc="upper left", fontsize=8)
    return meta


_RENDERERS = {
    "blowup-curve": _blowup_curve,
    "sign-invariants": _sign_invariants,
    "shadow-decay": _shadow_decay,
    "field-heatmap": _field_heatmap,
    "conservation": _conservation,
}


def sidecar_path(out: str) -> str:
    return os.path.splitext(out)[0] + ".json"


def render(spec: PlotSpec) -> str:
    """Render one figure; returns the sidecar path."""
    fig, ax = _new_axes(spec)
    try:
        meta = _RENDERERS[spec.kind](spec, ax)
        ax.set_title(spec.kind)
        fig.savefig(spec.out, dpi=spec.dpi)
    finally:
        plt.close(fig)
    payload = {"kind": spec.kind, "inputs": list(spec.inputs),
               "out": spec.out, **meta}
    if spec.timestamp:
        payload["created"] = datetime.now(timezone.utc).isoformat()
    side = sidecar_path(spec.out)
    with open(side, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return side
