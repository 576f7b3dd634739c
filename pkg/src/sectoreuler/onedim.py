"""Angular 1D systems on [0, l]: the scale-invariant pair (g, P) coupled
through the Dirichlet problem G'' + 4G = g, and the exploratory axis system
with 6G - (tan(theta) G)' + G'' = g.

The blow-up run integrates (g, P) from rest-like data with classical RK4,
re-solving G at every stage, and records the scalar diagnostics used to
monitor the singularity (sup|g|, integral of g, endpoint values of G' and P,
and the signed minima that stay nonnegative along the blow-up solution).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields as dataclass_fields

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.linalg import solve_banded

from .errors import (
    CflExhaustedError,
    InvalidParameterError,
    NoBlowupDetectedError,
    ResonanceError,
    StepRejectedError,
)

MIN_NODES = 17
_PIN_TOL = 1e-12

__all__ = [
    "AngularGrid",
    "AngularState",
    "BlowupDiagnostics1D",
    "Run1DResult",
    "make_grid",
    "make_state",
    "solve_angular_poisson",
    "solve_axis_poisson",
    "rhs_1d",
    "rhs_axis_1d",
    "step_1d",
    "step_axis_1d",
    "diagnostics_1d",
    "estimate_blowup_time",
    "run_1d",
    "dtheta",
    "d2theta",
]


@dataclass(frozen=True)
class AngularGrid:
    """Uniform grid on [0, l] with l = arctan(1/epsilon) < pi/2."""

    epsilon: float
    l: float
    n: int
    theta: np.ndarray

    @property
    def h(self) -> float:
        return self.l / (self.n - 1)


@dataclass(frozen=True)
class AngularState:
    """Profiles (g, P) at time t plus the cached angular stream G."""

    grid: AngularGrid
    t: float
    g: np.ndarray
    P: np.ndarray
    G: np.ndarray


@dataclass(frozen=True)
class BlowupDiagnostics1D:
    """One row of the scalar diagnostics tracked along a 1D run."""

    t: float
    sup_abs_g: float
    integral_g: float
    P_at_l: float
    Gprime_0: float
    Gprime_l: float
    min_g: float
    min_dg: float
    min_P: float
    min_dP: float
    min_P_plus_Ppp: float

    @classmethod
    def field_names(cls) -> list[str]:
        return [f.name for f in dataclass_fields(cls)]


def make_grid(epsilon: float, n: int) -> AngularGrid:
    """Uniform angular grid on [0, arctan(1/epsilon)]."""
    if not (epsilon > 0):
        raise InvalidParameterError(f"epsilon must be positive, got {epsilon}")
    if n < MIN_NODES:
        raise InvalidParameterError(f"need at least {MIN_NODES} nodes, got {n}")
    l = math.atan(1.0 / epsilon)
    theta = np.linspace(0.0, l, n)
    return AngularGrid(epsilon=float(epsilon), l=l, n=int(n), theta=theta)


def dtheta(f: np.ndarray, h: float) -> np.ndarray:
    """First derivative: fourth-order central inside, second-order at the ends."""
    f = np.asarray(f, dtype=float)
    n = f.size
    d = np.empty_like(f)
    if n >= 7:
        d[2:-2] = (f[:-4] - 8.0 * f[1:-3] + 8.0 * f[3:-1] - f[4:]) / (12.0 * h)
    else:
        d[2:-2] = (f[3:-1] - f[1:-3]) / (2.0 * h)
    d[1] = (f[2] - f[0]) / (2.0 * h)
    d[-2] = (f[-1] - f[-3]) / (2.0 * h)
    d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h)
    d[-1] = (3.0 * f[-1] - 4.0 * f[-2] + f[-3]) / (2.0 * h)
    return d


def d2theta(f: np.ndarray, h: float) -> np.ndarray:
    """Second derivative: central inside, second-order one-sided at the ends."""
    f = np.asarray(f, dtype=float)
    d = np.empty_like(f)
    d[1:-1] = (f[:-2] - 2.0 * f[1:-1] + f[2:]) / (h * h)
    d[0] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) / (h * h)
    d[-1] = (2.0 * f[-1] - 5.0 * f[-2] + 4.0 * f[-3] - f[-4]) / (h * h)
    return d


def _dtheta_upwind(f: np.ndarray, speed: np.ndarray, h: float) -> np.ndarray:
    """Second-order upwind derivative for the advection term speed * df/dtheta.

    Characteristics move with velocity ``speed``; the stencil is biased toward
    the side the information comes from. Falls back to the central stencil
    within two nodes of either end.
    """
    f = np.asarray(f, dtype=float)
    n = f.size
    back = np.empty_like(f)
    fwd = np.empty_like(f)
    back[2:] = (3.0 * f[2:] - 4.0 * f[1:-1] + f[:-2]) / (2.0 * h)
    fwd[:-2] = (-3.0 * f[:-2] + 4.0 * f[1:-1] - f[2:]) / (2.0 * h)
    central = dtheta(f, h)
    back[:2] = central[:2]
    fwd[-2:] = central[-2:]
    out = np.where(speed > 0.0, back, fwd)
    out[np.abs(speed) < 1e-300] = central[np.abs(speed) < 1e-300]
    out[0] = central[0]
    out[-1] = central[-1]
    return out


def _check_resonance(grid: AngularGrid) -> None:
    if grid.l >= math.pi / 2.0 - 1e-12:
        raise ResonanceError(
            f"opening angle l={grid.l} is not below pi/2; G''+4G=g is not solvable"
        )


def _tridiag_dirichlet(sub: np.ndarray, diag: np.ndarray, sup: np.ndarray,
                       rhs: np.ndarray) -> np.ndarray:
    """Solve the interior tridiagonal system with homogeneous Dirichlet ends."""
    m = diag.size
    ab = np.zeros((3, m))
    ab[0, 1:] = sup[:-1]
    ab[1, :] = diag
    ab[2, :-1] = sub[1:]
    try:
        interior = solve_banded((1, 1), ab, rhs)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - defensive
        raise ResonanceError(f"angular elliptic solve is singular: {exc}") from exc
    if not np.all(np.isfinite(interior)):
        raise ResonanceError("angular elliptic solve produced non-finite values")
    out = np.zeros(m + 2)
    out[1:-1] = interior
    return out


def solve_angular_poisson(g: np.ndarray, grid: AngularGrid,
                          richardson: bool = False) -> np.ndarray:
    """Solve G'' + 4G = g with G(0) = G(l) = 0 on the grid.

    Second-order tridiagonal scheme. With ``richardson=True`` the solve is
    repeated on a doubled grid (g cubically interpolated) and extrapolated,
    giving fourth-order accuracy on the original nodes.
    """
    _check_resonance(grid)
    g = np.asarray(g, dtype=float)
    if g.shape != (grid.n,):
        raise InvalidParameterError(f"g has shape {g.shape}, expected ({grid.n},)")
    if not np.all(np.isfinite(g)):
        raise InvalidParameterError("g contains non-finite entries")
    h = grid.h
    m = grid.n - 2
    diag = np.full(m, -2.0 / (h * h) + 4.0)
    off = np.full(m, 1.0 / (h * h))
    G = _tridiag_dirichlet(off, diag, off, g[1:-1])
    if not richardson:
        return G
    fine = AngularGrid(grid.epsilon, grid.l, 2 * grid.n - 1,
                       np.linspace(0.0, grid.l, 2 * grid.n - 1))
    g_fine = CubicSpline(grid.theta, g)(fine.theta)
    G_fine = solve_angular_poisson(g_fine, fine, richardson=False)
    return (4.0 * G_fine[::2] - G) / 3.0


def solve_axis_poisson(g: np.ndarray, grid: AngularGrid) -> np.ndarray:
    """Solve 6G - (tan(theta) G)' + G'' = g with homogeneous Dirichlet ends.

    Expanded form: G'' - tan(theta) G' + (6 - sec^2(theta)) G = g.
    """
    _check_resonance(grid)
    g = np.asarray(g, dtype=float)
    if g.shape != (grid.n,):
        raise InvalidParameterError(f"g has shape {g.shape}, expected ({grid.n},)")
    h = grid.h
    th = grid.theta[1:-1]
    tan = np.tan(th)
    sec2 = 1.0 + tan * tan
    inv_h2 = 1.0 / (h * h)
    diag = -2.0 * inv_h2 + 6.0 - sec2
    sub = inv_h2 + tan / (2.0 * h)
    sup = inv_h2 - tan / (2.0 * h)
    G = _tridiag_dirichlet(sub, diag, sup, g[1:-1])
    scale = max(np.max(np.abs(g)), 1.0)
    if np.max(np.abs(G)) > 1e12 * scale:
        raise ResonanceError("axis elliptic solve is near-resonant")
    return G


def make_state(grid: AngularGrid, g: np.ndarray, P: np.ndarray, t: float = 0.0,
               system: str = "boussinesq") -> AngularState:
    """Bundle profiles into a state, solving for the consistent G."""
    g = np.asarray(g, dtype=float).copy()
    P = np.asarray(P, dtype=float).copy()
    solver = solve_angular_poisson if system == "boussinesq" else solve_axis_poisson
    return AngularState(grid=grid, t=float(t), g=g, P=P, G=solver(g, grid))


def rhs_1d(state: AngularState, upwind: bool = False):
    """Time derivatives of (g, P) for the scale-invariant system.

    dg/dt = -2 G g' + 2 (sin(theta) P + cos(theta) P')
    dP/dt = -2 G P' + G' P
    """
    grid = state.grid
    h = grid.h
    G = state.G
    dG = dtheta(G, h)
    speed = 2.0 * G  # characteristic velocity d(theta)/dt
    if upwind:
        dg = _dtheta_upwind(state.g, speed, h)
        dP = _dtheta_upwind(state.P, speed, h)
    else:
        dg = dtheta(state.g, h)
        dP = dtheta(state.P, h)
    sin = np.sin(grid.theta)
    cos = np.cos(grid.theta)
    dg_dt = -2.0 * G * dg + 2.0 * (sin * state.P + cos * dtheta(state.P, h))
    dP_dt = -2.0 * G * dP + dG * state.P
    return dg_dt, dP_dt


def rhs_axis_1d(g: np.ndarray, P: np.ndarray, G: np.ndarray, grid: AngularGrid,
                upwind: bool = False):
    """Time derivatives for the axis system.

    dg/dt = 3 G g' + (G' + 2 tan(theta) G) g + 2 (tan(theta) P + P') P
    dP/dt = 3 G P' - (2 G' + tan(theta) G) P
    """
    h = grid.h
    tan = np.tan(grid.theta)
    dG = dtheta(G, h)
    speed = -3.0 * G  # from dg/dt = 3G g' + ...,  i.e. g_t + (-3G) g' = ...
    if upwind:
        dg = _dtheta_upwind(g, speed, h)
        dP = _dtheta_upwind(P, speed, h)
    else:
        dg = dtheta(g, h)
        dP = dtheta(P, h)
    dg_dt = 3.0 * G * dg + (dG + 2.0 * tan * G) * g + 2.0 * (tan * P + dtheta(P, h)) * P
    dP_dt = 3.0 * G * dP - (2.0 * dG + tan * G) * P
    return dg_dt, dP_dt


def _rk4(state: AngularState, dt: float, system: str, upwind: bool):
    grid = state.grid
    if system == "boussinesq":
        def f(g, P):
            G = solve_angular_poisson(g, grid)
            st = AngularState(grid, state.t, g, P, G)
            return rhs_1d(st, upwind=upwind)
    else:
        def f(g, P):
            G = solve_axis_poisson(g, grid)
            return rhs_axis_1d(g, P, G, grid, upwind=upwind)

    k1g, k1P = f(state.g, state.P)
    k2g, k2P = f(state.g + 0.5 * dt * k1g, state.P + 0.5 * dt * k1P)
    k3g, k3P = f(state.g + 0.5 * dt * k2g, state.P + 0.5 * dt * k2P)
    k4g, k4P = f(state.g + dt * k3g, state.P + dt * k3P)
    g_new = state.g + (dt / 6.0) * (k1g + 2.0 * k2g + 2.0 * k3g + k4g)
    P_new = state.P + (dt / 6.0) * (k1P + 2.0 * k2P + 2.0 * k3P + k4P)
    return g_new, P_new


def _advance(state: AngularState, dt: float, system: str) -> AngularState:
    if not (dt > 0):
        raise InvalidParameterError(f"dt must be positive, got {dt}")
    grid = state.grid
    h = grid.h
    speed = 2.0 * state.G if system == "boussinesq" else 3.0 * state.G
    smax = float(np.max(np.abs(speed)))
    cfl = smax * dt / h
    if cfl > 0.5:
        raise StepRejectedError(
            f"CFL number {cfl:.3g} exceeds 0.5", admissible_dt=0.5 * h / smax)
    upwind = cfl > 0.1
    pin = abs(float(state.P[0])) < _PIN_TOL
    g_new, P_new = _rk4(state, dt, system, upwind)
    if pin:
        P_new[0] = 0.0
    if not (np.all(np.isfinite(g_new)) and np.all(np.isfinite(P_new))):
        raise CflExhaustedError("state became non-finite during a step")
    return make_state(grid, g_new, P_new, t=state.t + dt, system=system)


def step_1d(state: AngularState, dt: float) -> AngularState:
    """One RK4 step of the scale-invariant system; G re-solved per stage.

    P(0) stays pinned to zero when the incoming state has P(0) = 0.
    """
    return _advance(state, dt, "boussinesq")


def step_axis_1d(state: AngularState, dt: float) -> AngularState:
    """One RK4 step of the axis system."""
    return _advance(state, dt, "axis")


def diagnostics_1d(state: AngularState) -> BlowupDiagnostics1D:
    """Scalar diagnostics of one state; endpoint G' by one-sided differences."""
    h = state.grid.h
    g, P, G = state.g, state.P, state.G
    dG = dtheta(G, h)
    dg = dtheta(g, h)
    dP = dtheta(P, h)
    Ppp = d2theta(P, h)
    return BlowupDiagnostics1D(
        t=state.t,
        sup_abs_g=float(np.max(np.abs(g))),
        integral_g=float(np.trapz(g, dx=h)),
        P_at_l=float(P[-1]),
        Gprime_0=float(dG[0]),
        Gprime_l=float(dG[-1]),
        min_g=float(np.min(g)),
        min_dg=float(np.min(dg)),
        min_P=float(np.min(P)),
        min_dP=float(np.min(dP)),
        min_P_plus_Ppp=float(np.min(P + Ppp)),
    )


def estimate_blowup_time(series) -> tuple[float, float]:
    """Fit 1/sup|g| linearly in t over the last quartile and extrapolate to 0.

    Returns (t_star, r_squared). Raises NoBlowupDetectedError when the tail
    of sup|g| is not increasing or the fit does not cross zero forward in time.
    """
    sup = np.array([d.sup_abs_g for d in series], dtype=float)
    t = np.array([d.t for d in series], dtype=float)
    if sup.size < 8:
        raise NoBlowupDetectedError("series too short for a blow-up fit")
    k = max(4, sup.size // 4)
    tail_sup = sup[-k:]
    tail_t = t[-k:]
    if np.any(np.diff(tail_sup) <= 0) or tail_sup[0] <= 0:
        raise NoBlowupDetectedError("sup|g| is not increasing over its last quartile")
    y = 1.0 / tail_sup
    slope, intercept = np.polyfit(tail_t, y, 1)
    if slope >= 0:
        raise NoBlowupDetectedError("1/sup|g| is not decaying; no singularity ahead")
    t_star = -intercept / slope
    resid = y - (slope * tail_t + intercept)
    ss_res = float(np.sum(resid ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return float(t_star), float(r2)


@dataclass
class Run1DResult:
    """Outcome of an adaptive 1D run."""

    state: AngularState
    series: list
    status: str  # "t_end" | "blowup" | "cfl-exhausted"
    steps: int


def run_1d(grid: AngularGrid, g0: np.ndarray, P0: np.ndarray, *,
           system: str = "boussinesq", dt_max: float = 5e-3,
           t_end: float = 50.0, record_every: int = 1,
           stop_factor: float = 1e6, dt_floor: float = 1e-10,
           cfl: float = 0.4, adaptive: bool = True) -> Run1DResult:
    """Integrate until t_end, blow-up cutoff, or CFL exhaustion.

    Adaptive dt = cfl * h / max(|speed|, 1e-12), capped by dt_max; the run
    halts once sup|g| exceeds stop_factor * (sup|g0| + 1).
    """
    state = make_state(grid, g0, P0, system=system)
    stop_level = stop_factor * (float(np.max(np.abs(state.g))) + 1.0)
    series = [diagnostics_1d(state)]
    status = "t_end"
    steps = 0
    h = grid.h
    while state.t < t_end:
        factor = 2.0 if system == "boussinesq" else 3.0
        smax = factor * float(np.max(np.abs(state.G)))
        dt = min(dt_max, t_end - state.t)
        if adaptive:
            dt = min(dt, cfl * h / max(smax, 1e-12))
        if dt < dt_floor:
            status = "cfl-exhausted"
            break
        state = _advance(state, dt, system)
        steps += 1
        if steps % record_every == 0 or state.t >= t_end:
            series.append(diagnostics_1d(state))
        if float(np.max(np.abs(state.g))) > stop_level:
            if steps % record_every != 0:
                series.append(diagnostics_1d(state))
            status = "blowup"
            break
    return Run1DResult(state=state, series=series, status=status, steps=steps)
