"""Global solution assembly and evaluation in physical variables (t, r).

x = t / r^lambda.  Branches by x:
  x < -1          quiescent gas, rho = 1, u = c = p = 0
  -1 <= x < x_a   collapse branch (P1 -> origin), integrated
  x_a <= x <= x_b origin patch, series in C
  x_b < x < x_H   maximal extension, integrated
  x_H <= x        downstream branch from P_H, then power-law far field
Physical fields: u = -r V/(lambda t), c = -r C/(lambda t), rho = R, p = rho c^2/gamma.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.optimize import brentq

from .collapse import (
    SEED_DELTA,
    Z_TOL,
    CollapseResult,
    LambdaResult,
    _triples_for,
    collapse_trajectory,
    find_lambda_std,
    shoot_miss,
)
from .continuation import MaxExtension, OriginPassage, continue_through_origin, maximal_extension
from .errors import DomainError, GuderleyError
from .ode_engine import Trajectory
from .origin_series import series_eval
from .phase_plane import GAMMA_STAR, Params, make_params, make_params_z, special_z
from .reflected import (
    MatchResult,
    SolutionCurve,
    TailFit,
    density_exponent,
    downstream_trajectory,
    find_PH,
    pinfty_trajectory,
    tail_fit,
    vbar_and_sigma,
)

RHO0 = 1.0
C_DEEP = 1e-3
SHOCK_EPS = 1e-13

BRANCH_AHEAD = 0
BRANCH_COLLAPSE = 1
BRANCH_ORIGIN = 2
BRANCH_EXTENSION = 3
BRANCH_DOWNSTREAM = 4
BRANCH_FAR = 5
BRANCH_NAMES = {
    BRANCH_AHEAD: "quiescent",
    BRANCH_COLLAPSE: "collapse",
    BRANCH_ORIGIN: "origin",
    BRANCH_EXTENSION: "extension",
    BRANCH_DOWNSTREAM: "downstream",
    BRANCH_FAR: "far_field",
}


class FieldState(NamedTuple):
    rho: float
    u: float
    c: float
    p: float
    branch: int


class ShockStates(NamedTuple):
    """Both sides of a shock when (t, r) lies on its surface."""

    ahead: FieldState
    behind: FieldState


@dataclass(frozen=True)
class Terminal:
    """u(0, r) = -v1 r^(1-lambda)/lambda, c(0, r) = c1 r^(1-lambda)/lambda, rho(0, r) = R0."""

    R0: float
    v1: float
    c1: float


@dataclass
class GlobalSolution:
    params: Params
    lam_result: LambdaResult
    collapse: CollapseResult
    passage: OriginPassage
    extension: MaxExtension
    match: MatchResult
    downstream: Trajectory
    tail: TailFit
    rho0: float = RHO0
    _bounds: Dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        inb = self.passage.inbound
        self._bounds = {
            "x_a": -math.exp(float(inb.lnx[-1])),
            "x_b": math.exp(float(self.passage.outbound.s[0])),
            "x_far": math.exp(float(self.downstream.lnx[-1])),
        }

    @property
    def gamma(self) -> float:
        return self.params.gamma

    @property
    def m(self) -> int:
        return self.params.m

    @property
    def lam(self) -> float:
        return self.params.lam

    @property
    def x_H(self) -> float:
        return self.match.x_H

    @property
    def triple(self) -> str:
        return self.lam_result.triple

    @property
    def terminal(self) -> Terminal:
        ps = self.passage
        e = math.exp(-ps.L0)
        return Terminal(math.exp(ps.Q0), -ps.v1 * e, e)

    # -- similarity profiles
    def profile(self, x: float) -> Tuple[float, float, float, int]:
        """(V, C, R, branch) at similarity coordinate x; x = 0 gives (0, 0, R0)."""
        b = self._bounds
        if not math.isfinite(x):
            raise DomainError("x must be finite", field="x")
        if x < -1.0:
            return 0.0, 0.0, self.rho0, BRANCH_AHEAD
        if x < b["x_a"]:
            tr = self.passage.inbound
            return _on(tr, math.log(-x)) + (BRANCH_COLLAPSE,)
        if x <= b["x_b"]:
            return self._origin(x) + (BRANCH_ORIGIN,)
        if x < self.x_H:
            return _on(self.extension.trajectory, math.log(x)) + (BRANCH_EXTENSION,)
        if x <= b["x_far"]:
            return _on(self.downstream, math.log(x)) + (BRANCH_DOWNSTREAM,)
        return self._far(x) + (BRANCH_FAR,)

    def _origin(self, x: float) -> Tuple[float, float, float]:
        ps = self.passage
        if x == 0.0:
            return 0.0, 0.0, math.exp(ps.Q0)
        h = 0.5 * ps.delta
        C = brentq(lambda c: ps.x_of_C(c) - x, -h, h, xtol=max(1e-300, 1e-17 * abs(x)), rtol=1e-15)
        V = series_eval(ps.series, C)[0]
        return V, C, math.exp(ps.state(C)[2])

    def _far(self, x: float) -> Tuple[float, float, float]:
        d = self.downstream
        vbar, sigma = vbar_and_sigma(self.params)
        k = density_exponent(self.params)
        ratio = x / self._bounds["x_far"]
        V = vbar + (float(d.V[-1]) - vbar) * ratio ** (-2.0 * sigma)
        C = float(d.C[-1]) * ratio ** sigma
        R = float(d.R[-1]) * ratio ** k
        return V, C, R

    def similarity_ratios(self, x: float) -> Tuple[float, float, float, int]:
        """(V/x, C/x, R, branch), finite through x = 0."""
        if x == 0.0:
            T = self.terminal
            return T.v1, -T.c1, T.R0, BRANCH_ORIGIN
        V, C, R, b = self.profile(x)
        return V / x, C / x, R, b


def _on(tr: Trajectory, lnx: float) -> Tuple[float, float, float]:
    # branch ends are shared with the neighbouring branch; absorb log/exp round-off there
    s = lnx - tr.s_offset
    lo, hi = float(min(tr.s[0], tr.s[-1])), float(max(tr.s[0], tr.s[-1]))
    eps = 1e-12 * max(1.0, abs(s))
    if lo - eps <= s < lo:
        s = lo
    elif hi < s <= hi + eps:
        s = hi
    V, C, _, q = tr.state_at("s", s)
    return V, C, math.exp(q + tr.q_offset - math.log1p(V))


# ---------------------------------------------------------------------------
# construction

def lambda_for(gamma: float, m: int, lam: float, gamma_star: float = GAMMA_STAR,
               rtol: float = 1e-11) -> LambdaResult:
    """Wrap a user-supplied lambda, choosing the triple point whose interval contains z."""
    p = make_params(gamma, m, lam)
    sz = special_z(gamma, m, gamma_star)
    for t in _triples_for(gamma, gamma_star):
        iv = sz.ring_interval(t)
        if iv is not None and iv[0] <= p.z <= iv[1]:
            miss = shoot_miss(gamma, m, p.z, t, rtol=rtol)
            return LambdaResult(float(gamma), int(m), float(lam), p.z, t, miss)
    raise DomainError(f"lambda = {lam!r} gives z = {p.z:.6g} outside every admissible interval", field="lambda")


def _stage(name: str, fn, *args, **kw):
    """Run one pipeline stage, tagging any package error with the stage name."""
    try:
        return fn(*args, **kw)
    except GuderleyError as exc:
        if getattr(exc, "stage", None) is None:
            exc.stage = name
            exc.args = (f"[{name}] {exc.args[0] if exc.args else ''}",) + exc.args[1:]
        raise


def solve_global(gamma: float, m: int, lam: Optional[float] = None, tol: float = Z_TOL,
                 gamma_star: float = GAMMA_STAR, rtol: float = 1e-11) -> GlobalSolution:
    if lam is None:
        lr = _stage("lambda", find_lambda_std, gamma, m, tol=tol, gamma_star=gamma_star, rtol=rtol)
        p = make_params_z(lr.gamma, lr.m, lr.z)
    else:
        lr = _stage("lambda", lambda_for, gamma, m, lam, gamma_star, rtol)
        p = make_params(gamma, m, lam)
    cr = _stage("collapse", collapse_trajectory, p, lr.triple, C_DEEP, SEED_DELTA, rtol)
    ps = _stage("continuation", continue_through_origin, p, cr, rtol=rtol)
    ext = _stage("continuation", maximal_extension, p, ps, lr.triple, rtol=rtol)
    vinf = _stage("reflected", pinfty_trajectory, p, rtol=rtol)
    mr = _stage("reflected", find_PH, p, SolutionCurve(ps, ext), vinf, gamma_star)
    down = _stage("reflected", downstream_trajectory, p, mr, vinf)
    tail = _stage("fields", tail_fit, p, down)
    return GlobalSolution(p, lr, cr, ps, ext, mr, down, tail)


# ---------------------------------------------------------------------------
# physical fields

def _physical(sol: GlobalSolution, t: float, r: float, x: float) -> FieldState:
    g, lam = sol.gamma, sol.lam
    if x < -1.0:
        return FieldState(sol.rho0, 0.0, 0.0, 0.0, BRANCH_AHEAD)
    Vx, Cx, R, b = sol.similarity_ratios(x)
    # -r V/(lambda t) = -r^(1-lambda) (V/x)/lambda
    k = r ** (1.0 - lam) / lam
    u = -k * Vx
    c = -k * Cx
    return FieldState(R, u, c, R * c * c / g, b)


def evaluate(sol: GlobalSolution, t: float, r: float) -> Union[FieldState, ShockStates]:
    if not (r > 0.0 and math.isfinite(r)):
        raise DomainError(f"r must be positive, got {r!r}", field="r")
    if not math.isfinite(t):
        raise DomainError("t must be finite", field="t")
    x = t / r ** sol.lam
    if abs(x + 1.0) <= SHOCK_EPS:
        return ShockStates(_physical(sol, t, r, -1.0 - 1.0), _physical(sol, t, r, -1.0))
    if abs(x - sol.x_H) <= SHOCK_EPS * sol.x_H:
        return ShockStates(_ahead_reflected(sol, t, r), _physical(sol, t, r, sol.x_H))
    return _physical(sol, t, r, x)


def _ahead_reflected(sol: GlobalSolution, t: float, r: float) -> FieldState:
    pre = sol.match.pre_state
    k = r / (sol.lam * t)
    R = sol.match.R_pre
    c = -k * pre.C
    return FieldState(R, -k * pre.V, c, R * c * c / sol.gamma, BRANCH_EXTENSION)


def shock_radius(sol: GlobalSolution, t: float) -> float:
    if t == 0.0:
        raise DomainError("at t = 0 the shock is at r = 0 (collapse instant)", field="t")
    if t > 0.0:
        return (t / sol.x_H) ** (1.0 / sol.lam)
    return (-t) ** (1.0 / sol.lam)


def _fluxes(g: float, s: FieldState, w: float) -> np.ndarray:
    E = s.p / (g - 1.0) + 0.5 * s.rho * s.u * s.u
    mass = s.rho * (s.u - w)
    return np.array([mass, mass * s.u + s.p, E * (s.u - w) + s.p * s.u])


def rh_residual_physical(sol: GlobalSolution, t: float) -> Dict[str, float]:
    """Relative jumps of the mass, momentum and energy fluxes in the shock frame."""
    rs = shock_radius(sol, t)
    w = rs / (sol.lam * t)
    if t < 0.0:
        ahead = _physical(sol, t, rs, -2.0)
        behind = _physical(sol, t, rs, -1.0)
    else:
        ahead = _ahead_reflected(sol, t, rs)
        behind = _physical(sol, t, rs, sol.x_H)
    g = sol.gamma
    fa, fb = _fluxes(g, ahead, w), _fluxes(g, behind, w)
    rho = max(ahead.rho, behind.rho)
    scale = np.array([rho * abs(w), rho * w * w, rho * abs(w) ** 3])
    res = np.abs(fb - fa) / scale
    return {"mass": float(res[0]), "momentum": float(res[1]), "energy": float(res[2]), "shock_speed": w, "r": rs}


# ---------------------------------------------------------------------------
# Euler residual

def _conserved(sol: GlobalSolution, t: float, r: float):
    s = evaluate(sol, t, r)
    if isinstance(s, ShockStates):
        raise DomainError("stencil touches a shock", field="grid")
    g, m = sol.gamma, sol.m
    E = s.p / (g - 1.0) + 0.5 * s.rho * s.u * s.u
    rm = r ** m
    U = np.array([rm * s.rho, rm * s.rho * s.u, rm * E])
    Fl = np.array([rm * s.rho * s.u, rm * (s.rho * s.u * s.u + s.p), rm * s.u * (E + s.p)])
    src = np.array([0.0, m * r ** (m - 1) * s.p, 0.0])
    return U, Fl, src, s


def _residual_at(sol: GlobalSolution, t: float, r: float, h: float) -> Optional[np.ndarray]:
    """Centered differences with steps h|t| and h r; None if the stencil straddles a shock."""
    dt, dr = h * abs(t), h * r
    try:
        Up, _, _, sp = _conserved(sol, t + dt, r)
        Um, _, _, sm = _conserved(sol, t - dt, r)
        _, Fp, _, rp = _conserved(sol, t, r + dr)
        _, Fm, _, rm = _conserved(sol, t, r - dr)
        U0, _, S0, s0 = _conserved(sol, t, r)
    except DomainError:
        return None
    if len({s0.branch, sp.branch, sm.branch, rp.branch, rm.branch}) > 1 and _crosses_shock(sol, t, r, dt, dr):
        return None
    a, b = (Up - Um) / (2.0 * dt), (Fp - Fm) / (2.0 * dr)
    scale = np.abs(a) + np.abs(b) + np.abs(S0) + 1e-300
    return np.abs(a + b - S0) / scale


def _crosses_shock(sol: GlobalSolution, t: float, r: float, dt: float, dr: float) -> bool:
    lam = sol.lam
    xs = [(t + a) / (r + b) ** lam for a, b in ((dt, 0), (-dt, 0), (0, dr), (0, -dr), (0, 0))]
    lo, hi = min(xs), max(xs)
    return (lo <= -1.0 <= hi) or (lo <= sol.x_H <= hi)


@dataclass(frozen=True)
class EulerReport:
    h: Tuple[float, ...]
    norms: Tuple[float, ...]  # max relative residual over unmasked points, per h
    orders: Tuple[float, ...]
    masked: int
    used: int


def euler_residual(sol: GlobalSolution, grid: Sequence[Tuple[float, float]], h: float = 1e-2,
                   levels: int = 3) -> EulerReport:
    """Residual norms at spacings h, h/2, ... and the observed orders between levels.

    A grid point is masked if any of its stencils straddles a shock or if it
    lies in the quiescent gas, where the residual vanishes identically.
    """
    hs = tuple(h / 2 ** k for k in range(levels))
    keep = []
    masked = 0
    for t, r in grid:
        if t == 0.0 or t / r ** sol.lam < -1.0:
            masked += 1
            continue
        if any(_crosses_shock(sol, t, r, hh * abs(t), hh * r) for hh in hs[:1]):
            masked += 1
            continue
        keep.append((t, r))
    norms = []
    for hh in hs:
        vals = [_residual_at(sol, t, r, hh) for t, r in keep]
        vals = [v for v in vals if v is not None]
        norms.append(max(float(np.max(v)) for v in vals) if vals else math.nan)
    orders = tuple(math.log2(a / b) if a > 0 and b > 0 else math.nan for a, b in zip(norms, norms[1:]))
    return EulerReport(hs, tuple(norms), orders, masked, len(keep))


def default_grid(sol: GlobalSolution, n: int = 6) -> List[Tuple[float, float]]:
    """Points in each smooth region at r in [0.5, 2]."""
    lam = sol.lam
    pts = []
    xs = list(np.linspace(-0.9, -0.1, n)) + list(np.linspace(0.1, 0.9, n) * sol.x_H) + \
        list(sol.x_H * np.geomspace(1.2, 20.0, n))
    for r in (0.5, 1.0, 2.0):
        for x in xs:
            pts.append((float(x) * r ** lam, r))
    return pts


def quiescent_residual(sol: GlobalSolution, t: float = -1.0, r: float = 0.5, h: float = 1e-3) -> float:
    """Residual inside the quiescent gas (x < -1); exactly zero."""
    if not t / r ** sol.lam < -1.0:
        raise DomainError("point is not in the quiescent region", field="grid")
    dt, dr = h * abs(t), h * r
    Up, _, _, _ = _conserved(sol, t + dt, r)
    Um, _, _, _ = _conserved(sol, t - dt, r)
    _, Fp, _, _ = _conserved(sol, t, r + dr)
    _, Fm, _, _ = _conserved(sol, t, r - dr)
    _, _, S0, _ = _conserved(sol, t, r)
    res = (Up - Um) / (2.0 * dt) + (Fp - Fm) / (2.0 * dr) - S0
    return float(np.max(np.abs(res)))


# ---------------------------------------------------------------------------
# sampling

CSV_COLUMNS = ("t", "r", "x", "rho", "u", "c", "p", "branch_id")


def sample(sol: GlobalSolution, ts: Sequence[float], rs: Sequence[float]) -> List[Tuple]:
    rows = []
    for t in ts:
        for r in rs:
            s = evaluate(sol, float(t), float(r))
            if isinstance(s, ShockStates):
                s = s.behind
            rows.append((float(t), float(r), float(t) / float(r) ** sol.lam, s.rho, s.u, s.c, s.p, s.branch))
    return rows
