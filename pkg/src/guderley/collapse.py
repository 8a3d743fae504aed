"""Similarity exponent lambda_std by shooting through a sonic triple point,
and the collapse trajectory from P1 to the origin."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np
from scipy.optimize import brentq

from .errors import (
    BracketError,
    ConvergenceError,
    DegeneracyError,
    DomainError,
    GuderleyError,
    MatchingError,
)
from .ode_engine import (
    C_level,
    Trajectory,
    V_level,
    attach_R,
    attach_x,
    integrate_phase,
    join,
    point_trajectory,
    shift,
    sonic_upper,
)
from .phase_plane import (
    GAMMA_STAR,
    Params,
    PhasePoint,
    critical_points,
    jacobian_GF,
    make_params_z,
    p1_point,
    special_z,
)

SEED_DELTA = 1e-6
Z_TOL = 1e-13
N_SCAN = 12


@dataclass(frozen=True)
class LambdaResult:
    gamma: float
    m: int
    lam: float
    z: float
    triple: str
    miss_residual: float
    bracket: Tuple[float, float] = (math.nan, math.nan)
    profile: Tuple[Tuple[float, float], ...] = ()

    @property
    def params(self) -> Params:
        return make_params_z(self.gamma, self.m, self.z)


def p1_state(gamma: float) -> PhasePoint:
    if not (1.0 < gamma <= 3.0):
        raise DomainError(f"gamma must lie in (1, 3], got {gamma!r}", field="gamma")
    return p1_point(gamma)


@dataclass(frozen=True)
class TripleSeed:
    """Local linearization of the field (G, F) at a triple point."""

    point: PhasePoint
    e: Tuple[float, float]  # unit eigenvector, e[0] < 0 (points toward P1)
    mu: float  # its eigenvalue
    mu_other: float
    ds_dr: float  # d ln|x| / d(distance along e)

    def seed(self, sign: int, delta: float = SEED_DELTA) -> PhasePoint:
        return PhasePoint(self.point.V + sign * delta * self.e[0], self.point.C + sign * delta * self.e[1])


def triple_seed(params: Params, triple: str) -> TripleSeed:
    P = critical_points(params).triple(triple)
    J = np.array(jacobian_GF(params, P.V, P.C))
    ev, vec = np.linalg.eig(J)
    if np.any(np.abs(ev.imag) > 1e-12 * max(1.0, np.max(np.abs(ev)))):
        raise DegeneracyError(f"complex eigenvalues {ev} at {triple}")
    ev = ev.real
    vec = vec.real
    i = int(np.argmax(np.abs(ev)))
    if abs(ev[i] - ev[1 - i]) < 1e-10 * abs(ev[i]):
        raise DegeneracyError(f"repeated eigenvalue at {triple}; eigen-seed is not defined")
    e = vec[:, i] / np.linalg.norm(vec[:, i])
    if e[0] > 0.0:
        e = -e
    W = 1.0 + P.V
    gradD = (2.0 * W, -2.0 * P.C)
    ds_dr = -params.lam * (gradD[0] * e[0] + gradD[1] * e[1]) / ev[i]
    return TripleSeed(P, (float(e[0]), float(e[1])), float(ev[i]), float(ev[1 - i]), float(ds_dr))


def shoot_miss(gamma: float, m: int, z: float, triple: str = "P6", delta: float = SEED_DELTA,
               rtol: float = 1e-11) -> float:
    """C offset between the forward arc from P1 and the backward arc from P_*.

    Both arcs are compared at V_m = (V1 + V_*)/2.  If the forward arc meets
    the upper sonic line first, the comparison is made at the crossing.
    """
    p = make_params_z(gamma, m, z)
    P1 = p1_point(gamma)
    ts = triple_seed(p, triple)
    Vs = ts.point.V
    Vm = 0.5 * (P1.V + Vs)
    guard = V_level(P1.V - 0.25 * (1.0 + P1.V))
    fwd = integrate_phase(p, P1, (1.0, 0.0), [V_level(Vm), sonic_upper(), C_level(0.0), guard],
                          rtol=rtol, max_steps=4000)
    if fwd.stop_reason == "stop" and abs(fwd.V[-1] - Vm) > 1e-9:
        raise ConvergenceError("forward arc left the upper half plane")
    Vmatch = float(fwd.V[-1])
    Cf = float(fwd.C[-1])
    bwd = integrate_phase(p, ts.seed(+1, delta), ts.e, [V_level(Vmatch), C_level(0.0)], rtol=rtol,
                          max_steps=4000)
    if abs(bwd.V[-1] - Vmatch) > 1e-9:
        raise ConvergenceError("backward arc from the triple point did not reach the matching section")
    return Cf - float(bwd.C[-1])


def _triples_for(gamma: float, gamma_star: float) -> List[str]:
    if gamma <= gamma_star:
        return ["P6"]
    if gamma >= 2.0:
        return ["P8"]
    return ["P6", "P8"]


def _solve_triple(gamma, m, triple, interval, tol, rtol):
    lo, hi = interval
    # uniform points plus a geometric cluster toward z_M, where the root sits for gamma near 2
    zs = [lo + (hi - lo) * k / (N_SCAN + 1) for k in range(1, N_SCAN + 1)]
    zs += [hi - (hi - lo) * 2.0 ** -k for k in range(4, 13)]
    zs = sorted(set(zs))
    prof = []
    for z in zs:
        try:
            prof.append((z, shoot_miss(gamma, m, z, triple, rtol=rtol)))
        except GuderleyError:
            prof.append((z, math.nan))
    br = None
    for (za, ma), (zb, mb) in zip(prof, prof[1:]):
        if math.isfinite(ma) and math.isfinite(mb) and ma * mb < 0.0:
            br = (za, zb)
            break
    if br is None:
        raise BracketError(f"no sign change of the shooting miss in Z({gamma:g}; {triple})", profile=prof)
    f = lambda z: shoot_miss(gamma, m, z, triple, rtol=rtol)
    z = brentq(f, br[0], br[1], xtol=tol, rtol=1e-15, maxiter=200)
    return LambdaResult(float(gamma), int(m), 1.0 + m * gamma * z, z, triple, f(z), br, tuple(prof))


def find_lambda_std(gamma: float, m: int, tol: float = Z_TOL, gamma_star: float = GAMMA_STAR,
                    rtol: float = 1e-11) -> LambdaResult:
    if not (tol > 0.0):
        raise DomainError("tol must be positive", field="tol")
    sz = special_z(gamma, m, gamma_star)
    errors = []
    for triple in _triples_for(gamma, gamma_star):
        iv = sz.ring_interval(triple)
        if iv is None:
            continue
        try:
            return _solve_triple(gamma, int(m), triple, iv, tol, rtol)
        except BracketError as exc:
            errors.append(exc)
    if errors:
        raise errors[0]
    raise BracketError(f"no admissible z-interval for gamma = {gamma!r}")


# ---------------------------------------------------------------------------
# collapse trajectory

@dataclass
class CollapseResult:
    trajectory: Trajectory  # P1 -> near the origin, x and R attached
    triple: str
    seed: TripleSeed
    P1_gap: float  # distance between the backward arc end and P1


def collapse_trajectory(params: Params, triple: str, C_end: float,
                        delta: float = SEED_DELTA, rtol: float = 1e-11) -> CollapseResult:
    """P1 -> P_* -> (V(C_end), C_end), re-seeded at P_* along its eigenvector.

    x and R are anchored at P1: x = -1 and R = (gamma+1)/(gamma-1), the
    strong-shock image of quiescent gas of unit density.
    """
    p = params
    g = p.gamma
    ts = triple_seed(p, triple)
    P1 = p1_point(g)
    # arc A: P_* + delta e -> P1 (V decreasing)
    a = integrate_phase(p, ts.seed(+1, delta), ts.e, [V_level(P1.V), C_level(0.0)], rtol=rtol)
    gap = math.hypot(a.V[-1] - P1.V, a.C[-1] - P1.C)
    if a.stop_reason != "stop" or abs(a.V[-1] - P1.V) > 1e-9:
        raise MatchingError("arc from the triple point does not return to P1")
    # arc B: P_* - delta e -> origin side
    b = integrate_phase(p, ts.seed(-1, delta), (-ts.e[0], -ts.e[1]), [C_level(C_end), V_level(0.0)], rtol=rtol)
    if abs(b.C[-1] - C_end) > 1e-12:
        raise ConvergenceError("collapse arc did not reach the origin neighbourhood")
    # s, q are continuous through P_*: offsets from the linearization
    k = (p.m + 1) * ts.point.V / (p.lam * (1.0 + ts.point.V))
    sA = ts.ds_dr * delta
    sB = -ts.ds_dr * delta
    a = shift(a, sA - a.s[0], k * sA - a.q[0])
    b = shift(b, sB - b.s[0], k * sB - b.q[0])
    mid = point_trajectory(p, (ts.point.V, ts.point.C, 0.0, 0.0))
    whole = join([a.reversed(), mid, b])
    whole = attach_x(p, whole, (0, -1.0))
    whole = attach_R(p, whole, (0, (g + 1.0) / (g - 1.0)))
    return CollapseResult(whole, triple, ts, gap)


def barrier_collapse(params: Params, traj: Trajectory, triple: str, slack: float = 1e-9) -> dict:
    """Pointwise upper barriers on the collapse arc between P_* and the origin."""
    P = critical_points(params).triple(triple)
    V, C = traj.V, traj.C
    sel = (V > P.V) & (V < 0.0) & (C > 0.0)
    out = {}
    if params.gamma <= GAMMA_STAR and triple == "P6":
        out["below_sqrt(-V)"] = bool(np.all(C[sel] <= np.sqrt(-V[sel]) + slack))
    if params.gamma >= 2.0 and triple == "P8":
        out["below_sqrt(-3V/2)"] = bool(np.all(C[sel] <= np.sqrt(-1.5 * V[sel]) + slack))
    return out
