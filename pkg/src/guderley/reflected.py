"""Reflected shock: the trajectory from P_inf, the jump locus of the maximal
extension, their intersection P_H and the annotated downstream branch."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Dict, Optional, Tuple

import numpy as np
from scipy.optimize import brentq

from .continuation import MaxExtension, OriginPassage
from .errors import AnnotationError, DomainError, TheoryViolation
from .jump_map import _jump, entropy_check, jump
from .ode_engine import (
    C_level,
    Trajectory,
    attach_R,
    attach_x,
    integrate_phase,
    truncate,
)
from .origin_series import series_eval
from .phase_plane import (
    GAMMA_STAR,
    Params,
    PhasePoint,
    VF_plus_domain,
    branch_VF_plus,
    branch_VG,
    critical_points,
)

START_FACTOR = 1e3
RING_GAP = 1e-7
N_LOCUS_PATCH = 41


class UniquenessViolation(TheoryViolation):
    """More than one intersection where uniqueness is proved."""


def vbar_and_sigma(params: Params) -> Tuple[float, float]:
    m, z = params.m, params.z
    vbar = -2.0 * m * z / (m + 1)
    return vbar, (1.0 + m * z / (1.0 + vbar)) / params.lam


def density_exponent(params: Params) -> float:
    """R ~ x^k downstream, k = (m+1) Vbar / (lambda (1 + Vbar)) < 0."""
    vbar, _ = vbar_and_sigma(params)
    return (params.m + 1) * vbar / (params.lam * (1.0 + vbar))


def vtilde(params: Params, C: float) -> float:
    """Leading correction V - Vbar ~ g2(Vbar) / (alpha (p + 2) C^2)."""
    vbar, _ = vbar_and_sigma(params)
    alpha = 1.0 + params.m * params.z / (1.0 + vbar)
    p = (params.m + 1) / alpha
    g2 = vbar * (1.0 + vbar) * (params.lam + vbar)
    return g2 / (alpha * (p + 2.0) * C * C)


def default_C_start(params: Params) -> float:
    return -START_FACTOR * max(1.0, abs(critical_points(params).ringC))


def pinfty_trajectory(params: Params, C_start: Optional[float] = None, rtol: float = 1e-11,
                      check: bool = True) -> Trajectory:
    """The trajectory leaving P_inf, integrated upward in C to C_ring - 1e-7.

    s and q start at 0 at C_start; annotation happens after matching.
    """
    cp = critical_points(params)
    if C_start is None:
        C_start = default_C_start(params)
    if not (C_start < cp.ringC - 1.0):
        raise DomainError(f"C_start = {C_start!r} must lie well below C_ring = {cp.ringC:.6g}", field="C_start")
    vbar, _ = vbar_and_sigma(params)
    V0 = vbar + vtilde(params, C_start)
    tr = integrate_phase(params, (V0, C_start), (0.0, 1.0), [C_level(cp.ringC - RING_GAP)], rtol=rtol,
                         max_steps=50000)
    if tr.stop_reason != "stop":
        raise TheoryViolation("P_inf trajectory did not reach the ring point")
    if check:
        conf = confinement(params, tr)
        if not all(conf.values()):
            raise TheoryViolation(f"P_inf trajectory left the strip V_G < V < V_F^+: {conf}")
    return tr


def confinement(params: Params, tr: Trajectory, slack: float = 1e-12) -> Dict[str, bool]:
    V, C = tr.V, tr.C
    lo, hi = VF_plus_domain(params)
    k = max(1, len(V) // 200)
    idx = range(0, len(V), k)
    above = all(V[i] > branch_VG(params, float(C[i])) - slack for i in idx if C[i] < 0.0)
    below = all(V[i] < branch_VF_plus(params, float(C[i])) + slack for i in idx if lo <= C[i] < hi)
    dec = bool(np.all(np.diff(V) < 0.0))
    return {"V>V_G": above, "V<V_F+": below, "V decreasing in C": dec}


def ring_distance(params: Params, tr: Trajectory) -> float:
    ring = critical_points(params).ring
    return math.hypot(tr.V[-1] - ring.V, tr.C[-1] - ring.C)


# ---------------------------------------------------------------------------
# jump locus and matching

@dataclass
class SolutionCurve:
    """V_sol(C) on C in (C_s, 0), the origin patch for C > -delta/2."""

    passage: OriginPassage
    ext: MaxExtension

    @property
    def C_patch(self) -> float:
        return -0.5 * self.passage.delta

    def V(self, C: float) -> float:
        if C >= self.C_patch:
            return series_eval(self.passage.series, C)[0]
        return self.ext.trajectory.V_of_C(C)

    def lnx(self, C: float) -> float:
        if C >= self.C_patch:
            return self.passage.state(C)[1]
        return self.ext.trajectory.state_at("C", C)[2]

    def lnR(self, C: float) -> float:
        if C >= self.C_patch:
            return self.passage.state(C)[2]
        V, _, _, q = self.ext.trajectory.state_at("C", C)
        return q + self.ext.trajectory.q_offset - math.log1p(V)

    def grid(self) -> np.ndarray:
        """Pre-shock C samples from just below 0 to C_s, decreasing."""
        patch = np.linspace(0.0, self.C_patch, N_LOCUS_PATCH)[1:]
        tr = self.ext.trajectory.C
        out = np.concatenate((patch, tr[tr < self.C_patch]))
        return out[np.concatenate(([True], np.diff(out) != 0.0))]


@dataclass
class JumpLocus:
    C_pre: np.ndarray
    V_pre: np.ndarray
    V_post: np.ndarray
    C_post: np.ndarray

    @property
    def P1_tilde(self) -> PhasePoint:
        return PhasePoint(float(self.V_post[0]), float(self.C_post[0]))

    @property
    def Ps(self) -> PhasePoint:
        return PhasePoint(float(self.V_post[-1]), float(self.C_post[-1]))


def jump_locus(params: Params, curve: SolutionCurve) -> JumpLocus:
    g = params.gamma
    Cp = curve.grid()
    Vp = np.array([curve.V(float(c)) for c in Cp])
    post = np.array([_jump(g, v, c) for v, c in zip(Vp, Cp)])
    # the sample on the sonic line maps to itself
    return JumpLocus(Cp, Vp, post[:, 0], post[:, 1])


@dataclass
class MatchResult:
    P_H: PhasePoint
    C_H: float
    pre_state: PhasePoint
    x_H: float
    intersection_count: int
    residual: float
    R_pre: float

    @property
    def lnx_H(self) -> float:
        return math.log(self.x_H)


def _mismatch(params: Params, curve: SolutionCurve, vinf: Trajectory) -> Callable[[float], float]:
    lo, hi = float(vinf.C.min()), float(vinf.C.max())

    def f(Cpre: float) -> float:
        V = curve.V(Cpre)
        J1, J2 = _jump(params.gamma, V, Cpre)
        if not (lo <= J2 <= hi):
            return math.nan
        return J1 - vinf.V_of_C(J2)

    return f


def find_PH(params: Params, curve: SolutionCurve, vinf: Trajectory,
            gamma_star: float = GAMMA_STAR) -> MatchResult:
    f = _mismatch(params, curve, vinf)
    Cs = curve.grid()
    vals = [f(float(c)) for c in Cs]
    brackets = []
    for i in range(len(Cs) - 1):
        a, b = vals[i], vals[i + 1]
        # an exact zero at a sample is counted once, by the interval ending there
        if math.isfinite(a) and math.isfinite(b) and (a * b < 0.0 or b == 0.0 or (i == 0 and a == 0.0)):
            brackets.append((float(Cs[i]), float(Cs[i + 1])))
    if not brackets:
        raise TheoryViolation("jump locus does not meet the P_inf trajectory")
    count = len(brackets)
    if count > 1 and params.gamma <= gamma_star:
        raise UniquenessViolation(f"{count} intersections of the jump locus with V_inf for gamma <= gamma_*")
    a, b = brackets[0]
    Cpre = brentq(f, a, b, xtol=1e-15, rtol=1e-15, maxiter=200)
    pre = PhasePoint(curve.V(Cpre), Cpre)
    post = jump(params, pre)
    VH = vinf.V_of_C(post.C)
    res = abs(post.V - VH)
    cp = critical_points(params)
    if not post.C < cp.ringC:
        raise TheoryViolation(f"C_H = {post.C:.10g} is not below C_ring = {cp.ringC:.10g}")
    if not entropy_check(params, pre):
        raise TheoryViolation("entropy condition fails at the reflected shock")
    return MatchResult(PhasePoint(VH, post.C), post.C, pre, math.exp(curve.lnx(Cpre)), count, res,
                       math.exp(curve.lnR(Cpre)))


def locus_monotone(locus: JumpLocus) -> bool:
    """d J1 / dC < 0 along the locus, C the pre-shock coordinate (decreasing in the arrays)."""
    return bool(np.all(np.diff(locus.V_post) > 0.0))


# ---------------------------------------------------------------------------
# downstream branch

def downstream_trajectory(params: Params, match: MatchResult, vinf: Trajectory) -> Trajectory:
    """V_inf from P_H toward P_inf with x(P_H) = x_H and R(P_H) = R_+."""
    part = truncate(vinf, "C", match.C_H).reversed()
    part = attach_x(params, part, (0, match.x_H))
    W_minus = 1.0 + match.pre_state.V
    W_plus = 1.0 + match.P_H.V
    R_plus = match.R_pre * W_minus / W_plus
    return attach_R(params, part, (0, R_plus))


@dataclass(frozen=True)
class TailFit:
    C_exponent: float
    sigma: float
    R_exponent: float
    R_exponent_theory: float
    V_gap_exponent: float  # V - Vbar ~ x^(-2 sigma)

    @property
    def C_rel_err(self) -> float:
        return abs(self.C_exponent - self.sigma) / self.sigma

    @property
    def R_rel_err(self) -> float:
        return abs(self.R_exponent - self.R_exponent_theory) / abs(self.R_exponent_theory)


def tail_fit(params: Params, down: Trajectory, decades: float = 1.0) -> TailFit:
    """Log-log least squares over the last decades of x on the downstream branch."""
    lnx = down.lnx
    sel = lnx >= lnx[-1] - decades * math.log(10.0)
    if np.count_nonzero(sel) < 5:
        raise AnnotationError("too few downstream samples in the tail window")
    vbar, sigma = vbar_and_sigma(params)
    X = lnx[sel]
    kC = np.polyfit(X, np.log(np.abs(down.C[sel])), 1)[0]
    kR = np.polyfit(X, down.lnR[sel], 1)[0]
    gap = np.abs(down.V[sel] - vbar)
    kV = np.polyfit(X, np.log(gap), 1)[0] if np.all(gap > 0.0) else math.nan
    return TailFit(float(kC), sigma, float(kR), density_exponent(params), float(kV))
