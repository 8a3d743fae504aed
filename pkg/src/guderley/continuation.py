"""Passage through the origin P0 and the maximal smooth extension in x > 0.

On both sides of P0 the annotation is analytic in C:
ln|x| = ln|C| + h(C) + L0 and q = r(C) + Q0, with the same constants, and
x = -C exp(h(C) + L0) changes sign with C.  The collapse branch is handed
to the series at C = delta/2 and numeric integration resumes at C = -delta/2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, Optional, Tuple

import numpy as np

from .collapse import CollapseResult
from .errors import BudgetError, MatchingError, TheoryViolation
from .ode_engine import (
    C_level,
    G_zero,
    Trajectory,
    integrate_phase,
    join,
    sonic_lower,
    truncate,
)
from .origin_series import (
    N_DEFAULT,
    CompanionSeries,
    OriginSeries,
    companion_series,
    fit_v1,
    handoff_radius,
    match_v1,
    series_coeffs,
    series_eval,
    slope_bound_s,
    v1_interval,
)
from .phase_plane import GAMMA_STAR, Params, critical_points, special_z

N_ANNULUS = 21
BARRIER_SLACK = 1e-9


@dataclass
class OriginPassage:
    series: OriginSeries
    companion: CompanionSeries
    delta: float
    L0: float  # ln|x| = ln|C| + h(C) + L0
    Q0: float  # absolute density accumulator at P0
    inbound: Trajectory  # collapse branch ending at C = delta/2
    outbound: Trajectory  # from C = -delta/2 to C = -delta, annotated with s_offset = 0
    annulus_in: float  # max |V_series - V_ode| on delta/2 <= C <= delta
    annulus_out: float  # same on -delta <= C <= -delta/2
    L0_spread: float  # variation of the fitted L0 over the inbound annulus

    @property
    def v1(self) -> float:
        return self.series.v1

    @property
    def params(self) -> Params:
        return self.series.params

    def x_of_C(self, C: float) -> float:
        return -C * math.exp(self.companion.h_at(C) + self.L0)

    def state(self, C: float) -> Tuple[float, float, float]:
        """(V, ln|x|, ln R) on the series patch; C must be nonzero for ln|x|."""
        V = series_eval(self.series, C)[0]
        lnx = math.log(abs(C)) + self.companion.h_at(C) + self.L0 if C != 0.0 else -math.inf
        lnR = self.companion.q_at(C) + self.Q0 - math.log1p(V)
        return V, lnx, lnR

    @property
    def slope_limit(self) -> float:
        """lim V(x)/x at x = 0."""
        return -self.v1 * math.exp(-self.L0)


def continue_through_origin(params: Params, collapse: CollapseResult, N: int = N_DEFAULT,
                            rtol: float = 1e-11) -> OriginPassage:
    """Match the origin series to the collapse branch and restart on the far side."""
    p = params
    tr = collapse.trajectory
    if tr.C[-1] <= 0.0 or tr.C[-1] > 1e-2:
        raise MatchingError("collapse trajectory must end at small positive C")
    # provisional v1 from the deepest point, only to size the handoff radius
    C_deep = float(tr.C[-1])
    v1 = fit_v1(p, C_deep, float(tr.V[-1]), collapse.triple, N)
    delta = handoff_radius(series_coeffs(p, v1, N))
    if delta <= C_deep:
        raise MatchingError(f"handoff radius {delta:.3g} is below the collapse endpoint {C_deep:.3g}")
    Ch = 0.5 * delta
    v1 = fit_v1(p, Ch, tr.V_of_C(Ch), collapse.triple, N)
    # the incoming slope estimate and its validation
    v1 = match_v1(p, 1.0 / v1, collapse.triple)
    ser = series_coeffs(p, v1, N, triple=collapse.triple)
    comp = companion_series(ser)
    inbound = truncate(tr, "C", Ch)

    Cs = np.linspace(Ch, delta, N_ANNULUS)
    ann_in = 0.0
    L0s = []
    for C in Cs:
        V, _, s, q = tr.state_at("C", float(C))
        ann_in = max(ann_in, abs(series_eval(ser, float(C))[0] - V))
        L0s.append(s + tr.s_offset - math.log(C) - comp.h_at(float(C)))
    L0 = L0s[0]
    Q0 = float(inbound.q[-1] + inbound.q_offset) - comp.q_at(Ch)

    Cb = -Ch
    Vb, dVb = series_eval(ser, Cb)
    s0 = math.log(Ch) + comp.h_at(Cb) + L0
    q0 = comp.q_at(Cb) + Q0
    out = integrate_phase(p, (Vb, Cb), (-dVb, -1.0), [C_level(-delta)], s0=s0, q0=q0, rtol=rtol)
    out.s_offset, out.q_offset, out.x_sign = 0.0, 0.0, 1
    Co = np.linspace(Cb, float(out.C[-1]), N_ANNULUS)
    ann_out = max(abs(series_eval(ser, float(C))[0] - out.V_of_C(float(C))) for C in Co)
    return OriginPassage(ser, comp, delta, L0, Q0, inbound, out, ann_in, ann_out,
                         float(max(L0s) - min(L0s)))


def x_slope_profile(params: Params, collapse: CollapseResult, n: int = 11) -> np.ndarray:
    """Rows (x, V/x, dV/dx) over the last decade of |x| reached by the collapse branch.

    dV/dx = -G/(lambda D x) along the field.  A finite slope at x = 0 shows
    up as both columns converging to one value as x -> 0-.
    """
    p = params
    tr = collapse.trajectory
    lnx = tr.lnx
    deep = float(lnx[-1])
    xs = np.exp(np.linspace(deep + math.log(10.0), deep, n))
    rows = []
    for ax in xs:
        V, C, _, _ = tr.at_lnx(math.log(ax))
        x = tr.x_sign * ax
        W = 1.0 + V
        D = W * W - C * C
        G = C * C * ((p.m + 1) * V + 2 * p.m * p.z) - V * W * (p.lam + V)
        rows.append((x, V / x, -G / (p.lam * D * x)))
    return np.array(rows).T


def slope_bound_holds(passage: OriginPassage, triple: str) -> bool:
    """Outbound slope dC/dV = 1/v1 satisfies 1/v1 <= s < 0."""
    s = slope_bound_s(passage.params, triple)
    lo, _ = v1_interval(passage.params, triple)
    v1 = passage.v1
    return v1 < 0.0 and 1.0 / v1 <= s < 0.0 and v1 >= lo


# ---------------------------------------------------------------------------
# maximal extension

@dataclass
class MaxExtension:
    trajectory: Trajectory  # outbound C = -delta/2 -> sonic line, x > 0 annotated
    Vs: float
    Cs: float
    xs: float
    G_cross: Optional[Tuple[float, float]]

    @property
    def lnxs(self) -> float:
        return math.log(self.xs)


def maximal_extension(params: Params, passage: OriginPassage, triple: str,
                      rtol: float = 1e-11, max_steps: int = 20000) -> MaxExtension:
    p = params
    o = passage.outbound
    V0, C0 = o.end
    G0 = C0 * C0 * ((p.m + 1) * V0 + 2 * p.m * p.z) - V0 * (1.0 + V0) * (p.lam + V0)
    W0 = 1.0 + V0
    F0 = C0 * (C0 * C0 * (1.0 + p.m * p.z / W0) - (p.a1 * W0 * W0 - p.a2 * W0 + p.a3))
    # keep the orientation of the outbound piece (C decreasing)
    hint = (-G0 / F0, -1.0) if F0 != 0.0 else (0.0, -1.0)
    ext = integrate_phase(p, (V0, C0), hint, [G_zero(p), sonic_lower()],
                          s0=float(o.s[-1]), q0=float(o.q[-1]), rtol=rtol, max_steps=max_steps)
    if ext.stop_reason != "sonic_cross":
        raise BudgetError("maximal extension did not reach the lower sonic line", location=ext.end)
    whole = join([o, ext])
    whole.s_offset, whole.q_offset, whole.x_sign = 0.0, 0.0, 1
    Vs, Cs = ext.end
    cp = critical_points(p)
    if not Cs < cp.ringC:
        raise TheoryViolation(f"sonic endpoint C_s = {Cs:.10g} is not below C_ring = {cp.ringC:.10g}")
    if triple == "P8" and not Cs < cp.P9.C:
        raise TheoryViolation(f"P8 case: C_s = {Cs:.10g} is not below C9 = {cp.P9.C:.10g}")
    gc = ext.first_event("G_zero_cross")
    return MaxExtension(whole, Vs, Cs, math.exp(float(ext.s[-1])), None if gc is None else (gc.V, gc.C))


def _G_cross_fourth_quadrant(ext: MaxExtension) -> bool:
    return ext.G_cross is not None and ext.G_cross[0] > 0.0 and ext.G_cross[1] < 0.0


def barrier_checks(params: Params, triple: str, ext: MaxExtension, inbound: Trajectory,
                   slack: float = BARRIER_SLACK, gamma_star: float = GAMMA_STAR) -> Dict[str, bool]:
    """Pointwise containments that apply to (gamma, z, triple); inapplicable ones are omitted."""
    p = params
    g, z = p.gamma, p.z
    cp = critical_points(p)
    sz = special_z(g, p.m, gamma_star)
    V, C = ext.trajectory.V, ext.trajectory.C
    out: Dict[str, bool] = {"G_zero_in_fourth_quadrant": _G_cross_fourth_quadrant(ext)}

    def on(lo):
        return (C >= lo) & (C < 0.0)

    if triple == "P8":
        if g < 2.0:
            sel = on(cp.P9.C)
            out["V>=-C^2 on [C9,0)"] = bool(np.all(V[sel] >= -C[sel] ** 2 - slack))
        else:
            sel = on(cp.P9.C)
            out["V>=-2C^2/3 on [C9,0)"] = bool(np.all(V[sel] >= -2.0 / 3.0 * C[sel] ** 2 - slack))
        if g >= sz.gamma_g and sz.z_g <= z <= sz.z_M:
            out["C5>-2/3"] = cp.P5.C > -2.0 / 3.0
            sel = on(cp.P5.C)
            out["V>=-2C^2/3 on [C5,0)"] = bool(np.all(V[sel] >= -2.0 / 3.0 * C[sel] ** 2 - slack))
    if triple == "P6" and 1.0 < g < 2.0:
        if sz.z_s() <= z <= sz.z_M:
            k = cp.P8.V / cp.P8.C ** 2
            sel = on(cp.P9.C)
            out["V>=kC^2 on [C9,0)"] = bool(np.all(V[sel] >= k * C[sel] ** 2 - slack))
        if g < sz.gamma_u and sz.z_g < z < sz.z_0:
            sel = (C > cp.P9.C) & (C < 0.0)
            out["V>=-C(1+C) on (C9,0)"] = bool(np.all(V[sel] >= -C[sel] * (1.0 + C[sel]) - slack))
            Vi, Ci = inbound.V, inbound.C
            sel = (Vi >= cp.P8.V) & (Vi < 0.0) & (Ci > 0.0)
            out["C<-V on [V8,0)"] = bool(np.all(Ci[sel] <= -Vi[sel] + slack))
    if g <= gamma_star:
        out["d/dC(C/(1+V))>0"] = bool(np.all(_ratio_derivative(p, V, C) > -slack))
    return out


def _ratio_derivative(p: Params, V: np.ndarray, C: np.ndarray) -> np.ndarray:
    """d/dC (C/(1+V)) = 1/W - C V'(C)/W^2 with V'(C) = G/F."""
    W = 1.0 + V
    G = C * C * ((p.m + 1) * V + 2 * p.m * p.z) - V * W * (p.lam + V)
    F = C * (C * C * (1.0 + p.m * p.z / W) - (p.a1 * W * W - p.a2 * W + p.a3))
    with np.errstate(divide="ignore", invalid="ignore"):
        d = 1.0 / W - C * (G / F) / (W * W)
    return d[np.isfinite(d)]
