"""Adaptive integration of the phase ODE dC/dV = F/G.

The state is (V, C, s, q) where s = ln|x| up to an additive constant and q
accumulates the first term of the density equation, so that
ln R = q - ln(1 + V) + const.  The active parameter is V while |F| <= 1.1|G|
and C while |G| <= 1.1|F|, so the curve is always integrated as a graph with
bounded slope.  Every accepted step is stored, and dense values are produced
by re-taking a single Dormand-Prince step of the required length from the
stored step start, which is as accurate as the step itself.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import brentq

from .errors import AnnotationError, BudgetError, PhysicalityError, SingularityError
from .phase_plane import Params

State = Tuple[float, float, float, float]

# Dormand-Prince 5(4) tableau
_C2, _C3, _C4, _C5 = 1 / 5, 3 / 10, 4 / 5, 8 / 9
_A21 = 1 / 5
_A31, _A32 = 3 / 40, 9 / 40
_A41, _A42, _A43 = 44 / 45, -56 / 15, 32 / 9
_A51, _A52, _A53, _A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
_A61, _A62, _A63, _A64, _A65 = 9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656
_B1, _B3, _B4, _B5, _B6 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
_E1 = 71 / 57600
_E3 = -71 / 16695
_E4 = 71 / 1920
_E5 = -17253 / 339200
_E6 = 22 / 525
_E7 = -1 / 40

SWITCH = 1.1


@dataclass(frozen=True)
class EventSpec:
    """A scalar function of (V, C) whose sign change is an event."""

    name: str
    fn: Callable[[float, float], float]
    terminal: bool = False
    direction: int = 0


@dataclass
class Event:
    kind: str
    V: float
    C: float
    s: float
    q: float
    index: int


def sonic_upper(terminal=True) -> EventSpec:
    return EventSpec("sonic_cross", lambda V, C: C - (1.0 + V), terminal)


def sonic_lower(terminal=True) -> EventSpec:
    return EventSpec("sonic_cross", lambda V, C: C + (1.0 + V), terminal)


def line_cross(kappa: float, terminal=False) -> EventSpec:
    return EventSpec(f"line_cross({kappa:g})", lambda V, C: C + kappa * (1.0 + V), terminal)


def V_level(v: float, terminal=True) -> EventSpec:
    return EventSpec("stop", lambda V, C: V - v, terminal)


def C_level(c: float, terminal=True) -> EventSpec:
    return EventSpec("stop", lambda V, C: C - c, terminal)


def G_zero(params: Params, terminal=False) -> EventSpec:
    m, z, lam = params.m, params.z, params.lam
    return EventSpec(
        "G_zero_cross",
        lambda V, C: C * C * ((m + 1) * V + 2 * m * z) - V * (1.0 + V) * (lam + V),
        terminal,
    )


def F_zero(params: Params, terminal=False) -> EventSpec:
    p = params

    def f(V, C):
        W = 1.0 + V
        return C * (C * C * (1.0 + p.m * p.z / W) - (p.a1 * W * W - p.a2 * W + p.a3))

    return EventSpec("F_zero_cross", f, terminal)


@dataclass(frozen=True)
class Step:
    kind: str  # "V", "C" or "lin"
    y0: State
    h: float
    y1: State


@dataclass
class Trajectory:
    """Oriented sampled phase curve with stored steps for dense output."""

    params: Params
    V: np.ndarray
    C: np.ndarray
    s: np.ndarray
    q: np.ndarray
    steps: List[Step]
    events: List[Event] = field(default_factory=list)
    orientation: int = 1
    s_offset: Optional[float] = None
    q_offset: Optional[float] = None
    x_sign: int = 0
    stop_reason: str = ""

    def __len__(self):
        return len(self.V)

    @property
    def has_x(self) -> bool:
        return self.s_offset is not None

    @property
    def has_R(self) -> bool:
        return self.q_offset is not None

    @property
    def lnx(self) -> np.ndarray:
        if self.s_offset is None:
            raise AnnotationError("trajectory has no x annotation")
        return self.s + self.s_offset

    @property
    def x(self) -> np.ndarray:
        return self.x_sign * np.exp(self.lnx)

    @property
    def lnR(self) -> np.ndarray:
        if self.q_offset is None:
            raise AnnotationError("trajectory has no R annotation")
        return self.q + self.q_offset - np.log1p(self.V)

    @property
    def R(self) -> np.ndarray:
        return np.exp(self.lnR)

    @property
    def end(self) -> Tuple[float, float]:
        return float(self.V[-1]), float(self.C[-1])

    def first_event(self, kind: str) -> Optional[Event]:
        for e in self.events:
            if e.kind == kind:
                return e
        return None

    # -- dense output
    def _ranges(self, coord: str):
        key = "_rng_" + coord
        cached = self.__dict__.get(key)
        if cached is None or len(cached[0]) != len(self.steps):
            k = "VCsq".index(coord)
            a = np.array([st.y0[k] for st in self.steps])
            b = np.array([st.y1[k] for st in self.steps])
            cached = (np.minimum(a, b), np.maximum(a, b))
            self.__dict__[key] = cached
        return cached

    def locate(self, coord: str, value: float) -> Optional[Step]:
        lo, hi = self._ranges(coord)
        idx = np.nonzero((lo <= value) & (value <= hi))[0]
        if len(idx) == 0:
            return None
        return self.steps[int(idx[0])]

    def state_at(self, coord: str, value: float) -> State:
        """(V, C, s, q) at the first point where coord equals value."""
        st = self.locate(coord, value)
        if st is None:
            raise AnnotationError(f"{coord} = {value!r} outside the trajectory range")
        return step_state_at(self.params, st, coord, value)

    def V_of_C(self, C: float) -> float:
        return self.state_at("C", C)[0]

    def C_of_V(self, V: float) -> float:
        return self.state_at("V", V)[1]

    def at_lnx(self, lnx: float) -> State:
        if self.s_offset is None:
            raise AnnotationError("trajectory has no x annotation")
        return self.state_at("s", lnx - self.s_offset)

    def reversed(self) -> "Trajectory":
        return replace(
            self,
            V=self.V[::-1].copy(),
            C=self.C[::-1].copy(),
            s=self.s[::-1].copy(),
            q=self.q[::-1].copy(),
            steps=list(reversed(self.steps)),
            events=list(self.events),
            orientation=-self.orientation,
        )


# ---------------------------------------------------------------------------
# right-hand side and single step

def _rhs(p: Params, kind: str, V: float, C: float):
    m, z, lam = p.m, p.z, p.lam
    W = 1.0 + V
    C2 = C * C
    D = W * W - C2
    G = C2 * ((m + 1) * V + 2 * m * z) - V * W * (lam + V)
    F = C * (C2 * (1.0 + m * z / W) - (p.a1 * W * W - p.a2 * W + p.a3))
    if kind == "V":
        r = 1.0 / G
        ds = -lam * D * r
        return 1.0, F * r, ds, (m + 1) * V * ds / (lam * W)
    r = 1.0 / F
    ds = -lam * D * r
    return G * r, 1.0, ds, (m + 1) * V * ds / (lam * W)


def _dp5(p: Params, kind: str, y: State, h: float, k1=None):
    """One Dormand-Prince step; returns (y_new, err_vec, k7)."""
    f = _rhs
    V, C, s, q = y
    if k1 is None:
        k1 = f(p, kind, V, C)
    a = k1
    y2 = [y[i] + h * _A21 * a[i] for i in range(4)]
    b = f(p, kind, y2[0], y2[1])
    y3 = [y[i] + h * (_A31 * a[i] + _A32 * b[i]) for i in range(4)]
    c = f(p, kind, y3[0], y3[1])
    y4 = [y[i] + h * (_A41 * a[i] + _A42 * b[i] + _A43 * c[i]) for i in range(4)]
    d = f(p, kind, y4[0], y4[1])
    y5 = [y[i] + h * (_A51 * a[i] + _A52 * b[i] + _A53 * c[i] + _A54 * d[i]) for i in range(4)]
    e = f(p, kind, y5[0], y5[1])
    y6 = [y[i] + h * (_A61 * a[i] + _A62 * b[i] + _A63 * c[i] + _A64 * d[i] + _A65 * e[i]) for i in range(4)]
    g6 = f(p, kind, y6[0], y6[1])
    yn = tuple(y[i] + h * (_B1 * a[i] + _B3 * c[i] + _B4 * d[i] + _B5 * e[i] + _B6 * g6[i]) for i in range(4))
    # pin the parameter coordinate exactly
    if kind == "V":
        yn = (y[0] + h,) + yn[1:]
    else:
        yn = (yn[0], y[1] + h) + yn[2:]
    k7 = f(p, kind, yn[0], yn[1])
    err = tuple(h * (_E1 * a[i] + _E3 * c[i] + _E4 * d[i] + _E5 * e[i] + _E6 * g6[i] + _E7 * k7[i]) for i in range(4))
    return yn, err, k7


def _partial(p: Params, st: Step, coord: str, value: float) -> Step:
    """The initial piece of st that ends where coord == value."""
    k = "VCsq".index(coord)
    if st.kind == "lin":
        a, b = st.y0[k], st.y1[k]
        t = 0.0 if b == a else (value - a) / (b - a)
        return Step("lin", st.y0, 0.0, tuple(st.y0[i] + t * (st.y1[i] - st.y0[i]) for i in range(4)))
    if value == st.y0[k]:
        return Step(st.kind, st.y0, 0.0, st.y0)
    if value == st.y1[k]:
        return st
    if st.kind == coord:
        tau = value - st.y0[k]
    else:
        def g(tau):
            if tau == 0.0:
                return st.y0[k] - value
            return _dp5(p, st.kind, st.y0, tau)[0][k] - value

        tau = brentq(g, 0.0, st.h, xtol=1e-15 * max(1.0, abs(st.h)), rtol=1e-15, maxiter=200)
    y = _dp5(p, st.kind, st.y0, tau)[0] if tau != 0.0 else st.y0
    if st.kind == coord:
        y = tuple(value if i == k else y[i] for i in range(4))
    return Step(st.kind, st.y0, tau, y)


def step_state_at(p: Params, st: Step, coord: str, value: float) -> State:
    """Re-step from the stored step start to the point where coord == value."""
    return _partial(p, st, coord, value).y1


# ---------------------------------------------------------------------------
# driver

def _GF(p: Params, V: float, C: float):
    m, z, lam = p.m, p.z, p.lam
    W = 1.0 + V
    C2 = C * C
    G = C2 * ((m + 1) * V + 2 * m * z) - V * W * (lam + V)
    F = C * (C2 * (1.0 + m * z / W) - (p.a1 * W * W - p.a2 * W + p.a3))
    return G, F


def _sgn(x):
    return 1.0 if x > 0 else -1.0


def integrate_phase(
    params: Params,
    start,
    direction: Sequence[float],
    events: Iterable[EventSpec] = (),
    s0: float = 0.0,
    q0: float = 0.0,
    rtol: float = 1e-11,
    atol: float = 1e-13,
    max_steps: int = 20000,
    hmax_frac: float = 0.05,
    h0: Optional[float] = None,
) -> Trajectory:
    """Integrate from start along the phase curve, oriented by the tangent hint.

    direction is any vector with positive projection on the intended tangent;
    departures from critical points should start a small distance away along
    a known eigen-direction, with that direction as the hint.
    """
    p = params
    V, C = float(start[0]), float(start[1])
    if not (math.isfinite(V) and math.isfinite(C)):
        raise SingularityError("non-finite start", location=(V, C))
    G, F = _GF(p, V, C)
    dot = direction[0] * G + direction[1] * F
    if dot == 0.0 or not math.isfinite(dot):
        raise SingularityError("start is a critical point of the field", location=(V, C))
    omega = _sgn(dot)
    kind = "V" if abs(F) <= SWITCH * abs(G) else "C"
    y: State = (V, C, float(s0), float(q0))
    evs = list(events)
    gold = [e.fn(V, C) for e in evs]

    Vs, Cs, ss, qs = [V], [C], [y[2]], [y[3]]
    steps: List[Step] = []
    found: List[Event] = []
    err_old = 1e-4
    k1 = None
    h_abs = h0
    reason = "budget"

    for n in range(max_steps):
        G, F = _GF(p, y[0], y[1])
        if kind == "V" and abs(F) > SWITCH * abs(G):
            kind, k1 = "C", None
            if h_abs is not None and F != 0.0:
                h_abs = h_abs * abs(F / G) if G != 0.0 else h_abs
        elif kind == "C" and abs(G) > SWITCH * abs(F):
            kind, k1 = "V", None
            if h_abs is not None and G != 0.0:
                h_abs = h_abs * abs(G / F) if F != 0.0 else h_abs
        sgn = omega * _sgn(G if kind == "V" else F)
        hmax = hmax_frac * max(1.0, abs(y[0]) + abs(y[1]))
        if h_abs is None:
            h_abs = min(hmax, 1e-3)
        h_abs = min(h_abs, hmax)
        # attempt
        while True:
            h = sgn * h_abs
            try:
                yn, err, k7 = _dp5(p, kind, y, h, k1)
                ok = all(math.isfinite(v) for v in yn)
            except (ZeroDivisionError, OverflowError):
                ok = False
            if ok:
                en = 0.0
                for i in range(4):
                    sc = atol + rtol * max(abs(y[i]), abs(yn[i]))
                    en += (err[i] / sc) ** 2
                en = math.sqrt(en / 4.0)
            else:
                en = float("inf")
            if en <= 1.0:
                break
            fac = 0.2 if not math.isfinite(en) else max(0.2, 0.9 * en ** -0.2)
            h_abs *= fac
            k1 = k1 if ok else None
            if h_abs < 1e-14 * max(1.0, abs(y[0]) + abs(y[1])):
                raise SingularityError("step size underflow", location=(y[0], y[1]))
        # PI controller
        en_c = max(en, 1e-10)
        fac = 0.9 * en_c ** -0.17 * err_old ** 0.04
        fac = min(10.0, max(0.2, fac))
        err_old = max(en, 1e-4)
        # events
        gnew = [e.fn(yn[0], yn[1]) for e in evs]
        hit = None
        for i, e in enumerate(evs):
            a, b = gold[i], gnew[i]
            if a == 0.0 or not (a * b <= 0.0) or b == a:
                continue
            if e.direction and _sgn(b - a) != e.direction:
                continue
            tau = _locate(p, kind, y, h, e.fn, a, b)
            if hit is None or abs(tau) < abs(hit[1]):
                hit = (i, tau)
        if hit is not None:
            i, tau = hit
            e = evs[i]
            ye = _dp5(p, kind, y, tau)[0] if tau != 0.0 else y
            if e.terminal:
                steps.append(Step(kind, y, tau, ye))
                Vs.append(ye[0]); Cs.append(ye[1]); ss.append(ye[2]); qs.append(ye[3])
                found.append(Event(e.name, ye[0], ye[1], ye[2], ye[3], len(Vs) - 1))
                reason = e.name
                break
            found.append(Event(e.name, ye[0], ye[1], ye[2], ye[3], len(Vs)))
        steps.append(Step(kind, y, h, yn))
        y = yn
        Vs.append(y[0]); Cs.append(y[1]); ss.append(y[2]); qs.append(y[3])
        gold = gnew
        k1 = k7
        h_abs = h_abs * fac
    else:
        raise BudgetError(f"maximum of {max_steps} steps exceeded", location=(y[0], y[1]))

    return Trajectory(
        params=p,
        V=np.array(Vs),
        C=np.array(Cs),
        s=np.array(ss),
        q=np.array(qs),
        steps=steps,
        events=found,
        orientation=int(omega),
        stop_reason=reason,
    )


def _locate(p, kind, y, h, fn, a, b):
    def g(tau):
        if tau == 0.0:
            return a
        if tau == h:
            return b
        yt = _dp5(p, kind, y, tau)[0]
        return fn(yt[0], yt[1])

    return brentq(g, 0.0, h, xtol=1e-15 * max(1.0, abs(h)), rtol=1e-15, maxiter=200)


# ---------------------------------------------------------------------------
# assembly and annotation

def join(parts: Sequence[Trajectory]) -> Trajectory:
    """Concatenate consecutive trajectories, bridging gaps by linear steps."""
    p = parts[0].params
    V, C, s, q, steps, events = [], [], [], [], [], []
    for k, t in enumerate(parts):
        if k > 0:
            y0 = (V[-1], C[-1], s[-1], q[-1])
            y1 = (float(t.V[0]), float(t.C[0]), float(t.s[0]), float(t.q[0]))
            if y0 != y1:
                steps.append(Step("lin", y0, 0.0, y1))
        off = len(V)
        V.extend(t.V.tolist()); C.extend(t.C.tolist()); s.extend(t.s.tolist()); q.extend(t.q.tolist())
        steps.extend(t.steps)
        events.extend(replace(e, index=e.index + off) for e in t.events)
    return Trajectory(p, np.array(V), np.array(C), np.array(s), np.array(q), steps, events,
                      parts[0].orientation, stop_reason=parts[-1].stop_reason)


def shift(traj: Trajectory, ds: float = 0.0, dq: float = 0.0) -> Trajectory:
    """Add constants to the s and q columns (and stored steps)."""
    if ds == 0.0 and dq == 0.0:
        return traj

    def mv(y):
        return (y[0], y[1], y[2] + ds, y[3] + dq)

    steps = [Step(st.kind, mv(st.y0), st.h, mv(st.y1)) for st in traj.steps]
    events = [replace(e, s=e.s + ds, q=e.q + dq) for e in traj.events]
    return replace(traj, s=traj.s + ds, q=traj.q + dq, steps=steps, events=events)


def truncate(traj: Trajectory, coord: str, value: float) -> Trajectory:
    """Initial part of traj up to the first point where coord == value."""
    lo, hi = traj._ranges(coord)
    idx = np.nonzero((lo <= value) & (value <= hi))[0]
    if len(idx) == 0:
        raise AnnotationError(f"{coord} = {value!r} outside the trajectory range")
    i = int(idx[0])
    # sample j is the end of step j - 1 when no gaps are bridged; recover it by matching y0
    st = _partial(traj.params, traj.steps[i], coord, value)
    y0 = traj.steps[i].y0
    cols = np.column_stack((traj.V, traj.C, traj.s, traj.q))
    j = int(np.nonzero(np.all(cols == np.array(y0), axis=1))[0][0])
    keep = cols[: j + 1]
    if st.y1 != y0:
        keep = np.vstack((keep, np.array(st.y1)))
    steps = traj.steps[:i] + ([st] if st.y1 != y0 else [])
    events = [e for e in traj.events if e.index <= j]
    return replace(traj, V=keep[:, 0].copy(), C=keep[:, 1].copy(), s=keep[:, 2].copy(), q=keep[:, 3].copy(),
                   steps=steps, events=events, stop_reason="truncated")


def point_trajectory(params: Params, y: State) -> Trajectory:
    a = lambda v: np.array([v])
    return Trajectory(params, a(y[0]), a(y[1]), a(y[2]), a(y[3]), [])


def attach_x(params: Params, traj: Trajectory, anchor: Tuple[int, float]) -> Trajectory:
    """Set the constant in ln|x| so that x(traj[index]) = x0."""
    idx, x0 = anchor
    if x0 == 0.0 or not math.isfinite(x0):
        raise AnnotationError("x anchor must be finite and nonzero")
    d = np.diff(traj.s)
    if len(d) and not (np.all(d > 0) or np.all(d < 0)):
        raise AnnotationError("ln|x| is not monotone along the branch (D or G changes sign inside)")
    out = replace(traj, s_offset=math.log(abs(x0)) - float(traj.s[idx]), x_sign=1 if x0 > 0 else -1)
    return out


def attach_R(params: Params, traj: Trajectory, anchor: Tuple[int, float]) -> Trajectory:
    idx, R0 = anchor
    if not traj.has_x:
        raise AnnotationError("attach_R requires an x annotation")
    if np.any(traj.V <= -1.0):
        raise PhysicalityError("1 + V <= 0 on the branch")
    if not (R0 > 0.0 and math.isfinite(R0)):
        raise PhysicalityError("density anchor must be positive")
    off = math.log(R0) + math.log1p(float(traj.V[idx])) - float(traj.q[idx])
    return replace(traj, q_offset=off)


def fields_at_lnx(traj: Trajectory, lnx: float) -> Tuple[float, float, float]:
    """(V, C, R) at the point with the given ln|x|."""
    V, C, s, q = traj.at_lnx(lnx)
    return V, C, math.exp(q + traj.q_offset - math.log1p(V))
