"""Similarity parameters, the phase-plane functions D, F, G, critical points
and the F = 0 / G = 0 root branches.

Everything is indexed by z = (lambda - 1)/(m gamma); lambda is kept alongside
for convenience.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple, Optional, Tuple

from scipy.optimize import brentq

from .errors import DomainError, PoleError

# gamma_* is only known to lie in (5/3, 1.71); callers may override it.
GAMMA_STAR = 5.0 / 3.0

SQRT2 = math.sqrt(2.0)


class PhasePoint(NamedTuple):
    V: float
    C: float


@dataclass(frozen=True)
class Params:
    gamma: float
    m: int
    lam: float
    z: float
    a1: float
    a2: float
    a3: float

    @property
    def mgz(self) -> float:
        return self.m * self.gamma * self.z


def _check_gamma_m(gamma, m):
    if not (isinstance(m, int) or float(m).is_integer()) or int(m) not in (1, 2):
        raise DomainError(f"m must be 1 or 2, got {m!r}", field="m")
    if not (math.isfinite(gamma) and 1.0 < gamma <= 3.0):
        raise DomainError(f"gamma must lie in (1, 3], got {gamma!r}", field="gamma")


def _build(gamma, m, z, lam):
    a1 = 1.0 + m * (gamma - 1.0) / 2.0
    a2 = (m * (gamma - 1.0) + m * gamma * z * (gamma - 3.0)) / 2.0
    a3 = m * gamma * z * (gamma - 1.0) / 2.0
    return Params(float(gamma), int(m), float(lam), float(z), a1, a2, a3)


def make_params(gamma: float, m: int, lam: float) -> Params:
    _check_gamma_m(gamma, m)
    if not (math.isfinite(lam) and lam > 1.0):
        raise DomainError(f"lambda must exceed 1, got {lam!r}", field="lambda")
    m = int(m)
    z = (lam - 1.0) / (m * gamma)
    return _build(gamma, m, z, lam)


def make_params_z(gamma: float, m: int, z: float) -> Params:
    """Same as make_params but parametrized by z."""
    _check_gamma_m(gamma, m)
    if not (math.isfinite(z) and z > 0.0):
        raise DomainError(f"z must be positive, got {z!r}", field="z")
    m = int(m)
    return _build(gamma, m, z, 1.0 + m * gamma * z)


# ---------------------------------------------------------------------------
# D, F, G

def eval_DFG(params: Params, point) -> Tuple[float, float, float]:
    V, C = point
    if V == -1.0:
        raise PoleError("f1 has a pole at V = -1")
    p = params
    m, z, lam = p.m, p.z, p.lam
    W = 1.0 + V
    C2 = C * C
    D = W * W - C2
    G = C2 * ((m + 1) * V + 2 * m * z) - V * W * (lam + V)
    F = C * (C2 * (1.0 + m * z / W) - (p.a1 * W * W - p.a2 * W + p.a3))
    return D, F, G


def jacobian_GF(params: Params, V: float, C: float):
    """Analytic Jacobian of the desingularized field (G, F)."""
    p = params
    m, z, lam = p.m, p.z, p.lam
    W = 1.0 + V
    C2 = C * C
    g1 = (m + 1) * V + 2 * m * z
    dg2 = W * (lam + V) + V * (lam + V) + V * W
    f1 = 1.0 + m * z / W
    df1 = -m * z / (W * W)
    f2 = p.a1 * W * W - p.a2 * W + p.a3
    df2 = 2.0 * p.a1 * W - p.a2
    G_V = C2 * (m + 1) - dg2
    G_C = 2.0 * C * g1
    F_V = C * (C2 * df1 - df2)
    F_C = 3.0 * C2 * f1 - f2
    return ((G_V, G_C), (F_V, F_C))


def w_of_z(gamma: float, z: float) -> float:
    # factored form: exact zero at z = z_M and no cancellation near it
    w2 = (1.0 - z / z_M(gamma)) * (1.0 - (SQRT2 - math.sqrt(gamma)) ** 2 * z)
    if w2 < 0.0:
        if w2 > -1e-14:
            return 0.0
        raise DomainError(f"z = {z!r} exceeds z_M(gamma); w(z)^2 = {w2:.3e} < 0", field="z")
    return math.sqrt(w2)


def triple_V(gamma: float, z: float):
    w = w_of_z(gamma, z)
    base = -1.0 + (gamma - 2.0) * z
    return 0.5 * (base - w), 0.5 * (base + w), w


def p1_point(gamma: float) -> PhasePoint:
    return PhasePoint(-2.0 / (gamma + 1.0), math.sqrt(2.0 * gamma * (gamma - 1.0)) / (gamma + 1.0))


@dataclass(frozen=True)
class CriticalPointSet:
    P0: PhasePoint
    P1: PhasePoint
    P2: PhasePoint
    P3: PhasePoint
    P4: PhasePoint
    P5: PhasePoint
    P6: PhasePoint
    P7: PhasePoint
    P8: PhasePoint
    P9: PhasePoint
    Vbar_inf: float
    w: float
    ring: PhasePoint
    ringC: float
    ring_name: str

    def triple(self, name: str) -> PhasePoint:
        if name not in ("P6", "P8"):
            raise DomainError(f"triple point must be 'P6' or 'P8', got {name!r}", field="triple")
        return getattr(self, name)


def critical_points(params: Params) -> CriticalPointSet:
    g, m, z, lam = params.gamma, params.m, params.z, params.lam
    V6, V8, w = triple_V(g, z)
    P6 = PhasePoint(V6, 1.0 + V6)
    P8 = PhasePoint(V8, 1.0 + V8)
    P7 = PhasePoint(V6, -P6.C)
    P9 = PhasePoint(V8, -P8.C)
    V4 = -2.0 * lam / (g + 1.0 + m * (g - 1.0))
    ratio = V4 * (1.0 + V4) * (lam + V4) / ((m + 1) * V4 + 2 * m * z)
    C4 = math.sqrt(ratio) if ratio >= 0.0 else float("nan")
    P4 = PhasePoint(V4, C4)
    P5 = PhasePoint(V4, -C4)
    if math.isfinite(C4) and P9.C >= P5.C:
        ring, name = P5, "P5"
    else:
        ring, name = P9, "P9"
    return CriticalPointSet(
        P0=PhasePoint(0.0, 0.0),
        P1=p1_point(g),
        P2=PhasePoint(-1.0, 0.0),
        P3=PhasePoint(-lam, 0.0),
        P4=P4,
        P5=P5,
        P6=P6,
        P7=P7,
        P8=P8,
        P9=P9,
        Vbar_inf=-2.0 * m * z / (m + 1),
        w=w,
        ring=ring,
        ringC=ring.C,
        ring_name=name,
    )


# ---------------------------------------------------------------------------
# distinguished parameter values

def z_M(gamma: float) -> float:
    return 1.0 / (SQRT2 + math.sqrt(gamma)) ** 2


def z_g(gamma: float, m: int) -> float:
    if m == 1:
        return (math.sqrt(gamma * gamma + (gamma - 1.0) ** 2) - gamma) / (gamma * (gamma - 1.0))
    a = 2.0 * gamma * gamma - gamma + 1.0
    b = 4.0 * gamma * (gamma - 1.0) + 8.0 / 3.0
    return (math.sqrt(a * a + 2.0 * gamma * (gamma - 1.0) * b) - a) / (gamma * b)


def z_0(gamma: float) -> float:
    return (22.0 - 5.0 * gamma) / 125.0


# polynomials whose root in the bracket is gamma_u
_GU_POLY = {
    1: ((25, -245, -546, 5016, -15625, 15625), (79 / 50, 159 / 100)),
    2: ((450, -4860, 6432, 39111, -207817, 359749, -275503, 110250), (77 / 50, 31 / 20)),
}


def _horner(coeffs, x):
    acc = 0.0
    for c in coeffs:
        acc = acc * x + c
    return acc


@lru_cache(maxsize=None)
def gamma_u(m: int) -> float:
    coeffs, (lo, hi) = _GU_POLY[int(m)]
    return brentq(lambda g: _horner(coeffs, g), lo, hi, xtol=1e-15, rtol=1e-15)


@lru_cache(maxsize=None)
def gamma_g(m: int) -> float:
    """Root in (5/2, 3) of V4(z_M) = V6(z_M) = V8(z_M)."""
    m = int(m)

    def h(g):
        zm = z_M(g)
        V4 = -2.0 * (1.0 + m * g * zm) / (g + 1.0 + m * (g - 1.0))
        return V4 + SQRT2 / (SQRT2 + math.sqrt(g))

    return brentq(h, 2.5, 3.0, xtol=1e-15, rtol=1e-15)


Interval = Optional[Tuple[float, float]]


@dataclass(frozen=True)
class SpecialZ:
    z_M: float
    z_g: float
    z_0: float
    gamma_g: float
    gamma_u: float
    Zring_P6: Interval
    Zring_P8: Interval

    def z_s(self) -> float:
        return self.z_0 if self.z_g < self.z_0 else self.z_g

    def ring_interval(self, triple: str) -> Interval:
        return self.Zring_P6 if triple == "P6" else self.Zring_P8


def special_z(gamma: float, m: int, gamma_star: float = GAMMA_STAR) -> SpecialZ:
    """Intervals are half-open (lo, hi]; None where the case does not apply."""
    _check_gamma_m(gamma, m)
    m = int(m)
    zm = z_M(gamma)
    zg = z_g(gamma, m)
    zr6 = (zg, zm) if gamma <= 2.0 else None
    if gamma_star < gamma <= 1.0 + SQRT2:
        zr8 = ((math.sqrt(5.0) - 1.0) / (2.0 * (1.0 + math.sqrt(5.0) + gamma)), zm)
    elif gamma > 1.0 + SQRT2:
        zr8 = ((math.sqrt(33.0) - 3.0) / (6.0 + 2.0 * math.sqrt(33.0) + 4.0 * gamma), zm)
    else:
        zr8 = None
    return SpecialZ(zm, zg, z_0(gamma), gamma_g(m), gamma_u(m), zr6, zr8)


# ---------------------------------------------------------------------------
# root branches

def _polish(f, df, x, n=3):
    for _ in range(n):
        d = df(x)
        if d == 0.0:
            break
        step = f(x) / d
        x -= step
        if abs(step) < 1e-17 * max(1.0, abs(x)):
            break
    return x


def VF_plus_domain(params: Params) -> Tuple[float, float]:
    """[lower, C9): the domain of the F = 0 branch V_F^+."""
    cp = critical_points(params)
    return -math.sqrt(params.lam / (1.0 + params.m * params.z)), cp.P9.C


def branch_VF_plus(params: Params, C: float) -> float:
    lo, hi = VF_plus_domain(params)
    if not (lo <= C < hi):
        raise DomainError(f"C = {C!r} outside the V_F^+ domain [{lo:.6g}, {hi:.6g})", field="C")
    p = params
    mz = p.m * p.z
    C2 = C * C
    V8 = critical_points(params).P8.V

    # (1+V) f2 - C^2 (1+V+mz) = 0, a cubic in V
    def h(V):
        W = 1.0 + V
        return W * (p.a1 * W * W - p.a2 * W + p.a3) - C2 * (W + mz)

    def dh(V):
        W = 1.0 + V
        return 3.0 * p.a1 * W * W - 2.0 * p.a2 * W + p.a3 - C2

    if C == lo:
        return 0.0
    V = brentq(h, V8, 0.0, xtol=1e-16, rtol=1e-15)
    return _polish(h, dh, V)


def _G_cubic(params: Params, C: float):
    # -G = V(V+1)(V+lam) - C^2((m+1)V + 2mz)
    m, z, lam = params.m, params.z, params.lam
    C2 = C * C

    def q(V):
        return V * (V + 1.0) * (V + lam) - C2 * ((m + 1) * V + 2 * m * z)

    def dq(V):
        return 3.0 * V * V + 2.0 * (1.0 + lam) * V + lam - C2 * (m + 1)

    return q, dq


def branch_VG(params: Params, C: float) -> float:
    """Middle root of G = 0, in (-1, Vbar_inf) for C < 0."""
    if not (C < 0.0 and math.isfinite(C)):
        raise DomainError(f"V_G requires C < 0, got {C!r}", field="C")
    q, dq = _G_cubic(params, C)
    vbar = -2.0 * params.m * params.z / (params.m + 1)
    V = brentq(q, -1.0, vbar, xtol=1e-16, rtol=1e-15)
    return _polish(q, dq, V)


def branch_VG_plus(params: Params, C: float) -> float:
    """Largest root of G = 0, positive for C < 0."""
    if not (C < 0.0 and math.isfinite(C)):
        raise DomainError(f"V_G^+ requires C < 0, got {C!r}", field="C")
    q, dq = _G_cubic(params, C)
    hi = 1.0
    while q(hi) <= 0.0:
        hi *= 2.0
    V = brentq(q, 0.0, hi, xtol=1e-16, rtol=1e-15)
    return _polish(q, dq, V)


def branch_VG_minus(params: Params, C: float) -> float:
    """Smallest root, by deflation from the sum of roots."""
    return -(1.0 + params.lam) - branch_VG(params, C) - branch_VG_plus(params, C)


def C_F(params: Params, V: float) -> float:
    """Lower F = 0 curve C = -sqrt(f2/f1)."""
    p = params
    W = 1.0 + V
    if W == 0.0:
        raise PoleError("f1 has a pole at V = -1")
    f1 = 1.0 + p.m * p.z / W
    f2 = p.a1 * W * W - p.a2 * W + p.a3
    r = f2 / f1
    if r < 0.0:
        raise DomainError(f"f2/f1 < 0 at V = {V!r}", field="V")
    return -math.sqrt(r)
