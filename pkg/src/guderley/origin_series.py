"""Taylor series V(C) = sum v_l C^l through the star point P0 = (0, 0).

Besides the coefficient recurrence this module carries the two companion
series needed to annotate the passage: ln|x| = ln|C| + h(C) + L0 and the
density accumulator q(C), both analytic in C once V(C) is.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np
from scipy.optimize import brentq

from .errors import ConvergenceError, DomainError, MatchingError
from .phase_plane import Params, critical_points

N_DEFAULT = 40


@dataclass(frozen=True)
class OriginSeries:
    params: Params
    v: Tuple[float, ...]  # v[0] = v_1, ..., v[N-1] = v_N
    N: int
    radius_est: float

    @property
    def v1(self) -> float:
        return self.v[0]

    def coeffs(self) -> np.ndarray:
        """Ascending coefficients including the zero constant term."""
        return np.concatenate(([0.0], np.asarray(self.v)))


def slope_bound_s(params: Params, triple: str) -> float:
    """s = (gamma - 1) C_* / (4 V_*) for the selected triple point."""
    P = critical_points(params).triple(triple)
    return (params.gamma - 1.0) * P.C / (4.0 * P.V)


def v1_interval(params: Params, triple: str) -> Tuple[float, float]:
    return 1.0 / (2.0 * slope_bound_s(params, triple)), 0.0


def _conv(a: Sequence[float], b: Sequence[float], n: int) -> List[float]:
    """Cauchy product truncated to indices 0..n (both sequences start at index 0)."""
    out = [0.0] * (n + 1)
    for i, ai in enumerate(a[: n + 1]):
        if ai:
            for j in range(0, min(len(b), n + 1 - i)):
                out[i + j] += ai * b[j]
    return out


def series_coeffs(params: Params, v1: float, N: int = N_DEFAULT, triple: str = None,
                  check: bool = True) -> OriginSeries:
    """Coefficients from the recurrence v_l = B_l / A_l, l >= 3."""
    if N < 2:
        raise DomainError("N must be at least 2", field="N")
    if check and triple is not None:
        lo, hi = v1_interval(params, triple)
        if not (lo <= v1 <= hi):
            raise DomainError(f"v1 = {v1!r} outside [{lo:.6g}, 0]", field="v1")
    p = params
    m, g, z = p.m, p.gamma, p.z
    mgz = m * g * z
    a1, a2 = p.a1, p.a2
    v = [0.0] * (N + 1)  # index l holds v_l
    v[1] = v1
    v[2] = (-2.0 * m * z - 0.5 * m * (g - 1.0) * (1.0 - g * z) * v1 * v1) / (1.0 + mgz)
    # running convolution powers
    for l in range(3, N + 1):
        v2 = _conv(v[:l], v[:l], l)
        v3 = _conv(v2, v[:l], l)
        v4 = _conv(v3, v[:l], l)
        B = (
            (1.0 - l * a1 / 4.0) * v4[l]
            + (3.0 + mgz - l * (3.0 * a1 - a2) / 3.0) * v3[l]
            + (3.0 + 2.0 * mgz - l * (1.0 + mgz + 2.0 * a1 - a2) / 2.0) * v2[l]
            + ((l - 2) / 2.0 - 1.0 - m) * v2[l - 2]
            + ((1.0 + m * z) * (l - 2) - m - 1.0 - 2.0 * m * z) * v[l - 2]
        )
        A = (1.0 + mgz) * (l - 1)
        v[l] = B / A
    return OriginSeries(p, tuple(v[1:]), N, _radius(v[1:]))


def _radius(v: Sequence[float]) -> float:
    """Root-test estimate 1 / limsup |v_l|^(1/l) over the last 10 terms."""
    tail = [(l, abs(c)) for l, c in enumerate(v, start=1) if c != 0.0][-10:]
    if not tail:
        return math.inf
    r = max(c ** (1.0 / l) for l, c in tail)
    return math.inf if r == 0.0 else 1.0 / r


def series_eval(series: OriginSeries, C: float, strict: bool = True) -> Tuple[float, float]:
    """(V, dV/dC) by Horner."""
    if strict and abs(C) >= series.radius_est:
        raise ConvergenceError(f"|C| = {abs(C):.3g} is beyond the estimated radius {series.radius_est:.3g}")
    val = 0.0
    der = 0.0
    for c in reversed(series.v):
        der = der * C + val
        val = val * C + c
    # val = sum v_l C^(l-1); der = d/dC of that
    return val * C, val + C * der


def tail_bound(series: OriginSeries, C: float, k: int = 3) -> float:
    """Size of the last k retained terms, a proxy for the truncation error."""
    return sum(abs(c) * abs(C) ** l for l, c in enumerate(series.v, start=1) if l > series.N - k)


def handoff_radius(series: OriginSeries, tol: float = 1e-12) -> float:
    """Largest |C| with tail bound < tol, capped at 0.3 radius_est."""
    cap = 0.3 * series.radius_est
    if tail_bound(series, cap) < tol:
        return cap
    lo, hi = 0.0, cap
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if tail_bound(series, mid) < tol:
            lo = mid
        else:
            hi = mid
    return lo


def ode_residual(series: OriginSeries, C: float) -> float:
    """V'(C) F (1+V) - G (1+V) for the truncated series."""
    p = series.params
    V, dV = series_eval(series, C, strict=False)
    m, z, lam = p.m, p.z, p.lam
    W = 1.0 + V
    C2 = C * C
    G = C2 * ((m + 1) * V + 2 * m * z) - V * W * (lam + V)
    F = C * (C2 * (1.0 + m * z / W) - (p.a1 * W * W - p.a2 * W + p.a3))
    return dV * F * W - G * W


def match_v1(params: Params, c1: float, triple: str = None, tol: float = 1e-9) -> float:
    """v1 = 1/c1 for an incoming slope c1 = dC/dV, validated against [1/(2s), 0)."""
    if not math.isfinite(c1) or c1 >= 0.0:
        raise MatchingError(f"incoming slope c1 = {c1!r} must be finite and negative")
    v1 = 1.0 / c1
    if triple is not None:
        lo, _ = v1_interval(params, triple)
        if v1 < lo * (1.0 + tol):
            raise MatchingError(f"v1 = {v1:.6g} below the admissible bound {lo:.6g}")
    return v1


def fit_v1(params: Params, C_h: float, V_h: float, triple: str, N: int = N_DEFAULT) -> float:
    """Solve series(v1)(C_h) = V_h for v1, starting from the chord slope V_h/C_h."""
    lo, _ = v1_interval(params, triple)
    if C_h == 0.0:
        raise MatchingError("handoff point must have C != 0")

    def r(v1):
        return series_eval(series_coeffs(params, v1, N, check=False), C_h, strict=False)[0] - V_h

    v0 = V_h / C_h
    if not (v0 < 0.0):
        raise MatchingError(f"chord slope {v0:.6g} at the handoff point is not negative")
    a, b = v0, v0
    ra = rb = r(v0)
    for _ in range(40):
        if ra * rb <= 0.0:
            break
        a, b = a * 1.1, b / 1.1
        ra, rb = r(a), r(b)
    else:
        raise MatchingError(f"no v1 near {v0:.4g} reproduces V = {V_h:.6g} at C = {C_h:.4g}")
    v1 = v0 if ra == 0.0 == rb else brentq(r, a, b, xtol=1e-15, rtol=1e-15)
    if not (lo <= v1 < 0.0):
        raise MatchingError(f"fitted v1 = {v1:.8g} outside the admissible interval [{lo:.8g}, 0)")
    return v1


# ---------------------------------------------------------------------------
# companion series for x and R

def _series_div(a: np.ndarray, b: np.ndarray, n: int) -> np.ndarray:
    out = np.zeros(n + 1)
    for k in range(n + 1):
        acc = a[k] if k < len(a) else 0.0
        for j in range(1, min(k, len(b) - 1) + 1):
            acc -= b[j] * out[k - j]
        out[k] = acc / b[0]
    return out


def _mul(a, b, n):
    return np.convolve(a[: n + 1], b[: n + 1])[: n + 1]


@dataclass(frozen=True)
class CompanionSeries:
    """ln|x| = ln|C| + sum_k h_k C^k + L0 and q = sum_k r_k C^k + q0."""

    h: np.ndarray  # h[0] = 0
    r: np.ndarray  # r[0] = 0

    def h_at(self, C: float) -> float:
        return float(np.polynomial.polynomial.polyval(C, self.h))

    def q_at(self, C: float) -> float:
        return float(np.polynomial.polynomial.polyval(C, self.r))


def companion_series(series: OriginSeries) -> CompanionSeries:
    p = series.params
    n = series.N
    m, z, lam = p.m, p.z, p.lam
    v = series.coeffs()[: n + 1]
    one = np.zeros(n + 1); one[0] = 1.0
    Cs = np.zeros(n + 1); Cs[1] = 1.0
    C2 = np.zeros(n + 1); C2[2] = 1.0
    W = one + v
    W2 = _mul(W, W, n)
    W3 = _mul(W2, W, n)
    D = W2 - C2
    # (1+V) f2 - C^2 (1+V+mz)
    den = p.a1 * W3 - p.a2 * W2 + p.a3 * W - _mul(C2, W + m * z * one, n)
    psi = _series_div(lam * _mul(D, W, n), den, n)
    # h' = (psi - 1)/C
    h = np.zeros(n + 1)
    for k in range(1, n + 1):
        h[k] = psi[k] / k
    # dq/dC = (m+1)/lam * (V/C) * psi / (1+V) / ... times 1/C * C: V/C is analytic
    VoC = np.zeros(n + 1)
    VoC[: n] = v[1: n + 1]
    chi = (m + 1) / lam * _series_div(_mul(VoC, psi, n), W, n)
    r = np.zeros(n + 1)
    for k in range(1, n + 1):
        r[k] = chi[k - 1] / k
    return CompanionSeries(h, r)
