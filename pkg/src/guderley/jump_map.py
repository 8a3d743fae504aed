"""Self-similar Rankine-Hugoniot map between the regions S_U and S_L."""

from __future__ import annotations

import math
from enum import Enum

from .errors import DomainError, RegionError
from .phase_plane import Params, PhasePoint

_EDGE = 1e-13


class RegionTag(str, Enum):
    S_U = "S_U"
    S_L = "S_L"
    other = "other"


def _gamma(p) -> float:
    return p.gamma if isinstance(p, Params) else float(p)


def region(params, point) -> RegionTag:
    g = _gamma(params)
    V, C = point
    W = 1.0 + V
    if C < 0.0 and -math.sqrt((g - 1.0) / (2.0 * g)) * C * (1.0 - _EDGE) <= W < -C:
        return RegionTag.S_L
    if C <= 0.0 and W > -C:
        return RegionTag.S_U
    return RegionTag.other


def _in_SU(g, V, C, tol=_EDGE):
    # closed on the sonic line (fixed points), per boundary semantics
    return C <= tol and (1.0 + V) + C >= -tol * max(1.0, abs(C))


def _jump(g, V, C):
    W = 1.0 + V
    J1 = (g - 1.0) / (g + 1.0) * W + 2.0 * C * C / ((g + 1.0) * W) - 1.0
    W1 = 1.0 + J1
    arg = C * C + 0.5 * (g - 1.0) * (W * W - W1 * W1)
    J2 = -math.sqrt(max(arg, 0.0))
    return J1, J2


def jump(params, pre) -> PhasePoint:
    g = _gamma(params)
    V, C = pre
    if not _in_SU(g, V, C):
        raise RegionError(f"pre-shock state ({V!r}, {C!r}) is not in S_U")
    if 1.0 + V <= 0.0:
        raise RegionError("jump requires 1 + V > 0")
    return PhasePoint(*_jump(g, V, C))


def line_image_kappa(gamma: float, kappa: float) -> float:
    if not (0.0 <= kappa < 1.0):
        raise DomainError(f"kappa must lie in [0, 1), got {kappa!r}", field="kappa")
    return _image(gamma, kappa)


def _image(g, k):
    return math.sqrt(max(2.0 * g - (g - 1.0) * k * k, 0.0) / (g - 1.0 + 2.0 * k * k))


def jump_inverse(params, post) -> PhasePoint:
    """Closed form: the map sends C = -k(1+V) to C = -I(k)(1+V), and I is an
    involution, so k = I(k_post); then 1+V follows from the J1 formula on that
    line."""
    g = _gamma(params)
    V, C = post
    W = 1.0 + V
    if W <= 0.0:
        raise RegionError("jump_inverse requires 1 + V > 0")
    kmax = math.sqrt(2.0 * g / (g - 1.0))
    k_post = -C / W
    tol = 1e-12
    if not (C <= 0.0 and 1.0 - tol <= k_post <= kmax * (1.0 + tol)):
        raise RegionError(f"post-shock state ({V!r}, {C!r}) is not in S_L")
    k_post = min(max(k_post, 1.0), kmax)
    k = _image(g, k_post)
    W_pre = W * (g + 1.0) / (g - 1.0 + 2.0 * k * k)
    V_pre, C_pre = W_pre - 1.0, -k * W_pre
    # one Newton pass on the forward map cleans up rounding
    for _ in range(2):
        J1, J2 = _jump(g, V_pre, C_pre)
        r1, r2 = J1 - V, J2 - C
        if abs(r1) + abs(r2) < 1e-16:
            break
        h = 1e-7
        a11 = (_jump(g, V_pre + h, C_pre)[0] - _jump(g, V_pre - h, C_pre)[0]) / (2 * h)
        a21 = (_jump(g, V_pre + h, C_pre)[1] - _jump(g, V_pre - h, C_pre)[1]) / (2 * h)
        a12 = (_jump(g, V_pre, C_pre + h)[0] - _jump(g, V_pre, C_pre - h)[0]) / (2 * h)
        a22 = (_jump(g, V_pre, C_pre + h)[1] - _jump(g, V_pre, C_pre - h)[1]) / (2 * h)
        det = a11 * a22 - a12 * a21
        if det == 0.0 or not math.isfinite(det):
            break
        dV = (r1 * a22 - r2 * a12) / det
        dC = (a11 * r2 - a21 * r1) / det
        if abs(dV) + abs(dC) > 1e-8:
            break
        V_pre -= dV
        C_pre = min(C_pre - dC, 0.0)
    return PhasePoint(V_pre, C_pre)


def entropy_check(params, pre) -> bool:
    V, C = pre
    return C * C < (1.0 + V) ** 2
