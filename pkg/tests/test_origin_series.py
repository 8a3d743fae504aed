from __future__ import annotations

import pytest
import sympy as sp

from guderley.errors import DomainError, MatchingError
from guderley.origin_series import (
    fit_v1,
    handoff_radius,
    match_v1,
    ode_residual,
    series_coeffs,
    series_eval,
    tail_bound,
    v1_interval,
)
from guderley.phase_plane import make_params_z


def _sympy_coeffs(g, m, z, v1, L=6):
    """v_2..v_L from an undetermined-coefficient ansatz in the polynomial ODE."""
    lam = 1 + m * g * z
    a1 = 1 + sp.Rational(m) * (g - 1) / 2
    a2 = (m * (g - 1) + m * g * z * (g - 3)) / 2
    a3 = m * g * z * (g - 1) / 2
    C = sp.Symbol("C")
    vs = sp.symbols(f"v2:{L + 1}")
    V = v1 * C + sum(vs[i] * C ** (i + 2) for i in range(L - 1))
    W = 1 + V
    f2 = a1 * W ** 2 - a2 * W + a3
    G = C ** 2 * ((m + 1) * V + 2 * m * z) - V * W * (lam + V)
    R = sp.expand(sp.diff(V, C) * C * (C ** 2 * (W + m * z) - f2 * W) - G * W)
    sol = {}
    for l in range(2, L + 1):
        c = sp.expand(R.coeff(C, l).subs(sol))
        sol[vs[l - 2]] = sp.solve(c, vs[l - 2])[0]
    return [v1] + [sol[v] for v in vs]


@pytest.mark.parametrize(
    "g, m, z, v1",
    [
        (sp.Rational(7, 5), 2, sp.Rational(1, 10), sp.Rational(-3, 10)),
        (sp.Rational(5, 2), 1, sp.Rational(1, 20), sp.Rational(-1, 2)),
        (sp.Rational(3), 2, sp.Rational(1, 16), sp.Rational(-1, 7)),
    ],
)
def test_recurrence_against_ansatz(g, m, z, v1):
    want = _sympy_coeffs(g, m, z, v1)
    ser = series_coeffs(make_params_z(float(g), m, float(z)), float(v1), 10)
    for got, exp in zip(ser.v[:6], want):
        assert got == pytest.approx(float(exp), rel=1e-12, abs=1e-15)


def test_v2_with_zero_v1():
    ser = series_coeffs(make_params_z(1.4, 2, 0.1), 0.0, 4)
    assert ser.v[1] == pytest.approx(-0.3125, abs=1e-15)


@pytest.mark.parametrize("N", [3, 4, 5])
def test_residual_drops_with_order(N):
    # past N ~ 10 the residual at C = 0.01 sits at the rounding floor
    p = make_params_z(1.4, 2, 0.1)
    r1 = abs(ode_residual(series_coeffs(p, -0.3, N), 0.01))
    r2 = abs(ode_residual(series_coeffs(p, -0.3, 2 * N), 0.01))
    assert r2 <= 1e-3 * r1


def test_eval_derivative_matches_differences():
    ser = series_coeffs(make_params_z(1.4, 2, 0.1), -0.3, 30)
    C, h = 0.02, 1e-6
    _, d = series_eval(ser, C)
    fd = (series_eval(ser, C + h)[0] - series_eval(ser, C - h)[0]) / (2 * h)
    assert d == pytest.approx(fd, rel=1e-8)


def test_handoff_radius_respects_tail():
    ser = series_coeffs(make_params_z(1.4, 2, 0.1), -0.3, 40)
    d = handoff_radius(ser)
    assert 0.0 < d <= 0.3 * ser.radius_est
    assert tail_bound(ser, d) < 1e-12


def test_fit_recovers_v1():
    p = make_params_z(1.4, 2, 0.1)
    lo, _ = v1_interval(p, "P6")
    v1 = 0.5 * lo
    C = 0.01
    V = series_eval(series_coeffs(p, v1, 40), C)[0]
    assert fit_v1(p, C, V, "P6") == pytest.approx(v1, rel=1e-12)


def test_v1_validation():
    p = make_params_z(1.4, 2, 0.1)
    lo, _ = v1_interval(p, "P6")
    with pytest.raises(MatchingError):
        match_v1(p, 1.0, "P6")
    with pytest.raises(MatchingError):
        match_v1(p, 1.0 / (2.0 * lo), "P6")
    with pytest.raises(DomainError):
        series_coeffs(p, 2.0 * lo, 10, triple="P6")
    with pytest.raises(DomainError):
        series_coeffs(p, -0.1, 1)
