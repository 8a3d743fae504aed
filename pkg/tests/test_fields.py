from __future__ import annotations

import math

import numpy as np
import pytest

from guderley.errors import DomainError
from guderley.fields import (
    BRANCH_AHEAD,
    BRANCH_FAR,
    CSV_COLUMNS,
    ShockStates,
    default_grid,
    euler_residual,
    evaluate,
    quiescent_residual,
    rh_residual_physical,
    sample,
    shock_radius,
)


@pytest.mark.parametrize("t", [-1.0, -0.3, 0.4, 2.0])
def test_rankine_hugoniot_physical(any_solution, t):
    res = rh_residual_physical(any_solution, t)
    assert max(res["mass"], res["momentum"], res["energy"]) < 1e-8


def test_euler_second_order(any_solution):
    rep = euler_residual(any_solution, default_grid(any_solution))
    assert rep.used > 30
    assert all(o > 1.8 for o in rep.orders), rep
    assert rep.norms[-1] < rep.norms[0]


def test_quiescent_residual_vanishes(sol14):
    assert quiescent_residual(sol14) == 0.0
    with pytest.raises(DomainError):
        quiescent_residual(sol14, t=-0.1, r=1.0)


def test_branch_joints_are_continuous(any_solution):
    sol = any_solution
    for x in sol._bounds.values():
        a = sol.profile(x * (1 - 1e-12))
        b = sol.profile(x * (1 + 1e-12))
        assert a[3] != b[3]
        assert a[0] == pytest.approx(b[0], rel=1e-8, abs=1e-10)
        assert a[1] == pytest.approx(b[1], rel=1e-8, abs=1e-10)
        assert a[2] == pytest.approx(b[2], rel=1e-8)


def test_density_positive_and_decaying(any_solution):
    sol = any_solution
    xs = np.concatenate((np.linspace(-1.0, -1e-3, 50), np.linspace(1e-3, 1.0, 50) * sol.x_H,
                         sol.x_H * np.geomspace(1.001, 1e6, 50)))
    R = np.array([sol.profile(float(x))[2] for x in xs])
    assert np.all(R > 0.0)
    far = [sol.profile(sol.x_H * 10.0 ** k)[2] for k in (3, 6, 9, 12)]
    assert np.all(np.diff(far) < 0.0)
    assert sol.profile(sol.x_H * 1e12)[3] == BRANCH_FAR


def test_fields_continuous_through_collapse(any_solution):
    a = evaluate(any_solution, -1e-12, 1.0)
    b = evaluate(any_solution, 0.0, 1.0)
    c = evaluate(any_solution, 1e-12, 1.0)
    for f in ("rho", "u", "c", "p"):
        assert getattr(a, f) == pytest.approx(getattr(b, f), rel=1e-9)
        assert getattr(c, f) == pytest.approx(getattr(b, f), rel=1e-9)


@pytest.mark.parametrize("alpha", [2.0, 10.0])
def test_self_similar_scaling(sol14, alpha):
    lam = sol14.lam
    for t, r in ((-0.5, 0.8), (0.3, 0.7), (1.0, 0.4), (-2.0, 0.5)):
        a = evaluate(sol14, t, r)
        b = evaluate(sol14, alpha ** lam * t, alpha * r)
        k = alpha ** (1.0 - lam)
        assert b.rho == pytest.approx(a.rho, rel=1e-10)
        assert b.u == pytest.approx(k * a.u, rel=1e-10, abs=1e-300)
        assert b.c == pytest.approx(k * a.c, rel=1e-10, abs=1e-300)


def test_shock_radius(any_solution):
    sol = any_solution
    assert shock_radius(sol, sol.x_H) == pytest.approx(1.0, rel=1e-15)
    assert shock_radius(sol, -1.0) == 1.0
    with pytest.raises(DomainError):
        shock_radius(sol, 0.0)


def test_states_on_the_shocks(sol14):
    s = evaluate(sol14, -1.0, 1.0)
    assert isinstance(s, ShockStates)
    assert s.ahead.branch == BRANCH_AHEAD and s.ahead.u == 0.0
    assert s.behind.rho == pytest.approx((sol14.gamma + 1) / (sol14.gamma - 1), rel=1e-14)
    s = evaluate(sol14, sol14.x_H, 1.0)
    assert isinstance(s, ShockStates)
    assert s.behind.rho > s.ahead.rho


def test_invalid_points(sol14):
    with pytest.raises(DomainError):
        evaluate(sol14, 0.5, 0.0)
    with pytest.raises(DomainError):
        evaluate(sol14, math.nan, 1.0)
    with pytest.raises(DomainError):
        sol14.profile(math.inf)


def test_sample_rows(sol14):
    rows = sample(sol14, [-1.0, 0.0, 1.0], [0.5, 1.0])
    assert len(rows) == 6 and all(len(r) == len(CSV_COLUMNS) for r in rows)
    assert all(r[3] > 0.0 for r in rows)
