from __future__ import annotations

import math

import numpy as np
import pytest

from guderley.continuation import barrier_checks, slope_bound_holds, x_slope_profile
from guderley.phase_plane import critical_points


def test_annulus_agreement(any_solution):
    ps = any_solution.passage
    assert ps.annulus_in < 1e-8
    assert ps.annulus_out < 1e-8
    assert ps.L0_spread < 1e-8


def test_x_is_continuous_into_the_series(any_solution):
    ps = any_solution.passage
    x_ode = -math.exp(float(ps.inbound.lnx[-1]))
    assert ps.x_of_C(float(ps.inbound.C[-1])) == pytest.approx(x_ode, rel=1e-9)
    # across P0, x changes sign with C and the outbound starts at x = -x(C_h)
    assert math.exp(float(ps.outbound.s[0])) == pytest.approx(ps.x_of_C(-float(ps.inbound.C[-1])), rel=1e-12)


def test_outbound_slope_bound(any_solution):
    assert slope_bound_holds(any_solution.passage, any_solution.triple)


def test_slope_V_over_x_converges(any_solution):
    sol = any_solution
    x, Vx, dVdx = x_slope_profile(sol.params, sol.collapse)
    d = np.abs(np.diff(Vx))
    assert np.all(np.diff(d) < 0.0)
    # geometric tail bound on the distance to the limit
    r = d[-1] / d[-2]
    limit = sol.passage.slope_limit
    assert abs(Vx[-1] - limit) <= 1.5 * d[-1] * r / (1.0 - r)
    assert abs(dVdx[-1] - limit) < 10.0 * abs(Vx[-1] - limit)


def test_sonic_endpoint(any_solution):
    sol = any_solution
    cp = critical_points(sol.params)
    ext = sol.extension
    assert ext.Cs < cp.ringC
    if sol.triple == "P8":
        assert ext.Cs < cp.P9.C
    assert ext.Cs == pytest.approx(-(1.0 + ext.Vs), abs=1e-12)
    assert ext.xs > 0.0 and math.isfinite(ext.xs)


def test_barriers(any_solution):
    sol = any_solution
    checks = barrier_checks(sol.params, sol.triple, sol.extension, sol.passage.inbound)
    assert len(checks) >= 2
    assert all(checks.values()), checks


def test_terminal_constants(any_solution):
    T = any_solution.terminal
    assert T.R0 > 0.0 and T.c1 > 0.0
    assert T.v1 == pytest.approx(any_solution.passage.slope_limit, rel=1e-15)
