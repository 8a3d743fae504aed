from __future__ import annotations

import math

import numpy as np
import pytest
from scipy.integrate import solve_ivp

from guderley.errors import AnnotationError, SingularityError
from guderley.ode_engine import (
    C_level,
    V_level,
    attach_x,
    integrate_phase,
    join,
    line_cross,
    sonic_upper,
    truncate,
)
from guderley.phase_plane import eval_DFG, make_params_z

P = make_params_z(1.4, 2, 0.1)
A = (-0.5, 0.4)


def _oracle(p, start, V_end):
    """dC/dV = F/G and ds/dV = -lambda D/G with a tight DOP853 solve."""

    def rhs(V, y):
        D, F, G = eval_DFG(p, (V, y[0]))
        return [F / G, -p.lam * D / G]

    r = solve_ivp(rhs, (start[0], V_end), [start[1], 0.0], method="DOP853", rtol=1e-13, atol=1e-15)
    return r.y[0, -1], r.y[1, -1]


def test_against_scipy():
    tr = integrate_phase(P, A, (1.0, 0.0), [V_level(-0.3)])
    assert tr.stop_reason == "stop"
    C, s = _oracle(P, A, -0.3)
    assert tr.V[-1] == pytest.approx(-0.3, abs=1e-13)
    assert tr.C[-1] == pytest.approx(C, abs=1e-10)
    assert tr.s[-1] == pytest.approx(s, abs=1e-10)


def test_dense_output_against_scipy():
    tr = integrate_phase(P, A, (1.0, 0.0), [V_level(-0.3)])
    for v in np.linspace(-0.49, -0.31, 7):
        C, s = _oracle(P, A, float(v))
        state = tr.state_at("V", float(v))
        assert state[1] == pytest.approx(C, abs=1e-10)
        assert state[2] == pytest.approx(s, abs=1e-10)


def test_reversibility():
    fwd = integrate_phase(P, A, (1.0, 0.0), [V_level(-0.3)])
    B = fwd.end
    back = integrate_phase(P, B, (-1.0, 0.0), [V_level(A[0])], s0=float(fwd.s[-1]))
    assert back.C[-1] == pytest.approx(A[1], abs=1e-9)
    assert back.s[-1] == pytest.approx(0.0, abs=1e-9)


def test_event_location():
    p = make_params_z(1.4, 2, 0.1)
    tr = integrate_phase(p, (-0.5, 0.3), (1.0, 0.0), [line_cross(-0.5), V_level(-0.2)])
    ev = tr.first_event("line_cross(-0.5)")
    assert ev is not None
    assert abs(ev.C - 0.5 * (1.0 + ev.V)) < 1e-12
    assert tr.stop_reason == "stop"


def test_sonic_event_stops_on_the_line():
    # start just below the upper sonic line and drive into it
    p = make_params_z(1.4, 2, 0.1)
    tr = integrate_phase(p, (-0.6, 0.38), (0.0, 1.0), [sonic_upper(), C_level(0.9)])
    assert tr.stop_reason == "sonic_cross"
    assert abs(tr.C[-1] - (1.0 + tr.V[-1])) < 1e-12


def test_truncate_keeps_prefix():
    tr = integrate_phase(P, A, (1.0, 0.0), [V_level(-0.3)])
    c = 0.5 * (tr.C[0] + tr.C[-1])
    cut = truncate(tr, "C", float(c))
    assert cut.C[-1] == pytest.approx(c, abs=1e-14)
    n = len(cut) - 1
    assert np.array_equal(cut.V[:n], tr.V[:n])
    assert cut.stop_reason == "truncated"
    with pytest.raises(AnnotationError):
        truncate(tr, "C", 10.0)


def test_reversed_and_join():
    a = integrate_phase(P, A, (1.0, 0.0), [V_level(-0.4)])
    b = integrate_phase(P, a.end, (1.0, 0.0), [V_level(-0.3)], s0=float(a.s[-1]))
    whole = join([a, b])
    assert whole.V[0] == a.V[0] and whole.V[-1] == b.V[-1]
    r = whole.reversed()
    assert r.V[0] == whole.V[-1] and r.orientation == -whole.orientation
    assert r.V_of_C(float(whole.C[len(whole) // 2])) == pytest.approx(float(whole.V[len(whole) // 2]), abs=1e-12)


def test_attach_x_anchor():
    tr = attach_x(P, integrate_phase(P, A, (1.0, 0.0), [V_level(-0.3)]), (0, -1.0))
    assert tr.x[0] == pytest.approx(-1.0, abs=1e-15)
    assert tr.at_lnx(0.0)[0] == pytest.approx(A[0], abs=1e-13)


def test_start_at_critical_point_raises():
    with pytest.raises(SingularityError):
        integrate_phase(P, (0.0, 0.0), (1.0, 0.0))
    with pytest.raises(SingularityError):
        integrate_phase(P, (math.nan, 0.0), (1.0, 0.0))
