from __future__ import annotations

import math
import random

import numpy as np
import pytest

from guderley.errors import DomainError, PoleError
from guderley.phase_plane import (
    VF_plus_domain,
    branch_VF_plus,
    branch_VG,
    critical_points,
    eval_DFG,
    gamma_u,
    jacobian_GF,
    make_params,
    make_params_z,
    special_z,
    w_of_z,
    z_0,
    z_g,
    z_M,
)


def _random_pairs(n: int, seed: int = 7):
    rng = random.Random(seed)
    out = []
    while len(out) < n:
        g = rng.uniform(1.01, 3.0)
        z = rng.uniform(1e-3, 1.0) * z_M(g)
        out.append((g, rng.choice((1, 2)), z))
    return out


def test_make_params_lambda_to_z():
    p = make_params(3.0, 2, 1.6)
    assert p.z == pytest.approx(0.1, abs=1e-15)
    assert p.lam == 1.6


@pytest.mark.parametrize("gamma, m, lam", [(1.4, 2, 1.0), (1.0, 2, 1.3), (3.5, 1, 1.3), (1.4, 3, 1.3)])
def test_make_params_rejects_invalid(gamma, m, lam):
    with pytest.raises(DomainError):
        make_params(gamma, m, lam)


def test_G_known_value():
    p = make_params_z(3.0, 2, 0.1)
    _, _, G = eval_DFG(p, (-0.5, 0.4))
    assert G == pytest.approx(0.099, abs=1e-15)


def test_pole_at_V_minus_one():
    with pytest.raises(PoleError):
        eval_DFG(make_params_z(1.4, 2, 0.1), (-1.0, 0.3))


def test_gamma_three_double_triple_point():
    p = make_params_z(3.0, 1, z_M(3.0))
    cp = critical_points(p)
    want = -math.sqrt(2.0) / (math.sqrt(2.0) + math.sqrt(3.0))
    assert cp.P6.V == pytest.approx(want, abs=1e-7)
    assert cp.P8.V == pytest.approx(want, abs=1e-7)
    assert cp.P1 == pytest.approx((-0.5, math.sqrt(3.0) / 2.0), abs=1e-15)


def test_special_values():
    assert z_M(2.0) == pytest.approx(1.0 / 8.0, abs=1e-15)
    assert z_0(2.0) == pytest.approx(12.0 / 125.0, abs=1e-15)
    assert 79 / 50 < gamma_u(1) < 159 / 100
    assert w_of_z(1.7, z_M(1.7)) == pytest.approx(0.0, abs=1e-12)


def test_w_beyond_zM_raises():
    with pytest.raises(DomainError):
        w_of_z(1.4, 1.1 * z_M(1.4))


def test_triple_points_match_polynomial_roots():
    # on C = 1 + V, G = 0 reduces to V^2 + (1 + (2 - gamma) z) V + 2 z = 0
    for g, m, z in _random_pairs(50, seed=3):
        cp = critical_points(make_params_z(g, m, z))
        roots = np.sort(np.roots([1.0, 1.0 + (2.0 - g) * z, 2.0 * z]).real)
        assert cp.P6.V == pytest.approx(roots[0], rel=1e-9, abs=1e-12)
        assert cp.P8.V == pytest.approx(roots[1], rel=1e-9, abs=1e-12)


def test_critical_points_are_zeros():
    for g, m, z in _random_pairs(200):
        p = make_params_z(g, m, z)
        cp = critical_points(p)
        for P in (cp.P6, cp.P7, cp.P8, cp.P9):
            D, F, G = eval_DFG(p, P)
            assert max(abs(D), abs(F), abs(G)) < 1e-11
        _, F, G = eval_DFG(p, cp.P0)
        assert F == 0.0 and G == 0.0


def test_jacobian_against_finite_differences():
    p = make_params_z(1.4, 2, 0.1)
    V, C, h = -0.3, 0.4, 1e-6
    J = np.array(jacobian_GF(p, V, C))

    def GF(v, c):
        _, F, G = eval_DFG(p, (v, c))
        return np.array([G, F])

    fd = np.column_stack(((GF(V + h, C) - GF(V - h, C)) / (2 * h), (GF(V, C + h) - GF(V, C - h)) / (2 * h)))
    assert np.allclose(J, fd, rtol=1e-7, atol=1e-9)


def test_root_branches_solve_their_equations():
    p = make_params_z(1.4, 2, 0.1)
    lo, hi = VF_plus_domain(p)
    for C in np.linspace(lo, hi, 12)[1:-1]:
        V = branch_VF_plus(p, float(C))
        assert abs(eval_DFG(p, (V, float(C)))[1]) < 1e-12
    for C in np.linspace(-3.0, -0.05, 12):
        V = branch_VG(p, float(C))
        assert abs(eval_DFG(p, (V, float(C)))[2]) < 1e-12


@pytest.mark.parametrize("m", [1, 2])
def test_special_z_ordering(m):
    for g in (1.1, 1.4, 1.6, 1.9):
        sz = special_z(g, m)
        assert 0.0 < sz.z_g < sz.z_M
        assert sz.Zring_P6 == (sz.z_g, sz.z_M)
    assert special_z(2.5, m).Zring_P6 is None
    assert special_z(1.4, m).Zring_P8 is None
    assert z_g(1.4, m) == special_z(1.4, m).z_g
