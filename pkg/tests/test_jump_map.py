from __future__ import annotations

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from guderley.errors import DomainError, RegionError
from guderley.jump_map import RegionTag, entropy_check, jump, jump_inverse, line_image_kappa, region

gammas = st.floats(min_value=1.05, max_value=3.0)
widths = st.floats(min_value=0.05, max_value=4.0)
kappas = st.floats(min_value=0.0, max_value=0.98)
# C enters the map only through C^2, so the inverse loses sqrt(eps) as C -> 0
kappas_inv = st.floats(min_value=1e-3, max_value=0.98)


def _rh_residual(g, pre, post):
    """Self-similar Rankine-Hugoniot conditions in the shock frame, W = 1 + V."""
    (V0, C0), (V1, C1) = pre, post
    W0, W1 = 1.0 + V0, 1.0 + V1
    # mass: R0 W0 = R1 W1; momentum and energy reduce to
    mom = (W0 + C0 * C0 / (g * W0)) - (W1 + C1 * C1 / (g * W1))
    ene = (C0 * C0 / (g - 1.0) + 0.5 * W0 * W0) - (C1 * C1 / (g - 1.0) + 0.5 * W1 * W1)
    return abs(mom), abs(ene)


def test_known_value():
    assert jump(3.0, (0.0, -0.5)).V == pytest.approx(-0.375, abs=1e-15)
    assert line_image_kappa(3.0, 0.0) == pytest.approx(math.sqrt(3.0), abs=1e-15)


@settings(max_examples=300, deadline=None)
@given(gammas, widths, kappas_inv)
def test_round_trip(g, W, k):
    pre = (W - 1.0, -k * W)
    back = jump_inverse(g, jump(g, pre))
    assert back.V == pytest.approx(pre[0], abs=1e-12 * max(1.0, W))
    assert back.C == pytest.approx(pre[1], abs=1e-12 * max(1.0, W))


@settings(max_examples=100, deadline=None)
@given(gammas, widths)
def test_round_trip_on_the_axis(g, W):
    back = jump_inverse(g, jump(g, (W - 1.0, 0.0)))
    assert back.V == pytest.approx(W - 1.0, abs=1e-12 * max(1.0, W))
    assert back.C ** 2 < 1e-14 * max(1.0, W * W)


@settings(max_examples=300, deadline=None)
@given(gammas, widths, kappas)
def test_rankine_hugoniot_oracle(g, W, k):
    pre = (W - 1.0, -k * W)
    post = jump(g, pre)
    mom, ene = _rh_residual(g, pre, post)
    assert mom < 1e-12 * max(1.0, W)
    assert ene < 1e-12 * max(1.0, W * W)


@settings(max_examples=300, deadline=None)
@given(gammas, widths, kappas)
def test_kappa_line_image(g, W, k):
    post = jump(g, (W - 1.0, -k * W))
    assert -post.C / (1.0 + post.V) == pytest.approx(line_image_kappa(g, k), rel=1e-12)
    assert region(g, post) == RegionTag.S_L


@settings(max_examples=200, deadline=None)
@given(gammas, kappas)
def test_image_is_an_involution(g, k):
    kk = line_image_kappa(g, k)
    kmax = math.sqrt(2.0 * g / (g - 1.0))
    assert 1.0 < kk <= kmax * (1.0 + 1e-15)
    # I(I(k)) = k, with I extended past 1 by the same closed form; compared in k^2
    num = 2.0 * g - (g - 1.0) * kk * kk
    den = g - 1.0 + 2.0 * kk * kk
    assert num / den == pytest.approx(k * k, abs=1e-12)


@settings(max_examples=200, deadline=None)
@given(gammas, widths)
def test_fixed_points_are_the_sonic_line(g, W):
    pre = (W - 1.0, -W)
    post = jump(g, pre)
    assert post.V == pytest.approx(pre[0], abs=1e-13 * max(1.0, W))
    assert post.C == pytest.approx(pre[1], abs=1e-13 * max(1.0, W))


@settings(max_examples=200, deadline=None)
@given(gammas, widths, st.floats(min_value=0.0, max_value=0.95))
def test_no_fixed_points_off_the_sonic_line(g, W, k):
    pre = (W - 1.0, -k * W)
    post = jump(g, pre)
    assert math.hypot(post.V - pre[0], post.C - pre[1]) > 1e-3 * W * (1.0 - k)


def test_entropy_condition():
    assert entropy_check(1.4, (0.0, -0.5))
    assert not entropy_check(1.4, (0.0, -1.5))


def test_region_errors():
    with pytest.raises(RegionError):
        jump(1.4, (0.0, 0.5))
    with pytest.raises(RegionError):
        jump(1.4, (-0.5, -0.6))
    with pytest.raises(RegionError):
        jump_inverse(1.4, (0.0, -0.5))
    with pytest.raises(DomainError):
        line_image_kappa(1.4, 1.0)
