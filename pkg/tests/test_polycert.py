from __future__ import annotations

import random
from fractions import Fraction as Fr

import pytest
import sympy as sp

from guderley.errors import DomainError
from guderley.polycert import (
    QuadSurd,
    RationalPoly,
    budan_fourier_count,
    certify_radical,
    certify_sign,
    random_poly,
    run_bundled_suite,
    sturm_root_count,
)

x = sp.Symbol("x")


def _to_sympy(p: RationalPoly) -> sp.Poly:
    return sp.Poly([sp.Rational(c.numerator, c.denominator) for c in reversed(p.coeffs)], x)


def _sympy_counts(p: RationalPoly, a: Fr, b: Fr):
    """(distinct roots in (a, b), roots with multiplicity in (a, b]) from sympy."""
    sa, sb = sp.Rational(a.numerator, a.denominator), sp.Rational(b.numerator, b.denominator)
    distinct = 0
    mult = 0
    real = sp.real_roots(_to_sympy(p))
    seen = set()
    for r in real:
        if sa < r <= sb:
            mult += 1
        if sa < r < sb and r not in seen:
            distinct += 1
        seen.add(r)
    return distinct, mult


def test_arithmetic_against_sympy():
    rng = random.Random(1)
    for _ in range(30):
        p, q = random_poly(rng, 6), random_poly(rng, 4)
        quo, rem = divmod(p, q)
        sq, sr = sp.div(_to_sympy(p), _to_sympy(q))
        assert (_to_sympy(quo) - sq).is_zero
        assert (_to_sympy(rem) - sr).is_zero
        assert (_to_sympy(p * q) - _to_sympy(p) * _to_sympy(q)).is_zero
        assert (_to_sympy(p.derivative()) - _to_sympy(p).diff(x)).is_zero


def test_sturm_simple_cases():
    p = RationalPoly.from_desc([1, 0, -1])
    assert sturm_root_count(p, Fr(0), Fr(2)) == 1
    assert sturm_root_count(p, None, None) == 2
    # a root at an endpoint is not counted in the open interval
    assert sturm_root_count(p, Fr(1), Fr(2)) == 0
    with pytest.raises(DomainError):
        sturm_root_count(RationalPoly(), Fr(0), Fr(1))


def test_budan_fourier_no_real_roots():
    p = RationalPoly.from_desc([1, 0, 1])
    # (x^2 + 1, 2x, 2) has two variations at -1 and none at 1: an even defect of 2
    assert budan_fourier_count(p, Fr(-1), Fr(1)) == (2, 0)
    assert budan_fourier_count(p, Fr(0), Fr(1)) == (0, 0)


def test_random_polynomials_against_sympy():
    rng = random.Random(2024)
    for _ in range(60):
        p = random_poly(rng, 8)
        a = Fr(rng.randint(-30, 0), rng.randint(1, 7))
        b = a + Fr(rng.randint(1, 40), rng.randint(1, 7))
        distinct, mult = _sympy_counts(p, a, b)
        assert sturm_root_count(p, a, b) == distinct
        bound, parity = budan_fourier_count(p, a, b)
        assert bound >= mult and (bound - mult) % 2 == 0
        assert parity == mult % 2


def test_repeated_roots_counted_once():
    p = RationalPoly.from_desc([1, -2, 1]) * RationalPoly.from_desc([1, 0, -2])
    # (x - 1)^2 (x^2 - 2): distinct roots 1 and sqrt 2 in (0, 2)
    assert sturm_root_count(p, Fr(0), Fr(2)) == 2
    bound, _ = budan_fourier_count(p, Fr(0), Fr(2))
    assert bound == 3 or bound == 5


def test_surd_endpoint():
    p = RationalPoly.from_desc([1, 0, -3])
    s2 = QuadSurd(Fr(0), Fr(1), Fr(2))
    # x^2 - 3 has sqrt 3 in (sqrt 2, 2)
    assert sturm_root_count(p, s2, Fr(2)) == 1
    assert sturm_root_count(p, Fr(-1), s2) == 0


def test_certify_true_claim():
    r = certify_sign(RationalPoly.from_desc([1, 0, 1]), 0, 1, "positive", (True, True))
    assert r.passed


def test_false_claim_fails_with_isolating_interval():
    r = certify_sign(RationalPoly.from_desc([1, -1]), 0, 2, "positive")
    assert not r.passed
    lo, hi = Fr(r.isolating[0]), Fr(r.isolating[1])
    assert lo <= 1 <= hi and hi - lo < Fr(1, 10 ** 6)


def test_certify_wrong_constant_sign():
    r = certify_sign(RationalPoly.from_desc([1, 0, 1]), 0, 1, "negative")
    assert not r.passed


def test_certify_radical():
    # x - sqrt(x^2 + 1) < 0 everywhere
    X = RationalPoly.x()
    r = certify_radical(X, RationalPoly([-1]), X * X + 1, -3, 3, "negative", (True, True))
    assert r.passed
    r = certify_radical(X, RationalPoly([-1]), X * X + 1, -3, 3, "positive", (True, True))
    assert not r.passed


def test_bundled_suite_items():
    reports = run_bundled_suite(grid=6)
    failed = [r.id for r in reports if not r.passed]
    assert not failed
    ids = {r.id for r in reports}
    assert {"root.gamma_u.m1", "root.gamma_u.m2", "sextic.m1", "sextic.m2", "quartic.m1", "quartic.m2"} <= ids


def test_gamma_u_quintic_root_in_bracket():
    p = RationalPoly.from_desc([25, -245, -546, 5016, -15625, 15625])
    assert sturm_root_count(p, Fr(79, 50), Fr(159, 100)) == 1
    assert sturm_root_count(p, Fr(1), Fr(79, 50)) == 0


def test_quartic_sign_item_has_no_root():
    p = RationalPoly.from_desc([36, -180, 167, 405, -414])
    assert sturm_root_count(p, Fr(1), Fr(2)) == 0
