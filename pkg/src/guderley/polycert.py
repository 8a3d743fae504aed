"""Exact rational polynomials, Sturm and Budan-Fourier root counting, and
interval sign certification.

No floats are admitted into RationalPoly or QuadSurd; every certification
decision is made on exact rationals.  Floats appear only when locating
rational sample grids, and those grid points are then checked exactly.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Iterable, List, Optional, Sequence, Tuple, Union

from .errors import DomainError, GuderleyError

Number = Union[int, Fraction]


def _q(x) -> Fraction:
    if isinstance(x, bool) or not isinstance(x, Rational):
        raise TypeError(f"exact rational required, got {type(x).__name__}")
    return Fraction(x)


class RationalPoly:
    """Univariate polynomial with Fraction coefficients, ascending order."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        cs = [_q(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs: Tuple[Fraction, ...] = tuple(cs)

    @classmethod
    def x(cls) -> "RationalPoly":
        return cls([0, 1])

    @classmethod
    def const(cls, c) -> "RationalPoly":
        return cls([c])

    @classmethod
    def from_desc(cls, coeffs) -> "RationalPoly":
        return cls(list(coeffs)[::-1])

    # -- basic protocol
    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def lc(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def __eq__(self, other):
        if isinstance(other, RationalPoly):
            return self.coeffs == other.coeffs
        if isinstance(other, Rational):
            return self.coeffs == RationalPoly([other]).coeffs
        return NotImplemented

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        if not self.coeffs:
            return "RationalPoly(0)"
        terms = []
        for k in range(self.degree, -1, -1):
            c = self.coeffs[k]
            if c:
                terms.append(f"{c}*x^{k}" if k else f"{c}")
        return "RationalPoly(" + " + ".join(terms) + ")"

    # -- arithmetic
    @staticmethod
    def _lift(o) -> "RationalPoly":
        return o if isinstance(o, RationalPoly) else RationalPoly([_q(o)])

    def __add__(self, o):
        o = self._lift(o)
        n = max(len(self.coeffs), len(o.coeffs))
        a = self.coeffs + (Fraction(0),) * (n - len(self.coeffs))
        b = o.coeffs + (Fraction(0),) * (n - len(o.coeffs))
        return RationalPoly([x + y for x, y in zip(a, b)])

    __radd__ = __add__

    def __neg__(self):
        return RationalPoly([-c for c in self.coeffs])

    def __sub__(self, o):
        return self + (-self._lift(o))

    def __rsub__(self, o):
        return self._lift(o) - self

    def __mul__(self, o):
        o = self._lift(o)
        if self.is_zero() or o.is_zero():
            return RationalPoly()
        out = [Fraction(0)] * (len(self.coeffs) + len(o.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(o.coeffs):
                    out[i + j] += a * b
        return RationalPoly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power")
        out, base = RationalPoly([1]), self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __truediv__(self, c):
        c = _q(c)
        return RationalPoly([a / c for a in self.coeffs])

    def __divmod__(self, o):
        o = self._lift(o)
        if o.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        r = list(self.coeffs)
        q = [Fraction(0)] * max(len(r) - len(o.coeffs) + 1, 1)
        dl = o.lc
        do = o.degree
        while len(r) - 1 >= do and r:
            k = len(r) - 1 - do
            f = r[-1] / dl
            q[k] = f
            for i, b in enumerate(o.coeffs):
                r[i + k] -= f * b
            r.pop()
            while r and r[-1] == 0:
                r.pop()
        return RationalPoly(q), RationalPoly(r)

    def __mod__(self, o):
        return divmod(self, o)[1]

    def __floordiv__(self, o):
        return divmod(self, o)[0]

    def derivative(self) -> "RationalPoly":
        return RationalPoly([k * c for k, c in enumerate(self.coeffs)][1:])

    def __call__(self, x):
        if isinstance(x, QuadSurd):
            return x.eval_poly(self)
        if isinstance(x, RationalPoly):
            return self.compose(x)
        x = _q(x)
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def compose(self, q: "RationalPoly") -> "RationalPoly":
        acc = RationalPoly()
        for c in reversed(self.coeffs):
            acc = acc * q + c
        return acc

    def eval_float(self, x: float) -> float:
        acc = 0.0
        for c in reversed(self.coeffs):
            acc = acc * x + float(c)
        return acc

    def deflate_root(self, r) -> Tuple["RationalPoly", int]:
        """Divide out (x - r)^k for the full multiplicity k of the rational root r."""
        r = _q(r)
        p, k = self, 0
        lin = RationalPoly([-r, 1])
        while not p.is_zero() and p(r) == 0:
            p = divmod(p, lin)[0]
            k += 1
        return p, k

    def gcd(self, o: "RationalPoly") -> "RationalPoly":
        a, b = self, o
        while not b.is_zero():
            a, b = b, a % b
        return a / a.lc if not a.is_zero() else a

    def squarefree(self) -> "RationalPoly":
        g = self.gcd(self.derivative())
        return self if g.degree <= 0 else self // g


def _sign(x) -> int:
    return (x > 0) - (x < 0)


@dataclass(frozen=True)
class QuadSurd:
    """The real number a + b*sqrt(d) with rational a, b and d >= 0."""

    a: Fraction
    b: Fraction
    d: Fraction

    def __post_init__(self):
        for v in (self.a, self.b, self.d):
            _q(v)
        if self.d < 0:
            raise DomainError("surd radicand must be non-negative")

    @staticmethod
    def sign_of(a: Fraction, b: Fraction, d: Fraction) -> int:
        sa, sb = _sign(a), _sign(b) if d else 0
        if sb == 0:
            return sa
        if sa == 0 or sa == sb:
            return sb
        # opposite signs: compare a^2 against b^2 d
        return sa * _sign(a * a - b * b * d)

    def sign(self) -> int:
        return self.sign_of(self.a, self.b, self.d)

    def eval_poly(self, p: RationalPoly) -> Tuple[Fraction, Fraction]:
        P, Q = Fraction(0), Fraction(0)
        for c in reversed(p.coeffs):
            P, Q = P * self.a + Q * self.b * self.d + c, P * self.b + Q * self.a
        return P, Q

    def sign_poly(self, p: RationalPoly) -> int:
        P, Q = self.eval_poly(p)
        return self.sign_of(P, Q, self.d)

    def __float__(self):
        return float(self.a) + float(self.b) * math.sqrt(float(self.d))

    def lt(self, x) -> bool:
        """Exact test self < x for rational x."""
        return self.sign_of(self.a - _q(x), self.b, self.d) < 0


Point = Union[int, Fraction, QuadSurd, None]


def _sign_at(p: RationalPoly, x: Point, side: int = 0) -> int:
    """Sign of p at x; x = None means -inf (side<0) or +inf (side>0)."""
    if x is None:
        if p.is_zero():
            return 0
        s = _sign(p.lc)
        return s if side > 0 or p.degree % 2 == 0 else -s
    if isinstance(x, QuadSurd):
        return x.sign_poly(p)
    return _sign(p(x))


def _variations(signs: Sequence[int]) -> int:
    s = [v for v in signs if v != 0]
    return sum(1 for u, v in zip(s, s[1:]) if u != v)


def sturm_chain(p: RationalPoly) -> List[RationalPoly]:
    if p.is_zero():
        raise DomainError("Sturm chain of the zero polynomial")
    chain = [p, p.derivative()]
    while not chain[-1].is_zero():
        r = chain[-2] % chain[-1]
        if r.is_zero():
            break
        chain.append(-r)
    if chain[-1].is_zero():
        chain.pop()
    return chain


def _sturm_var(chain, x, side):
    return _variations([_sign_at(q, x, side) for q in chain])


def sturm_root_count(p: RationalPoly, a: Point, b: Point) -> int:
    """Distinct real roots of p in the open interval (a, b).

    Endpoints may be rationals, QuadSurds, or None for -inf / +inf.  A rational
    endpoint that is itself a root is removed by exact deflation.
    """
    if p.is_zero():
        raise DomainError("root count of the zero polynomial")
    for e in (a, b):
        if e is not None and not isinstance(e, QuadSurd):
            p, _ = p.deflate_root(e)
    if p.degree <= 0:
        return 0
    for e, side in ((a, -1), (b, 1)):
        if isinstance(e, QuadSurd) and e.sign_poly(p) == 0:
            raise EndpointError("polynomial vanishes at a surd endpoint")
    chain = sturm_chain(p)
    return _sturm_var(chain, a, -1) - _sturm_var(chain, b, 1)


class EndpointError(GuderleyError):
    pass


def budan_fourier_count(p: RationalPoly, a, b) -> Tuple[int, int]:
    """Sign-variation drop of (p, p', ..., p^(n)) between a and b, zeros skipped.

    The number of roots in (a, b], with multiplicity, equals the bound minus
    an even number.  Returns (bound, bound % 2).
    """
    seq = [p]
    while seq[-1].degree > 0:
        seq.append(seq[-1].derivative())
    va = _variations([_sign_at(q, a, -1) for q in seq])
    vb = _variations([_sign_at(q, b, 1) for q in seq])
    bound = abs(va - vb)
    return bound, bound % 2


def budan_fourier_signs(p: RationalPoly, x) -> List[int]:
    seq = [p]
    while seq[-1].degree > 0:
        seq.append(seq[-1].derivative())
    return [_sign_at(q, x) for q in seq]


# ---------------------------------------------------------------------------
# sign certification

@dataclass
class CertReport:
    id: str
    interval: Tuple[str, str]
    method: str
    status: str
    claimed: str = ""
    detail: str = ""
    isolating: Optional[Tuple[str, str]] = None
    exact: bool = True

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def as_dict(self) -> dict:
        d = {
            "id": self.id,
            "interval": list(self.interval),
            "method": self.method,
            "status": self.status,
        }
        if self.claimed:
            d["claim"] = self.claimed
        if self.detail:
            d["detail"] = self.detail
        if self.isolating:
            d["isolating_interval"] = list(self.isolating)
        if not self.exact:
            d["exact"] = False
        return d


def _fmt(x) -> str:
    if x is None:
        return "inf"
    if isinstance(x, QuadSurd):
        return f"{x.a}+{x.b}*sqrt({x.d})"
    return str(x)


def _sign_name(s: str) -> int:
    if s in ("positive", "+", ">0"):
        return 1
    if s in ("negative", "-", "<0"):
        return -1
    raise DomainError(f"claimed sign must be 'positive' or 'negative', got {s!r}")


def _mid(a, b):
    return (a + b) / 2


def constant_sign(p: RationalPoly, a, b, closed=(False, False)) -> int:
    """+1/-1 if p has that sign throughout the interval, else 0.

    closed = (include a, include b); open ends tolerate p(end) == 0.
    """
    if p.is_zero():
        return 0
    if sturm_root_count(p, a, b) != 0:
        return 0
    s = _sign(p(_mid(a, b)))
    for e, inc in ((a, closed[0]), (b, closed[1])):
        if inc and _sign(p(e)) != s:
            return 0
    return s


def _isolate(p: RationalPoly, a, b, depth=40):
    lo, hi = a, b
    for _ in range(depth):
        mid = _mid(lo, hi)
        if p(mid) == 0:
            return mid, mid
        if sturm_root_count(p, lo, mid) > 0:
            hi = mid
        else:
            lo = mid
    return lo, hi


def certify_sign(p: RationalPoly, a, b, claimed_sign: str, closed=(False, False),
                 id: str = "claim") -> CertReport:
    """Pass iff p has no root in the interval and the exact midpoint sign
    matches; a failing claim comes with an isolating subinterval."""
    a, b = _q(a), _q(b)
    want = _sign_name(claimed_sign)
    iv = (_fmt(a), _fmt(b))
    n = sturm_root_count(p, a, b)
    ends = [e for e, inc in ((a, closed[0]), (b, closed[1])) if inc and p(e) == 0]
    if n == 0 and not ends and _sign(p(_mid(a, b))) == want:
        ok = all(_sign(p(e)) == want for e, inc in ((a, closed[0]), (b, closed[1])) if inc)
        if ok:
            return CertReport(id, iv, "sturm", "pass", claimed_sign, f"0 roots in ({iv[0]}, {iv[1]})")
    if n > 0:
        lo, hi = _isolate(p, a, b)
        return CertReport(id, iv, "sturm", "fail", claimed_sign,
                          f"{n} root(s) in interval", (str(lo), str(hi)))
    if ends:
        return CertReport(id, iv, "sturm", "fail", claimed_sign,
                          "polynomial vanishes at a closed endpoint", (str(ends[0]), str(ends[0])))
    return CertReport(id, iv, "sturm", "fail", claimed_sign, "constant sign opposite to claim")


def certify_radical(P: RationalPoly, Q: RationalPoly, R: RationalPoly, a, b,
                    claimed_sign: str, closed=(False, False), id: str = "claim",
                    max_depth: int = 24) -> CertReport:
    """Certify sign(P + Q*sqrt(R)) on an interval by exact adaptive bisection.

    A subinterval is accepted when one of
      P<0 and S>0,   P<0 and Q<=0,   Q<0 and S<0      (S = P^2 - Q^2 R)
    holds on it (for a negative claim; a positive claim negates P and Q).
    """
    a, b = _q(a), _q(b)
    want = _sign_name(claimed_sign)
    iv = (_fmt(a), _fmt(b))
    if want > 0:
        P, Q = -P, -Q
    if constant_sign(R, a, b, closed) < 0 or (R.degree > 0 and sturm_root_count(R, a, b) > 0):
        return CertReport(id, iv, "sturm", "fail", claimed_sign, "radicand changes sign")
    S = P * P - Q * Q * R
    pieces = 0
    stack = [(a, b, closed, 0)]
    while stack:
        lo, hi, cl, depth = stack.pop()
        sP = constant_sign(P, lo, hi, cl)
        if sP < 0:
            if Q.is_zero() or constant_sign(Q, lo, hi, (False, False)) < 0:
                pieces += 1
                continue
            if constant_sign(S, lo, hi, cl) > 0:
                pieces += 1
                continue
        sQ = constant_sign(Q, lo, hi, cl)
        if sQ < 0 and constant_sign(S, lo, hi, cl) < 0:
            pieces += 1
            continue
        if depth >= max_depth:
            return CertReport(id, iv, "sturm", "fail", claimed_sign,
                              "no sufficient condition found", (str(lo), str(hi)))
        mid = _mid(lo, hi)
        stack.append((lo, mid, (cl[0], True), depth + 1))
        stack.append((mid, hi, (True, cl[1]), depth + 1))
    return CertReport(id, iv, "sturm", "pass", claimed_sign, f"{pieces} subinterval(s)")


def certify_surd_coeff(P: RationalPoly, Q: RationalPoly, d, a, b, claimed_sign,
                       closed=(False, False), id="claim") -> CertReport:
    """Polynomial with coefficients in Q(sqrt d): P(x) + sqrt(d) Q(x)."""
    return certify_radical(P, Q, RationalPoly([d]), a, b, claimed_sign, closed, id)


# ---------------------------------------------------------------------------
# polynomial families used by the bundled suite

X = RationalPoly.x()
F = Fraction


def P(*desc) -> RationalPoly:
    return RationalPoly.from_desc(desc)


def _in_gamma(coeffs_in_z: Sequence[RationalPoly], zpoly: RationalPoly) -> RationalPoly:
    """sum_k coeffs[k](gamma) * z(gamma)^k for z given as a polynomial in gamma."""
    acc = RationalPoly()
    for c in reversed(coeffs_in_z):
        acc = acc * zpoly + c
    return acc


def z0_poly() -> RationalPoly:
    return RationalPoly([F(22, 125), F(-5, 125)])


def sextic_B(gamma: Fraction, z: Fraction, m: int) -> RationalPoly:
    g = _q(gamma)
    z = _q(z)
    c6 = 2 * (m * (g - 1) + 1)
    c5 = 7 * m * (g - 1) + 6
    c4 = 5 * m * g - 3 * m - 2 + 2 * m * (g - 2) * g * z
    c3 = m * (5 * g - 9) * (g * z - 1) - 12
    c2 = 5 * m * (1 - g) + 2 + 2 * m * g * g * z
    c1 = m * (g - 3) + 6 - m * (2 * g * g - 6 * g + 2) * z
    c0 = m * (g - 1) - 2 - m * (g * g + g - 4) * z
    return RationalPoly([c0, c1, c2, c3, c4, c5, c6])


def quartic_p(gamma: Fraction, z: Fraction, m: int) -> RationalPoly:
    g = _q(gamma)
    z = _q(z)
    c4 = -4 * (g - 1)
    c3 = (m - 1) * g * g - (m + 11) * g + 16 + 4 * m * g * (1 - g) * z
    c2 = (2 * m - 1) * g * g - (2 * m + 10) * g + 24 - 2 * m * g * (g * g + 4 * g - 7) * z
    c1 = m * g * g - (3 + m) * g + 16 - m * g * (2 * g * g + 5 * g - 16) * z
    c0 = 4 + 2 * m * g * (3 - g) * z
    return RationalPoly([c0, c1, c2, c3, c4])


def V_hat(gamma: Fraction) -> QuadSurd:
    g = _q(gamma)
    return QuadSurd((4 - 5 * g) / (4 * (g - 1)), 1 / (4 * (g - 1)), (9 * g - 8) * g)


def z_g_below(gamma: Fraction, z: Fraction, m: int) -> bool:
    """Exact test z_g(gamma) < z."""
    g, z = _q(gamma), _q(z)
    if m == 1:
        lhs = z * g * (g - 1) + g
        rad = g * g + (g - 1) ** 2
    else:
        a = 2 * g * g - g + 1
        bb = 4 * g * (g - 1) + F(8, 3)
        lhs = z * g * bb + a
        rad = a * a + 2 * g * (g - 1) * bb
    return lhs > 0 and lhs * lhs > rad


def z_M_below(gamma: Fraction, z: Fraction) -> bool:
    """Exact test z < z_M(gamma) = 1/(2 + gamma + 2 sqrt(2 gamma))."""
    g, z = _q(gamma), _q(z)
    # 1/z > 2 + g + 2 sqrt(2g)  <=>  (1/z - 2 - g)^2 > 8g with 1/z - 2 - g > 0
    t = 1 / z - 2 - g
    return t > 0 and t * t > 8 * g


def _rational_above(x: float, ok) -> Fraction:
    """A short rational just above x that satisfies the exact predicate ok."""
    for den in (10 ** k for k in range(3, 16)):
        q = F(math.ceil(x * den), den)
        if q > x and ok(q):
            return q
    raise DomainError("could not find a rational above the threshold")


def _rational_below(x: float, ok) -> Fraction:
    for den in (10 ** k for k in range(3, 16)):
        q = F(math.floor(x * den), den)
        if q < x and ok(q):
            return q
    raise DomainError("could not find a rational below the threshold")


# ---------------------------------------------------------------------------
# bundled suite

# rational brackets for the parameter values that enter interval endpoints
GU_BRACKET = {1: (F(79, 50), F(159, 100)), 2: (F(77, 50), F(31, 20))}
# gamma_g > 5/2 for both m
GG_LOWER = F(5, 2)


def _univariate_items():
    """(id, poly, a, b, closed, sign) for each plain polynomial claim.

    Intervals with gamma_u or gamma_g endpoints are replaced by rational
    supersets, so a pass is a stronger statement than the original claim.
    """
    gu_hi = max(GU_BRACKET[1][1], GU_BRACKET[2][1])
    gu_lo = min(GU_BRACKET[1][0], GU_BRACKET[2][0])
    one, two, three = F(1), F(2), F(3)
    items = [
        ("sign.01", P(-250, 5050, -51495, 266711, -673057, 1369003, -1769830, 771743),
         one, gu_hi, (False, True), "negative"),
        ("sign.02", P(22188041, -451420037, 1178808488, -7162470820, 9959809328),
         GU_BRACKET[1][0], two, (True, False), "negative"),
        ("sign.03", 3 * P(61731, -1244367, 3215408, -19360620, 26076848),
         GU_BRACKET[2][0], two, (True, False), "negative"),
        ("sign.04", P(2592, -37368, 341118, -1143750, 828125), one, two, (False, True), "negative"),
        ("sign.05", P(18, -90, 123, -141, 53), one, two, (False, True), "negative"),
        ("sign.06", P(-600, 7680, -68886, 158584, -121589), one, two, (False, True), "negative"),
        ("sign.07", P(450, -5760, 48852, -89063, 49348), one, two, (False, True), "positive"),
        ("sign.08", P(81, -1119, 3476, -3248, 1048), one, gu_hi, (False, True), "positive"),
        ("sign.09", P(1, 19, -100, 100), gu_lo, three, (True, True), "negative"),
        ("sign.10", P(36, -180, 167, 405, -414), one, two, (False, True), "positive"),
        ("sign.11", P(64, -352, -292, 4270, -3575, -11948, 15074, 4729), one, two, (False, True), "positive"),
        ("sign.12", P(-125, 2525, -27310, 154918, -487091, 1084814, -1166290, 217809),
         one, gu_hi, (False, True), "negative"),
        ("sign.13", P(2744, -68208, 317142, -880880, 760577), gu_lo, two, (True, True), "negative"),
        ("sign.14", P(100, -1280, 10856, -23264, 10619), one, two, (False, True), "negative"),
        ("sign.15", P(25, -320, 2714, -5816, 4061), one, gu_hi, (False, True), "positive"),
    ]
    return items


def _zeta_poly() -> RationalPoly:
    g = X
    zc = [
        (g - 1) ** 2,
        -(g * g - g - 10) * (g - 2),
        -2 * (11 * g * g - 25 * g + 4) * (g - 2) ** 2,
        4 * (3 * g * g - 5 * g - 4) * (g - 2) ** 3,
        32 * (3 * g - 1) * (g - 2) ** 5,
        32 * (2 * g - 1) * (g - 2) ** 6,
    ]
    return _in_gamma(zc, RationalPoly([F(-2, 11), F(2, 11)]))


def _zM_radical(m: int) -> Tuple[RationalPoly, RationalPoly, RationalPoly]:
    """The z_M claim written as P + Q sqrt(2 gamma) < 0 after clearing the positive
    factor 19683 (2 - gamma)^2, using z_M = (2 + gamma - 2 sqrt(2 gamma))/(2 - gamma)^2."""
    g = X
    A = (3 - F(209, 729) * g - F(152, 729) * g * g) * 19683
    B = (2888 * g - 9044)
    Pp = m * A * (2 + g) + (m * B - 703) * (2 - g) ** 2
    Qp = -2 * m * A
    return Pp, Qp, 2 * g


def _identity_items():
    """Stated closed forms checked against their defining expressions."""
    g = X
    z0 = z0_poly()
    pz = [RationalPoly([1]), g * g - 4 * g - 6, 2 * (2 - g) * (g * g + g + 1), (g - 2) ** 3 * (g - 1)]
    qz = [RationalPoly([1]), -(g * g + g + 4), (g - 2) ** 2 * (g - 1)]
    rz = [a + 2 * b for a, b in zip(qz + [RationalPoly()], pz)]
    qs = [18 * g * g - 66 * g + 53, (-18 * g * g + 33 * g - 75) * g, 18 * g * g * (g - 2) ** 2]
    w2 = [RationalPoly([1]), -2 * (g + 2), (g - 2) ** 2]
    pa3 = pz

    def at(coeffs, zval):
        return _in_gamma(coeffs, zval)

    c = lambda v: RationalPoly([v])
    return [
        ("sign.01", 1953125 * at(rz, z0),
         P(-250, 5050, -51495, 266711, -673057, 1369003, -1769830, 771743)),
        ("sign.02", 7812500000 * at(rz, c(F(22, 125) - F(159, 100) / 25)),
         P(22188041, -451420037, 1178808488, -7162470820, 9959809328)),
        ("sign.03", 62500000 * at(rz, c(F(22, 125) - F(31, 20) / 25)),
         3 * P(61731, -1244367, 3215408, -19360620, 26076848)),
        ("sign.04", 15625 * at(qs, c(F(12, 125))), P(2592, -37368, 341118, -1143750, 828125)),
        ("sign.05", at(qs, c(1)), P(18, -90, 123, -141, 53)),
        ("sign.06", 15625 * (-24 * (g - 2) ** 2 * z0 * z0 + (92 + 54 * g) * z0 - 21),
         P(-600, 7680, -68886, 158584, -121589)),
        ("sign.12", 1953125 * at(pa3, z0),
         P(-125, 2525, -27310, 154918, -487091, 1084814, -1166290, 217809)),
        ("sign.13", 1953125 * at(pa3, c(F(22, 125) - F(8, 5) / 25)),
         P(2744, -68208, 317142, -880880, 760577)),
        ("sign.14", 62500 * (at(w2, z0) - F(1, 4)), P(100, -1280, 10856, -23264, 10619)),
        ("sign.15", 15625 * (at(w2, z0) - F(4, 25)), P(25, -320, 2714, -5816, 4061)),
        # rationalization over Q(sqrt 3): rational and sqrt(3) parts separately
        ("surd.rational_part", P(55, -342, 1065) ** 2 + 3 * 250 ** 2 - 49 * P(25, -320, 2714, -5816, 6561),
         -4 * P(-450, 5485, -25282, 110869, 3 * -83353)),
        ("surd.sqrt3_part", 2 * P(55, -342, 1065) * -250, -4 * P(0, 0, 6875, -42750, 3 * 44375)),
        ("zg_bound.m2", (P(-6, -24, 11, -15) / 15) ** 2 - (2 * g * g - g + 1) ** 2
         - 2 * g * (g - 1) * (4 * g * (g - 1) + F(8, 3)),
         F(4, 225) * g * (g - 3) * (3 * g * (g - 1) + 2) * (3 * g * g + 36 * g - 55)),
        ("root.gamma_u.m1", (g * (-5 * g * g + 27 * g + 103)) ** 2 - 15625 * (g * g + (g - 1) ** 2),
         (g - 1) * P(25, -245, -546, 5016, -15625, 15625)),
        ("root.gamma_u.m2", P(-60, 324, 446, -199, 375) ** 2 - 46875 * (3 * g - 1) ** 2 * P(4, -4, 3),
         8 * g * P(450, -4860, 6432, 39111, -207817, 359749, -275503, 110250)),
        ("radical.gamma_u.m1", (91 + 108 * g) ** 2 * P(289, 15844, 109156) - P(1836, -56125, -11594) ** 2,
         108000 * (34 * g - 57) * P(108, -233, -125)),
        ("radical.gamma_u.m2", (239 + 307 * g) ** 2 * P(289, 11594, 39531) - P(5219, -121500, 4749) ** 2,
         76750 * (34 * g - 57) * P(921, -2046, -511)),
    ]


def _decimal_sample_surd(n: int = 400) -> Tuple[bool, float]:
    """High-precision sampled check of the unrationalized surd claim on (1, 159/100)."""
    from decimal import Decimal, getcontext

    getcontext().prec = 50
    worst = Decimal(-10)
    s3 = Decimal(3).sqrt()
    lo, hi = Decimal(1), Decimal(159) / Decimal(100)
    for k in range(1, n):
        g = lo + (hi - lo) * Decimal(k) / Decimal(n)
        z0 = (Decimal(22) - 5 * g) / Decimal(125)
        w = (1 - 2 * (g + 2) * z0 + (g - 2) ** 2 * z0 * z0).sqrt()
        val = (20 - 11 * g) * z0 + 5 - 2 * s3 - 7 * w
        worst = max(worst, val)
    return worst < 0, float(worst)


def grid_sextic(m: int, n: int = 20) -> List[Tuple[Fraction, Fraction]]:
    """n x n rational (gamma, z) points with gamma in (1, gamma_u), z in (z_g, 1/10)."""
    from .phase_plane import z_g as zg_float

    # z_g increases with gamma on (1, 2); keep gamma where z_g < 1/10
    g_hi = float(GU_BRACKET[m][0])
    if zg_float(g_hi, m) >= 0.1:
        a, b = 1.0001, g_hi
        for _ in range(80):
            c = 0.5 * (a + b)
            if zg_float(c, m) < 0.1:
                a = c
            else:
                b = c
        g_hi = a
    G_hi = _rational_below(g_hi, lambda q: z_g_below(q, F(1, 10), m))
    pts = []
    for i in range(1, n + 1):
        g = 1 + (G_hi - 1) * F(i, n + 1)
        zlo = _rational_above(zg_float(float(g), m), lambda q: z_g_below(g, q, m))
        for j in range(1, n + 1):
            z = zlo + (F(1, 10) - zlo) * F(j, n + 1)
            assert z_g_below(g, z, m) and z < F(1, 10)
            pts.append((g, z))
    return pts


def grid_quartic(m: int, n: int = 20) -> List[Tuple[Fraction, Fraction]]:
    """n x n rational points with gamma in (1, 2], z in (z_g, z_M]."""
    from .phase_plane import z_g as zg_float, z_M as zm_float

    pts = []
    for i in range(1, n + 1):
        g = 1 + F(i, n)
        zlo = _rational_above(zg_float(float(g), m), lambda q: z_g_below(g, q, m))
        zhi = _rational_below(zm_float(float(g)), lambda q: z_M_below(g, q))
        for j in range(1, n + 1):
            z = zlo + (zhi - zlo) * F(j, n)
            pts.append((g, z))
    return pts


def check_sextic_point(g: Fraction, z: Fraction, m: int) -> Tuple[int, int]:
    """(Sturm count on [-1, 0], Budan-Fourier bound on [-1, 0])."""
    B = sextic_B(g, z, m)
    n = sturm_root_count(B, F(-1), F(0))
    n += (B(F(-1)) == 0) + (B(F(0)) == 0)
    bound, _ = budan_fourier_count(B, F(-1), F(0))
    return n, bound


def check_quartic_point(g: Fraction, z: Fraction, m: int) -> bool:
    """p(V) > 0 on (V_hat, 0): no root there and positive at an interior rational."""
    p = quartic_p(g, z, m)
    vh = V_hat(g)
    if not vh.lt(0):
        return False
    if sturm_root_count(p, vh, F(0)) != 0:
        return False
    # an interior rational sample
    probe = F(-1, 10 ** 6)
    k = 0
    while not vh.lt(probe):
        k += 1
        probe = F(-1, 10 ** (6 + k))
    return p(probe) > 0


def run_bundled_suite(grid: int = 20) -> List[CertReport]:
    out: List[CertReport] = []
    # radical claim for each m on [5/2, 3], which contains [gamma_g, 3]
    for m in (1, 2):
        Pp, Qp, Rp = _zM_radical(m)
        r = certify_radical(Pp, Qp, Rp, GG_LOWER, F(3), "negative", (True, True), id=f"radical.zM.m{m}")
        out.append(r)
    for iid, poly, a, b, cl, sgn in _univariate_items():
        out.append(certify_sign(poly, a, b, sgn, cl, id=iid))
    # the rationalized forms over Q(sqrt 3)
    hi = GU_BRACKET[1][1]
    P_num = P(-450, 5485, -25282, 110869, 3 * -83353)
    Q_num = P(0, 0, 6875, -42750, 3 * 44375)
    out.append(certify_surd_coeff(P_num, Q_num, 3, 1, hi, "positive", (False, True), id="surd.numerator"))
    out.append(certify_surd_coeff(P(55, -342, 1065), RationalPoly([-250]), 3, 1, hi, "positive",
                                  (False, True), id="surd.denominator"))
    ok, worst = _decimal_sample_surd()
    out.append(CertReport("surd.sampled", ("1", str(hi)), "sampled", "pass" if ok else "fail",
                          "negative", f"max sampled value {worst:.6g}", exact=False))
    out.append(certify_sign(_zeta_poly(), 1, hi, "negative", (False, True), id="sign.16"))
    # exactly one root on (1, 2], inside the bracket
    for iid, poly, m in (("root.gamma_u.m1", P(25, -245, -546, 5016, -15625, 15625), 1),
                         ("root.gamma_u.m2", P(450, -4860, 6432, 39111, -207817, 359749, -275503, 110250), 2)):
        lo, hi_b = GU_BRACKET[m]
        n_all = sturm_root_count(poly, F(1), F(2)) + (poly(F(2)) == 0)
        n_in = sturm_root_count(poly, lo, hi_b)
        st = "pass" if n_all == 1 and n_in == 1 else "fail"
        out.append(CertReport(iid, ("1", "2"), "sturm", st, "one root",
                              f"{n_all} root(s) in (1,2], {n_in} in ({lo}, {hi_b})"))
    # stated closed forms against their definitions
    for iid, lhs, rhs in _identity_items():
        st = "pass" if lhs == rhs else "fail"
        out.append(CertReport(f"identity.{iid}", ("-inf", "inf"), "sturm", st, "polynomial identity"))
    # z_g >= 1/10 on [gamma_u, 3]
    glo = min(GU_BRACKET[1][0], GU_BRACKET[2][0])
    out.append(certify_sign(P(1, 19, -100, 100), glo, F(3), "negative", (True, True), id="zg_bound.m1"))
    out.append(certify_sign(F(4, 225) * X * (X - 3) * (3 * X * (X - 1) + 2) * (3 * X * X + 36 * X - 55),
                            glo, F(3), "negative", (True, False), id="zg_bound.m2"))
    # radical forms on (1, gamma_u)
    for m, Pp, Qp, Rp in ((1, P(1836, -56125, -11594), P(108, 91), P(289, 15844, 109156)),
                          (2, P(5219, -121500, 4749), P(307, 239), P(289, 11594, 39531))):
        out.append(certify_radical(Pp, Qp, Rp, 1, GU_BRACKET[m][1], "positive", (False, True), id=f"radical.gamma_u.m{m}"))
    # sextic and quartic claims on rational grids
    for m in (1, 2):
        pts = grid_sextic(m, grid)
        bad = [(g, z) for g, z in pts if check_sextic_point(g, z, m)[0] != 1]
        bf = sorted({check_sextic_point(g, z, m)[1] for g, z in pts[:: max(1, len(pts) // 25)]})
        out.append(CertReport(f"sextic.m{m}", ("-1", "0"), "sturm", "pass" if not bad else "fail",
                              "exactly one root", f"{len(pts)} grid points; BF bounds seen {bf}",
                              (str(bad[0][0]), str(bad[0][1])) if bad else None))
        pts = grid_quartic(m, grid)
        bad = [(g, z) for g, z in pts if not check_quartic_point(g, z, m)]
        out.append(CertReport(f"quartic.m{m}", ("V_hat", "0"), "sturm", "pass" if not bad else "fail",
                              "positive", f"{len(pts)} grid points",
                              (str(bad[0][0]), str(bad[0][1])) if bad else None))
    return out


def random_poly(rng: random.Random, max_deg: int = 8) -> RationalPoly:
    while True:
        d = rng.randint(1, max_deg)
        cs = [F(rng.randint(-20, 20), rng.randint(1, 9)) for _ in range(d + 1)]
        p = RationalPoly(cs)
        if p.degree >= 1:
            return p
