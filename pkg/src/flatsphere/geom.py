"""Exact planar geometry: rational scalars, certified intervals, vectors, 2x2 maps.

All combinatorial constructions in this package run on exact rationals
(`fractions.Fraction`), so every comparison is decidable and tie-free.  A thin
certified-interval layer is provided for the one-parameter flow and rotation
families whose matrix entries are transcendental for generic parameters;
interval comparisons either certify an answer or escalate precision, and an
exact tie raises instead of silently guessing.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Callable, Union

Rational = Fraction

Number = Union[int, Fraction]


def Q(x, y=None) -> Fraction:
    """Shorthand rational constructor, ``Q(1,3) == Fraction(1,3)``."""
    if y is None:
        return Fraction(x)
    return Fraction(x, y)


class TieError(ArithmeticError):
    """An interval comparison hit an exact tie that refinement cannot break."""


class Interval:
    """A certified real: rational bounds plus a refinement callback.

    ``refine(prec)`` must return a pair of rationals ``(lo, hi)`` enclosing the
    value with ``hi - lo <= 2**-prec``.  Comparisons escalate ``prec`` until
    the answer is certified; if two intervals describe the same point, the
    comparison raises :class:`TieError` once width drops below ``2**-TIE_PREC``.
    """

    TIE_PREC = 256

    __slots__ = ("lo", "hi", "_refine", "_prec")

    def __init__(self, lo: Fraction, hi: Fraction,
                 refine: Callable[[int], tuple] | None = None, prec: int = 16):
        lo = Fraction(lo)
        hi = Fraction(hi)
        if hi < lo:
            raise ValueError("empty interval")
        self.lo = lo
        self.hi = hi
        self._refine = refine
        self._prec = prec

    # -- construction helpers -------------------------------------------------

    @staticmethod
    def exact(x) -> "Interval":
        x = Fraction(x)
        return Interval(x, x)

    @staticmethod
    def from_refiner(refine: Callable[[int], tuple], prec: int = 16) -> "Interval":
        lo, hi = refine(prec)
        return Interval(lo, hi, refine, prec)

    def _tighten(self, prec: int) -> None:
        if self._refine is not None and prec > self._prec:
            lo, hi = self._refine(prec)
            # keep the best enclosure seen so far
            self.lo = max(self.lo, Fraction(lo))
            self.hi = min(self.hi, Fraction(hi))
            self._prec = prec

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    def midpoint(self) -> Fraction:
        return (self.lo + self.hi) / 2

    # -- arithmetic ------------------------------------------------------------

    def _coerce(self, other) -> "Interval":
        if isinstance(other, Interval):
            return other
        return Interval.exact(other)

    def __add__(self, other):
        o = self._coerce(other)
        ref = None
        if self._refine or o._refine:
            a, b = self, o
            ref = lambda p: (
                (a.refined(p + 1).lo + b.refined(p + 1).lo),
                (a.refined(p + 1).hi + b.refined(p + 1).hi),
            )
        return Interval(self.lo + o.lo, self.hi + o.hi, ref, min(self._prec, o._prec))

    __radd__ = __add__

    def __neg__(self):
        ref = None
        if self._refine:
            a = self
            ref = lambda p: (-a.refined(p).hi, -a.refined(p).lo)
        return Interval(-self.hi, -self.lo, ref, self._prec)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        cands = [self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi]
        ref = None
        if self._refine or o._refine:
            a, b = self, o
            def ref(p):
                x, y = a.refined(p + 4), b.refined(p + 4)
                cs = [x.lo * y.lo, x.lo * y.hi, x.hi * y.lo, x.hi * y.hi]
                return min(cs), max(cs)
        return Interval(min(cands), max(cands), ref, min(self._prec, o._prec))

    __rmul__ = __mul__

    def refined(self, prec: int) -> "Interval":
        self._tighten(prec)
        return self

    # -- certified comparisons ---------------------------------------------------

    def compare(self, other) -> int:
        """Return -1, 0 (proven equal) or +1; raise TieError on unresolvable tie."""
        o = self._coerce(other)
        prec = max(self._prec, o._prec)
        while True:
            if self.hi < o.lo:
                return -1
            if self.lo > o.hi:
                return 1
            if self.lo == self.hi and o.lo == o.hi:
                return 0  # both exact and overlapping: genuinely equal
            if prec > self.TIE_PREC:
                raise TieError("interval comparison did not certify at precision %d" % prec)
            prec *= 2
            self._tighten(prec)
            o._tighten(prec)

    def __lt__(self, other):
        return self.compare(other) < 0

    def __gt__(self, other):
        return self.compare(other) > 0

    def __le__(self, other):
        return self.compare(other) <= 0

    def __ge__(self, other):
        return self.compare(other) >= 0

    def sign(self) -> int:
        return self.compare(Interval.exact(0))

    def __repr__(self):
        return "Interval[%s, %s]" % (self.lo, self.hi)


# ---------------------------------------------------------------------------
# Certified elementary functions (enough for the flow/rotation regimes).


def _exp_bounds(x: Fraction, prec: int) -> tuple:
    """Rational bounds on exp(x) of width <= 2**-prec."""
    # Range-reduce to |y| <= 1/2 via exp(x) = exp(y) * 2**k / ... using squaring.
    # Simpler: exp(x) = exp(x/2**s)**(2**s) with |x/2**s| <= 1/2.
    s = 0
    y = x
    while abs(y) > Fraction(1, 2):
        y /= 2
        s += 1
    work = prec + 4 * (s + 2)
    # Taylor with remainder: for |y| <= 1/2, tail after n terms <= 2*|y|**n/n!.
    term = Fraction(1)
    total = Fraction(1)
    n = 1
    while True:
        term = term * y / n
        total += term
        n += 1
        tail = 2 * abs(y) ** n / math.factorial(n)
        if tail < Fraction(1, 2 ** (work + 2)):
            break
    lo, hi = total - tail, total + tail
    if lo < 0:
        lo = Fraction(0)
    for _ in range(s):
        lo, hi = lo * lo, hi * hi
    return lo, hi


def exp_interval(x, prec: int = 24) -> Interval:
    x = Fraction(x)
    return Interval.from_refiner(lambda p: _exp_bounds(x, p), prec)


def _sin_bounds(x: Fraction, prec: int) -> tuple:
    term = Fraction(x)
    total = Fraction(x)
    n = 1
    while True:
        term = -term * x * x / ((2 * n) * (2 * n + 1))
        total += term
        n += 1
        tail = abs(x) ** (2 * n + 1) / math.factorial(2 * n + 1)
        if tail < Fraction(1, 2 ** (prec + 2)):
            return total - tail, total + tail


def _cos_bounds(x: Fraction, prec: int) -> tuple:
    term = Fraction(1)
    total = Fraction(1)
    n = 1
    while True:
        term = -term * x * x / ((2 * n - 1) * (2 * n))
        total += term
        n += 1
        tail = abs(x) ** (2 * n) / math.factorial(2 * n)
        if tail < Fraction(1, 2 ** (prec + 2)):
            return total - tail, total + tail


def sin_interval(x, prec: int = 24) -> Interval:
    x = Fraction(x)
    return Interval.from_refiner(lambda p: _sin_bounds(x, p), prec)


def cos_interval(x, prec: int = 24) -> Interval:
    x = Fraction(x)
    return Interval.from_refiner(lambda p: _cos_bounds(x, p), prec)


# ---------------------------------------------------------------------------
# Planar vectors over exact rationals.


class Vec:
    """A planar vector / complex number with exact rational coordinates."""

    __slots__ = ("x", "y")

    def __init__(self, x, y):
        self.x = Fraction(x)
        self.y = Fraction(y)

    def __add__(self, o):
        return Vec(self.x + o.x, self.y + o.y)

    def __sub__(self, o):
        return Vec(self.x - o.x, self.y - o.y)

    def __neg__(self):
        return Vec(-self.x, -self.y)

    def __mul__(self, s):
        s = Fraction(s)
        return Vec(self.x * s, self.y * s)

    __rmul__ = __mul__

    def __truediv__(self, s):
        s = Fraction(s)
        return Vec(self.x / s, self.y / s)

    def __eq__(self, o):
        return isinstance(o, Vec) and self.x == o.x and self.y == o.y

    def __hash__(self):
        return hash((self.x, self.y))

    def __repr__(self):
        return "Vec(%s, %s)" % (self.x, self.y)

    def key(self):
        return (self.x, self.y)

    def norm2(self) -> Fraction:
        return self.x * self.x + self.y * self.y

    def is_zero(self) -> bool:
        return self.x == 0 and self.y == 0

    def is_vertical(self) -> bool:
        return self.x == 0 and self.y != 0

    def is_horizontal(self) -> bool:
        return self.y == 0 and self.x != 0

    def parallel(self, o: "Vec") -> bool:
        return cross(self, o) == 0


def vec(x, y=None) -> Vec:
    if y is None:
        if isinstance(x, Vec):
            return x
        x, y = x
    return Vec(x, y)


def cross(u: Vec, v: Vec) -> Fraction:
    return u.x * v.y - u.y * v.x


def dot(u: Vec, v: Vec) -> Fraction:
    return u.x * v.x + u.y * v.y


def same_ray(u: Vec, v: Vec) -> bool:
    """True iff u and v point along the same ray from the origin (both nonzero)."""
    return cross(u, v) == 0 and dot(u, v) > 0


def direction_key(v: Vec):
    """Total order on directions: angle sweeping CCW from the positive x-axis.

    Returns a tuple comparable between nonzero vectors; collinear same-ray
    vectors compare equal.  Used for deterministic sorting of holonomies.
    """
    if v.x == 0 and v.y == 0:
        raise ValueError("zero vector has no direction")
    if v.y == 0:
        half = 0 if v.x > 0 else 2
        return (half, Fraction(0))
    if v.y > 0:
        # (0, pi): order by cot descending -> use -x/y ascending
        return (1, -v.x / v.y)
    return (3, -v.x / v.y)


def ccw_arc_contains(u: Vec, v: Vec, w: Vec, half_open: str = "open") -> bool:
    """Is direction ``w`` inside the CCW arc from ``u`` to ``v`` (arc < pi)?

    The arc is assumed strictly shorter than a half turn (``cross(u, v) > 0``).
    ``half_open`` is one of ``"open"``, ``"left"`` (include u), ``"right"``
    (include v).
    """
    c = cross(u, v)
    if c <= 0:
        raise ValueError("arc is not a salient CCW sector")
    cu, cv = cross(u, w), cross(w, v)
    if cu > 0 and cv > 0:
        return True
    if half_open == "left" and same_ray(u, w):
        return True
    if half_open == "right" and same_ray(v, w):
        return True
    return False


def sector_count_pi(u: Vec, fan: list, v: Vec) -> int:
    """Number of multiples of pi swept turning CCW from ``u`` to ``v``.

    ``fan`` lists the intermediate fan directions (the corner-boundary rays
    strictly between u and v in CCW corner order); every consecutive step must
    turn by an angle in (0, pi).  Only well-defined when the total angle is an
    exact multiple of pi, i.e. v = +-u; then the swept angle equals the
    returned integer times pi.
    """
    seq = [u] + list(fan) + [v]
    ref, nref = u, -u
    count = 0
    for i in range(len(seq) - 1):
        a, b = seq[i], seq[i + 1]
        c = cross(a, b)
        if c <= 0 and not (c == 0 and dot(a, b) < 0):
            raise ValueError("fan step must turn CCW by (0, pi]")
        for w in (ref, nref):
            if c == 0:
                # exactly pi step: half-open arc (a, b] contains exactly the
                # direction b among {ref, -ref} when b is parallel to ref
                if same_ray(b, w):
                    count += 1
            else:
                if (cross(a, w) > 0 and cross(w, b) > 0) or same_ray(b, w):
                    count += 1
    return count


# ---------------------------------------------------------------------------
# 2x2 linear maps.


class Mat2:
    """A 2x2 matrix with exact rational entries, acting on :class:`Vec`."""

    __slots__ = ("a", "b", "c", "d")

    def __init__(self, a, b, c, d):
        self.a = Fraction(a)
        self.b = Fraction(b)
        self.c = Fraction(c)
        self.d = Fraction(d)

    def det(self) -> Fraction:
        return self.a * self.d - self.b * self.c

    def __mul__(self, o: "Mat2") -> "Mat2":
        return Mat2(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )

    def __call__(self, v: Vec) -> Vec:
        return Vec(self.a * v.x + self.b * v.y, self.c * v.x + self.d * v.y)

    def __eq__(self, o):
        return (isinstance(o, Mat2) and self.a == o.a and self.b == o.b
                and self.c == o.c and self.d == o.d)

    def __repr__(self):
        return "Mat2(%s, %s, %s, %s)" % (self.a, self.b, self.c, self.d)

    def inverse(self) -> "Mat2":
        det = self.det()
        if det == 0:
            raise SingularMatrix("matrix is singular")
        return Mat2(self.d / det, -self.b / det, -self.c / det, self.a / det)


class SingularMatrix(ValueError):
    pass


IDENTITY = Mat2(1, 0, 0, 1)


class IntervalMat2:
    """2x2 matrix with certified-interval entries (free flow/rotation times)."""

    __slots__ = ("a", "b", "c", "d")

    def __init__(self, a, b, c, d):
        self.a, self.b, self.c, self.d = a, b, c, d

    def det(self) -> Interval:
        return self.a * self.d - self.b * self.c


def geodesic_flow_exact(q) -> Mat2:
    """Flow matrix diag(q, 1/q) for time t = 2*log(q), exact for rational q > 0."""
    q = Fraction(q)
    if q <= 0:
        raise ValueError("flow scale must be positive")
    return Mat2(q, 0, 0, 1 / q)


def geodesic_flow_matrix(t):
    """Time-t matrix of the one-parameter diagonal flow diag(e^{t/2}, e^{-t/2}).

    Exact rational ``t == 0`` returns the identity; any other rational t has
    transcendental entries, so an interval matrix is returned.  For the exact
    regime use :func:`geodesic_flow_exact` with q = e^{t/2} rational.
    """
    if isinstance(t, Interval):
        half = t * Fraction(1, 2)
        e = Interval.from_refiner(
            lambda p: _exp_bounds(half.refined(p + 2).midpoint(), p)
            if half.refined(p + 2).width == 0 else _exp_wide(half, p))
        ei = Interval.from_refiner(
            lambda p: _exp_bounds(-half.refined(p + 2).midpoint(), p)
            if half.refined(p + 2).width == 0 else _exp_wide(-half, p))
        return IntervalMat2(e, Interval.exact(0), Interval.exact(0), ei)
    t = Fraction(t)
    if t == 0:
        return IDENTITY
    e = exp_interval(t / 2)
    ei = exp_interval(-t / 2)
    return IntervalMat2(e, Interval.exact(0), Interval.exact(0), ei)


def _exp_wide(x: Interval, prec: int) -> tuple:
    x.refined(prec + 2)
    lo, _ = _exp_bounds(x.lo, prec + 1)
    _, hi = _exp_bounds(x.hi, prec + 1)
    return lo, hi


QUARTER_TURN_TABLE = {
    0: (Fraction(1), Fraction(0)),
    1: (Fraction(0), Fraction(1)),
    2: (Fraction(-1), Fraction(0)),
    3: (Fraction(0), Fraction(-1)),
}


def rotation_matrix(quarter_turns=None, angle=None):
    """Rotation matrix in the row convention [[cos, sin], [-sin, cos]].

    Exact for angles that are multiples of pi/2 (pass ``quarter_turns``);
    free angles (pass ``angle`` as a rational or Interval, in radians)
    return an interval matrix.
    """
    if quarter_turns is not None:
        c, s = QUARTER_TURN_TABLE[quarter_turns % 4]
        return Mat2(c, s, -s, c)
    if angle is None:
        raise ValueError("pass quarter_turns or angle")
    if isinstance(angle, Interval):
        mid = angle  # refine lazily through the entries
        c = Interval.from_refiner(lambda p: _cos_wide(mid, p))
        s = Interval.from_refiner(lambda p: _sin_wide(mid, p))
    else:
        a = Fraction(angle)
        c = cos_interval(a)
        s = sin_interval(a)
    return IntervalMat2(c, s, -s, c)


def _cos_wide(x: Interval, prec: int) -> tuple:
    x.refined(prec + 2)
    c1 = _cos_bounds(x.lo, prec + 1)
    c2 = _cos_bounds(x.hi, prec + 1)
    # cos is not monotone; pad by interval width (|cos'| <= 1)
    w = x.width
    return min(c1[0], c2[0]) - w, max(c1[1], c2[1]) + w


def _sin_wide(x: Interval, prec: int) -> tuple:
    x.refined(prec + 2)
    s1 = _sin_bounds(x.lo, prec + 1)
    s2 = _sin_bounds(x.hi, prec + 1)
    w = x.width
    return min(s1[0], s2[0]) - w, max(s1[1], s2[1]) + w


def apply_linear(v: Vec, m: Mat2) -> Vec:
    return m(v)


# Convenient exact matrices used throughout the package.
HALF_TURN = rotation_matrix(2)


def seg_intersect_open(p1: Vec, p2: Vec, q1: Vec, q2: Vec) -> bool:
    """Do the open segments (p1,p2) and (q1,q2) share an interior point?

    Exact; endpoint touches are not interior.  Collinear overlap of positive
    length counts as interior intersection.
    """
    d1 = p2 - p1
    d2 = q2 - q1
    den = cross(d1, d2)
    r = q1 - p1
    if den != 0:
        t = cross(r, d2) / den
        s = cross(r, d1) / den
        return 0 < t < 1 and 0 < s < 1
    # parallel
    if cross(r, d1) != 0:
        return False
    # collinear: check 1-d overlap of positive length
    ref = d1 if not d1.is_zero() else d2
    if ref.is_zero():
        return False
    a0, a1 = dot(p1, ref), dot(p2, ref)
    b0, b1 = dot(q1, ref), dot(q2, ref)
    lo1, hi1 = min(a0, a1), max(a0, a1)
    lo2, hi2 = min(b0, b1), max(b0, b1)
    return min(hi1, hi2) > max(lo1, lo2)


def point_on_open_segment(p: Vec, a: Vec, b: Vec) -> bool:
    d = b - a
    r = p - a
    if cross(d, r) != 0:
        return False
    t = dot(r, d)
    return 0 < t < d.norm2()


def point_in_triangle(p: Vec, a: Vec, b: Vec, c: Vec) -> int:
    """2 if strictly inside, 1 if on the boundary, 0 if outside (CCW triangle)."""
    s1 = cross(b - a, p - a)
    s2 = cross(c - b, p - b)
    s3 = cross(a - c, p - c)
    if s1 > 0 and s2 > 0 and s3 > 0:
        return 2
    if s1 >= 0 and s2 >= 0 and s3 >= 0:
        return 1
    return 0
