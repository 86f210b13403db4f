"""Exact scalars: rationals, elements of Q(sqrt(a)), and rational enclosures.

Rationals are plain :class:`fractions.Fraction` values.  :class:`QuadExt`
represents ``p + q*sqrt(a)`` for a fixed positive integer ``a`` and mixes
freely with ``int`` and ``Fraction`` operands.  Nothing in here touches
binary floating point except :func:`decimal_str`, which only renders.
"""

from __future__ import annotations

import decimal
import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

Scalar = Union[int, Fraction, "QuadExt"]


class Sign(enum.IntEnum):
    NEG = -1
    ZERO = 0
    POS = 1


class BaseMismatch(ValueError):
    """Raised when combining elements of Q(sqrt(a)) and Q(sqrt(b)), a != b."""


def is_perfect_square(n: int) -> bool:
    return n >= 0 and math.isqrt(n) ** 2 == n


def squarefree_decompose(n: int) -> tuple[int, int]:
    """Return ``(b, d)`` with ``n == b*b*d`` and ``d`` square-free."""
    if n < 1:
        raise ValueError(f"expected a positive integer, got {n}")
    b, d = 1, n
    f = 2
    while f * f <= d:
        while d % (f * f) == 0:
            d //= f * f
            b *= f
        f += 1
    return b, d


def _sgn(x) -> int:
    return (x > 0) - (x < 0)


class QuadExt:
    """The number ``p + q*sqrt(a)`` with rational ``p``, ``q``.

    ``a`` is kept exactly as given (no reduction to its square-free part).
    When ``a`` is a perfect square the value is rational but the two-part
    representation is preserved; equality and hashing go by value.
    """

    __slots__ = ("a", "p", "q")

    def __init__(self, a: int, p=0, q=0):
        if not isinstance(a, int) or a < 1:
            raise ValueError(f"base must be a positive integer, got {a!r}")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "p", Fraction(p))
        object.__setattr__(self, "q", Fraction(q))

    def __setattr__(self, name, value):
        raise AttributeError("QuadExt is immutable")

    def __reduce__(self):
        return (QuadExt, (self.a, self.p, self.q))

    @classmethod
    def sqrt(cls, a: int) -> QuadExt:
        return cls(a, 0, 1)

    # -- coercion -------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, QuadExt):
            if other.a == self.a:
                return other
            if other.q == 0:
                return QuadExt(self.a, other.p, 0)
            if self.q == 0:
                return None
            raise BaseMismatch(f"cannot combine Q(sqrt({self.a})) with Q(sqrt({other.a}))")
        if isinstance(other, (int, Fraction)):
            return QuadExt(self.a, other, 0)
        return NotImplemented

    def _binary(self, other, fn, reflected=False):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if o is None:
            # self is rational; adopt the other operand's base
            return QuadExt(other.a, self.p, 0)._binary(other, fn, reflected)
        return fn(o, self) if reflected else fn(self, o)

    # -- arithmetic -----------------------------------------------------

    @staticmethod
    def _add(x: QuadExt, y: QuadExt) -> QuadExt:
        return QuadExt(x.a, x.p + y.p, x.q + y.q)

    @staticmethod
    def _sub(x: QuadExt, y: QuadExt) -> QuadExt:
        return QuadExt(x.a, x.p - y.p, x.q - y.q)

    @staticmethod
    def _mul(x: QuadExt, y: QuadExt) -> QuadExt:
        return QuadExt(x.a, x.p * y.p + x.q * y.q * x.a, x.p * y.q + x.q * y.p)

    @staticmethod
    def _div(x: QuadExt, y: QuadExt) -> QuadExt:
        if y.is_zero():
            raise ZeroDivisionError("division by zero element of Q(sqrt(a))")
        root = math.isqrt(y.a)
        if root * root == y.a:
            return x * (1 / (y.p + y.q * root))
        norm = y.norm()
        return QuadExt(x.a, (x.p * y.p - x.q * y.q * x.a) / norm, (x.q * y.p - x.p * y.q) / norm)

    def __add__(self, other):
        return self._binary(other, QuadExt._add)

    def __radd__(self, other):
        return self._binary(other, QuadExt._add, reflected=True)

    def __sub__(self, other):
        return self._binary(other, QuadExt._sub)

    def __rsub__(self, other):
        return self._binary(other, QuadExt._sub, reflected=True)

    def __mul__(self, other):
        return self._binary(other, QuadExt._mul)

    def __rmul__(self, other):
        return self._binary(other, QuadExt._mul, reflected=True)

    def __truediv__(self, other):
        return self._binary(other, QuadExt._div)

    def __rtruediv__(self, other):
        return self._binary(other, QuadExt._div, reflected=True)

    def __pow__(self, n: int) -> QuadExt:
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return 1 / (self ** (-n))
        result = QuadExt(self.a, 1, 0)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __neg__(self) -> QuadExt:
        return QuadExt(self.a, -self.p, -self.q)

    def __pos__(self) -> QuadExt:
        return self

    def __abs__(self) -> QuadExt:
        return -self if self.sign() is Sign.NEG else self

    def conjugate(self) -> QuadExt:
        return QuadExt(self.a, self.p, -self.q)

    def norm(self) -> Fraction:
        return self.p * self.p - self.q * self.q * self.a

    # -- predicates and comparison --------------------------------------

    def sign(self) -> Sign:
        return quad_sign(self)

    def is_zero(self) -> bool:
        return quad_sign(self) is Sign.ZERO

    def is_rational(self) -> bool:
        return self.q == 0 or is_perfect_square(self.a)

    def rational_value(self) -> Fraction:
        if self.q == 0:
            return self.p
        if not is_perfect_square(self.a):
            raise ValueError(f"{self} is irrational")
        return self.p + self.q * math.isqrt(self.a)

    def _cmp(self, other):
        diff = self - other
        if diff is NotImplemented:
            return NotImplemented
        return quad_sign(diff)

    def __eq__(self, other):
        if not isinstance(other, (QuadExt, int, Fraction)):
            return NotImplemented
        return self._cmp(other) is Sign.ZERO

    def __lt__(self, other):
        s = self._cmp(other)
        return s if s is NotImplemented else s < 0

    def __le__(self, other):
        s = self._cmp(other)
        return s if s is NotImplemented else s <= 0

    def __gt__(self, other):
        s = self._cmp(other)
        return s if s is NotImplemented else s > 0

    def __ge__(self, other):
        s = self._cmp(other)
        return s if s is NotImplemented else s >= 0

    def __hash__(self):
        if self.is_rational():
            return hash(self.rational_value())
        return hash((self.a, self.p, self.q))

    def __bool__(self):
        return not self.is_zero()

    def __float__(self):
        return float(decimal_value(self, 30))

    # -- rendering ------------------------------------------------------

    def __repr__(self):
        return f"QuadExt({self.a}, {self.p!r}, {self.q!r})"

    def __str__(self):
        if self.q == 0:
            return format_rational(self.p)
        den = math.lcm(self.p.denominator, self.q.denominator)
        P, Q = int(self.p * den), int(self.q * den)
        root = "sqrt(%d)" % self.a
        if Q == 1:
            rad = root
        elif Q == -1:
            rad = "-" + root
        else:
            rad = f"{Q}*{root}"
        body = rad if P == 0 else f"{P}{'+' if Q > 0 else ''}{rad}"
        if den == 1:
            return body
        return f"({body})/{den}"


def quad_sign(x: Scalar) -> Sign:
    """Exact sign of ``p + q*sqrt(a)`` (ints and Fractions accepted too)."""
    if not isinstance(x, QuadExt):
        return Sign(_sgn(x))
    sp, sq = _sgn(x.p), _sgn(x.q)
    if sq == 0:
        return Sign(sp)
    if sp == 0 or sp == sq:
        return Sign(sq)
    lhs, rhs = x.p * x.p, x.q * x.q * x.a
    if lhs > rhs:
        return Sign(sp)
    if lhs < rhs:
        return Sign(sq)
    return Sign.ZERO


def quad_arith(x: QuadExt, y: QuadExt, op: str) -> QuadExt:
    """Dispatch helper over ``add``, ``sub``, ``mul``, ``div``."""
    if x.a != y.a:
        raise BaseMismatch(f"bases differ: {x.a} vs {y.a}")
    ops = {"add": QuadExt._add, "sub": QuadExt._sub, "mul": QuadExt._mul, "div": QuadExt._div}
    try:
        fn = ops[op]
    except KeyError:
        raise ValueError(f"unknown op {op!r}") from None
    return fn(x, y)


# ---------------------------------------------------------------------------
# Enclosures


@dataclass(frozen=True)
class RationalInterval:
    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @classmethod
    def point(cls, x) -> RationalInterval:
        x = Fraction(x)
        return cls(x, x)

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def __contains__(self, x) -> bool:
        return self.lo <= x <= self.hi

    def __add__(self, other):
        if isinstance(other, RationalInterval):
            return RationalInterval(self.lo + other.lo, self.hi + other.hi)
        other = Fraction(other)
        return RationalInterval(self.lo + other, self.hi + other)

    __radd__ = __add__

    def __neg__(self):
        return RationalInterval(-self.hi, -self.lo)

    def __sub__(self, other):
        return self + (-other if isinstance(other, RationalInterval) else -Fraction(other))

    def scale(self, c) -> RationalInterval:
        c = Fraction(c)
        if c >= 0:
            return RationalInterval(c * self.lo, c * self.hi)
        return RationalInterval(c * self.hi, c * self.lo)

    def sign(self) -> Sign | None:
        """Sign shared by every point, or ``None`` if the interval straddles it."""
        if self.lo > 0:
            return Sign.POS
        if self.hi < 0:
            return Sign.NEG
        if self.lo == self.hi == 0:
            return Sign.ZERO
        return None


def sqrt_enclosure(a: int, eps) -> RationalInterval:
    """Deterministic bisection enclosure of sqrt(a) with width at most ``eps``."""
    eps = Fraction(eps)
    if a < 0 or eps <= 0:
        raise ValueError("need a >= 0 and eps > 0")
    r = math.isqrt(a)
    if r * r == a:
        return RationalInterval.point(r)
    lo, hi = Fraction(r), Fraction(r + 1)
    while hi - lo > eps:
        mid = (lo + hi) / 2
        if mid * mid <= a:
            lo = mid
        else:
            hi = mid
    return RationalInterval(lo, hi)


def enclose(x: Scalar, eps) -> RationalInterval:
    """Rational enclosure of a scalar of width at most ``eps``."""
    if not isinstance(x, QuadExt):
        return RationalInterval.point(x)
    if x.q == 0:
        return RationalInterval.point(x.p)
    root = sqrt_enclosure(x.a, Fraction(eps) / abs(x.q))
    return root.scale(x.q) + x.p


# ---------------------------------------------------------------------------
# Serialization and rendering


def format_rational(x) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def parse_rational(s) -> Fraction:
    """Parse ``"num/den"`` (or an integer); floats are rejected as inexact."""
    if isinstance(s, bool) or isinstance(s, float):
        raise ValueError(f"inexact number {s!r}; write it as \"num/den\"")
    if isinstance(s, int):
        return Fraction(s)
    if not isinstance(s, str):
        raise ValueError(f"expected a rational string, got {s!r}")
    return Fraction(s.strip())


def scalar_to_json(x: Scalar):
    if isinstance(x, QuadExt):
        return {"a": x.a, "p": format_rational(x.p), "q": format_rational(x.q)}
    return format_rational(x)


def scalar_from_json(obj) -> Scalar:
    if isinstance(obj, dict):
        if set(obj) != {"a", "p", "q"}:
            raise ValueError(f"bad quadratic scalar {obj!r}")
        return QuadExt(int(obj["a"]), parse_rational(obj["p"]), parse_rational(obj["q"]))
    return parse_rational(obj)


def decimal_value(x: Scalar, prec: int = 50) -> decimal.Decimal:
    ctx = decimal.Context(prec=prec)
    if isinstance(x, float):
        return ctx.create_decimal(x)
    if isinstance(x, QuadExt):
        return ctx.add(decimal_value(x.p, prec), ctx.multiply(decimal_value(x.q, prec), ctx.sqrt(x.a)))
    x = Fraction(x)
    return ctx.divide(decimal.Decimal(x.numerator), decimal.Decimal(x.denominator))


def decimal_str(x: Scalar, places: int = 12) -> str:
    """Fixed-point rendering, rounded half-even; for display only."""
    d = decimal_value(x, places + 40)
    q = d.quantize(decimal.Decimal(1).scaleb(-places), rounding=decimal.ROUND_HALF_EVEN,
                   context=decimal.Context(prec=places + 60))
    if q == 0:
        q = abs(q)
    return f"{q:f}"


def simplest_between(lo: Fraction, hi: Fraction) -> Fraction:
    """The rational with the smallest denominator in the closed interval [lo, hi]."""
    lo, hi = Fraction(lo), Fraction(hi)
    if lo > hi:
        raise ValueError("empty interval")
    if lo <= 0 <= hi:
        return Fraction(0)
    if hi < 0:
        return -simplest_between(-hi, -lo)
    fl = math.floor(lo)
    if fl == lo:
        return Fraction(fl)
    if fl + 1 <= hi:
        return Fraction(fl + 1)
    return fl + 1 / simplest_between(1 / (hi - fl), 1 / (lo - fl))
