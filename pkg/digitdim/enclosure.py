"""
Rigorous enclosure arithmetic.

An Enclosure is a closed real interval [lo, hi] whose endpoints are binary
floating-point numbers (raw mpmath mpf tuples) rounded outward at a working
precision, so that every operation returns an interval containing the exact
image of every point of its inputs. ComplexBox pairs two enclosures.

The interval kernels are mpmath's ``libmpi`` functions (directed rounding
on each endpoint); transcendental functions come from the same module.
Exact rationals (int / Fraction) are accepted wherever an Enclosure is and
are converted with outward rounding.
"""

import math
from decimal import ROUND_CEILING, ROUND_FLOOR, Context, Decimal
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from typing import NamedTuple, Optional, Tuple, Union

from mpmath.libmp import (
    fnan,
    finf,
    fninf,
    fzero,
    from_int,
    from_rational,
    mpf_le,
    mpf_lt,
    mpf_sign,
    mpf_sub,
    round_ceiling,
    round_floor,
    to_str,
)
from mpmath.libmp.libmpi import (
    mpi_add,
    mpi_cos_sin,
    mpi_div,
    mpi_exp,
    mpi_log,
    mpi_mul,
    mpi_neg,
    mpi_pi,
    mpi_pow_int,
    mpi_sqrt,
    mpi_square,
    mpi_sub,
)

from .config import default_precision
from .errors import DomainError

Rational = Union[int, Fraction]
Real = Union["Enclosure", int, Fraction]

_DEFAULT_PRECISION: Optional[int] = None


def working_precision(prec: Optional[int] = None) -> int:
    """``prec`` itself, or the process default (DIGITDIM_PRECISION or 128)"""
    global _DEFAULT_PRECISION
    if prec is not None:
        return prec
    if _DEFAULT_PRECISION is None:
        _DEFAULT_PRECISION = default_precision()
    return _DEFAULT_PRECISION


def mpf_to_fraction(v) -> Fraction:
    """Exact rational value of a finite mpf"""
    if v in (finf, fninf, fnan):
        raise DomainError("non-finite endpoint has no rational value")
    sign, man, exp, _ = v
    n = -int(man) if sign else int(man)
    if exp >= 0:
        return Fraction(n << exp)
    return Fraction(n, 1 << -exp)


def _as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("bool is not a rational")
    if isinstance(value, (int, float, Decimal)):
        if isinstance(value, float) and not math.isfinite(value):
            raise DomainError(f"non-finite value {value!r}")
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    raise TypeError(f"cannot convert {type(value).__name__} to an exact rational")


def _rational_bounds(q: Fraction, prec: int):
    return (
        from_rational(q.numerator, q.denominator, prec, round_floor),
        from_rational(q.numerator, q.denominator, prec, round_ceiling),
    )


class Enclosure:
    """
    A directed-rounded real interval.

    Instances are immutable; ``lo``/``hi`` are raw mpf tuples and ``prec``
    is the working precision (binary fraction bits) used by operations that
    start from this value.
    """

    __slots__ = ("lo", "hi", "prec")

    def __init__(self, lo, hi, prec: Optional[int] = None):
        if lo == fnan or hi == fnan:
            raise DomainError("enclosure endpoint is NaN")
        if mpf_lt(hi, lo):
            raise DomainError("enclosure lower endpoint exceeds upper endpoint")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        object.__setattr__(self, "prec", working_precision(prec))

    def __setattr__(self, name, value):
        raise AttributeError("Enclosure is immutable")

    def __reduce__(self):
        return (Enclosure, (self.lo, self.hi, self.prec))

    # -- construction ---------------------------------------------------

    @classmethod
    def exact(cls, value, prec: Optional[int] = None) -> "Enclosure":
        """Tightest enclosure of an exact number (int, Fraction, Decimal, str, float)"""
        prec = working_precision(prec)
        q = _as_fraction(value)
        lo, hi = _rational_bounds(q, prec)
        return cls(lo, hi, prec)

    @classmethod
    def between(cls, lo, hi, prec: Optional[int] = None) -> "Enclosure":
        """Enclosure of the exact interval [lo, hi]"""
        prec = working_precision(prec)
        qlo, qhi = _as_fraction(lo), _as_fraction(hi)
        if qlo > qhi:
            raise DomainError(f"empty interval [{qlo}, {qhi}]")
        return cls(_rational_bounds(qlo, prec)[0], _rational_bounds(qhi, prec)[1], prec)

    @classmethod
    def from_mpi(cls, pair, prec: Optional[int] = None) -> "Enclosure":
        lo, hi = pair
        return cls(lo, hi, prec)

    @classmethod
    def pi(cls, prec: Optional[int] = None) -> "Enclosure":
        prec = working_precision(prec)
        return cls.from_mpi(_pi_pair(prec), prec)

    # -- inspection -----------------------------------------------------

    @property
    def mpi(self):
        return (self.lo, self.hi)

    @property
    def lower(self) -> Fraction:
        """Exact value of the lower endpoint"""
        return mpf_to_fraction(self.lo)

    @property
    def upper(self) -> Fraction:
        """Exact value of the upper endpoint"""
        return mpf_to_fraction(self.hi)

    @property
    def is_point(self) -> bool:
        return self.lo == self.hi

    @property
    def is_finite(self) -> bool:
        return self.lo not in (finf, fninf) and self.hi not in (finf, fninf)

    def width(self) -> Fraction:
        return self.upper - self.lower

    def midpoint(self) -> float:
        return float((self.lower + self.upper) / 2)

    def contains(self, value) -> bool:
        """True if ``value`` (a number, or an Enclosure as a subset) lies inside"""
        if isinstance(value, Enclosure):
            return mpf_le(self.lo, value.lo) and mpf_le(value.hi, self.hi)
        q = _as_fraction(value)
        return self.lower <= q <= self.upper

    def contains_zero(self) -> bool:
        return mpf_sign(self.lo) <= 0 <= mpf_sign(self.hi)

    def overlaps(self, other: "Enclosure") -> bool:
        return mpf_le(self.lo, other.hi) and mpf_le(other.lo, self.hi)

    def hull(self, other: "Enclosure") -> "Enclosure":
        lo = self.lo if mpf_le(self.lo, other.lo) else other.lo
        hi = self.hi if mpf_le(other.hi, self.hi) else other.hi
        return Enclosure(lo, hi, max(self.prec, other.prec))

    def intersect(self, other: "Enclosure") -> "Enclosure":
        lo = other.lo if mpf_le(self.lo, other.lo) else self.lo
        hi = self.hi if mpf_le(self.hi, other.hi) else other.hi
        if mpf_lt(hi, lo):
            raise DomainError("enclosures do not intersect")
        return Enclosure(lo, hi, max(self.prec, other.prec))

    def clamp(self, lo: Rational, hi: Rational) -> "Enclosure":
        """Intersect with the exact interval [lo, hi] known to contain the value"""
        return self.intersect(Enclosure.between(lo, hi, self.prec))

    def with_precision(self, prec: int) -> "Enclosure":
        return Enclosure(self.lo, self.hi, prec)

    # -- arithmetic -----------------------------------------------------

    def _coerce(self, other) -> "Enclosure":
        if isinstance(other, Enclosure):
            return other
        return Enclosure.exact(other, self.prec)

    def _binary(self, other, kernel) -> "Enclosure":
        other = self._coerce(other)
        prec = max(self.prec, other.prec)
        return Enclosure.from_mpi(kernel(self.mpi, other.mpi, prec), prec)

    def __add__(self, other):
        return self._binary(other, mpi_add)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binary(other, mpi_sub)

    def __rsub__(self, other):
        return self._coerce(other).__sub__(self)

    def __mul__(self, other):
        return self._binary(other, mpi_mul)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other.contains_zero():
            raise DomainError("division by an enclosure containing zero")
        return self._binary(other, mpi_div)

    def __rtruediv__(self, other):
        return self._coerce(other).__truediv__(self)

    def __neg__(self):
        return Enclosure.from_mpi(mpi_neg(self.mpi), self.prec)

    def __pos__(self):
        return self

    def __pow__(self, n: int):
        if not isinstance(n, int):
            raise TypeError("only integer powers are supported")
        if n < 0 and self.contains_zero():
            raise DomainError("negative power of an enclosure containing zero")
        return Enclosure.from_mpi(mpi_pow_int(self.mpi, n, self.prec), self.prec)

    def sqrt(self) -> "Enclosure":
        if mpf_sign(self.lo) < 0:
            raise DomainError("square root of an enclosure with negative part")
        return Enclosure.from_mpi(mpi_sqrt(self.mpi, self.prec), self.prec)

    def log(self) -> "Enclosure":
        return elementary(self, "log")

    def exp(self) -> "Enclosure":
        return elementary(self, "exp")

    def __eq__(self, other):
        if not isinstance(other, Enclosure):
            return NotImplemented
        return self.lo == other.lo and self.hi == other.hi

    def __hash__(self):
        return hash((self.lo, self.hi))

    def __repr__(self):
        return f"Enclosure([{to_str(self.lo, 17)}, {to_str(self.hi, 17)}])"


@lru_cache(maxsize=16)
def _pi_pair(prec: int):
    return mpi_pi(prec)


_TWO = from_int(2)


@lru_cache(maxsize=16)
def _two_pi_pair(prec: int):
    return mpi_mul((_TWO, _TWO), mpi_pi(prec + 8), prec)


def arith(a: Real, b: Real, op: str) -> Enclosure:
    """
    Apply ``op`` (add, sub, mul, div) to two enclosures.

    Raises:
        DomainError: div with 0 in the divisor
        ValueError: unknown op
    """
    if not isinstance(a, Enclosure):
        a = Enclosure.exact(a, b.prec if isinstance(b, Enclosure) else None)
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown arithmetic op '{op}'")


def elementary(x: Enclosure, fn: str) -> Enclosure:
    """
    Enclosure of log(x) or exp(x).

    Raises:
        DomainError: log of an enclosure reaching zero or below
    """
    if fn == "log":
        if mpf_sign(x.lo) <= 0:
            raise DomainError("log requires a strictly positive enclosure")
        return Enclosure.from_mpi(mpi_log(x.mpi, x.prec), x.prec)
    if fn == "exp":
        return Enclosure.from_mpi(mpi_exp(x.mpi, x.prec), x.prec)
    raise ValueError(f"unknown elementary function '{fn}'")


class Comparison(Enum):
    BELOW = "below"
    ABOVE = "above"
    STRADDLES = "straddles"


def compare_threshold(x: Enclosure, t) -> Comparison:
    """Position of ``x`` relative to the exact rational ``t``"""
    t = _as_fraction(t)
    if x.upper < t:
        return Comparison.BELOW
    if x.lower > t:
        return Comparison.ABOVE
    return Comparison.STRADDLES


def compare_enclosures(x: Enclosure, y: Enclosure) -> Comparison:
    """BELOW iff every point of x is below every point of y; ABOVE symmetric"""
    if mpf_lt(x.hi, y.lo):
        return Comparison.BELOW
    if mpf_lt(y.hi, x.lo):
        return Comparison.ABOVE
    return Comparison.STRADDLES


class ComplexBox:
    """Rectangle re × im in the complex plane"""

    __slots__ = ("re", "im")

    def __init__(self, re: Enclosure, im: Enclosure):
        object.__setattr__(self, "re", re)
        object.__setattr__(self, "im", im)

    def __setattr__(self, name, value):
        raise AttributeError("ComplexBox is immutable")

    def __reduce__(self):
        return (ComplexBox, (self.re, self.im))

    @classmethod
    def exact(cls, re, im=0, prec: Optional[int] = None) -> "ComplexBox":
        return cls(Enclosure.exact(re, prec), Enclosure.exact(im, prec))

    @property
    def prec(self) -> int:
        return max(self.re.prec, self.im.prec)

    def contains(self, value) -> bool:
        if isinstance(value, ComplexBox):
            return self.re.contains(value.re) and self.im.contains(value.im)
        if isinstance(value, tuple):
            re, im = value
        else:
            value = complex(value)
            re, im = value.real, value.imag
        return self.re.contains(re) and self.im.contains(im)

    def __add__(self, other):
        if isinstance(other, ComplexBox):
            return ComplexBox(self.re + other.re, self.im + other.im)
        return ComplexBox(self.re + other, self.im)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, ComplexBox):
            return ComplexBox(self.re - other.re, self.im - other.im)
        return ComplexBox(self.re - other, self.im)

    def __rsub__(self, other):
        return ComplexBox(other - self.re, -self.im)

    def __neg__(self):
        return ComplexBox(-self.re, -self.im)

    def __mul__(self, other):
        if isinstance(other, ComplexBox):
            return ComplexBox(
                self.re * other.re - self.im * other.im,
                self.re * other.im + self.im * other.re,
            )
        return ComplexBox(self.re * other, self.im * other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, ComplexBox):
            raise TypeError("complex division is not supported; divide by a real modulus")
        return ComplexBox(self.re / other, self.im / other)

    def __abs__(self) -> Enclosure:
        return modulus(self)

    def __repr__(self):
        return f"ComplexBox(re={self.re!r}, im={self.im!r})"


def modulus(z: ComplexBox) -> Enclosure:
    """Enclosure of |w| over every w in the box"""
    prec = z.prec
    sq = mpi_add(mpi_square(z.re.mpi, prec), mpi_square(z.im.mpi, prec), prec)
    lo, hi = mpi_sqrt(sq, prec)
    if mpf_sign(lo) < 0:
        lo = fzero
    return Enclosure(lo, hi, prec)


_EXACT_TURNS = {
    Fraction(0): (1, 0),
    Fraction(1, 4): (0, 1),
    Fraction(1, 2): (-1, 0),
    Fraction(3, 4): (0, -1),
}


def unit_circle(x, prec: Optional[int] = None) -> ComplexBox:
    """
    Box containing e(t) = exp(2πit) for every t in ``x``.

    ``x`` is an exact rational or an Enclosure. Exact rationals are reduced
    modulo 1 exactly before any rounding; enclosures are shifted by the
    integer part of their lower endpoint.

    Raises:
        DomainError: non-finite input
    """
    if isinstance(x, Enclosure):
        prec = working_precision(prec if prec is not None else x.prec)
        if not x.is_finite:
            raise DomainError("unit_circle requires a finite argument")
        if x.is_point:
            return _unit_circle_rational(x.lower, prec)
        lower, upper = x.lower, x.upper
        shift = math.floor(lower)
        lower, upper = lower - shift, upper - shift
        if upper - lower >= 1:
            one = Enclosure.between(-1, 1, prec)
            return ComplexBox(one, one)
        lo = mpf_sub(x.lo, from_int(shift))
        hi = mpf_sub(x.hi, from_int(shift))
        theta = mpi_mul(_two_pi_pair(prec + 16), (lo, hi), prec + 16)
        return _circle_box(theta, prec)
    try:
        q = _as_fraction(x)
    except (TypeError, ValueError, ZeroDivisionError):
        raise DomainError(f"unit_circle cannot take {x!r}") from None
    return _unit_circle_rational(q, working_precision(prec))


def _unit_circle_rational(q: Fraction, prec: int) -> ComplexBox:
    r = q - math.floor(q)
    exact = _EXACT_TURNS.get(r)
    if exact is not None:
        return ComplexBox.exact(exact[0], exact[1], prec)
    wp = prec + 16
    theta = mpi_mul(_two_pi_pair(wp), _rational_bounds(r, wp), wp)
    return _circle_box(theta, prec)


def _circle_box(theta, prec: int) -> ComplexBox:
    c, s = mpi_cos_sin(theta, prec)
    return ComplexBox(
        Enclosure.from_mpi(c, prec).clamp(-1, 1), Enclosure.from_mpi(s, prec).clamp(-1, 1)
    )


# -- decimal endpoints ---------------------------------------------------


def decimal_digits(prec: int) -> int:
    """Significant decimal digits that resolve ``prec`` binary bits"""
    return int(prec * 0.30102999566398120) + 4


def _directed_decimal(q: Fraction, digits: int, rounding: str) -> Decimal:
    if q == 0:
        return Decimal(0)
    ctx = Context(prec=digits, rounding=rounding, Emin=-999999, Emax=999999)
    return ctx.divide(Decimal(q.numerator), Decimal(q.denominator))


class DecimalBounds(NamedTuple):
    """
    Interval endpoints as decimals: ``lo`` rounded down, ``hi`` rounded up.

    Used wherever enclosures are written out; comparisons made on the
    decimals are exact, so a verdict derived from them can be rechecked
    from the serialized text alone.
    """

    lo: Decimal
    hi: Decimal

    @classmethod
    def from_enclosure(cls, x: Enclosure, digits: Optional[int] = None) -> "DecimalBounds":
        digits = digits or decimal_digits(x.prec)
        return cls(
            _directed_decimal(x.lower, digits, ROUND_FLOOR),
            _directed_decimal(x.upper, digits, ROUND_CEILING),
        )

    @classmethod
    def parse(cls, pair) -> "DecimalBounds":
        lo, hi = pair
        bounds = cls(Decimal(str(lo)), Decimal(str(hi)))
        if not (bounds.lo.is_finite() and bounds.hi.is_finite()):
            raise DomainError(f"non-finite bounds {pair!r}")
        if bounds.lo > bounds.hi:
            raise DomainError(f"inverted bounds {pair!r}")
        return bounds

    @property
    def lower(self) -> Fraction:
        return Fraction(self.lo)

    @property
    def upper(self) -> Fraction:
        return Fraction(self.hi)

    def to_enclosure(self, prec: Optional[int] = None) -> Enclosure:
        return Enclosure.between(self.lower, self.upper, prec)

    def to_json(self) -> Tuple[str, str]:
        return (str(self.lo), str(self.hi))
