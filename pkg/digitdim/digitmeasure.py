"""
Missing-digit measures.

A DigitSystem is a base b with an exact probability vector p on the digits
0..b-1; its measure ν is the law of Σ ξ_j b^-j with i.i.d. digits ξ_j ~ p.
This module evaluates the functions built from it:

    g(x)   = |Σ_j p_j e(jx)|                        symbol_modulus
    S_L(x) = Π_{j<L} g(b^j x)                       cocycle_product
    F_L(x) = Σ_{i<b^L} S_L(x + i/b^L)               grid_sum
    |ν̂(ξ)| ≤ Π_{j=1..J} g(ξ/b^j)                    fourier_coefficient_truncated

All values are Enclosures. Arguments given as exact rationals stay exact
until the final conversion inside unit_circle.
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product as cartesian
from typing import Iterable, List, Optional, Sequence, Tuple, Union

from .config import DEFAULT_GUARD
from .enclosure import ComplexBox, Enclosure, modulus, unit_circle, working_precision
from .errors import ParameterError, SystemSpecError, UnsupportedError
from .log import get_logger

logger = get_logger(__name__)

Argument = Union[Enclosure, int, Fraction]

DIRECT = "direct"
CLOSED = "closed"

# |e(x) - 1| below this on an interval argument: intersect with the direct sum
NEAR_INTEGER = Fraction(1, 2)


def parse_rational(text: str) -> Fraction:
    """
    Parse ``n/d``, a decimal or scientific literal into an exact Fraction.

    ``"1e-5"`` is exactly 1/100000; floats never take part.
    """
    text = str(text).strip()
    try:
        value = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise ParameterError(f"not an exact rational: '{text}'") from None
    return value


@dataclass(frozen=True)
class DigitSystem:
    """
    Base ``b`` and exact digit weights p_0..p_{b-1}.

    Invariants: weights are non-negative and sum to 1; at least two digits
    carry weight; p is not the uniform vector on all b digits.
    """

    base: int
    weights: Tuple[Fraction, ...]

    def __post_init__(self):
        b = self.base
        if not isinstance(b, int) or b < 2:
            raise ParameterError(f"base must be an integer >= 2, got {b!r}")
        weights = tuple(Fraction(w) for w in self.weights)
        object.__setattr__(self, "weights", weights)
        if len(weights) != b:
            raise ParameterError(f"expected {b} weights, got {len(weights)}")
        if any(w < 0 for w in weights):
            raise ParameterError("weights must be non-negative")
        if sum(weights) != 1:
            raise ParameterError(f"weights must sum to 1, got {sum(weights)}")
        if len(self.digits) < 2:
            raise ParameterError("at least two digits must carry weight")
        if all(w == Fraction(1, b) for w in weights):
            raise ParameterError("the uniform vector on all digits is excluded")

    @property
    def digits(self) -> Tuple[int, ...]:
        return tuple(j for j, w in enumerate(self.weights) if w != 0)

    @property
    def is_uniform(self) -> bool:
        """Uniform on its digit set (the natural measure)"""
        ds = self.digits
        return all(self.weights[j] == Fraction(1, len(ds)) for j in ds)

    @property
    def missing_digit(self) -> Optional[int]:
        """The single absent digit for a uniform (b-1)-digit system, else None"""
        if not self.is_uniform or len(self.digits) != self.base - 1:
            return None
        return next(j for j, w in enumerate(self.weights) if w == 0)

    def describe(self) -> str:
        """Canonical text form, accepted back by parse_system"""
        a = self.missing_digit
        if a is not None:
            return f"b={self.base} missing={a}"
        if self.is_uniform:
            return f"b={self.base} digits={','.join(map(str, self.digits))}"
        return f"b={self.base} probs={','.join(str(w) for w in self.weights)}"

    def __str__(self):
        return self.describe()


@dataclass(frozen=True)
class APDigitSpec:
    """Digit set {kd + a : k = 0..l-1}"""

    a: int
    d: int
    l: int

    def __post_init__(self):
        if self.a < 0:
            raise ParameterError(f"offset a must be >= 0, got {self.a}")
        if self.d < 1:
            raise ParameterError(f"step d must be >= 1, got {self.d}")
        if self.l < 2:
            raise ParameterError(f"length l must be >= 2, got {self.l}")

    def digits(self, base: int) -> Tuple[int, ...]:
        self.validate(base)
        return tuple(k * self.d + self.a for k in range(self.l))

    def validate(self, base: int) -> None:
        if base < 3:
            raise ParameterError(f"base must be >= 3, got {base}")
        if self.a + self.d * (self.l - 1) > base - 1:
            raise ParameterError(
                f"digit {self.a + self.d * (self.l - 1)} does not exist in base {base}"
            )
        if self.l >= base:
            raise ParameterError("digit set must be a proper subset of {0..b-1}")


def make_uniform(b: int, digits: Iterable[int]) -> DigitSystem:
    """Natural measure on an explicit digit set"""
    ds = sorted(set(digits))
    if not ds or ds[0] < 0 or ds[-1] >= b:
        raise ParameterError(f"digits {ds} are not all in 0..{b - 1}")
    w = Fraction(1, len(ds))
    return DigitSystem(b, tuple(w if j in ds else Fraction(0) for j in range(b)))


def make_one_missing(b: int, a: int) -> DigitSystem:
    """
    Uniform weights 1/(b-1) on every digit except ``a``.

    Raises:
        ParameterError: b < 3, or a outside 0..b-1
    """
    if b < 3:
        raise ParameterError(f"one-missing-digit systems need b >= 3, got b={b}")
    if not 0 <= a <= b - 1:
        raise ParameterError(f"missing digit must be in 0..{b - 1}, got {a}")
    return make_uniform(b, (j for j in range(b) if j != a))


def make_ap(b: int, spec: APDigitSpec) -> DigitSystem:
    """Natural measure on the arithmetic-progression digit set of ``spec``"""
    return make_uniform(b, spec.digits(b))


def parse_system(text: str) -> DigitSystem:
    """
    Parse ``"b=5 missing=1"``, ``"b=10 digits=0,2,4"`` or
    ``"b=4 probs=1/2,1/4,1/4,0"``.

    Raises:
        SystemSpecError: malformed text or invalid system
    """
    fields = {}
    for token in text.replace(";", " ").split():
        key, sep, value = token.partition("=")
        if not sep or not value:
            raise SystemSpecError(f"expected key=value, got '{token}'")
        key = key.strip().lower()
        if key in fields:
            raise SystemSpecError(f"duplicate key '{key}'")
        fields[key] = value.strip()

    if "b" not in fields:
        raise SystemSpecError(f"missing base 'b=' in '{text}'")
    kinds = [k for k in ("missing", "digits", "probs") if k in fields]
    if len(kinds) != 1:
        raise SystemSpecError("exactly one of missing=, digits=, probs= is required")
    extra = set(fields) - {"b", kinds[0]}
    if extra:
        raise SystemSpecError(f"unknown key(s): {', '.join(sorted(extra))}")

    try:
        b = int(fields["b"])
        kind = kinds[0]
        if kind == "missing":
            return make_one_missing(b, int(fields["missing"]))
        if kind == "digits":
            return make_uniform(b, [int(d) for d in fields["digits"].split(",")])
        probs = [parse_rational(p) for p in fields["probs"].split(",")]
        return DigitSystem(b, tuple(probs))
    except SystemSpecError:
        raise
    except (ParameterError, ValueError) as e:
        raise SystemSpecError(f"invalid system '{text}': {e}") from None


def mirror(system: DigitSystem) -> DigitSystem:
    """
    Image of the measure under x -> 1 - x (digit j becomes b-1-j).

    g is unchanged up to conjugation, so all dimension quantities agree.
    """
    return DigitSystem(system.base, tuple(reversed(system.weights)))


def power_system(system: DigitSystem, L: int) -> DigitSystem:
    """
    The same measure written in base b^L.

    Digit k = Σ_{j<L} ξ_j b^j has weight Π p_{ξ_j}; the symbol of the
    lifted system equals S_L of the original one.
    """
    if L < 1:
        raise ParameterError(f"L must be >= 1, got {L}")
    b = system.base
    weights = [Fraction(0)] * (b ** L)
    for combo in cartesian(range(b), repeat=L):
        w = Fraction(1)
        for xi in combo:
            w *= system.weights[xi]
        if w:
            weights[sum(xi * b ** j for j, xi in enumerate(combo))] = w
    return DigitSystem(b ** L, tuple(weights))


# -- the symbol g ----------------------------------------------------------


class SymbolEvaluator:
    """
    Evaluates g for one system at a fixed precision.

    Uniform one-missing-digit systems use two paths: the direct sum when
    |e(x) - 1| is within ``guard`` of zero, the closed form
    |(e(bx) - 1)/(e(x) - 1) - e(ax)| / (b-1) elsewhere. The closed form is
    computed as |e(bx) - 1 - e(ax)(e(x) - 1)| / |e(x) - 1| so only a real
    modulus is ever divided by.
    """

    def __init__(
        self,
        system: DigitSystem,
        prec: Optional[int] = None,
        guard: Fraction = DEFAULT_GUARD,
        path: Optional[str] = None,
    ):
        if path not in (None, DIRECT, CLOSED):
            raise ParameterError(f"unknown evaluation path '{path}'")
        if path == CLOSED and system.missing_digit is None:
            raise ParameterError("the closed form needs a uniform one-missing-digit system")
        self.system = system
        self.prec = working_precision(prec)
        self.guard = Fraction(guard)
        self.path = path
        self._missing = system.missing_digit
        self._terms = [
            (j, Enclosure.exact(w, self.prec)) for j, w in enumerate(system.weights) if w
        ]
        self._uniform_scale = (
            Fraction(1, len(self._terms)) if system.is_uniform else None
        )

    def __call__(self, x: Argument) -> Enclosure:
        if isinstance(x, Enclosure) and x.is_point:
            x = x.lower
        if not isinstance(x, Enclosure):
            x = Fraction(x)
            x -= math.floor(x)
        if self.path == DIRECT or self._missing is None:
            value = self._direct(x)
        else:
            value = self._closed_or_direct(x)
        return value.clamp(0, 1)

    def _scaled(self, k: int, x):
        if isinstance(x, Enclosure):
            return x * k
        return k * x

    def _direct(self, x) -> Enclosure:
        prec = self.prec
        total = ComplexBox.exact(0, 0, prec)
        if self._uniform_scale is not None:
            for j, _ in self._terms:
                total = total + unit_circle(self._scaled(j, x), prec)
            return modulus(total) * self._uniform_scale
        for j, w in self._terms:
            total = total + unit_circle(self._scaled(j, x), prec) * w
        return modulus(total)

    def _closed_or_direct(self, x) -> Enclosure:
        prec = self.prec
        b, a = self.system.base, self._missing
        e1 = unit_circle(x, prec)
        denom = e1 - 1
        dm = modulus(denom)
        if self.path != CLOSED and dm.lower <= self.guard:
            return self._direct(x)
        if dm.contains_zero():
            # forced closed path at an integer: the formula is undefined there
            return self._direct(x)
        eb = unit_circle(self._scaled(b, x), prec)
        ea = unit_circle(self._scaled(a, x), prec)
        numer = (eb - 1) - ea * denom
        closed = (modulus(numer) / dm / (b - 1)).clamp(0, 1)
        if self.path != CLOSED and isinstance(x, Enclosure) and dm.upper < NEAR_INTEGER:
            return closed.intersect(self._direct(x).clamp(0, 1))
        return closed


def symbol_modulus(
    system: DigitSystem,
    x: Argument,
    prec: Optional[int] = None,
    guard: Fraction = DEFAULT_GUARD,
    path: Optional[str] = None,
) -> Enclosure:
    """
    Enclosure of g(t) = |Σ p_j e(jt)| for every t in ``x``.

    ``path`` forces DIRECT or CLOSED evaluation; by default the closed form
    is used for uniform one-missing-digit systems away from integers.
    """
    return SymbolEvaluator(system, prec, guard, path)(x)


def cocycle_product(
    system: DigitSystem,
    L: int,
    x: Argument,
    prec: Optional[int] = None,
    guard: Fraction = DEFAULT_GUARD,
) -> Enclosure:
    """Enclosure of S_L(x) = Π_{j<L} g(b^j x)"""
    if L < 1:
        raise ParameterError(f"L must be >= 1, got {L}")
    g = SymbolEvaluator(system, prec, guard)
    b = system.base
    if isinstance(x, Enclosure) and x.is_point:
        x = x.lower
    result = None
    for j in range(L):
        arg = x * b ** j if isinstance(x, Enclosure) else Fraction(x) * b ** j
        factor = g(arg)
        result = factor if result is None else result * factor
    return result.clamp(0, 1)


def grid_sum(
    system: DigitSystem,
    L: int,
    x: Argument,
    prec: Optional[int] = None,
    guard: Fraction = DEFAULT_GUARD,
    evaluator: Optional[SymbolEvaluator] = None,
) -> Enclosure:
    """
    Enclosure of F_L(x) = Σ_{i=0}^{b^L - 1} S_L(x + i/b^L).

    For an exact abscissa, factor j of term i is g(b^j x + i/b^(L-j)), which
    only depends on i mod b^(L-j); each distinct factor is evaluated once.
    """
    if L < 1:
        raise ParameterError(f"L must be >= 1, got {L}")
    g = evaluator or SymbolEvaluator(system, prec, guard)
    b = system.base
    n = b ** L
    if isinstance(x, Enclosure) and not x.is_point:
        total = Enclosure.exact(0, g.prec)
        for i in range(n):
            shifted = x + Fraction(i, n)
            term = None
            for j in range(L):
                factor = g(shifted * b ** j)
                term = factor if term is None else term * factor
            total = total + term
        return total
    if isinstance(x, Enclosure):
        x = x.lower
    x = Fraction(x)

    tables: List[List[Enclosure]] = []
    for j in range(L):
        period = b ** (L - j)
        base_arg = x * b ** j
        tables.append([g(base_arg + Fraction(r, period)) for r in range(period)])

    total = Enclosure.exact(0, g.prec)
    for i in range(n):
        term = tables[0][i]
        for j in range(1, L):
            term = term * tables[j][i % b ** (L - j)]
        total = total + term
    return total


# -- dimensions and Fourier coefficients -----------------------------------


def hausdorff_dimension(system: DigitSystem, prec: Optional[int] = None) -> Enclosure:
    """
    Enclosure of log #D / log b for a natural (uniform) measure.

    Raises:
        UnsupportedError: weights are not uniform on the digit set
    """
    if not system.is_uniform:
        raise UnsupportedError(
            "Hausdorff dimension is only provided for uniform weights on the digit set"
        )
    prec = working_precision(prec)
    return Enclosure.exact(len(system.digits), prec).log() / Enclosure.exact(
        system.base, prec
    ).log()


def fourier_coefficient_truncated(
    system: DigitSystem,
    xi: int,
    J: int,
    prec: Optional[int] = None,
    guard: Fraction = DEFAULT_GUARD,
    evaluator: Optional[SymbolEvaluator] = None,
) -> Enclosure:
    """
    Enclosure of Π_{j=1..J} g(ξ / b^j).

    Every omitted factor of the infinite product is at most 1, so the result
    bounds |ν̂(ξ)| from above.
    """
    if J < 1:
        raise ParameterError(f"truncation depth J must be >= 1, got {J}")
    g = evaluator or SymbolEvaluator(system, prec, guard)
    b = system.base
    result = Enclosure.exact(1, g.prec)
    for j in range(1, J + 1):
        result = result * g(Fraction(xi, b ** j))
    return result.clamp(0, 1)


def truncated_partial_sum(
    system: DigitSystem,
    Q: int,
    J: int,
    prec: Optional[int] = None,
    guard: Fraction = DEFAULT_GUARD,
) -> Enclosure:
    """Σ_{n<Q} of the truncated coefficients"""
    g = SymbolEvaluator(system, prec, guard)
    total = Enclosure.exact(0, g.prec)
    for n in range(Q):
        total = total + fourier_coefficient_truncated(system, n, J, evaluator=g)
    return total


def empirical_kappa1(
    system: DigitSystem,
    Q: int,
    J: int,
    prec: Optional[int] = None,
    guard: Fraction = DEFAULT_GUARD,
) -> Enclosure:
    """
    Diagnostic −log(Q⁻¹ Σ_{n<Q} |ν̂(n)|) / log Q with truncated coefficients.

    Tends to κ̂₁(ν) as Q grows; not a certified bound.
    """
    if Q < 2:
        raise ParameterError(f"Q must be >= 2, got {Q}")
    total = truncated_partial_sum(system, Q, J, prec, guard)
    prec = total.prec
    logq = Enclosure.exact(Q, prec).log()
    return -(total / Q).log() / logq


def systems_up_to_symmetry(b: int) -> Sequence[DigitSystem]:
    """One-missing-digit systems of base b with a <= floor((b-1)/2)"""
    return [make_one_missing(b, a) for a in range((b - 1) // 2 + 1)]
