"""
Closed-form lower bounds for κ̂₁, evaluated as enclosures.

Logarithms are natural throughout.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, Optional, Tuple

from .digitmeasure import APDigitSpec, make_ap, hausdorff_dimension
from .enclosure import (
    Comparison,
    DecimalBounds,
    Enclosure,
    compare_threshold,
    working_precision,
)
from .errors import NotFoundError, ParameterError
from .log import get_logger

logger = get_logger(__name__)

EXPSUM = "expsum"
ONE_MISSING = "one_missing"
AP_DIGITS = "ap_digits"

ONE_MISSING_TIMES_DIM = "one_missing_times_dim"
SCAN_LIMIT = 10 ** 6
SCAN_MAX_PRECISION = 1024


@dataclass(frozen=True)
class AnalyticBound:
    kind: str
    parameters: Dict[str, int]
    value: Enclosure
    dimension: Optional[Enclosure] = None
    warnings: Tuple[str, ...] = field(default_factory=tuple)

    def to_dict(self) -> dict:
        out = {"kind": self.kind, "parameters": dict(self.parameters)}
        out["value"] = list(DecimalBounds.from_enclosure(self.value).to_json())
        if self.dimension is not None:
            out["dimension"] = list(DecimalBounds.from_enclosure(self.dimension).to_json())
        out["warnings"] = list(self.warnings)
        return out


def _log(n, prec: int) -> Enclosure:
    return Enclosure.exact(n, prec).log()


def expsum_bound(b: int, l: int, prec: Optional[int] = None) -> Enclosure:
    """
    b(1 + log 2l) + 3l + 2, the uniform bound on the base-b block sums of
    |Σ_{k<l} e((kd + a) t)| used for arithmetic-progression digit sets.

    Raises:
        ParameterError: l outside [3, b]
    """
    if not 3 <= l <= b:
        raise ParameterError(f"need 3 <= l <= b, got b={b}, l={l}")
    prec = working_precision(prec)
    return (_log(2 * l, prec) + 1) * b + (3 * l + 2)


def lower_bound_one_missing(b: int, prec: Optional[int] = None) -> Enclosure:
    """
    log(b-1)/log b - log(5 + log 2b + 2/b)/log b.

    Negative (vacuous) for small b; exceeds 1/2 from b = 111 on.
    """
    if b < 3:
        raise ParameterError(f"b must be >= 3, got {b}")
    prec = working_precision(prec)
    logb = _log(b, prec)
    inner = _log(2 * b, prec) + Fraction(5 * b + 2, b)
    return (_log(b - 1, prec) - inner.log()) / logb


def lower_bound_ap(
    b: int, spec: APDigitSpec, prec: Optional[int] = None
) -> Tuple[Enclosure, Enclosure]:
    """
    (dim, bound) for the natural measure on {kd + a : k < l}:
    dim = log l/log b and bound = dim - log(4 + log 2l)/log b.
    """
    spec.validate(b)
    prec = working_precision(prec)
    dim = hausdorff_dimension(make_ap(b, spec), prec)
    correction = (_log(2 * spec.l, prec) + 4).log() / _log(b, prec)
    return dim, dim - correction


def expsum_report(b: int, l: int, prec: Optional[int] = None) -> AnalyticBound:
    return AnalyticBound(EXPSUM, {"b": b, "l": l}, expsum_bound(b, l, prec))


def one_missing_report(b: int, prec: Optional[int] = None) -> AnalyticBound:
    prec = working_precision(prec)
    dim = _log(b - 1, prec) / _log(b, prec) if b >= 3 else None
    return AnalyticBound(ONE_MISSING, {"b": b}, lower_bound_one_missing(b, prec), dim)


def ap_report(b: int, spec: APDigitSpec, prec: Optional[int] = None) -> AnalyticBound:
    dim, bound = lower_bound_ap(b, spec, prec)
    warnings = ()
    if math.gcd(spec.d, b) > 1:
        msg = f"gcd(d, b) = {math.gcd(spec.d, b)} > 1: the exponential-sum estimate assumes d coprime to b"
        logger.warning(msg)
        warnings = (msg,)
    params = {"b": b, "a": spec.a, "d": spec.d, "l": spec.l}
    return AnalyticBound(AP_DIGITS, params, bound, dim, warnings)


def _scan_value(kind: str) -> Callable[[int, int], Enclosure]:
    if kind == ONE_MISSING:
        return lower_bound_one_missing
    if kind == ONE_MISSING_TIMES_DIM:
        return lambda b, prec: lower_bound_one_missing(b, prec) * (
            _log(b - 1, prec) / _log(b, prec)
        )
    raise ParameterError(f"unknown scan kind '{kind}'")


def _exceeds(value: Callable[[int, int], Enclosure], b: int, threshold: Fraction, prec: int) -> bool:
    while True:
        side = compare_threshold(value(b, prec), threshold)
        if side is not Comparison.STRADDLES:
            return side is Comparison.ABOVE
        if prec * 2 > SCAN_MAX_PRECISION:
            logger.warning("b=%d: bound still straddles %s at %d bits", b, threshold, prec)
            return False
        prec *= 2


def smallest_base(threshold, kind: str = ONE_MISSING, prec: Optional[int] = None) -> int:
    """
    Smallest b >= 3 whose bound certifiably exceeds ``threshold``.

    The bounds increase with b, so the scan doubles to find a passing base,
    bisects, then walks down until the base below fails.

    Raises:
        NotFoundError: no b <= 10⁶ qualifies
    """
    threshold = Fraction(threshold)
    if not 0 < threshold < 1:
        raise ParameterError(f"threshold must lie in (0, 1), got {threshold}")
    value = _scan_value(kind)
    prec = working_precision(prec)

    def passes(b: int) -> bool:
        return _exceeds(value, b, threshold, prec)

    hi = 3
    while not passes(hi):
        if hi >= SCAN_LIMIT:
            raise NotFoundError(f"no base b <= {SCAN_LIMIT} has {kind} bound above {threshold}")
        hi = min(hi * 2, SCAN_LIMIT)
    lo = max(3, hi // 2)
    while lo < hi:
        mid = (lo + hi) // 2
        if passes(mid):
            hi = mid
        else:
            lo = mid + 1
    b = hi
    while b > 3 and passes(b - 1):
        b -= 1
    logger.info("smallest base with %s bound above %s: %d", kind, threshold, b)
    return b
