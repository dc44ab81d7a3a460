"""
Certified grid verification.

F_L is Lipschitz with constant at most 2π b^L (b^L - 1), even and
b^-L-periodic, so its extrema over all real x are bounded by its extrema
over the half-period grid kδ plus a slack proportional to Lip·δ. The
criteria here compare those bounds with b^((1-τ)L):

    lower:  max F_L + slack < b^((1-τ)L)   certifies κ̂₁ ≥ τ
    upper:  min F_L - slack > b^((1-τ)L)   certifies κ̂₁ < τ

Every comparison is made on enclosures. A Certificate keeps the decimal
endpoints it was decided on, so its verdict can be rechecked from the JSON
alone.
"""

import json
import time
from collections import OrderedDict
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Optional, Tuple, Union

from ._version import __version__
from .config import DEFAULT_CHUNK_SIZE, DEFAULT_GUARD, MAX_PRECISION
from .digitmeasure import (
    DigitSystem,
    SymbolEvaluator,
    grid_sum,
    parse_rational,
    parse_system,
)
from .enclosure import DecimalBounds, Enclosure, working_precision
from .errors import CertificateError, EnumerationLimitError, ParameterError
from .grid import GridExtrema, GridSpec, evaluate_grid
from .log import get_logger

logger = get_logger(__name__)

ENUMERATION_LIMIT = 10 ** 6
INDUCTION_DELTA = Fraction(1, 10 ** 4)

LOWER = "lower"
UPPER = "upper"

TauLike = Union[Enclosure, Fraction, int, str, Callable[[int], Enclosure]]


class Verdict(Enum):
    PASS = "PASS"
    FAIL = "FAIL"
    INCONCLUSIVE = "INCONCLUSIVE"


@dataclass(frozen=True)
class SlackPolicy:
    """
    Slack added to grid extrema, as multiples of Lip·δ.

    The lower criterion uses δ b^L (b^L - 1) π = Lip·δ/2 and the upper one
    2δ b^L (b^L - 1) π = Lip·δ. Brackets use Lip·δ/2 in both directions:
    every point of the half period is within δ/2 of a grid point.
    """

    lower_factor: Fraction = Fraction(1, 2)
    upper_factor: Fraction = Fraction(1)
    bracket_factor: Fraction = Fraction(1, 2)

    def factor(self, direction: str) -> Fraction:
        if direction == LOWER:
            return self.lower_factor
        if direction == UPPER:
            return self.upper_factor
        raise ParameterError(f"unknown direction '{direction}'")


DEFAULT_POLICY = SlackPolicy()


def lipschitz_bound(system: DigitSystem, L: int, prec: Optional[int] = None) -> Enclosure:
    """Enclosure of 2π b^L (b^L - 1), an upper bound for Lip(F_L)"""
    if L < 1:
        raise ParameterError(f"L must be >= 1, got {L}")
    n = system.base ** L
    return Enclosure.pi(prec) * (2 * n * (n - 1))


def grid_extrema(
    system: DigitSystem,
    grid: GridSpec,
    jobs: int = 1,
    prec: Optional[int] = None,
    guard: Fraction = DEFAULT_GUARD,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
) -> Tuple[Enclosure, Enclosure]:
    """(max, min) enclosures of F_L over the grid abscissae"""
    result = evaluate_grid(system, grid, jobs, prec, guard, chunk_size)
    return result.max, result.min


def _resolve_tau(tau: TauLike, prec: int) -> Tuple[Enclosure, Optional[Fraction]]:
    if callable(tau):
        tau = tau(prec)
    if isinstance(tau, Enclosure):
        exact = tau.lower if tau.is_point else None
        enc = tau.with_precision(max(prec, tau.prec))
    else:
        exact = parse_rational(tau) if isinstance(tau, str) else Fraction(tau)
        enc = Enclosure.exact(exact, prec)
    if not (enc.lower > 0 and enc.upper < 1):
        raise ParameterError(f"tau must lie in (0, 1), got {enc!r}")
    return enc, exact


def target_level(base: int, L: int, tau: TauLike, prec: Optional[int] = None) -> Enclosure:
    """Enclosure of b^((1-τ)L)"""
    prec = working_precision(prec)
    enc, exact = _resolve_tau(tau, prec)
    if exact is not None:
        exponent = (1 - exact) * L
        if exponent.denominator == 1:
            return Enclosure.exact(base ** exponent.numerator, prec)
    return ((1 - enc) * L * Enclosure.exact(base, prec).log()).exp()


def kappa_from_level(base: int, L: int, level: Enclosure) -> Enclosure:
    """−log(b^-L · level) / (L log b) for a positive enclosure ``level``"""
    prec = level.prec
    logb = Enclosure.exact(base, prec).log()
    return -(level / base ** L).log() / (logb * L)


@dataclass
class Certificate:
    """
    Record of one grid verification.

    Endpoints are DecimalBounds; the verdict is a function of ``grid_max``,
    ``grid_min`` and ``threshold`` only (see ``recheck``). ``kappa_bound``
    encloses the κ̂₁ bound implied by the extremum and slack: its lo is a
    certified lower bound for a lower certificate, its hi a certified upper
    bound for an upper one. ``wall_time`` is not serialized.
    """

    system: str
    direction: str
    L: int
    delta: Fraction
    tau: DecimalBounds
    tau_expr: str
    grid_count: int
    grid_max: DecimalBounds
    grid_min: DecimalBounds
    lipschitz: DecimalBounds
    slack: DecimalBounds
    threshold: DecimalBounds
    kappa_bound: Optional[DecimalBounds]
    verdict: Verdict
    precision_bits: int
    tool_version: str = __version__
    wall_time: float = field(default=0.0, compare=False)

    @property
    def digit_system(self) -> DigitSystem:
        return parse_system(self.system)

    def recheck(self) -> Verdict:
        """Re-derive the verdict from the stored endpoints"""
        return decide(self.direction, self.grid_max, self.grid_min, self.threshold)

    def is_consistent(self) -> bool:
        return self.recheck() == self.verdict

    def to_dict(self) -> "OrderedDict[str, object]":
        return OrderedDict(
            [
                ("system", self.system),
                ("direction", self.direction),
                ("L", self.L),
                ("delta", str(self.delta)),
                ("tau", list(self.tau.to_json())),
                ("tau_expr", self.tau_expr),
                ("grid_count", self.grid_count),
                ("grid_max", list(self.grid_max.to_json())),
                ("grid_min", list(self.grid_min.to_json())),
                ("lipschitz", list(self.lipschitz.to_json())),
                ("slack", list(self.slack.to_json())),
                ("threshold", list(self.threshold.to_json())),
                ("kappa_bound", list(self.kappa_bound.to_json()) if self.kappa_bound else None),
                ("verdict", self.verdict.value),
                ("precision_bits", self.precision_bits),
                ("tool_version", self.tool_version),
            ]
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "Certificate":
        """
        Parse a certificate document.

        Raises:
            CertificateError: malformed JSON, missing keys or bad values
        """
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise CertificateError(f"certificate is not valid JSON: {e}") from None
        return cls.from_dict(data)

    @classmethod
    def from_dict(cls, data) -> "Certificate":
        if not isinstance(data, dict):
            raise CertificateError("certificate must be a JSON object")
        missing = [k for k in _CERT_KEYS if k not in data]
        if missing:
            raise CertificateError(f"certificate is missing key(s): {', '.join(missing)}")
        try:
            direction = data["direction"]
            if direction not in (LOWER, UPPER):
                raise ValueError(f"unknown direction '{direction}'")
            kappa = data["kappa_bound"]
            cert = cls(
                system=str(data["system"]),
                direction=direction,
                L=int(data["L"]),
                delta=parse_rational(data["delta"]),
                tau=DecimalBounds.parse(data["tau"]),
                tau_expr=str(data["tau_expr"]),
                grid_count=int(data["grid_count"]),
                grid_max=DecimalBounds.parse(data["grid_max"]),
                grid_min=DecimalBounds.parse(data["grid_min"]),
                lipschitz=DecimalBounds.parse(data["lipschitz"]),
                slack=DecimalBounds.parse(data["slack"]),
                threshold=DecimalBounds.parse(data["threshold"]),
                kappa_bound=None if kappa is None else DecimalBounds.parse(kappa),
                verdict=Verdict(data["verdict"]),
                precision_bits=int(data["precision_bits"]),
                tool_version=str(data["tool_version"]),
            )
        except (TypeError, ValueError) as e:
            raise CertificateError(f"invalid certificate: {e}") from None
        return cert


_CERT_KEYS = tuple(Certificate.__dataclass_fields__)[:-1]


def decide(
    direction: str, grid_max: DecimalBounds, grid_min: DecimalBounds, threshold: DecimalBounds
) -> Verdict:
    if direction == LOWER:
        if grid_max.hi < threshold.lo:
            return Verdict.PASS
        if grid_max.lo >= threshold.hi:
            return Verdict.FAIL
        return Verdict.INCONCLUSIVE
    if direction == UPPER:
        if grid_min.lo > threshold.hi:
            return Verdict.PASS
        if grid_min.hi <= threshold.lo:
            return Verdict.FAIL
        return Verdict.INCONCLUSIVE
    raise ParameterError(f"unknown direction '{direction}'")


def _verify_once(
    direction, system, L, delta, tau, tau_expr, prec, jobs, guard, chunk_size, policy
) -> Certificate:
    grid = GridSpec(system.base, L, delta)
    lip = lipschitz_bound(system, L, prec)
    slack = lip * grid.delta * policy.factor(direction)
    level = target_level(system.base, L, tau, prec)
    threshold = level - slack if direction == LOWER else level + slack
    if direction == LOWER and not threshold.upper > 0:
        raise ParameterError(
            f"threshold {threshold!r} is not positive: delta={delta} is too large for L={L}"
        )

    started = time.perf_counter()
    extrema: GridExtrema = evaluate_grid(system, grid, jobs, prec, guard, chunk_size)

    if direction == LOWER:
        implied = kappa_from_level(system.base, L, Enclosure.exact(extrema.max.upper, prec) + slack)
    else:
        level_lo = Enclosure.exact(extrema.min.lower, prec) - slack
        implied = kappa_from_level(system.base, L, level_lo) if level_lo.lower > 0 else None

    tau_enc, tau_exact = _resolve_tau(tau, prec)
    grid_max = DecimalBounds.from_enclosure(extrema.max)
    grid_min = DecimalBounds.from_enclosure(extrema.min)
    threshold_dec = DecimalBounds.from_enclosure(threshold)
    return Certificate(
        system=system.describe(),
        direction=direction,
        L=L,
        delta=grid.delta,
        tau=DecimalBounds.from_enclosure(tau_enc),
        tau_expr=tau_expr or (str(tau_exact) if tau_exact is not None else repr(tau_enc)),
        grid_count=grid.count,
        grid_max=grid_max,
        grid_min=grid_min,
        lipschitz=DecimalBounds.from_enclosure(lip),
        slack=DecimalBounds.from_enclosure(slack),
        threshold=threshold_dec,
        kappa_bound=DecimalBounds.from_enclosure(implied) if implied is not None else None,
        verdict=decide(direction, grid_max, grid_min, threshold_dec),
        precision_bits=prec,
        wall_time=time.perf_counter() - started,
    )


def _verify(
    direction: str,
    system: DigitSystem,
    L: int,
    delta,
    tau: TauLike,
    *,
    tau_expr: Optional[str] = None,
    prec: Optional[int] = None,
    jobs: int = 1,
    guard: Fraction = DEFAULT_GUARD,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
    policy: SlackPolicy = DEFAULT_POLICY,
) -> Certificate:
    prec = working_precision(prec)
    delta = parse_rational(delta) if isinstance(delta, str) else Fraction(delta)
    cert = _verify_once(
        direction, system, L, delta, tau, tau_expr, prec, jobs, guard, chunk_size, policy
    )
    if cert.verdict is Verdict.INCONCLUSIVE and prec * 2 <= MAX_PRECISION:
        logger.warning(
            "%s L=%d delta=%s: inconclusive at %d bits, retrying at %d bits",
            system, L, delta, prec, prec * 2,
        )
        cert = _verify_once(
            direction, system, L, delta, tau, tau_expr, prec * 2, jobs, guard, chunk_size, policy
        )
    logger.info(
        "%s %s L=%d delta=%s tau=%s: %s (%.2fs)",
        direction, system, L, delta, cert.tau_expr, cert.verdict.value, cert.wall_time,
    )
    return cert


def verify_lower(system: DigitSystem, L: int, delta, tau: TauLike, **kwargs) -> Certificate:
    """
    Test max F_L < b^((1-τ)L) - δ b^L (b^L - 1) π on the grid.

    PASS certifies κ̂₁(ν) ≥ τ. An INCONCLUSIVE result is retried once at
    doubled precision.

    ``tau`` may be a callable taking the precision in bits; it is re-evaluated
    for the retry.

    Raises:
        ParameterError: τ outside (0, 1), or a non-positive threshold
    """
    return _verify(LOWER, system, L, delta, tau, **kwargs)


def verify_upper(system: DigitSystem, L: int, delta, tau: TauLike, **kwargs) -> Certificate:
    """
    Test min F_L > b^((1-τ)L) + 2δ b^L (b^L - 1) π on the grid.

    PASS certifies κ̂₁(ν) < τ.
    """
    return _verify(UPPER, system, L, delta, tau, **kwargs)


# -- brackets and refinement -------------------------------------------------


@dataclass(frozen=True)
class BoundBracket:
    """Certified bounds on κ̂₁: ``lower.lo`` ≤ κ̂₁ ≤ ``upper.hi``"""

    lower: Optional[Enclosure]
    upper: Optional[Enclosure]
    L: Optional[int]
    delta: Optional[Fraction]

    def width(self) -> Optional[Fraction]:
        if self.lower is None or self.upper is None:
            return None
        return self.upper.upper - self.lower.lower

    def to_dict(self) -> dict:
        def bounds(x):
            return None if x is None else list(DecimalBounds.from_enclosure(x).to_json())

        return {
            "lower": bounds(self.lower),
            "upper": bounds(self.upper),
            "L": self.L,
            "delta": None if self.delta is None else str(self.delta),
        }


def bracket_from_extrema(
    system: DigitSystem,
    L: int,
    delta: Fraction,
    extrema: Tuple[Enclosure, Enclosure],
    policy: SlackPolicy = DEFAULT_POLICY,
) -> BoundBracket:
    grid_max, grid_min = extrema
    prec = grid_max.prec
    slack = lipschitz_bound(system, L, prec) * Fraction(delta) * policy.bracket_factor
    lower = kappa_from_level(system.base, L, Enclosure.exact(grid_max.upper, prec) + slack)
    floor = Enclosure.exact(grid_min.lower, prec) - slack
    upper = kappa_from_level(system.base, L, floor) if floor.lower > 0 else None
    return BoundBracket(lower, upper, L, Fraction(delta))


def bound_bracket(
    system: DigitSystem,
    L: int,
    delta,
    jobs: int = 1,
    prec: Optional[int] = None,
    guard: Fraction = DEFAULT_GUARD,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
    policy: SlackPolicy = DEFAULT_POLICY,
) -> BoundBracket:
    """
    Two-sided bounds on κ̂₁ from one grid.

    ``upper`` is None when the grid minimum minus the slack is not
    certifiably positive.
    """
    delta = parse_rational(delta) if isinstance(delta, str) else Fraction(delta)
    grid = GridSpec(system.base, L, delta)
    extrema = grid_extrema(system, grid, jobs, prec, guard, chunk_size)
    return bracket_from_extrema(system, L, delta, extrema, policy)


class RefineStatus(Enum):
    CONVERGED = "converged"
    BUDGET_EXHAUSTED = "budget_exhausted"


@dataclass(frozen=True)
class Budget:
    """Resource limits for refine_dimension; None means unlimited"""

    max_grid: Optional[int] = None
    max_level: int = 6
    max_seconds: Optional[float] = None


def refinement_delta(system: DigitSystem, L: int, prec: Optional[int] = None) -> Fraction:
    """
    Grid spacing for level L: min(10⁻⁴, b^-2L), halved until Lip·δ/2 is at
    most 1% of F_L(0).
    """
    delta = min(Fraction(1, 10 ** 4), Fraction(1, system.base ** (2 * L)))
    f0 = grid_sum(system, L, 0, prec).lower
    lip = lipschitz_bound(system, L, prec).upper
    while lip * delta / 2 > f0 / 100:
        delta /= 2
    return delta


def refine_dimension(
    system: DigitSystem,
    eps,
    budget: Budget = Budget(),
    jobs: int = 1,
    prec: Optional[int] = None,
    guard: Fraction = DEFAULT_GUARD,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
) -> Tuple[BoundBracket, RefineStatus]:
    """
    Bracket κ̂₁ to within ``eps`` by increasing L.

    Keeps the largest certified lower bound and the smallest certified upper
    bound seen over all levels.
    """
    eps = parse_rational(eps) if isinstance(eps, str) else Fraction(eps)
    if eps <= 0:
        raise ParameterError(f"eps must be positive, got {eps}")
    prec = working_precision(prec)
    started = time.perf_counter()
    spent = 0
    best = BoundBracket(None, None, None, None)

    for L in range(1, budget.max_level + 1):
        if budget.max_seconds is not None and time.perf_counter() - started > budget.max_seconds:
            logger.info("refine %s: time budget exhausted before L=%d", system, L)
            break
        delta = refinement_delta(system, L, prec)
        grid = GridSpec(system.base, L, delta)
        if budget.max_grid is not None and spent + grid.count > budget.max_grid:
            logger.info(
                "refine %s: L=%d needs %d points, %d of %d left",
                system, L, grid.count, budget.max_grid - spent, budget.max_grid,
            )
            break
        extrema = grid_extrema(system, grid, jobs, prec, guard, chunk_size)
        spent += grid.count
        level = bracket_from_extrema(system, L, delta, extrema)

        lower = best.lower
        if lower is None or level.lower.lower > lower.lower:
            lower = level.lower
        upper = best.upper
        if level.upper is not None and (upper is None or level.upper.upper < upper.upper):
            upper = level.upper
        best = BoundBracket(lower, upper, L, delta)
        logger.info("refine %s: L=%d delta=%s width=%s", system, L, delta, best.width())

        width = best.width()
        if width is not None and width <= eps:
            return best, RefineStatus.CONVERGED

    return best, RefineStatus.BUDGET_EXHAUSTED


# -- the induction inequality --------------------------------------------------


@lru_cache(maxsize=64)
def _level_one_bound(system: DigitSystem, prec: int, guard: Fraction) -> Enclosure:
    grid = GridSpec(system.base, 1, INDUCTION_DELTA)
    grid_max, _ = grid_extrema(system, grid, 1, prec, guard)
    slack = lipschitz_bound(system, 1, prec) * INDUCTION_DELTA / 2
    return Enclosure.exact(grid_max.upper, prec) + slack


def induction_sum_check(
    system: DigitSystem,
    N: int,
    y,
    prec: Optional[int] = None,
    guard: Fraction = DEFAULT_GUARD,
) -> Tuple[Enclosure, Enclosure, bool]:
    """
    Compare Σ_{ξ<b^N} Π_{j=1..N} g((y+ξ)/b^j) with (max_x F_1(x))^N.

    The right side uses the certified level-one maximum (grid max plus
    slack at δ = 10⁻⁴). ``holds`` is lhs.lo ≤ rhs.hi.

    Raises:
        EnumerationLimitError: b^N > 10⁶
    """
    if N < 1:
        raise ParameterError(f"N must be >= 1, got {N}")
    b = system.base
    if b ** N > ENUMERATION_LIMIT:
        raise EnumerationLimitError(f"b^N = {b}^{N} exceeds {ENUMERATION_LIMIT} terms")
    prec = working_precision(prec)
    y = parse_rational(y) if isinstance(y, str) else Fraction(y)
    g = SymbolEvaluator(system, prec, guard)

    lhs = Enclosure.exact(0, prec)
    for xi in range(b ** N):
        term = Enclosure.exact(1, prec)
        for j in range(1, N + 1):
            term = term * g((y + xi) / b ** j)
        lhs = lhs + term
    rhs = _level_one_bound(system, prec, Fraction(guard)) ** N
    holds = lhs.lower <= rhs.upper
    logger.debug("induction %s N=%d y=%s: holds=%s", system, N, y, holds)
    return lhs, rhs, holds


# -- integral diagnostic -------------------------------------------------------


def empirical_kappa1_integral(
    system: DigitSystem,
    N: int,
    cells: int,
    prec: Optional[int] = None,
    guard: Fraction = DEFAULT_GUARD,
) -> Enclosure:
    """
    Enclosure of −log ∫₀¹ S_N / (N log b).

    ∫₀¹ S_N = 2 ∫ F_N over the half period [0, 1/(2b^N)]; that integral is
    enclosed by a left-endpoint sum on ``cells`` cells plus the Lipschitz
    error Lip·h²/2 per cell. Tends to κ̂₁ as N grows.
    """
    if N < 1 or cells < 1:
        raise ParameterError(f"N and cells must be >= 1, got N={N}, cells={cells}")
    prec = working_precision(prec)
    half = Fraction(1, 2 * system.base ** N)
    h = half / cells
    g = SymbolEvaluator(system, prec, guard)
    total = Enclosure.exact(0, prec)
    for k in range(cells):
        total = total + grid_sum(system, N, k * h, evaluator=g)
    error = lipschitz_bound(system, N, prec) * (half * h / 2)
    integral = (total * h + Enclosure.between(-1, 1, prec) * error) * 2
    if not integral.lower > 0:
        raise ParameterError(f"{cells} cells are too few to bound the integral away from 0")
    logb = Enclosure.exact(system.base, prec).log()
    return -integral.log() / (logb * N)
