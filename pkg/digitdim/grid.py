"""
Grid evaluation of F_L.

The abscissae kδ, k = 0..count-1, are split into contiguous chunks that are
evaluated independently (in worker processes when jobs > 1) and reduced in
chunk order. Each chunk returns only its endpoint extrema, so the result
does not depend on the chunk size or the number of workers.
"""

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, List, Optional, Tuple

from mpmath.libmp import mpf_lt

from .config import DEFAULT_CHUNK_SIZE, DEFAULT_GUARD
from .digitmeasure import DigitSystem, SymbolEvaluator, grid_sum
from .enclosure import Enclosure, working_precision
from .errors import ParameterError
from .log import get_logger, trace

logger = get_logger(__name__)


@dataclass(frozen=True)
class GridSpec:
    """
    Arithmetic progression kδ covering the half period [0, 1/(2b^L)].

    count = ⌈(2 b^L δ)⁻¹⌉ + 1, so the last abscissa is at least 1/(2b^L).
    """

    base: int
    L: int
    delta: Fraction

    def __post_init__(self):
        object.__setattr__(self, "delta", Fraction(self.delta))
        if self.L < 1:
            raise ParameterError(f"L must be >= 1, got {self.L}")
        if self.delta <= 0:
            raise ParameterError(f"delta must be positive, got {self.delta}")

    @property
    def count(self) -> int:
        return math.ceil(1 / (2 * self.base ** self.L * self.delta)) + 1

    @property
    def half_period(self) -> Fraction:
        return Fraction(1, 2 * self.base ** self.L)

    def abscissa(self, k: int) -> Fraction:
        return k * self.delta

    def abscissae(self) -> Iterator[Fraction]:
        for k in range(self.count):
            yield k * self.delta

    def chunks(self, size: int = DEFAULT_CHUNK_SIZE) -> List[Tuple[int, int]]:
        """Contiguous [start, stop) index ranges of at most ``size`` points"""
        if size < 1:
            raise ParameterError(f"chunk size must be >= 1, got {size}")
        n = self.count
        return [(start, min(start + size, n)) for start in range(0, n, size)]


@dataclass(frozen=True)
class GridExtrema:
    """Enclosures of the grid maximum and minimum of F_L"""

    max: Enclosure
    min: Enclosure
    count: int
    wall_time: float = 0.0


def _evaluate_chunk(system, L, delta, start, stop, prec, guard):
    """Worker: (max_lo, max_hi, min_lo, min_hi) over indices [start, stop)"""
    g = SymbolEvaluator(system, prec, guard)
    max_lo = max_hi = min_lo = min_hi = None
    for k in range(start, stop):
        v = grid_sum(system, L, k * delta, evaluator=g)
        if max_lo is None:
            max_lo, max_hi, min_lo, min_hi = v.lo, v.hi, v.lo, v.hi
            continue
        if mpf_lt(max_lo, v.lo):
            max_lo = v.lo
        if mpf_lt(max_hi, v.hi):
            max_hi = v.hi
        if mpf_lt(v.lo, min_lo):
            min_lo = v.lo
        if mpf_lt(v.hi, min_hi):
            min_hi = v.hi
    return max_lo, max_hi, min_lo, min_hi


def _reduce(parts, prec: int) -> Tuple[Enclosure, Enclosure]:
    max_lo, max_hi, min_lo, min_hi = parts[0]
    for a, b, c, d in parts[1:]:
        if mpf_lt(max_lo, a):
            max_lo = a
        if mpf_lt(max_hi, b):
            max_hi = b
        if mpf_lt(c, min_lo):
            min_lo = c
        if mpf_lt(d, min_hi):
            min_hi = d
    return Enclosure(max_lo, max_hi, prec), Enclosure(min_lo, min_hi, prec)


def evaluate_grid(
    system: DigitSystem,
    grid: GridSpec,
    jobs: int = 1,
    prec: Optional[int] = None,
    guard: Fraction = DEFAULT_GUARD,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
) -> GridExtrema:
    """
    Evaluate F_L on every abscissa of ``grid`` and reduce to extrema.

    max = [max lo, max hi] and min = [min lo, min hi] over the grid, so
    max.hi bounds every grid value from above and min.lo from below.
    """
    if grid.base != system.base:
        raise ParameterError(f"grid base {grid.base} does not match system base {system.base}")
    if jobs < 1:
        raise ParameterError(f"jobs must be >= 1, got {jobs}")
    prec = working_precision(prec)
    chunks = grid.chunks(chunk_size)
    logger.debug(
        "grid %s L=%d delta=%s: %d points in %d chunk(s), jobs=%d, prec=%d",
        system, grid.L, grid.delta, grid.count, len(chunks), jobs, prec,
    )
    started = time.perf_counter()
    args = [(system, grid.L, grid.delta, start, stop, prec, guard) for start, stop in chunks]

    if jobs == 1 or len(chunks) == 1:
        parts = []
        for i, a in enumerate(args):
            parts.append(_evaluate_chunk(*a))
            trace(logger, "chunk %d/%d done", i + 1, len(chunks))
    else:
        with ProcessPoolExecutor(max_workers=min(jobs, len(chunks))) as executor:
            futures = [executor.submit(_evaluate_chunk, *a) for a in args]
            parts = []
            for i, future in enumerate(futures):
                parts.append(future.result())
                trace(logger, "chunk %d/%d done", i + 1, len(chunks))

    grid_max, grid_min = _reduce(parts, prec)
    elapsed = time.perf_counter() - started
    logger.info("grid %s L=%d: %d points in %.2fs", system, grid.L, grid.count, elapsed)
    return GridExtrema(grid_max, grid_min, grid.count, elapsed)
