"""
Reproduction manifest.

The parameter grids for ``digitdim reproduce`` are data, kept in the
packaged ``reproduce.toml``. This module loads and validates it and expands
tables into concrete cases.
"""

import sys
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .certify import LOWER, UPPER, Certificate, TauLike, Verdict, verify_lower, verify_upper
from .consequences import bd_tau_factory
from .digitmeasure import DigitSystem, make_one_missing, parse_rational, systems_up_to_symmetry
from .errors import ParameterError
from .log import get_logger

logger = get_logger(__name__)

MANIFEST_RESOURCE = "reproduce.toml"
BD_TAU = "bd"


@dataclass(frozen=True)
class ReproCase:
    table: str
    system: DigitSystem
    direction: str
    L: int
    delta: Fraction
    tau: str
    expected: Verdict

    def resolve_tau(self) -> Tuple[str, TauLike]:
        """(expression text, τ value) for this case"""
        if self.tau == BD_TAU:
            return bd_tau_factory(self.system.base)
        value = parse_rational(self.tau)
        return str(value), value

    def run(self, **kwargs) -> Certificate:
        text, tau = self.resolve_tau()
        verify = verify_lower if self.direction == LOWER else verify_upper
        return verify(self.system, self.L, self.delta, tau, tau_expr=text, **kwargs)

    def label(self) -> str:
        return f"{self.table}: {self.system} L={self.L} delta={self.delta}"


@dataclass(frozen=True)
class _CaseGroup:
    pairs: Tuple[Tuple[int, int], ...]
    base_range: Optional[Tuple[int, int]]
    L: int
    delta: Fraction

    def bases(self) -> List[int]:
        if self.base_range is not None:
            return list(range(self.base_range[0], self.base_range[1] + 1))
        return sorted({b for b, _ in self.pairs})

    def systems(self, bases: Optional[Iterable[int]] = None) -> List[DigitSystem]:
        allowed = None if bases is None else set(bases)
        if self.base_range is not None:
            return [s for b in self.bases() if allowed is None or b in allowed
                    for s in systems_up_to_symmetry(b)]
        return [make_one_missing(b, a) for b, a in self.pairs if allowed is None or b in allowed]


@dataclass(frozen=True)
class ReproTable:
    name: str
    description: str
    direction: str
    tau: str
    expected: Verdict
    groups: Tuple[_CaseGroup, ...]
    spot_check: Optional[Tuple[int, ...]] = None

    def bases(self) -> List[int]:
        return sorted({b for g in self.groups for b in g.bases()})

    def cases(self, bases: Optional[Sequence[int]] = None, full: bool = False) -> List[ReproCase]:
        """
        Expand to cases.

        ``bases`` restricts to the given bases; otherwise a table with a
        spot-check list runs only those bases unless ``full`` is set.
        """
        if bases is not None:
            unknown = sorted(set(bases) - set(self.bases()))
            if unknown:
                raise ParameterError(
                    f"table {self.name} has no base(s) {', '.join(map(str, unknown))}"
                )
            selected = bases
        elif self.spot_check is not None and not full:
            selected = self.spot_check
        else:
            selected = None
        out = []
        for group in self.groups:
            for system in group.systems(selected):
                out.append(
                    ReproCase(self.name, system, self.direction, group.L, group.delta,
                              self.tau, self.expected)
                )
        return out


@dataclass(frozen=True)
class Manifest:
    version: int
    tables: Dict[str, ReproTable]

    def table(self, name: str) -> ReproTable:
        try:
            return self.tables[name]
        except KeyError:
            raise ParameterError(
                f"unknown table '{name}'; expected one of: {', '.join(self.tables)}"
            ) from None


def manifest_text() -> str:
    """The packaged manifest, verbatim"""
    return resources.files("digitdim").joinpath(MANIFEST_RESOURCE).read_text(encoding="utf-8")


def _parse_group(table: str, raw: dict) -> _CaseGroup:
    try:
        L = int(raw["L"])
        delta = parse_rational(raw["delta"])
    except KeyError as e:
        raise ParameterError(f"table {table}: case is missing {e}") from None
    pairs = tuple((int(b), int(a)) for b, a in raw.get("systems", ()))
    base_range = raw.get("base_range")
    if base_range is not None:
        lo, hi = (int(x) for x in base_range)
        base_range = (lo, hi)
    if bool(pairs) == (base_range is not None):
        raise ParameterError(f"table {table}: a case needs exactly one of systems, base_range")
    return _CaseGroup(pairs, base_range, L, delta)


def parse_manifest(text: str) -> Manifest:
    """
    Parse manifest TOML.

    Raises:
        ParameterError: invalid TOML or an invalid table
    """
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as e:
        raise ParameterError(f"invalid manifest: {e}") from None

    tables = {}
    for raw in data.get("tables", []):
        name = raw.get("name")
        if not name:
            raise ParameterError("manifest table without a name")
        direction = raw.get("direction")
        if direction not in (LOWER, UPPER):
            raise ParameterError(f"table {name}: unknown direction '{direction}'")
        try:
            expected = Verdict(raw.get("expected", "PASS"))
        except ValueError:
            raise ParameterError(f"table {name}: unknown verdict '{raw.get('expected')}'") from None
        spot = raw.get("spot_check")
        tables[name] = ReproTable(
            name=name,
            description=raw.get("description", ""),
            direction=direction,
            tau=str(raw.get("tau", "1/2")),
            expected=expected,
            groups=tuple(_parse_group(name, g) for g in raw.get("cases", [])),
            spot_check=tuple(int(b) for b in spot) if spot is not None else None,
        )
    return Manifest(int(data.get("manifest_version", 1)), tables)


def load_manifest() -> Manifest:
    manifest = parse_manifest(manifest_text())
    logger.debug("manifest v%d: %s", manifest.version, ", ".join(manifest.tables))
    return manifest
