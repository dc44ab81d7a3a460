"""
digitdim command line.

    digitdim certify --system "b=5 missing=2" --direction lower --L 2 --delta 1e-5 --tau 1/2
    digitdim reproduce --table prop24_small --jobs 4 --output-dir certs/
    digitdim dimension --system "b=3 missing=1" --eps 0.2
    digitdim analytic smallest-base --threshold 1/2
    digitdim consequences --system "b=5 missing=0" --v-from certs/prop24_small_b5_a0.json

stdout carries only the result (JSON or a plain table); diagnostics go to
stderr through the logger. Exit codes: 0 PASS / converged, 1 FAIL,
2 INCONCLUSIVE / budget exhausted, 3 usage or parameter error.
"""

import argparse
import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from . import analytic
from ._version import __version__
from .certify import (
    LOWER,
    UPPER,
    Budget,
    Certificate,
    RefineStatus,
    Verdict,
    refine_dimension,
    verify_lower,
    verify_upper,
)
from .config import Settings, load_settings
from .consequences import bd_tau_factory, exponent_report
from .digitmeasure import APDigitSpec, DigitSystem, hausdorff_dimension, parse_rational, parse_system
from .enclosure import Enclosure
from .errors import DigitDimError, ParameterError
from .log import get_logger, set_log_level
from .manifest import BD_TAU, load_manifest, manifest_text

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_INCONCLUSIVE = 2
EXIT_USAGE = 3

VERDICT_EXIT = {
    Verdict.PASS: EXIT_OK,
    Verdict.FAIL: EXIT_FAIL,
    Verdict.INCONCLUSIVE: EXIT_INCONCLUSIVE,
}

TABLES = ("prop24_small", "prop24_exceptional", "prop2425_large")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


@dataclass
class RunConfig:
    """Resolved options of one invocation"""

    subcommand: str
    settings: Settings
    output_format: str = "json"
    output: Optional[Path] = None
    system: Optional[str] = None
    L: Optional[int] = None
    delta: Optional[Fraction] = None
    tau: Optional[str] = None
    eps: Optional[Fraction] = None
    extras: Dict[str, object] = field(default_factory=dict)

    @property
    def precision(self) -> int:
        return self.settings.precision

    @property
    def jobs(self) -> int:
        return self.settings.jobs

    def grid_options(self) -> dict:
        return {
            "prec": self.settings.precision,
            "jobs": self.settings.jobs,
            "guard": self.settings.guard,
            "chunk_size": self.settings.chunk_size,
        }


# -- output ---------------------------------------------------------------


def _format_table(rows: Sequence[Tuple[str, object]]) -> str:
    width = max((len(k) for k, _ in rows), default=0)
    lines = []
    for key, value in rows:
        if isinstance(value, (list, tuple)) and len(value) == 2:
            value = f"[{value[0]}, {value[1]}]"
        lines.append(f"{key.ljust(width)}  {value}")
    return "\n".join(lines) + "\n"


def _emit(cfg: RunConfig, text: str) -> None:
    if cfg.output is not None:
        cfg.output.parent.mkdir(parents=True, exist_ok=True)
        cfg.output.write_text(text, encoding="utf-8")
        logger.info("wrote %s", cfg.output)
    else:
        sys.stdout.write(text)


def _emit_dict(cfg: RunConfig, payload: dict) -> None:
    if cfg.output_format == "table":
        _emit(cfg, _format_table(list(_flatten(payload))))
    else:
        _emit(cfg, json.dumps(payload, indent=2, ensure_ascii=False) + "\n")


def _flatten(payload: dict, prefix: str = ""):
    for key, value in payload.items():
        if isinstance(value, dict):
            yield from _flatten(value, f"{prefix}{key}.")
        else:
            yield f"{prefix}{key}", value


def _emit_certificate(cfg: RunConfig, cert: Certificate) -> None:
    if cfg.output_format == "table":
        _emit(cfg, _format_table(list(cert.to_dict().items())))
    else:
        _emit(cfg, cert.to_json())


# -- commands -------------------------------------------------------------


def _resolve_tau(text: str, system: DigitSystem):
    if text == BD_TAU:
        return bd_tau_factory(system.base)
    value = parse_rational(text)
    return str(value), value


def cmd_certify(cfg: RunConfig) -> int:
    system = parse_system(cfg.system)
    tau_expr, tau = _resolve_tau(cfg.tau, system)
    verify = verify_lower if cfg.extras["direction"] == LOWER else verify_upper
    cert = verify(system, cfg.L, cfg.delta, tau, tau_expr=tau_expr, **cfg.grid_options())
    _emit_certificate(cfg, cert)
    return VERDICT_EXIT[cert.verdict]


def _certificate_name(table: str, system: DigitSystem) -> str:
    a = system.missing_digit
    suffix = f"a{a}" if a is not None else "d" + "-".join(map(str, system.digits))
    return f"{table}_b{system.base}_{suffix}.json"


def cmd_reproduce(cfg: RunConfig) -> int:
    if cfg.extras.get("print_manifest"):
        _emit(cfg, manifest_text())
        return EXIT_OK

    manifest = load_manifest()
    names = list(manifest.tables) if cfg.extras["table"] == "all" else [cfg.extras["table"]]
    bases = cfg.extras.get("bases")
    output_dir: Optional[Path] = cfg.extras.get("output_dir")
    if output_dir is not None:
        output_dir.mkdir(parents=True, exist_ok=True)

    certificates: List[dict] = []
    summary: List[dict] = []
    failures: List[str] = []
    for name in names:
        table = manifest.table(name)
        table_bases = bases
        if bases is not None and cfg.extras["table"] == "all":
            table_bases = [b for b in bases if b in table.bases()]
        for case in table.cases(table_bases, full=cfg.extras.get("full", False)):
            cert = case.run(**cfg.grid_options())
            ok = cert.verdict is case.expected
            logger.info("%s -> %s", case.label(), cert.verdict.value)
            if not ok:
                failures.append(f"{case.label()}: expected {case.expected.value}, got {cert.verdict.value}")
            if output_dir is not None:
                path = output_dir / _certificate_name(name, case.system)
                path.write_text(cert.to_json(), encoding="utf-8")
            certificates.append(cert.to_dict())
            summary.append(
                {
                    "table": name,
                    "system": case.system.describe(),
                    "verdict": cert.verdict.value,
                    "expected": case.expected.value,
                    "ok": ok,
                }
            )

    for line in failures:
        print(f"FAILED {line}", file=sys.stderr)

    if cfg.output_format == "table":
        rows = [(f"{s['table']} {s['system']}", f"{s['verdict']} ({'ok' if s['ok'] else 'UNEXPECTED'})")
                for s in summary]
        rows.append(("total", f"{len(summary)} case(s), {len(failures)} failure(s)"))
        _emit(cfg, _format_table(rows))
    else:
        payload = {
            "manifest_version": manifest.version,
            "certificates": certificates,
            "summary": {"cases": summary, "passed": len(summary) - len(failures),
                        "failed": len(failures)},
        }
        _emit(cfg, json.dumps(payload, indent=2, ensure_ascii=False) + "\n")
    return EXIT_OK if not failures else EXIT_FAIL


def cmd_dimension(cfg: RunConfig) -> int:
    system = parse_system(cfg.system)
    budget = Budget(
        max_grid=cfg.extras.get("max_grid"),
        max_level=cfg.extras.get("max_level") or Budget().max_level,
        max_seconds=cfg.extras.get("max_seconds"),
    )
    opts = cfg.grid_options()
    bracket, status = refine_dimension(system, cfg.eps, budget, **opts)
    width = bracket.width()
    _emit_dict(
        cfg,
        {
            "system": system.describe(),
            "eps": str(cfg.eps),
            "status": status.value,
            "bracket": bracket.to_dict(),
            "width": None if width is None else float(width),
        },
    )
    return EXIT_OK if status is RefineStatus.CONVERGED else EXIT_INCONCLUSIVE


def cmd_analytic(cfg: RunConfig) -> int:
    kind = cfg.extras["kind"]
    prec = cfg.precision
    ex = cfg.extras
    if kind == "expsum":
        payload = analytic.expsum_report(ex["b"], ex["l"], prec).to_dict()
    elif kind == "one-missing":
        payload = analytic.one_missing_report(ex["b"], prec).to_dict()
    elif kind == "ap":
        spec = APDigitSpec(ex["a"], ex["d"], ex["l"])
        payload = analytic.ap_report(ex["b"], spec, prec).to_dict()
    else:
        threshold = parse_rational(ex["threshold"])
        scan = ex["scan"].replace("-", "_")
        payload = {
            "kind": scan,
            "threshold": str(threshold),
            "smallest_base": analytic.smallest_base(threshold, scan, prec),
        }
    _emit_dict(cfg, payload)
    return EXIT_OK


def _v_from_certificate(path: Path, system: DigitSystem) -> Enclosure:
    try:
        cert = Certificate.from_json(path.read_text(encoding="utf-8"))
    except OSError as e:
        raise ParameterError(f"cannot read certificate {path}: {e}") from None
    if cert.direction != LOWER or cert.kappa_bound is None:
        raise ParameterError(f"{path} is not a lower-bound certificate")
    if parse_system(cert.system) != system:
        raise ParameterError(f"{path} certifies {cert.system}, not {system}")
    if not cert.is_consistent():
        raise ParameterError(f"{path}: stored verdict does not match its endpoints")
    return Enclosure.exact(cert.kappa_bound.lower)


def cmd_consequences(cfg: RunConfig) -> int:
    system = parse_system(cfg.system)
    kappa = hausdorff_dimension(system, cfg.precision)
    if cfg.extras.get("v_from") is not None:
        v = _v_from_certificate(cfg.extras["v_from"], system)
    else:
        v = Enclosure.exact(parse_rational(cfg.extras["v"]), cfg.precision)
    report = exponent_report(kappa, v)
    payload = {"system": system.describe(), **report.to_dict()}
    _emit_dict(cfg, payload)
    return EXIT_OK


COMMANDS = {
    "certify": cmd_certify,
    "reproduce": cmd_reproduce,
    "dimension": cmd_dimension,
    "analytic": cmd_analytic,
    "consequences": cmd_consequences,
}


# -- parsing ----------------------------------------------------------------


def _rational(text: str) -> Fraction:
    try:
        return parse_rational(text)
    except ParameterError as e:
        raise argparse.ArgumentTypeError(str(e)) from None


def _int_list(text: str) -> List[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got '{text}'") from None


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--precision", type=int, help="working precision in bits (default 128)")
    common.add_argument("--jobs", type=int, help="worker processes for grid evaluation")
    common.add_argument("--format", dest="output_format", choices=("json", "table"), default="json")
    common.add_argument("--output", type=Path, help="write the result here instead of stdout")
    common.add_argument("--config", type=Path, help="TOML file with a [digitdim] table")
    common.add_argument("-v", "--verbose", action="count", default=0,
                        help="more logging on stderr (-v INFO, -vv DEBUG, -vvv TRACE)")

    parser = _Parser(prog="digitdim", description="Certified bounds on Fourier l1 dimensions of missing-digit measures")
    parser.add_argument("--version", action="version", version=f"digitdim {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("certify", parents=[common], help="run one grid verification")
    p.add_argument("--system", required=True)
    p.add_argument("--direction", choices=(LOWER, UPPER), required=True)
    p.add_argument("--L", type=int, required=True)
    p.add_argument("--delta", type=_rational, required=True)
    p.add_argument("--tau", required=True, help="exact rational, or 'bd' for log(b)/(2*log(b-1))")

    p = sub.add_parser("reproduce", parents=[common], help="rerun the published parameter tables")
    p.add_argument("--table", choices=TABLES + ("all",), default="all")
    p.add_argument("--bases", type=_int_list)
    p.add_argument("--full", action="store_true", help="all bases instead of the spot check")
    p.add_argument("--print-manifest", action="store_true")
    p.add_argument("--output-dir", type=Path)

    p = sub.add_parser("dimension", parents=[common], help="bracket the dimension to a tolerance")
    p.add_argument("--system", required=True)
    p.add_argument("--eps", type=_rational, required=True)
    p.add_argument("--max-grid", type=int)
    p.add_argument("--max-level", type=int)
    p.add_argument("--max-seconds", type=float)

    p = sub.add_parser("analytic", help="closed-form bounds")
    kinds = p.add_subparsers(dest="kind", required=True)
    k = kinds.add_parser("expsum", parents=[common])
    k.add_argument("--b", type=int, required=True)
    k.add_argument("--l", type=int, required=True)
    k = kinds.add_parser("one-missing", parents=[common])
    k.add_argument("--b", type=int, required=True)
    k = kinds.add_parser("ap", parents=[common])
    k.add_argument("--b", type=int, required=True)
    k.add_argument("--a", type=int, required=True)
    k.add_argument("--d", type=int, required=True)
    k.add_argument("--l", type=int, required=True)
    k = kinds.add_parser("smallest-base", parents=[common])
    k.add_argument("--threshold", default="1/2")
    k.add_argument("--scan", choices=("one-missing", "one-missing-times-dim"), default="one-missing")

    p = sub.add_parser("consequences", parents=[common], help="exponents from a certified bound")
    p.add_argument("--system", required=True)
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--v", help="certified lower bound for the dimension, > 1/2")
    src.add_argument("--v-from", type=Path, help="lower certificate whose kappa_bound gives v")

    return parser


_EXTRAS = (
    "direction", "table", "bases", "full", "print_manifest", "output_dir", "max_grid",
    "max_level", "max_seconds", "kind", "b", "l", "a", "d", "threshold", "scan", "v", "v_from",
)

_VERBOSITY = {1: "INFO", 2: "DEBUG"}


def make_config(args: argparse.Namespace) -> RunConfig:
    settings = load_settings(args.config, precision=args.precision, jobs=args.jobs)
    if args.verbose:
        set_log_level(_VERBOSITY.get(args.verbose, "TRACE"))
    else:
        set_log_level(settings.log_level)
    extras = {name: getattr(args, name) for name in _EXTRAS if hasattr(args, name)}
    return RunConfig(
        subcommand=args.subcommand,
        settings=settings,
        output_format=args.output_format,
        output=args.output,
        system=getattr(args, "system", None),
        L=getattr(args, "L", None),
        delta=getattr(args, "delta", None),
        tau=getattr(args, "tau", None),
        eps=getattr(args, "eps", None),
        extras=extras,
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = make_config(args)
        return COMMANDS[cfg.subcommand](cfg)
    except UsageError as e:
        print(f"digitdim: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except DigitDimError as e:
        print(f"digitdim: error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
