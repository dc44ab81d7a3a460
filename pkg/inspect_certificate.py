#!/usr/bin/env python3
"""Print a digitdim certificate and recompute its verdict from the stored endpoints."""

import argparse
import sys
from pathlib import Path

from digitdim.certify import Certificate
from digitdim.errors import CertificateError


def describe(cert: Certificate) -> None:
    print(f"system:     {cert.system}")
    print(f"direction:  {cert.direction}  L={cert.L}  delta={cert.delta}")
    print(f"tau:        {cert.tau_expr}  {list(cert.tau.to_json())}")
    print(f"grid:       {cert.grid_count:,} points")
    print(f"  max F_L:  {list(cert.grid_max.to_json())}")
    print(f"  min F_L:  {list(cert.grid_min.to_json())}")
    print(f"slack:      {list(cert.slack.to_json())}")
    print(f"threshold:  {list(cert.threshold.to_json())}")
    bound = "-" if cert.kappa_bound is None else list(cert.kappa_bound.to_json())
    print(f"kappa:      {bound}")
    print(f"verdict:    {cert.verdict.value}  ({cert.precision_bits} bits, digitdim {cert.tool_version})")


def main():
    parser = argparse.ArgumentParser(description="Inspect digitdim certificate files")
    parser.add_argument("paths", type=Path, nargs="+")
    parser.add_argument("--quiet", action="store_true", help="only report mismatches")
    args = parser.parse_args()

    bad = 0
    for path in args.paths:
        try:
            cert = Certificate.from_json(path.read_text(encoding="utf-8"))
        except (OSError, CertificateError) as e:
            print(f"{path}: {e}", file=sys.stderr)
            bad += 1
            continue
        recomputed = cert.recheck()
        if not args.quiet:
            print(f"\n{path}")
            describe(cert)
        if recomputed is not cert.verdict:
            print(f"{path}: stored {cert.verdict.value}, endpoints give {recomputed.value}", file=sys.stderr)
            bad += 1
        elif not args.quiet:
            print("recheck:    ok")
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
