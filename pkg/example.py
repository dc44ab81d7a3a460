#!/usr/bin/env python3
"""
digitdim - example usage
Certified Fourier l1 dimension bounds for missing-digit measures
"""

from fractions import Fraction

import digitdim


def main():
    print("=" * 60)
    print("digitdim demo - Fourier l1 dimension of missing-digit measures")
    print("=" * 60)

    # 1. A digit system: base 5, digit 0 removed
    system = digitdim.make_one_missing(5, 0)
    kappa = digitdim.hausdorff_dimension(system)
    print(f"\n✓ System: {system}  (Hausdorff dimension ~ {kappa.midpoint():.6f})")

    # 2. The symbol and the level-L sum at a few points
    print("\n--- SYMBOL ---")
    for x in (Fraction(0), Fraction(1, 7), Fraction(1, 3)):
        g = digitdim.symbol_modulus(system, x)
        f2 = digitdim.grid_sum(system, 2, x)
        print(f"x={str(x):>4}  g(x) in [{float(g.lower):.8f}, {float(g.upper):.8f}]  F_2(x) ~ {f2.midpoint():.6f}")

    # 3. Grid verification of a lower bound at tau = 1/2
    print("\n--- CERTIFICATE ---")
    cert = digitdim.verify_lower(system, 2, "1e-5", "1/2")
    print(f"verdict: {cert.verdict.value} over {cert.grid_count:,} grid points")
    print(f"kappa-hat-1 >= {float(cert.kappa_bound.lower):.6f}")
    print(f"recheck from stored endpoints: {cert.recheck().value}")

    # 4. Two-sided bracket at increasing L
    print("\n--- BRACKETS ---")
    for L in (1, 2, 3):
        bracket = digitdim.bound_bracket(system, L, "1e-4")
        upper = "-" if bracket.upper is None else f"{float(bracket.upper.upper):.4f}"
        print(f"L={L}: [{float(bracket.lower.lower):.4f}, {upper}]")

    # 5. Closed-form bounds for large bases
    print("\n--- CLOSED FORMS ---")
    b = digitdim.smallest_base(Fraction(1, 2))
    bound = digitdim.lower_bound_one_missing(b)
    print(f"smallest b with closed-form bound > 1/2: {b} (bound ~ {bound.midpoint():.6f})")

    # 6. Exponents from the certified bound
    print("\n--- CONSEQUENCES ---")
    report = digitdim.exponent_report(kappa, digitdim.Enclosure.exact(cert.kappa_bound.lower))
    print(f"E = {report.E.midpoint():.6f}  rho = {report.rho_counting.midpoint():.6f}")
    print(f"alpha* = {report.alpha_star.midpoint():.6f}  product condition: {report.bd_verdict.value}")

    print("\n" + "=" * 60)


if __name__ == "__main__":
    main()
