"""
Exponents derived from a certified κ̂₁ lower bound.

Given the Hausdorff dimension κ of the support and a certified v with
1/2 < v < κ̂₁, the counting lemma yields rational points near the support
of size ≪ T^E with E = 2κ - ρ, and ν-almost no point is approximable to
order q^-α by rationals in the support once α > E/κ.
"""

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import partial
from typing import Callable, Optional, Tuple, Union

from .enclosure import Comparison, DecimalBounds, Enclosure, compare_threshold, working_precision
from .errors import DomainError, ParameterError

Number = Union[Enclosure, int, Fraction]

RHO_LABEL = "the exponent from the counting-lemma proof"


class BDVerdict(Enum):
    HOLDS = "holds"
    FAILS = "fails"
    INCONCLUSIVE = "inconclusive"


def _enclose(x: Number, prec: Optional[int] = None) -> Enclosure:
    if isinstance(x, Enclosure):
        return x
    return Enclosure.exact(Fraction(x), working_precision(prec))


def _check_domain(kappa: Enclosure, v: Enclosure) -> None:
    if not (kappa.lower > 0 and kappa.upper < 1):
        raise DomainError(f"kappa must lie in (0, 1), got {kappa!r}")
    if not (v.lower > Fraction(1, 2) and v.upper < 1):
        raise DomainError(f"v must lie in (1/2, 1), got {v!r}")


def rho_counting(kappa: Number, v: Number) -> Enclosure:
    """(1-κ)(2v-1)/(1-v)"""
    kappa, v = _enclose(kappa), _enclose(v)
    _check_domain(kappa, v)
    return (1 - kappa) * (v * 2 - 1) / (1 - v)


def counting_exponent(kappa: Number, v: Number) -> Enclosure:
    """E = 2κ - (1-κ)(2v-1)/(1-v)"""
    kappa = _enclose(kappa)
    return kappa * 2 - rho_counting(kappa, v)


def intrinsic_threshold(kappa: Number, v: Number) -> Tuple[Enclosure, Enclosure]:
    """(α*, ρ_int) with α* = E/κ and ρ_int = 2 - α*"""
    kappa = _enclose(kappa)
    alpha_star = counting_exponent(kappa, v) / kappa
    return alpha_star, 2 - alpha_star


def bd_check(kappa_hat_lower: Number, kappa: Number) -> Tuple[Enclosure, BDVerdict]:
    """Product κ̂₁·κ against 1/2"""
    product = _enclose(kappa_hat_lower) * _enclose(kappa)
    side = compare_threshold(product, Fraction(1, 2))
    verdict = {
        Comparison.ABOVE: BDVerdict.HOLDS,
        Comparison.BELOW: BDVerdict.FAILS,
    }.get(side, BDVerdict.INCONCLUSIVE)
    return product, verdict


def tau_for_bd(b: int, prec: Optional[int] = None) -> Tuple[str, Enclosure]:
    """
    τ(b) = log b / (2 log(b-1)).

    τ(b) times log(b-1)/log b is exactly 1/2, so certifying κ̂₁ ≥ τ(b) for a
    one-missing-digit system is the product condition κ̂₁·κ ≥ 1/2.
    """
    if b < 3:
        raise ParameterError(f"b must be >= 3, got {b}")
    prec = working_precision(prec)
    value = Enclosure.exact(b, prec).log() / (Enclosure.exact(b - 1, prec).log() * 2)
    return f"log({b})/(2*log({b - 1}))", value


def bd_tau_factory(b: int) -> Tuple[str, Callable[[int], Enclosure]]:
    """(expression text, precision -> enclosure of τ(b))"""
    text, _ = tau_for_bd(b)
    return text, partial(_tau_value, b)


def _tau_value(b: int, prec: int) -> Enclosure:
    return tau_for_bd(b, prec)[1]


@dataclass(frozen=True)
class ExponentReport:
    kappa: Enclosure
    v: Enclosure
    E: Enclosure
    rho_counting: Enclosure
    alpha_star: Enclosure
    rho_intrinsic: Enclosure
    bd_product: Enclosure
    bd_verdict: BDVerdict

    def to_dict(self) -> dict:
        def pair(x: Enclosure):
            return list(DecimalBounds.from_enclosure(x).to_json())

        return {
            "kappa": pair(self.kappa),
            "v": pair(self.v),
            "E": pair(self.E),
            "rho_counting": pair(self.rho_counting),
            "rho_counting_label": RHO_LABEL,
            "alpha_star": pair(self.alpha_star),
            "rho_intrinsic": pair(self.rho_intrinsic),
            "bd_product": pair(self.bd_product),
            "bd_verdict": self.bd_verdict.value,
        }


def exponent_report(kappa: Number, v: Number) -> ExponentReport:
    kappa, v = _enclose(kappa), _enclose(v)
    rho = rho_counting(kappa, v)
    alpha_star, rho_int = intrinsic_threshold(kappa, v)
    product, verdict = bd_check(v, kappa)
    return ExponentReport(
        kappa=kappa,
        v=v,
        E=kappa * 2 - rho,
        rho_counting=rho,
        alpha_star=alpha_star,
        rho_intrinsic=rho_int,
        bd_product=product,
        bd_verdict=verdict,
    )
