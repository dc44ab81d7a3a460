#!/usr/bin/env python3
"""Grid verification, certificates, brackets, refinement and the induction check."""

import json
import math
from fractions import Fraction

import pytest

from digitdim.certify import (
    LOWER,
    UPPER,
    BoundBracket,
    Budget,
    Certificate,
    RefineStatus,
    Verdict,
    bound_bracket,
    empirical_kappa1_integral,
    grid_extrema,
    induction_sum_check,
    lipschitz_bound,
    refine_dimension,
    verify_lower,
    verify_upper,
)
from digitdim.digitmeasure import make_one_missing
from digitdim.enclosure import Enclosure
from digitdim.errors import CertificateError, EnumerationLimitError, ParameterError
from digitdim.grid import GridSpec, evaluate_grid

DELTA_4 = Fraction(1, 10 ** 4)
DELTA_5 = Fraction(1, 10 ** 5)
HALF = Fraction(1, 2)


def contains_float(enc, value, tol=1e-9):
    return float(enc.lower) - tol <= value <= float(enc.upper) + tol


# -- grid ------------------------------------------------------------------------


def test_lipschitz_bound():
    assert contains_float(lipschitz_bound(make_one_missing(3, 1), 1), 12 * math.pi)
    assert contains_float(lipschitz_bound(make_one_missing(4, 2), 2), 480 * math.pi)
    assert lipschitz_bound(make_one_missing(3, 0), 3).lower > 0
    with pytest.raises(ParameterError):
        lipschitz_bound(make_one_missing(3, 0), 0)


def test_grid_spec_count_covers_half_period():
    grid = GridSpec(5, 4, Fraction(5, 10 ** 7))
    assert grid.count == 1601
    grid = GridSpec(3, 1, DELTA_4)
    assert grid.count == 1668
    assert grid.abscissa(grid.count - 1) >= grid.half_period
    with pytest.raises(ParameterError):
        GridSpec(3, 1, 0)


def test_grid_chunks_partition_indices():
    grid = GridSpec(3, 1, DELTA_4)
    chunks = grid.chunks(500)
    assert chunks[0][0] == 0 and chunks[-1][1] == grid.count
    assert all(a[1] == b[0] for a, b in zip(chunks, chunks[1:]))
    assert all(stop - start <= 500 for start, stop in chunks)


def test_grid_extrema_level_one():
    s = make_one_missing(3, 1)
    grid_max, grid_min = grid_extrema(s, GridSpec(3, 1, DELTA_4))
    assert grid_max.upper >= 2
    assert grid_min.lower <= math.sqrt(3) + 0.01
    assert grid_min.upper <= grid_max.upper


def test_grid_extrema_independent_of_chunking_and_workers():
    s = make_one_missing(4, 1)
    grid = GridSpec(4, 2, Fraction(1, 2000))
    one = evaluate_grid(s, grid, jobs=1)
    chunked = evaluate_grid(s, grid, jobs=1, chunk_size=7)
    parallel = evaluate_grid(s, grid, jobs=2, chunk_size=16)
    assert one.max == chunked.max == parallel.max
    assert one.min == chunked.min == parallel.min


# -- verification -----------------------------------------------------------------


def test_verify_lower_passes_at_low_tau():
    cert = verify_lower(make_one_missing(3, 1), 1, DELTA_4, Fraction(3, 10))
    assert cert.verdict is Verdict.PASS
    assert cert.direction == LOWER
    assert cert.grid_count == 1668
    assert cert.kappa_bound.lower >= Fraction(3, 10)


def test_certificate_keeps_exact_tau():
    s = make_one_missing(3, 1)
    assert verify_lower(s, 1, DELTA_4, Fraction(3, 10)).tau_expr == "3/10"
    assert verify_lower(s, 1, DELTA_4, "0.3").tau_expr == "3/10"
    assert verify_lower(s, 1, DELTA_4, "3/10", tau_expr="three tenths").tau_expr == "three tenths"


def test_retry_re_encloses_tau_at_doubled_precision():
    requested = []

    def tau(prec):
        requested.append(prec)
        if prec < 256:
            return Enclosure.between(Fraction(35, 100), Fraction(38, 100), prec)
        return Enclosure.exact(Fraction(35, 100), prec)

    cert = verify_lower(make_one_missing(3, 1), 1, DELTA_4, tau, prec=128)
    assert sorted(set(requested)) == [128, 256]
    assert cert.precision_bits == 256
    assert cert.verdict is Verdict.PASS


def test_verify_lower_fails_above_the_dimension():
    cert = verify_lower(make_one_missing(3, 1), 1, DELTA_4, HALF)
    assert cert.verdict is Verdict.FAIL


def test_verify_lower_parameter_errors():
    s = make_one_missing(3, 1)
    with pytest.raises(ParameterError):
        verify_lower(s, 1, DELTA_4, 0)
    with pytest.raises(ParameterError):
        verify_lower(s, 1, DELTA_4, 1)
    with pytest.raises(ParameterError):
        verify_lower(s, 1, HALF, HALF)


def test_verify_lower_b5_a0():
    cert = verify_lower(make_one_missing(5, 0), 2, DELTA_5, HALF)
    assert cert.verdict is Verdict.PASS


@pytest.mark.parametrize("b,a", [(3, 0), (3, 1), (4, 1)])
def test_verify_upper_exceptional_systems(b, a):
    cert = verify_upper(make_one_missing(b, a), 2, DELTA_4, HALF)
    assert cert.verdict is Verdict.PASS
    assert cert.direction == UPPER
    assert cert.kappa_bound.upper < HALF


def test_verify_upper_fails_when_dimension_is_large():
    cert = verify_upper(make_one_missing(5, 0), 2, DELTA_5, HALF)
    assert cert.verdict is Verdict.FAIL


def test_verdict_monotone_in_delta():
    s = make_one_missing(3, 1)
    verdicts = [
        verify_lower(s, 1, Fraction(1, n), Fraction(3, 10)).verdict for n in (500, 1000, 5000, 10000)
    ]
    for coarse, fine in zip(verdicts, verdicts[1:]):
        assert not (coarse is Verdict.PASS and fine is Verdict.FAIL)
    assert verdicts[-1] is Verdict.PASS


# -- certificates -------------------------------------------------------------------


def test_certificate_json_is_stable():
    cert = verify_upper(make_one_missing(3, 0), 2, DELTA_4, HALF)
    text = cert.to_json()
    again = Certificate.from_json(text)
    assert again.to_json() == text
    assert again == cert
    assert again.recheck() is cert.verdict
    assert list(json.loads(text)) == [
        "system", "direction", "L", "delta", "tau", "tau_expr", "grid_count",
        "grid_max", "grid_min", "lipschitz", "slack", "threshold", "kappa_bound",
        "verdict", "precision_bits", "tool_version",
    ]
    assert "wall_time" not in text


def test_certificate_endpoints_round_outward():
    cert = verify_lower(make_one_missing(3, 1), 1, DELTA_4, Fraction(3, 10))
    data = json.loads(cert.to_json())
    lo, hi = data["grid_max"]
    assert Fraction(lo) <= 2 <= Fraction(hi)
    assert data["delta"] == "1/10000"


def test_tampered_certificate_fails_recheck():
    cert = verify_lower(make_one_missing(3, 1), 1, DELTA_4, Fraction(3, 10))
    data = json.loads(cert.to_json())
    data["verdict"] = "FAIL"
    forged = Certificate.from_dict(data)
    assert not forged.is_consistent()


def test_certificate_parse_errors():
    with pytest.raises(CertificateError):
        Certificate.from_json("{not json")
    with pytest.raises(CertificateError):
        Certificate.from_json('{"system": "b=3 missing=1"}')
    cert = verify_lower(make_one_missing(3, 1), 1, DELTA_4, Fraction(3, 10))
    data = json.loads(cert.to_json())
    data["grid_max"] = ["2", "1"]
    with pytest.raises(CertificateError):
        Certificate.from_dict(data)


# -- brackets and refinement -----------------------------------------------------------


def test_bound_bracket_level_one():
    bracket = bound_bracket(make_one_missing(3, 1), 1, DELTA_4)
    assert abs(float(bracket.lower.lower) - 0.36907) < 0.002
    assert bracket.upper is not None
    assert bracket.upper.upper <= Fraction(501, 1000)
    assert bracket.width() < Fraction(14, 100)


@pytest.mark.parametrize("b,a", [(3, 1), (4, 0), (5, 0)])
def test_brackets_nest_across_levels(b, a):
    s = make_one_missing(b, a)
    brackets = [bound_bracket(s, L, DELTA_4) for L in (1, 2, 3)]
    for low in brackets:
        for high in brackets:
            if high.upper is not None:
                assert low.lower.lower <= high.upper.upper


def test_refine_dimension_converges():
    bracket, status = refine_dimension(make_one_missing(3, 1), Fraction(1, 5))
    assert status is RefineStatus.CONVERGED
    assert bracket.width() <= Fraction(1, 5)
    assert bracket.lower.lower <= Fraction(501, 1000)
    assert bracket.upper.upper >= Fraction(369, 1000)


def test_refine_dimension_wide_eps_stops_at_level_one():
    bracket, status = refine_dimension(make_one_missing(4, 0), 2)
    assert status is RefineStatus.CONVERGED
    assert bracket.L == 1


def test_refine_dimension_zero_budget():
    bracket, status = refine_dimension(make_one_missing(3, 1), Fraction(1, 5), Budget(max_grid=0))
    assert status is RefineStatus.BUDGET_EXHAUSTED
    assert bracket == BoundBracket(None, None, None, None)
    with pytest.raises(ParameterError):
        refine_dimension(make_one_missing(3, 1), 0)


# -- induction inequality -----------------------------------------------------------------


def test_induction_level_one_at_zero():
    lhs, rhs, holds = induction_sum_check(make_one_missing(3, 1), 1, 0)
    assert lhs.contains(2)
    assert rhs.upper >= 2
    assert holds


@pytest.mark.parametrize("b", [3, 4, 5])
def test_induction_small_systems(b):
    for a in range(b):
        for y in (0, Fraction(1, 7), Fraction(1, 3)):
            for N in (1, 2, 3):
                assert induction_sum_check(make_one_missing(b, a), N, y)[2]


@pytest.mark.slow
@pytest.mark.parametrize("b", [3, 4, 5])
def test_induction_small_systems_deep(b):
    for a in range(b):
        for y in (0, Fraction(1, 7), Fraction(1, 3)):
            for N in (4, 5):
                assert induction_sum_check(make_one_missing(b, a), N, y)[2]


def test_induction_enumeration_limit():
    with pytest.raises(EnumerationLimitError):
        induction_sum_check(make_one_missing(10, 0), 7, 0)


# -- integral diagnostic --------------------------------------------------------------------


def test_integral_diagnostic():
    k = empirical_kappa1_integral(make_one_missing(3, 1), 2, 200)
    assert 0.2 < k.midpoint() < 0.7
    with pytest.raises(ParameterError):
        empirical_kappa1_integral(make_one_missing(3, 1), 2, 1)
