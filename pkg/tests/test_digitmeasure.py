#!/usr/bin/env python3
"""Digit systems, the symbol g, S_L, F_L and the truncated Fourier coefficients."""

import math
import random
from fractions import Fraction

import numpy as np
import pytest

from digitdim.digitmeasure import (
    CLOSED,
    DIRECT,
    APDigitSpec,
    DigitSystem,
    cocycle_product,
    empirical_kappa1,
    fourier_coefficient_truncated,
    grid_sum,
    hausdorff_dimension,
    make_ap,
    make_one_missing,
    make_uniform,
    mirror,
    parse_rational,
    parse_system,
    power_system,
    symbol_modulus,
    systems_up_to_symmetry,
    truncated_partial_sum,
)
from digitdim.enclosure import Enclosure
from digitdim.errors import ParameterError, SystemSpecError, UnsupportedError


def numpy_symbol(system: DigitSystem, x: float) -> float:
    """Plain floating-point oracle for g"""
    j = np.arange(system.base)
    p = np.array([float(w) for w in system.weights])
    return float(abs(np.sum(p * np.exp(2j * np.pi * j * x))))


def numpy_partial_sum(system: DigitSystem, Q: int, J: int) -> float:
    n = np.arange(Q)[:, None]
    scales = float(system.base) ** -np.arange(1, J + 1)[None, :]
    j = np.arange(system.base)
    p = np.array([float(w) for w in system.weights])
    x = (n * scales)[..., None]
    g = np.abs(np.sum(p * np.exp(2j * np.pi * j * x), axis=-1))
    return float(np.sum(np.prod(g, axis=1)))


def close_to(enc: Enclosure, value: float, tol: float = 1e-12) -> bool:
    return float(enc.lower) - tol <= value <= float(enc.upper) + tol


# -- construction -----------------------------------------------------------


def test_make_one_missing():
    s = make_one_missing(5, 1)
    assert s.digits == (0, 2, 3, 4)
    assert s.missing_digit == 1
    assert s.is_uniform
    assert sum(s.weights) == 1


def test_one_missing_rejects_small_base_and_bad_digit():
    with pytest.raises(ParameterError):
        make_one_missing(2, 0)
    with pytest.raises(ParameterError):
        make_one_missing(5, 5)


def test_digit_system_invariants():
    with pytest.raises(ParameterError):
        DigitSystem(3, (Fraction(1, 2), Fraction(1, 2)))
    with pytest.raises(ParameterError):
        DigitSystem(3, (Fraction(1, 2), Fraction(1, 4), Fraction(1, 8)))
    with pytest.raises(ParameterError):
        DigitSystem(3, (Fraction(1), Fraction(0), Fraction(0)))
    with pytest.raises(ParameterError):
        make_uniform(4, range(4))


def test_parse_system_forms():
    assert parse_system("b=5 missing=1") == make_one_missing(5, 1)
    assert parse_system("b=10 digits=0,2,4") == make_uniform(10, (0, 2, 4))
    s = parse_system("b=4 probs=1/2,1/4,1/4,0")
    assert s.weights == (Fraction(1, 2), Fraction(1, 4), Fraction(1, 4), Fraction(0))
    assert not s.is_uniform
    for text in ("b=5 missing=1", "b=10 digits=0,2,4", "b=4 probs=1/2,1/4,1/4,0"):
        assert parse_system(parse_system(text).describe()) == parse_system(text)


@pytest.mark.parametrize(
    "text",
    ["missing=1", "b=5", "b=5 missing=1 digits=0,2", "b=5 missing", "b=x missing=1",
     "b=4 probs=1/2,1/2,1/2,0", "b=5 color=red missing=1"],
)
def test_parse_system_errors(text):
    with pytest.raises(SystemSpecError):
        parse_system(text)


def test_parse_rational_is_exact():
    assert parse_rational("1e-5") == Fraction(1, 100000)
    assert parse_rational("5e-7") == Fraction(5, 10 ** 7)
    assert parse_rational(" 1/2 ") == Fraction(1, 2)
    with pytest.raises(ParameterError):
        parse_rational("half")


def test_ap_digit_spec():
    assert make_ap(10, APDigitSpec(1, 3, 3)).digits == (1, 4, 7)
    with pytest.raises(ParameterError):
        APDigitSpec(0, 1, 4).validate(4)
    with pytest.raises(ParameterError):
        APDigitSpec(2, 3, 3).validate(7)
    with pytest.raises(ParameterError):
        APDigitSpec(0, 1, 1)


def test_mirror_and_symmetry_reduction():
    assert mirror(make_one_missing(7, 1)) == make_one_missing(7, 5)
    assert [s.missing_digit for s in systems_up_to_symmetry(6)] == [0, 1, 2]
    assert [s.missing_digit for s in systems_up_to_symmetry(7)] == [0, 1, 2, 3]


# -- g ------------------------------------------------------------------------


def test_symbol_at_integers_is_one():
    for b in (3, 4, 7):
        for a in range(b):
            g = symbol_modulus(make_one_missing(b, a), 0)
            assert g.contains(1)


def test_symbol_known_values():
    s = make_one_missing(3, 1)
    # digits {0, 2}: g(x) = |cos(2πx)|
    assert symbol_modulus(s, Fraction(1, 3)).contains(Fraction(1, 2))
    assert symbol_modulus(s, Fraction(1, 4)).contains(0)
    assert symbol_modulus(s, Fraction(1, 2)).contains(1)


def test_symbol_matches_numpy():
    rng = random.Random(11)
    for b in (3, 5, 10):
        for a in (0, b // 2, b - 1):
            s = make_one_missing(b, a)
            for _ in range(20):
                x = Fraction(rng.randint(0, 10 ** 6), 10 ** 6)
                assert close_to(symbol_modulus(s, x), numpy_symbol(s, float(x)))


def test_symbol_non_uniform_weights():
    s = parse_system("b=4 probs=1/2,1/4,1/4,0")
    for x in (Fraction(1, 7), Fraction(2, 5), Fraction(9, 10)):
        assert close_to(symbol_modulus(s, x), numpy_symbol(s, float(x)))


def test_evaluation_paths_agree():
    rng = random.Random(5)
    for _ in range(1000):
        b = rng.randint(3, 12)
        s = make_one_missing(b, rng.randrange(b))
        x = Fraction(rng.randint(1, 10 ** 5), rng.randint(2, 10 ** 5))
        if x.denominator == 1:
            continue
        direct = symbol_modulus(s, x, path=DIRECT)
        closed = symbol_modulus(s, x, path=CLOSED)
        assert direct.overlaps(closed)


def test_near_integer_uses_direct_path():
    s = make_one_missing(5, 2)
    x = Fraction(1, 10 ** 15)
    g = symbol_modulus(s, x)
    assert g.width() < Fraction(1, 10 ** 20)
    assert g.upper <= 1


def test_closed_path_requires_one_missing():
    with pytest.raises(ParameterError):
        symbol_modulus(make_uniform(10, (0, 2, 4)), Fraction(1, 3), path=CLOSED)


def test_symbol_of_interval_contains_samples():
    s = make_one_missing(4, 1)
    x = Enclosure.between(Fraction(1, 10), Fraction(1, 9))
    g = symbol_modulus(s, x)
    for t in np.linspace(0.1, 1 / 9, 9):
        assert close_to(g, numpy_symbol(s, t))


def test_interval_just_below_an_integer_stays_tight():
    s = make_one_missing(5, 1)
    x = Enclosure.between(Fraction(99, 100), Fraction(995, 1000))
    g = symbol_modulus(s, x)
    assert g.lower > Fraction(98, 100)
    assert g.width() <= symbol_modulus(s, x, path=DIRECT).width()
    assert g.width() <= symbol_modulus(s, x, path=CLOSED).width()
    for t in np.linspace(0.99, 0.995, 11):
        assert close_to(g, numpy_symbol(s, t))


# -- S_L and F_L ---------------------------------------------------------------


def test_grid_sum_level_one():
    s = make_one_missing(3, 1)
    assert grid_sum(s, 1, 0).contains(2)
    f = grid_sum(s, 1, Fraction(1, 4))
    assert close_to(f, math.sqrt(3))


def test_grid_sum_matches_direct_sum():
    s = make_one_missing(4, 0)
    L, x = 3, Fraction(1, 37)
    direct = 0.0
    for i in range(4 ** L):
        y = x + Fraction(i, 4 ** L)
        direct += math.prod(numpy_symbol(s, float((y * 4 ** j) % 1)) for j in range(L))
    assert close_to(grid_sum(s, L, x), direct, 1e-10)
    assert grid_sum(s, L, Enclosure.exact(x)).overlaps(grid_sum(s, L, x))


def test_grid_sum_is_periodic_and_even():
    s = make_one_missing(5, 1)
    L, x = 2, Fraction(3, 1000)
    f = grid_sum(s, L, x)
    assert f.overlaps(grid_sum(s, L, x + Fraction(1, 25)))
    assert f.overlaps(grid_sum(s, L, -x))


def test_cocycle_product_bounds():
    s = make_one_missing(6, 2)
    for x in (Fraction(1, 11), Fraction(5, 17)):
        p = cocycle_product(s, 3, x)
        assert 0 <= p.lower and p.upper <= 1
        expected = math.prod(numpy_symbol(s, float(x * 6 ** j)) for j in range(3))
        assert close_to(p, expected)


def test_power_system_symbol_is_cocycle_product():
    s = make_one_missing(3, 1)
    lifted = power_system(s, 2)
    assert lifted.base == 9
    assert sum(lifted.weights) == 1
    for x in (Fraction(1, 7), Fraction(2, 11)):
        assert symbol_modulus(lifted, x).overlaps(cocycle_product(s, 2, x))


# -- dimensions and coefficients --------------------------------------------


def test_hausdorff_dimension():
    d = hausdorff_dimension(make_one_missing(10, 3))
    assert close_to(d, math.log(9) / math.log(10))
    with pytest.raises(UnsupportedError):
        hausdorff_dimension(parse_system("b=4 probs=1/2,1/4,1/4,0"))


def test_fourier_coefficient_truncated():
    s = make_one_missing(3, 1)
    assert fourier_coefficient_truncated(s, 0, 5).contains(1)
    # ξ = 1: factors |cos(2π/3^j)|
    expected = math.prod(abs(math.cos(2 * math.pi / 3 ** j)) for j in range(1, 9))
    assert close_to(fourier_coefficient_truncated(s, 1, 8), expected)
    with pytest.raises(ParameterError):
        fourier_coefficient_truncated(s, 1, 0)


@pytest.mark.parametrize("a", [0, 1, 2])
@pytest.mark.parametrize("J", [1, 5, 10])
def test_coefficient_at_power_of_base_is_one(a, J):
    assert fourier_coefficient_truncated(make_one_missing(3, a), 3 ** J, J).contains(1)


def test_deeper_truncation_never_increases():
    s = make_one_missing(3, 1)
    shallow = fourier_coefficient_truncated(s, 1, 40)
    deep = fourier_coefficient_truncated(s, 1, 80)
    assert deep.lower <= shallow.upper
    assert deep.overlaps(shallow)


@pytest.mark.parametrize("b", [3, 4])
@pytest.mark.parametrize("N", [1, 2, 3, 4, 5])
def test_partial_sums_match_numpy(b, N):
    for a in range(b):
        s = make_one_missing(b, a)
        Q = b ** N
        enc = truncated_partial_sum(s, Q, N + 2)
        assert close_to(enc, numpy_partial_sum(s, Q, N + 2), 1e-9)


def test_empirical_kappa1_is_a_plausible_dimension():
    k = empirical_kappa1(make_one_missing(3, 1), 81, 12)
    assert 0.2 < k.midpoint() < 0.7
    with pytest.raises(ParameterError):
        empirical_kappa1(make_one_missing(3, 1), 1, 12)


def test_empirical_kappa1_b3_a1_stays_below_half():
    k = empirical_kappa1(make_one_missing(3, 1), 3 ** 6, 60)
    assert k.upper < Fraction(1, 2)
    assert 0.45 < k.midpoint()


@pytest.mark.parametrize("spec", ["b=3 missing=1", "b=4 missing=0", "b=5 missing=2", "b=4 probs=1/2,1/4,1/4,0"])
def test_empirical_kappa1_at_two_matches_float_product(spec):
    s = parse_system(spec)
    J = 30
    oracle = -math.log(numpy_partial_sum(s, 2, J) / 2) / math.log(2)
    assert close_to(empirical_kappa1(s, 2, J), oracle, 1e-9)
