import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from holderkit.counterexample import (
    DigitArray,
    digits_to_image,
    digits_to_point,
    first_difference,
    growth_exponent,
    point_to_digits,
    predicted_ratio,
    quotient_probe,
    random_digits,
    random_pair,
    verify_bounds,
)


def naive_point(d):
    """Triple loop straight from the defining double sum."""
    x = [Fraction(0)] * d.n
    for k in range(d.k_min, d.k_max + 1):
        for j in range(d.n):
            for i in range(d.m):
                x[j] += Fraction(d[(k, j, i)]) * Fraction(d.t) ** (-(d.m * k) - i)
    return tuple(x)


def naive_image(d):
    f = [Fraction(0)] * d.m
    for k in range(d.k_min, d.k_max + 1):
        for j in range(d.n):
            for i in range(d.m):
                f[i] += Fraction(d[(k, j, i)]) * Fraction(d.t + 1) ** (-(d.n * k) - j)
    return tuple(f)


def single(t, n, m, k_min, k_max, idx, v=1):
    return DigitArray(t, n, m, k_min, k_max, ((idx, v),))


shapes = st.tuples(st.integers(2, 10), st.integers(1, 3), st.integers(1, 3), st.integers(-2, 1), st.integers(0, 4))


def test_zero_digits():
    d = DigitArray(3, 2, 2, 0, 3)
    assert digits_to_point(d) == (0, 0)
    assert digits_to_image(d) == (0, 0)


def test_point_examples():
    assert digits_to_point(single(2, 1, 2, 0, 2, (1, 0, 0))) == (Fraction(1, 4),)
    d = DigitArray(10, 1, 1, 0, 3, (((1, 0, 0), 3), ((2, 0, 0), 7)))
    assert digits_to_point(d) == (Fraction(37, 100),)


def test_image_examples():
    assert digits_to_image(single(2, 1, 2, 0, 2, (1, 0, 0))) == (Fraction(1, 3), 0)
    d = DigitArray(2, 2, 1, 0, 1, (((0, 0, 0), 1), ((0, 1, 0), 1)))
    assert digits_to_image(d) == (Fraction(4, 3),)


def test_digit_validation():
    with pytest.raises(ValueError):
        DigitArray(1, 1, 1, 0, 1)
    with pytest.raises(ValueError):
        single(2, 1, 1, 0, 1, (0, 0, 0), v=2)
    with pytest.raises(ValueError):
        single(2, 1, 1, 0, 1, (5, 0, 0))
    with pytest.raises(ValueError):
        single(2, 1, 1, 0, 1, (0, 1, 0))


@settings(max_examples=80, deadline=None)
@given(shapes, st.integers(0, 2**32 - 1))
def test_decoding_matches_naive_sum(shape, seed):
    t, n, m, k_min, depth = shape
    d = random_digits(np.random.default_rng(seed), t, n, m, k_min, k_min + depth)
    assert digits_to_point(d) == naive_point(d)
    assert digits_to_image(d) == naive_image(d)


def test_point_to_digits_examples():
    d = point_to_digits([Fraction(1, 4)], 2, 2, 0, 2)
    assert d.digits == (((1, 0, 0), 1),)
    assert point_to_digits([0], 3, 2, 0, 2).digits == ()
    with pytest.raises(ValueError, match="not representable"):
        point_to_digits([Fraction(1, 3)], 2, 1, 0, 10)
    # too large for the leading digit
    with pytest.raises(ValueError, match="not representable"):
        point_to_digits([Fraction(5)], 2, 1, 0, 4)
    with pytest.raises(ValueError):
        point_to_digits([Fraction(-1, 2)], 2, 1, 0, 4)


@settings(max_examples=100, deadline=None)
@given(shapes, st.integers(0, 2**32 - 1))
def test_round_trip(shape, seed):
    t, n, m, k_min, depth = shape
    d = random_digits(np.random.default_rng(seed), t, n, m, k_min, k_min + depth)
    x = digits_to_point(d)
    back = point_to_digits(x, t, m, d.k_min, d.k_max)
    assert back == d
    assert digits_to_point(back) == x


def test_verify_bounds_example():
    dx = single(2, 1, 2, 0, 2, (1, 0, 0))
    dy = DigitArray(2, 1, 2, 0, 2)
    chk = verify_bounds(dx, dy)
    assert chk.KJI == (1, 0, 0)
    assert chk.distance == Fraction(1, 4) and chk.upper_bound == Fraction(1, 2)
    assert chk.image_distance == Fraction(1, 3) and chk.lower_bound == Fraction(1, 9)
    assert chk.upper_ok and chk.lower_ok and chk.ok


@pytest.mark.parametrize("t, n, m", [(2, 1, 2), (10, 1, 2), (3, 2, 3)])
def test_verify_bounds_deepest_digit(t, n, m):
    k_max = 3
    idx = (k_max, n - 1, m - 1)
    chk = verify_bounds(single(t, n, m, 0, k_max, idx), DigitArray(t, n, m, 0, k_max))
    assert chk.KJI == idx
    assert chk.distance == Fraction(t) ** (-(m * k_max) - (m - 1))
    assert chk.image_distance == Fraction(t + 1) ** (-(n * k_max) - (n - 1))
    assert chk.ok


def test_verify_bounds_errors():
    d = single(2, 1, 2, 0, 2, (1, 0, 0))
    with pytest.raises(ValueError, match="identical"):
        verify_bounds(d, d)
    with pytest.raises(ValueError):
        verify_bounds(d, DigitArray(3, 1, 2, 0, 2))


@settings(max_examples=100, deadline=None)
@given(st.sampled_from([(2, 1, 2), (10, 1, 2), (3, 2, 3), (4, 2, 1), (5, 1, 1)]), st.integers(0, 2**32 - 1))
def test_bounds_hold_and_map_is_injective(tnm, seed):
    t, n, m = tnm
    dx, dy = random_pair(np.random.default_rng(seed), t, n, m, -1, 3)
    assert dx != dy
    chk = verify_bounds(dx, dy)
    assert chk.ok
    assert chk.image_distance > 0
    assert digits_to_image(dx) != digits_to_image(dy)
    assert chk.KJI == first_difference(dy, dx)


def test_predicted_ratios():
    assert predicted_ratio(10, 1, 2, 0.6) == pytest.approx(10 ** (1.2 - math.log(11) / math.log(10)), rel=1e-15)
    assert predicted_ratio(10, 1, 2, 0.6) == pytest.approx(1.4408, abs=5e-5)
    assert predicted_ratio(2, 1, 2, 0.6) == pytest.approx(0.766, abs=5e-4)
    for t in (2, 3, 10, 100):
        assert growth_exponent(t, 1, 2, 0.5) < 0


def test_probe_large_base_blows_up():
    rep = quotient_probe(10, 1, 2, 0.6, range(2, 13))
    assert [r.K for r in rep.rows] == list(range(2, 13))
    assert rep.rows[0].ratio is None
    for row in rep.rows[1:]:
        assert row.ratio == pytest.approx(rep.predicted_ratio, rel=1e-9)
    assert all(rep.exact_increasing())


def test_probe_small_base_decays():
    rep = quotient_probe(2, 1, 2, 0.6, range(2, 13))
    q = [r.quotient for r in rep.rows]
    assert all(b <= a for a, b in zip(q, q[1:]))
    assert not any(rep.exact_increasing())


def test_probe_csv_and_determinism():
    a = quotient_probe(10, 1, 2, 0.6, [2, 3, 4], seed=5)
    b = quotient_probe(10, 1, 2, 0.6, [2, 3, 4], seed=5)
    assert a.to_csv() == b.to_csv()
    lines = a.to_csv().splitlines()
    assert lines[0] == "K,quotient,ratio,predicted" and len(lines) == 4


def test_probe_validation():
    with pytest.raises(ValueError):
        quotient_probe(10, 1, 2, 1.5, [2, 3])
    with pytest.raises(ValueError):
        quotient_probe(10, 1, 2, 0.6, [3, 2])


@settings(max_examples=50, deadline=None)
@given(shapes, st.integers(0, 2**32 - 1))
def test_json_round_trip(shape, seed):
    t, n, m, k_min, depth = shape
    d = random_digits(np.random.default_rng(seed), t, n, m, k_min, k_min + depth)
    assert DigitArray.from_json(d.to_json()) == d
