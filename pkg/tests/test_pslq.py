import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from jimmlab.errors import PrecisionError
from jimmlab.pslq import bailey_precision, canonical_relation, pslq
from jimmlab.relations import (build_dictionary, dictionary_relation_search, minpoly_search,
                               mp_elementary, mp_from_interval, profile_correlation)
from jimmlab.cf import PrecisionInterval


def test_bailey_precision():
    assert bailey_precision(9, 10 ** 10) == 90
    assert bailey_precision(3, 1000) == 9
    assert bailey_precision(2, 7) == math.ceil(2 * math.log10(7))
    with pytest.raises(ValueError):
        bailey_precision(0, 10)


def test_canonical_relation():
    assert canonical_relation((-2, 4, 0, -6)) == (1, -2, 0, 3)
    assert canonical_relation((0, -3, 3)) == (0, 1, -1)


def test_golden_ratio_relation():
    with mpmath.workdps(40):
        phi = (1 + mpmath.sqrt(5)) / 2
        r = pslq([phi * phi, phi, 1], c_max=100, digits=40)
    assert r.found and r.coefficients == (1, -1, -1)
    assert r.reason == "relation found"


def test_cube_root_two():
    with mpmath.workdps(50):
        x = mpmath.cbrt(2)
        r = pslq([1, x, x ** 2, x ** 3], c_max=1000, digits=50)
    assert r.coefficients == (2, 0, 0, -1)


def test_no_relation_gives_growing_bound():
    with mpmath.workdps(30):
        r = pslq([1, mpmath.e, mpmath.pi], c_max=10 ** 6, digits=30)
    assert not r.found
    assert r.norm_bound > 10 ** 6
    assert r.reason == "norm bound exceeds c_max"


def test_precision_gate():
    with mpmath.workdps(20):
        with pytest.raises(PrecisionError):
            pslq([1, mpmath.pi, mpmath.e], c_max=10 ** 10, digits=20)


def test_zero_input_rejected():
    with pytest.raises(ValueError):
        pslq([0, 1, 2], digits=20)


@settings(max_examples=40)
@given(st.lists(st.integers(-20, 20), min_size=2, max_size=4), st.integers(1, 10 ** 6))
def test_planted_relation_recovered(coeffs, seed):
    # x_n = sum c_i x_i with random-looking x_i; mpmath.pslq is the second route
    with mpmath.workdps(60):
        xs = [mpmath.sqrt(seed + 7 * i + 2) / (i + 1) + mpmath.log(i + 3) for i in range(len(coeffs))]
        last = mpmath.fsum(c * x for c, x in zip(coeffs, xs))
        if abs(last) < mpmath.mpf(10) ** -5:
            return
        vec = xs + [last]
        ours = pslq(vec, c_max=10 ** 4, digits=60)
        ref = mpmath.pslq(vec, maxcoeff=10 ** 4, maxsteps=10 ** 5)
        assert ours.found and ref is not None
        assert abs(mpmath.fsum(a * v for a, v in zip(ours.coefficients, vec))) < mpmath.mpf(10) ** -40
    assert max(map(abs, ours.coefficients)) <= max(map(abs, ref)) * 10


def test_trace_replays_looser_tolerances():
    with mpmath.workdps(60):
        x = mpmath.cbrt(2) + mpmath.mpf(10) ** -30
        r = pslq([1, x, x ** 2, x ** 3], eps=mpmath.mpf(10) ** -50, c_max=1000, digits=60)
    # exact for 1e-20, no longer for 1e-50
    assert not r.found
    rec = r.first_below(1e-20)
    assert rec is not None and rec.coefficients == (2, 0, 0, -1)
    residuals = [t.residual for t in r.trace]
    assert residuals == sorted(residuals, reverse=True)


def test_minpoly_search():
    with mpmath.workdps(60):
        r = minpoly_search(mpmath.cbrt(2), 4, 1000, digits=60)
    assert r.found and r.polynomial == (-2, 0, 0, 1)
    assert str(r) == "x^3-2"
    assert [m for m, _, _ in r.profile] == [1, 2, 3]


def test_minpoly_negative():
    with mpmath.workdps(60):
        r = minpoly_search(mpmath.pi, 4, 10 ** 6, digits=60)
    assert not r.found and str(r) == "absent"
    assert len(r.profile) == 4
    assert profile_correlation(r.profile) > 0.9


def test_minpoly_precision_gate():
    with pytest.raises(PrecisionError):
        minpoly_search(mpmath.pi, 8, 10 ** 10, digits=50)


def test_mp_helpers():
    iv = PrecisionInterval(Fraction(1, 3) - Fraction(1, 10 ** 40), Fraction(1, 3) + Fraction(1, 10 ** 40))
    with mpmath.workdps(30):
        assert abs(mp_from_interval(iv, 30) - mpmath.mpf(1) / 3) < mpmath.mpf(10) ** -29
    with pytest.raises(PrecisionError):
        mp_from_interval(iv, 60)
    with mpmath.workdps(30):
        assert mp_elementary("pow_rational", -8, 30, Fraction(1, 3)) == -2
        with pytest.raises(ValueError):
            mp_elementary("log", -1, 30)
        with pytest.raises(ValueError):
            mp_elementary("pow_rational", -8, 30, Fraction(1, 2))


def test_dictionary_contents():
    with mpmath.workdps(40):
        entries = build_dictionary([("a", mpmath.mpf(2)), ("b", mpmath.mpf(3))], 40)
    labels = [e.label for e in entries]
    assert labels[:2] == ["a", "b"]
    assert "exp(a)" in labels and "a*b" in labels and "log(a*b)" in labels
    assert len(labels) == len(set(labels))
    # a^2 and a*a style duplicates collapse; 1/a and a/b are distinct values
    values = [e.value for e in entries]
    assert all(abs(x - y) > mpmath.mpf(10) ** -15 for i, x in enumerate(values) for y in values[:i])
    with pytest.raises(ValueError):
        build_dictionary([], 30)


def test_dictionary_search_finds_planted_relation():
    # b = 2 a^2 exactly: the multiplicative family must see it at every rung
    with mpmath.workdps(60):
        a = mpmath.sqrt(mpmath.mpf(7)) / 3
        entries = build_dictionary([("a", a), ("b", 2 * a * a)], 60)
        rungs = dictionary_relation_search(entries, [1e-10, 1e-20, 1e-30], 1000, target="a", digits=60)
    assert all(r.found for r in rungs)
    assert all(max(map(abs, r.coefficients)) <= 3 for r in rungs)


def test_dictionary_ladder_must_decrease():
    with mpmath.workdps(30):
        entries = build_dictionary([("a", mpmath.pi), ("b", mpmath.e)], 30)
    with pytest.raises(ValueError):
        dictionary_relation_search(entries, [1e-8, 1e-5], 10, "a", 30)
