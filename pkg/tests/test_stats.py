import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, strategies as st

from jimmlab.cf import CFWord, PrecisionInterval, cf_from_interval, value_interval
from jimmlab.errors import PrecisionError
from jimmlab.jimm import jimm_word
from jimmlab.reals import RealSource, expand
from jimmlab.stats import (FrequencyTable, census_sums, collapse, collapsed_density_u, decimal_digits,
                           empirical_run_census, frequency_csv, frequency_table, gauss_kuzmin_entropy,
                           gauss_kuzmin_p, information_density, maximal_run_m, mean_partial_quotient,
                           operate_and_tabulate, run_frequency_k, small_rational_in, theoretical_table)

words = st.builds(lambda a0, q: CFWord(a0, tuple(q), truncated=True),
                  st.integers(0, 5), st.lists(st.integers(1, 6), max_size=80))


def test_percent_is_truncated():
    t = FrequencyTable({1: 2, 2: 1}, 3)
    assert t.percent_str(1) == "66.666"
    assert t.percent_str(2) == "33.333"
    assert t.percent_str(7) == "0.000"
    assert t.percent(1) == Fraction(200, 3)


def test_table_counts_quotients_only():
    t = frequency_table(CFWord(5, (1, 1, 2)))
    assert t.total == 3 and t.counts == {1: 2, 2: 1}
    with pytest.raises(ValueError):
        FrequencyTable({1: 2}, 3)


def test_gauss_kuzmin_against_mpmath():
    with mpmath.workdps(30):
        for k in (1, 2, 7, 100):
            assert gauss_kuzmin_p(k) == pytest.approx(
                float(mpmath.log(1 + mpmath.mpf(1) / (k * (k + 2)), 2)), rel=1e-14)
    # the tail of sum p(k) beyond N is about 1/(N ln 2)
    n = 10_000
    assert math.fsum(gauss_kuzmin_p(k) for k in range(1, n + 1)) == pytest.approx(
        1 - 1 / (n * math.log(2)), abs=1e-7)


def test_entropy_value():
    def term(k):
        p = mpmath.log1p(1 / (k * (k + 2))) / mpmath.log(2)
        return -p * mpmath.log(p, 2)

    with mpmath.workdps(20):
        ref = mpmath.nsum(term, [1, mpmath.inf], method="euler-maclaurin")
    assert gauss_kuzmin_entropy() == pytest.approx(float(ref), abs=1e-7)


def test_run_frequencies_against_mpmath():
    with mpmath.workdps(40):
        for i in range(0, 20):
            f = mpmath.fib(i + 2)
            ref = abs(mpmath.log(1 + mpmath.mpf((-1) ** i) / f ** 2, 2))
            assert run_frequency_k(i) == pytest.approx(float(ref), rel=1e-13, abs=1e-300)


def test_census_identities():
    s0, s1 = census_sums()
    assert s1 == pytest.approx(gauss_kuzmin_p(1), abs=1e-12)
    assert run_frequency_k(1) == pytest.approx(gauss_kuzmin_p(1), abs=1e-15)
    assert all(maximal_run_m(i) >= 0 for i in range(40))
    assert math.fsum(collapsed_density_u(i) for i in range(1, 60)) == pytest.approx(1, abs=1e-12)
    # with quotients 1 removed, u(i) is the share of runs of length i-1
    assert collapsed_density_u(1) == pytest.approx(maximal_run_m(0) / s0)


def test_theoretical_table_shape():
    rows = theoretical_table(5)
    assert [r["i"] for r in rows] == [0, 1, 2, 3, 4]
    assert rows[0]["p"] is None and rows[0]["k"] == 1
    assert rows[2]["u"] == collapsed_density_u(3)


@given(words)
def test_run_census_bookkeeping(w):
    c = empirical_run_census(w)
    q = list(w.quotients)
    trailing = 0
    while trailing < len(q) and q[len(q) - 1 - trailing] == 1:
        trailing += 1
    counted_ones = q.count(1) - trailing
    assert sum(i * n for i, n in c.m_counts.items()) == counted_ones
    if c.k_counts:
        assert c.k_counts.get(1, 0) == counted_ones
    pairs = sum(1 for a, b in zip(q, q[1:]) if a > 1 and b > 1)
    assert c.m_counts.get(0, 0) == pairs


@given(words)
def test_collapse_shifts_frequencies(w):
    t = frequency_table(w)
    c = frequency_table(collapse(w))
    for k, n in c.counts.items():
        assert t.counts[k + 1] == n
    assert c.total == t.total - t.counts.get(1, 0)


@given(st.integers(1, 10 ** 200))
def test_decimal_digits(q):
    assert decimal_digits(q) == len(str(q)) - 1


def test_density_of_golden_word():
    w = CFWord(1, (1,) * 3000, truncated=True)
    assert information_density(w) == pytest.approx(math.log2((1 + 5 ** 0.5) / 2), abs=2e-3)


def test_mean_partial_quotient():
    w = CFWord(3, (1, 2, 3), truncated=True)
    assert mean_partial_quotient(w, 3) == 2
    with pytest.raises(ValueError):
        mean_partial_quotient(w, 4)


def test_small_rational_in():
    iv = PrecisionInterval(Fraction(333, 1000), Fraction(334, 1000))
    assert small_rational_in(iv, 10) == Fraction(1, 3)
    assert small_rational_in(PrecisionInterval(Fraction(1, 7) + Fraction(1, 10 ** 12),
                                               Fraction(1, 7) + Fraction(2, 10 ** 12)), 10 ** 3) is None


@given(st.fractions(0, 1000, max_denominator=1000), st.fractions(0, 1000, max_denominator=1000))
def test_small_rational_is_simplest(a, b):
    lo, hi = min(a, b), max(a, b)
    r = small_rational_in(PrecisionInterval(lo, hi), 10 ** 6)
    assert r is not None and lo <= r <= hi
    for d in range(1, r.denominator):
        n = math.ceil(lo * d)
        assert Fraction(n, d) > hi


def _pi_iv(digits):
    return RealSource.pi().interval(digits)


def test_degenerate_sum_is_reported():
    x = _pi_iv(300) - 3
    jx = value_interval(jimm_word(cf_from_interval(x)).certified)
    jy = value_interval(jimm_word(cf_from_interval(1 - x)).certified)
    r = operate_and_tabulate(jx, jy, "add", label="J(x)+J(1-x)")
    assert r.degenerate and r.constant == 1 and r.table.total == 0


def test_generic_sum_is_tabulated():
    a = _pi_iv(300)
    b = RealSource.nth_root(2, 3).interval(300)
    r = operate_and_tabulate(a, b, "add")
    assert not r.degenerate
    assert r.interval.contains(r.interval.mid)
    assert value_interval(r.word).lo <= r.interval.lo
    assert r.table.total > 100


def test_identity_multiple_keeps_table():
    w = expand(RealSource.pi(), 200)
    r = operate_and_tabulate(w, None, "qmul", 1)
    assert r.table == frequency_table(w)
    r2 = operate_and_tabulate(w, None, "qmul", Fraction(2))
    assert r2.table.total > 50


def test_too_few_quotients():
    with pytest.raises(PrecisionError):
        short = RealSource.digits(text="3.1415").interval(4)
        operate_and_tabulate(short, short, "mul")
    with pytest.raises(ValueError):
        operate_and_tabulate(_pi_iv(30), _pi_iv(30), "pow")


def test_frequency_csv():
    t = frequency_table(CFWord(0, (1, 1, 2)))
    text = frequency_csv({"x": t}, max_quotient=3)
    assert text.splitlines() == ["quotient,percent,series", "1,66.666,x", "2,33.333,x", "3,0.000,x"]
