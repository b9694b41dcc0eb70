from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from jimmlab.cf import value_interval
from jimmlab.errors import BudgetExceeded, PrecisionError
from jimmlab.reals import RealSource, expand, parse_digits, pi_interval, refine_root, sturm_count
from jimmlab.surd import QuadraticSurd
from oracles import cf_terms


def test_pi_matches_mpmath():
    with mpmath.workdps(520):
        ref = mpmath.pi
        iv = pi_interval(500)
        assert iv.width < Fraction(1, 10 ** 500)
        lo = mpmath.mpf(iv.lo.numerator) / iv.lo.denominator
        hi = mpmath.mpf(iv.hi.numerator) / iv.hi.denominator
        assert lo <= ref <= hi


def test_pi_expansion_head():
    w = expand(RealSource.pi(), 20)
    assert list(w.terms) == [3, 7, 15, 1, 292, 1, 1, 1, 2, 1, 3, 1, 14, 2, 1, 1, 2, 2, 2, 2, 1]


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 50), st.integers(2, 5))
def test_nth_root_encloses(a, n):
    src = RealSource.nth_root(a, n)
    iv = src.interval(60)
    assert iv.width < Fraction(1, 10 ** 60)
    assert iv.lo ** n <= a <= iv.hi ** n


def test_cbrt2_expansion_matches_mpmath():
    w = expand(RealSource.nth_root(2, 3), 200)
    with mpmath.workdps(400):
        x = mpmath.cbrt(2)
        ref = []
        for _ in range(201):
            a = int(mpmath.floor(x))
            ref.append(a)
            x = 1 / (x - a)
    assert list(w.terms) == ref


def test_surd_source_expansion():
    w = expand(RealSource.of_surd(QuadraticSurd.sqrt(7)), 9)
    assert list(w.terms) == [2, 1, 1, 1, 4, 1, 1, 1, 4, 1]


def test_rational_source_is_exact():
    w = expand(RealSource.rational(Fraction(355, 113)), 50)
    assert list(w.terms) == cf_terms(Fraction(355, 113))


def test_sturm_counts_roots():
    # (x - 1)(x - 2)(x - 3)
    coeffs = [-6, 11, -6, 1]
    assert sturm_count(coeffs, Fraction(0), Fraction(4)) == 3
    assert sturm_count(coeffs, Fraction(3, 2), Fraction(5, 2)) == 1
    with pytest.raises(ValueError):
        RealSource.algebraic(coeffs, 0, 4)


def test_refinement_budget():
    src = RealSource.nth_root(2, 3)
    with pytest.raises(BudgetExceeded):
        refine_root(src, 5000, budget=3)


def test_digit_file_parsing(tmp_path):
    iv = parse_digits("3.14159\n 26535")
    assert iv.lo == Fraction(314159265350 // 10, 10 ** 10)
    assert iv.width == Fraction(1, 10 ** 10)
    with pytest.raises(ValueError, match="line 1, column 3"):
        parse_digits("3.x1")
    f = tmp_path / "e.txt"
    f.write_text(str(mpmath.mpf(mpmath.e))[:12])
    src = RealSource.digits(path=f, label="e")
    assert not src.refinable
    w = expand(src, 5)
    assert list(w.terms) == [2, 1, 2, 1, 1, 4]
    with pytest.raises(PrecisionError):
        expand(src, 200)


def test_missing_digit_file():
    src = RealSource.digits(path="/nonexistent/gamma.txt", name="gamma")
    with pytest.raises(FileNotFoundError):
        src.interval(10)


def test_digits_dir_env(tmp_path, monkeypatch):
    (tmp_path / "pi.txt").write_text("3.14159265358979")
    monkeypatch.setenv("JIMMLAB_DIGITS_DIR", str(tmp_path))
    src = RealSource.pi()
    assert not src.refinable
    assert src.interval(100).width == Fraction(1, 10 ** 14)


def test_json_shorthands():
    a = RealSource.from_json({"kind": "nth-root", "a": "2", "n": 3, "label": "c"})
    b = RealSource.nth_root(2, 3, "c")
    assert a == b
    assert RealSource.from_json(b.to_json()) == b
    assert RealSource.from_json({"kind": "pi"}).refinable


def test_expansion_is_certified_prefix():
    src = RealSource.nth_root(5, 2)
    w = expand(src, 40)
    iv = value_interval(w)
    assert iv.contains(src.interval(80).lo)
