"""Desk-scale reproduction suite: one check per acceptance criterion.

Every check returns a :class:`CheckResult`; golden numbers are read from the
JSON files in ``jimmlab/data/golden`` (or another directory, so a tampered
copy can be tested).
"""

from __future__ import annotations

import json
import math
import os
import random
import time
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Callable

import mpmath

from .cf import CFWord, cf_from_interval, cf_matrix, fibonacci_map, value_interval
from .jimm import (gauss_conjugate, harmonic_check, jimm_involution_check,
                   jimm_rational, jimm_real, jimm_surd, jimm_word)
from .errors import PrecisionError
from .reals import RealSource, expand
from .relations import (build_dictionary, dictionary_relation_search, minpoly_search,
                        mp_from_interval, profile_correlation)
from .stats import (census_sums, collapse, collapsed_density_u, decimal_digits, frequency_table,
                    gauss_kuzmin_p, information_density, maximal_run_m, operate_and_tabulate,
                    run_frequency_k)
from .surd import QuadraticSurd, surd_norm

__all__ = ["CheckResult", "CHECKS", "run_suite", "load_golden", "format_report",
           "jimm_expansion", "random_word"]


@dataclass(frozen=True)
class CheckResult:
    number: int
    title: str
    status: str  # PASS, FAIL or SKIP
    detail: str = ""

    @property
    def passed(self) -> bool:
        return self.status == "PASS"

    def line(self) -> str:
        return f"[{self.status}] criterion {self.number:>2}: {self.title} -- {self.detail}"


def load_golden(name: str, golden_dir: str | os.PathLike | None = None) -> dict:
    if golden_dir is not None:
        return json.loads((Path(golden_dir) / f"{name}.json").read_text(encoding="utf-8"))
    ref = resources.files("jimmlab") / "data" / "golden" / f"{name}.json"
    return json.loads(ref.read_text(encoding="utf-8"))


CBRT2 = RealSource.nth_root(2, 3, "cbrt2")
PI = RealSource.pi()


@lru_cache(maxsize=8)
def _expansion_terms(key: str, n_terms: int) -> tuple[int, ...]:
    src = {"cbrt2": CBRT2, "pi": PI}[key]
    return expand(src, n_terms - 1).terms


def jimm_expansion(key: str, n_terms: int) -> CFWord:
    """J applied to the first ``n_terms`` flat terms of ``cbrt2`` or ``pi``.

    The returned word keeps the final, still-open separator.
    """
    return jimm_word(CFWord.from_terms(_expansion_terms(key, n_terms), truncated=True)).output


def random_word(rng: random.Random, max_quotient: int = 20, max_len: int = 200,
                integer_part: int | None = None) -> CFWord:
    n = rng.randint(1, max_len)
    a0 = rng.randint(0, max_quotient) if integer_part is None else integer_part
    return CFWord(a0, tuple(rng.randint(1, max_quotient) for _ in range(n)), True)


def _pct_rows(word: CFWord, printed: dict, tol: Fraction) -> list[str]:
    table = frequency_table(word)
    bad = []
    for k, v in printed.items():
        got = Fraction(table.percent_str(int(k)))
        if abs(got - Fraction(v)) > tol:
            bad.append(f"{k}: {table.percent_str(int(k))} vs {v}")
    return bad


# -- the checks -----------------------------------------------------------------

def check_1(golden_dir=None, heavy=False) -> CheckResult:
    rows = load_golden("surd_images", golden_dir)["rows"]
    bad = []
    for row in rows:
        got = jimm_surd(QuadraticSurd.sqrt(row["N"]))
        want = QuadraticSurd(row["p"], row["q"], row["d"], row["r"])
        if got != want:
            bad.append(f"N={row['N']}: computed {got}, printed {row['printed']}")
    status = "PASS" if not bad else "FAIL"
    detail = f"{len(rows) - len(bad)}/{len(rows)} rows equal" + ("; " + "; ".join(bad) if bad else "")
    return CheckResult(1, "J(sqrt N) surd table", status, detail)


def check_2(golden_dir=None, heavy=False) -> CheckResult:
    rows = load_golden("surd_images", golden_dir)["rows"]
    bad = [r["N"] for r in rows if surd_norm(jimm_surd(QuadraticSurd.sqrt(r["N"]))) != -1]
    return CheckResult(2, "norm law", "PASS" if not bad else "FAIL",
                       f"Norm(J(sqrt N)) = -1 for {len(rows) - len(bad)}/{len(rows)} rows"
                       + (f"; fails for {bad}" if bad else ""))


def check_3(golden_dir=None, heavy=False) -> CheckResult:
    g = load_golden("values", golden_dir)
    got_c = jimm_real(CBRT2, 17).decimal(15)
    got_p = jimm_real(PI, 17).decimal(15)
    bad = []
    if got_c != g["jimm_cbrt2"]:
        bad.append(f"J(cbrt2) = {got_c}, printed {g['jimm_cbrt2']}")
    if got_p != g["jimm_pi"]:
        bad.append(f"J(pi) = {got_p}, printed {g['jimm_pi']}")
    detail = "; ".join(bad) if bad else f"J(cbrt2) = {got_c}, J(pi) = {got_p}"
    return CheckResult(3, "decimal values of J(cbrt2), J(pi)", "FAIL" if bad else "PASS", detail)


def check_4(golden_dir=None, heavy=False) -> CheckResult:
    g = load_golden("values", golden_dir)["cbrt2_count"]
    w = jimm_expansion("cbrt2", g["input_terms"])
    n = len(w.terms)
    _, _, q, _ = cf_matrix(w.terms)
    digits = decimal_digits(q)
    dens = information_density(w)
    ok = (n == g["output_terms"] and q > 10 ** g["denominator_digits_exceed"]
          and abs(dens - g["density"]) <= 0.005)
    return CheckResult(4, "counts for J(cbrt2)", "PASS" if ok else "FAIL",
                       f"{n} output terms, denominator has {digits + 1} digits, "
                       f"density {dens:.4f} bits/term")


def check_5(golden_dir=None, heavy=False) -> CheckResult:
    g = load_golden("jimm_frequencies", golden_dir)["jimm_cbrt2"]
    w = jimm_expansion("cbrt2", g["input_terms"])
    bad = _pct_rows(w, g["percent"], Fraction(1, 100))
    return CheckResult(5, "J(cbrt2) frequencies", "FAIL" if bad else "PASS",
                       f"{len(g['percent']) - len(bad)}/{len(g['percent'])} rows within 0.01"
                       + ("; " + "; ".join(bad) if bad else ""))


def check_6(golden_dir=None, heavy=False) -> CheckResult:
    g = load_golden("jimm_frequencies", golden_dir)["jimm_pi"]
    if heavy:
        w = jimm_expansion("pi", g["input_terms"])
        bad = _pct_rows(w, g["percent"], Fraction(5, 100))
        return CheckResult(6, "J(pi) frequencies (heavy, 1e5 terms)",
                           "FAIL" if bad else "PASS",
                           f"{len(g['percent']) - len(bad)}/{len(g['percent'])} rows within 0.05"
                           + ("; " + "; ".join(bad) if bad else ""))
    w = jimm_expansion("pi", 10_000)
    got = frequency_table(w).percent_str(1)
    ok = abs(Fraction(got) - Fraction(g["percent"]["1"])) <= Fraction(1, 2)
    return CheckResult(6, "J(pi) frequencies (desk, 1e4 terms)", "PASS" if ok else "FAIL",
                       f"frequency of 1 is {got} (printed {g['percent']['1']}, tolerance 0.5)")


def _ten_decimals(x: float, printed: str) -> bool:
    # printed digits may be rounded or truncated
    places = len(printed.split(".")[1])
    scale = 10 ** places
    want = Fraction(printed)
    return want in (Fraction(round(x * scale), scale), Fraction(math.floor(x * scale), scale))


def check_7(golden_dir=None, heavy=False) -> CheckResult:
    g = load_golden("run_census", golden_dir)
    bad = []
    worst = 0.0
    for row in g["rows"]:
        i = row["i"]
        for col, j, val in (("k", i, run_frequency_k(i)), ("m", i, maximal_run_m(i)),
                            ("u", i + 1, collapsed_density_u(i + 1))):
            if not _ten_decimals(val, row[col]):
                bad.append(f"{col}({j}) = {val:.12f} vs {row[col]}")
                worst = max(worst, abs(val - float(row[col])))
    s1, s2 = census_sums()
    w1, w2 = (float(v) for v in g["census_sums"])
    sums_ok = abs(s1 - w1) < 1e-9 and abs(s2 - w2) < 1e-9 and abs(s2 - gauss_kuzmin_p(1)) < 1e-9
    n = 3 * len(g["rows"])
    detail = (f"sums {s1:.11f}, {s2:.11f} ({'ok' if sums_ok else 'off'}, second = p(1)); "
              f"{n - len(bad)}/{n} table entries reproduce the printed digits")
    if bad:
        detail += f"; largest deviation {worst:.1e}; " + "; ".join(bad)
    ok = sums_ok and not bad
    return CheckResult(7, "theoretical run census", "PASS" if ok else "FAIL", detail)


def check_8(golden_dir=None, heavy=False) -> CheckResult:
    g = load_golden("collapsed_frequencies", golden_dir)["collapse_jimm_cbrt2"]
    w = collapse(jimm_expansion("cbrt2", g["input_terms"]))
    bad = _pct_rows(w, g["percent"], Fraction(1, 100))
    return CheckResult(8, "collapsed J(cbrt2) frequencies", "FAIL" if bad else "PASS",
                       f"{len(g['percent']) - len(bad)}/{len(g['percent'])} rows within 0.01"
                       + ("; " + "; ".join(bad) if bad else ""))


WORKED_1 = (CFWord(1, (1, 1, 1, 1, 13), True), (6,) + (1,) * 11)
WORKED_2 = (CFWord(6, (1,) * 11 + (2,), True), (1, 1, 1, 1, 1, 13))


def check_9(golden_dir=None, heavy=False, n_words: int = 10_000, seed: int = 2024) -> CheckResult:
    rng = random.Random(seed)
    bad = 0
    for _ in range(n_words):
        if not jimm_involution_check(random_word(rng)):
            bad += 1
    ex1 = jimm_word(WORKED_1[0]).certified.terms[:len(WORKED_1[1])] == WORKED_1[1]
    ex2 = jimm_word(WORKED_2[0]).certified.terms[:len(WORKED_2[1])] == WORKED_2[1]
    ok = bad == 0 and ex1 and ex2
    return CheckResult(9, "involutivity", "PASS" if ok else "FAIL",
                       f"{n_words - bad}/{n_words} random words; worked word 1 {'ok' if ex1 else 'wrong'}, "
                       f"worked word 2 {'ok' if ex2 else 'wrong'}")


def harmonic_pairs(n: int = 20) -> list[tuple[QuadraticSurd, QuadraticSurd]]:
    """Pairs ``(x, x/(x-1))`` with ``x = sqrt N`` or ``x = 1 + sqrt N``."""
    out = []
    N = 2
    while len(out) < n:
        if math.isqrt(N) ** 2 != N:
            x = QuadraticSurd.sqrt(N) if len(out) % 2 == 0 else 1 + QuadraticSurd.sqrt(N)
            out.append((x, x / (x - 1)))
        N += 1
    return out


def check_10(golden_dir=None, heavy=False, n: int = 1000, seed: int = 7) -> CheckResult:
    rng = random.Random(seed)
    bad = 0
    for _ in range(n):
        q = rng.randint(2, 10 ** 6)
        x = Fraction(rng.randint(1, q - 1), q)
        j = jimm_rational(x)
        if jimm_rational(1 / x) != 1 / j or jimm_rational(1 - x) != 1 - j:
            bad += 1
    pairs = harmonic_pairs(20)
    hbad = sum(not harmonic_check(x, y) for x, y in pairs)
    ok = bad == 0 and hbad == 0
    return CheckResult(10, "functional equations", "PASS" if ok else "FAIL",
                       f"{n - bad}/{n} rationals satisfy both equations; "
                       f"{len(pairs) - hbad}/{len(pairs)} harmonic surd pairs preserved")


def check_11(golden_dir=None, heavy=False, n: int = 1000, seed: int = 11) -> CheckResult:
    rng = random.Random(seed)
    bad = tested = 0
    while tested < n:
        w = random_word(rng, integer_part=0)
        if set(w.quotients) == {1}:
            continue
        lhs = gauss_conjugate(w)
        rhs = fibonacci_map(w)
        tested += 1
        if lhs is None:
            continue
        if lhs.terms != rhs.terms[:len(lhs.terms)]:
            bad += 1
    return CheckResult(11, "J o T_G o J = T_F", "PASS" if not bad else "FAIL",
                       f"{n - bad}/{n} random words agree on certified prefixes")


def check_12(golden_dir=None, heavy=False) -> CheckResult:
    out = []
    ok = True
    for label, value, digits, want in (
            ("cbrt2", lambda: mpmath.cbrt(2), 60, (-2, 0, 0, 1)),
            ("sqrt2+sqrt3", lambda: mpmath.sqrt(2) + mpmath.sqrt(3), 80, (1, 0, -10, 0, 1))):
        t = time.perf_counter()
        with mpmath.workdps(digits):
            r = minpoly_search(value(), 8, 1000, digits=digits)
        dt = time.perf_counter() - t
        good = r.polynomial == want and dt < 60
        ok &= good
        out.append(f"{label}: {r} in {dt:.2f}s")
    return CheckResult(12, "PSLQ positive controls", "PASS" if ok else "FAIL", "; ".join(out))


def jimm_cbrt2_mp(digits: int):
    return mp_from_interval(jimm_real(CBRT2, digits + 5).interval, digits)


def check_13(golden_dir=None, heavy=False) -> CheckResult:
    digits, c_max = 200, 10 ** 10
    with mpmath.workdps(digits):
        r = minpoly_search(jimm_cbrt2_mp(digits), 8, c_max, digits=digits)
    bounds = [b for _, _, b in r.profile]
    near = all(c_max <= b <= 100 * c_max for b in bounds)
    corr = profile_correlation(r.profile)
    ok = not r.found and near and corr >= 0.95
    return CheckResult(13, "PSLQ negative control", "PASS" if ok else "FAIL",
                       f"{'absent' if not r.found else str(r)}; norm bounds "
                       f"{min(bounds):.3g}..{max(bounds):.3g}; profile correlation {corr:.4f}")


LADDER = tuple(10.0 ** -k for k in range(5, 16))


def dictionary_pattern(pairs: list[tuple[str, RealSource]], digits: int = 60, c_max: int = 1000):
    with mpmath.workdps(digits):
        bases = [(label, mp_from_interval(jimm_real(src, digits + 5).interval, digits))
                 for label, src in pairs]
        entries = build_dictionary(bases, digits)
        return dictionary_relation_search(entries, LADDER, c_max, target=pairs[0][0], digits=digits)


def check_14(golden_dir=None, heavy=False) -> CheckResult:
    rungs = dictionary_pattern([("alpha", CBRT2), ("beta", RealSource.nth_root(4, 3, "cbrt4"))])
    loose = [r for r in rungs if r.tolerance >= 1e-6 * (1 - 1e-9)]
    tight = [r for r in rungs if r.tolerance <= 1e-12 * (1 + 1e-9)]
    ok = all(r.found for r in loose) and all(not r.found for r in tight)
    pattern = " ".join(f"{r.tolerance:.0e}:{'found' if r.found else 'none'}" for r in rungs)
    return CheckResult(14, "dictionary-search pattern", "PASS" if ok else "FAIL", pattern)


def check_15(golden_dir=None, heavy=False) -> CheckResult:
    jc = jimm_word(CFWord.from_terms(_expansion_terms("cbrt2", 20_000), True)).certified
    jp = jimm_word(CFWord.from_terms(_expansion_terms("pi", 10_000), True)).certified
    res = operate_and_tabulate(jc, jp, "add", label="J(pi)+J(cbrt2)")
    f1 = res.table.percent(1)
    ref = 100 * gauss_kuzmin_p(1)
    ok_sum = abs(float(f1) - ref) <= 2
    x = value_interval(CFWord.from_terms(_expansion_terms("pi", 2000), True)) - 3
    jx = value_interval(jimm_word(cf_from_interval(x)).certified)
    jy = value_interval(jimm_word(cf_from_interval(1 - x)).certified)
    deg = operate_and_tabulate(jx, jy, "add", label="J(x)+J(1-x)")
    ok_deg = deg.constant == 1
    return CheckResult(15, "sums and products of J-images", "PASS" if ok_sum and ok_deg else "FAIL",
                       f"1-frequency of J(pi)+J(cbrt2) is {res.table.percent_str(1)} over "
                       f"{res.table.total} quotients (Gauss-Kuzmin {ref:.3f}); "
                       f"J(x)+J(1-x) collapses to {deg.constant}")


def check_gamma(golden_dir=None, heavy=False) -> CheckResult:
    """Optional: operations with J(gamma) need a digit file named gamma.txt."""
    src = RealSource.digits(name="gamma", path="gamma.txt", label="gamma")
    try:
        w = expand(src, 2000)
    except (OSError, PrecisionError, ValueError) as exc:
        return CheckResult(16, "J(gamma) operations", "SKIP", f"no usable gamma digits ({exc})")
    jg = jimm_word(w).certified
    jc = jimm_word(CFWord.from_terms(_expansion_terms("cbrt2", 2000), True)).certified
    res = operate_and_tabulate(jg, jc, "add", label="J(gamma)+J(cbrt2)")
    f1 = float(res.table.percent(1))
    ok = abs(f1 - 100 * gauss_kuzmin_p(1)) <= 3
    return CheckResult(16, "J(gamma) operations", "PASS" if ok else "FAIL",
                       f"1-frequency of J(gamma)+J(cbrt2) is {res.table.percent_str(1)}")


CHECKS: dict[int, Callable[..., CheckResult]] = {
    1: check_1, 2: check_2, 3: check_3, 4: check_4, 5: check_5, 6: check_6, 7: check_7,
    8: check_8, 9: check_9, 10: check_10, 11: check_11, 12: check_12, 13: check_13,
    14: check_14, 15: check_15, 16: check_gamma,
}


def run_suite(golden_dir=None, heavy: bool = False, only=None) -> list[CheckResult]:
    out = []
    for n, fn in CHECKS.items():
        if only and n not in only:
            continue
        try:
            out.append(fn(golden_dir=golden_dir, heavy=heavy))
        except (OSError, KeyError, ValueError) as exc:
            out.append(CheckResult(n, fn.__name__, "FAIL", f"{type(exc).__name__}: {exc}"))
    return out


def format_report(results: list[CheckResult]) -> str:
    lines = [r.line() for r in results]
    n_pass = sum(r.status == "PASS" for r in results)
    n_fail = sum(r.status == "FAIL" for r in results)
    n_skip = sum(r.status == "SKIP" for r in results)
    lines.append(f"{n_pass} passed, {n_fail} failed, {n_skip} skipped")
    return "\n".join(lines) + "\n"
