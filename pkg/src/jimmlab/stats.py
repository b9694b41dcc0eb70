"""Partial-quotient statistics.

Empirical tables work on the quotients of a word (the integer part is left
out).  Percentages are truncated, not rounded, to three decimals.
"""

from __future__ import annotations

import csv
import io
import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping

from .cf import CFWord, PrecisionInterval, cf_from_interval, cf_matrix, value_interval
from .errors import PrecisionError

__all__ = [
    "FrequencyTable",
    "RunCensus",
    "OperationResult",
    "frequency_table",
    "collapse",
    "gauss_kuzmin_p",
    "gauss_kuzmin_entropy",
    "run_frequency_k",
    "maximal_run_m",
    "collapsed_density_u",
    "census_sums",
    "theoretical_table",
    "empirical_run_census",
    "information_density",
    "decimal_digits",
    "mean_partial_quotient",
    "small_rational_in",
    "operate_and_tabulate",
    "frequency_csv",
    "CENSUS_CUTOFF",
]

# Infinite sums over i stop here; the tail is below 1e-20 (F_62^2 ~ 1e25).
CENSUS_CUTOFF = 60


@dataclass(frozen=True)
class FrequencyTable:
    counts: Mapping[int, int]
    total: int

    def __post_init__(self):
        if sum(self.counts.values()) != self.total:
            raise ValueError("counts do not add up to total")

    def percent(self, k: int) -> Fraction:
        if not self.total:
            return Fraction(0)
        return Fraction(100 * self.counts.get(k, 0), self.total)

    def percent_str(self, k: int, places: int = 3) -> str:
        """Percentage of ``k`` truncated to ``places`` decimals."""
        scale = 10 ** places
        v = math.floor(self.percent(k) * scale)
        return f"{v // scale}.{v % scale:0{places}d}"

    def quotients(self) -> list[int]:
        return sorted(self.counts)

    def to_json(self, max_quotient: int | None = None) -> dict:
        ks = [k for k in self.quotients() if max_quotient is None or k <= max_quotient]
        return {"total": self.total,
                "counts": {str(k): self.counts[k] for k in ks},
                "percent": {str(k): self.percent_str(k) for k in ks}}


def frequency_table(w: CFWord | Iterable[int]) -> FrequencyTable:
    q = w.quotients if isinstance(w, CFWord) else list(w)
    c = Counter(q)
    return FrequencyTable(dict(sorted(c.items())), len(q))


def collapse(w: CFWord) -> CFWord:
    """Decrement every quotient and drop the zeros."""
    return CFWord(w.integer_part, tuple(v - 1 for v in w.quotients if v > 1), w.truncated)


# -- theoretical values ---------------------------------------------------------

_LN2 = math.log(2)


def gauss_kuzmin_p(k: int) -> float:
    if k < 1:
        raise ValueError("k must be >= 1")
    return math.log1p(1 / (k * (k + 2))) / _LN2


@lru_cache(maxsize=1)
def gauss_kuzmin_entropy(cutoff: int = 100_000) -> float:
    """``-sum p(k) log2 p(k)`` (about 3.432 bits); the tail uses p(k) ~ 1/(k^2 ln 2)."""
    s = 0.0
    for k in range(cutoff, 0, -1):
        p = gauss_kuzmin_p(k)
        s -= p * math.log2(p)
    c = _LN2
    s += (math.log(c) + 2 * math.log(cutoff) + 2) / (cutoff * c * c)
    return s


@lru_cache(maxsize=None)
def _fib(n: int) -> int:
    a, b = 0, 1
    for _ in range(n):
        a, b = b, a + b
    return a


def run_frequency_k(i: int) -> float:
    """Frequency of the string ``1_i`` (with ``k(0) = 1``)."""
    if i < 0:
        raise ValueError("i must be >= 0")
    s = -1 if i % 2 else 1
    return s * math.log1p(s / _fib(i + 2) ** 2) / _LN2


def maximal_run_m(i: int) -> float:
    return run_frequency_k(i) - 2 * run_frequency_k(i + 1) + run_frequency_k(i + 2)


def census_sums() -> tuple[float, float]:
    """``(sum m(i), sum i*m(i))``; the second equals ``p(1)``."""
    ms = [maximal_run_m(i) for i in range(CENSUS_CUTOFF + 1)]
    return math.fsum(ms), math.fsum(i * m for i, m in enumerate(ms))


def collapsed_density_u(i: int) -> float:
    """Frequency of ``i`` in the collapsed image: ``m(i-1) / sum m``."""
    if i < 1:
        raise ValueError("i must be >= 1")
    return maximal_run_m(i - 1) / census_sums()[0]


def theoretical_table(rows: int = 11) -> list[dict]:
    """Rows ``i = 0..rows-1`` of ``k(i), m(i), u(i+1), p(i)``."""
    out = []
    for i in range(rows):
        out.append({"i": i, "k": run_frequency_k(i), "m": maximal_run_m(i),
                    "u": collapsed_density_u(i + 1),
                    "p": gauss_kuzmin_p(i) if i >= 1 else None})
    return out


# -- empirical run census -------------------------------------------------------

@dataclass(frozen=True)
class RunCensus:
    """Substring (``k``) and maximal-run (``m``) censuses of the string ``1_i``.

    ``m[0]`` counts adjacent pairs of quotients that are both above 1.  For
    empirical censuses the raw counts are kept alongside frequencies
    normalised by the quotient count.
    """

    k: Mapping[int, float]
    m: Mapping[int, float]
    source: str
    k_counts: Mapping[int, int] = field(default_factory=dict)
    m_counts: Mapping[int, int] = field(default_factory=dict)
    total: int = 0


def empirical_run_census(w: CFWord) -> RunCensus:
    """Census of the runs of ones among the quotients of ``w``.

    A leading run is counted; a trailing run of a truncated word is not,
    since the word may continue with more ones.
    """
    q = w.quotients
    n = len(q)
    runs: Counter = Counter()
    run = 0
    prev_big = False
    for v in q:
        if v == 1:
            run += 1
            continue
        if run:
            runs[run] += 1
        elif prev_big:
            runs[0] += 1
        run = 0
        prev_big = True
    if run and not w.truncated:
        runs[run] += 1
    top = max(runs, default=0)
    k_counts = {}
    for i in range(top + 1):
        k_counts[i] = sum((j - i + 1) * c for j, c in runs.items() if j >= i)
    m_counts = {i: runs.get(i, 0) for i in range(top + 1)}
    norm = n or 1
    return RunCensus({i: c / norm for i, c in k_counts.items()},
                     {i: c / norm for i, c in m_counts.items()},
                     "empirical", k_counts, m_counts, n)


# -- information density and averages -------------------------------------------

def decimal_digits(q: int) -> int:
    """``floor(log10 q)`` for ``q >= 1``, without converting to a string."""
    if q < 1:
        raise ValueError("q must be positive")
    k = int((q.bit_length() - 1) * math.log10(2))
    while 10 ** (k + 1) <= q:
        k += 1
    while 10 ** k > q:
        k -= 1
    return k


def information_density(w: CFWord) -> float:
    """Bits per term: ``ln 10 * digits / (ln 2 * len(terms))``.

    ``digits`` is ``floor(log10 q)`` for the final convergent denominator,
    which is what the prefix pins down; every flat term (integer part
    included) counts.
    """
    _, _, q, _ = cf_matrix(w.terms)
    return math.log(10) * decimal_digits(q) / (_LN2 * len(w.terms))


def mean_partial_quotient(w: CFWord, prefix: int) -> float:
    if not 1 <= prefix <= len(w.quotients):
        raise ValueError(f"prefix {prefix} outside 1..{len(w.quotients)}")
    return sum(w.quotients[:prefix]) / prefix


# -- algebraic operations -------------------------------------------------------

def small_rational_in(iv: PrecisionInterval, max_den: int) -> Fraction | None:
    """The simplest rational in ``iv`` if its denominator is at most ``max_den``."""
    a, b = iv.lo.numerator, iv.lo.denominator
    c, d = iv.hi.numerator, iv.hi.denominator
    terms: list[int] = []
    p0, p1, q0, q1 = 1, 0, 0, 1
    while True:
        t, r = divmod(a, b)
        if r == 0:
            terms.append(t)
        elif t < c // d:
            terms.append(t + 1)
        else:
            terms.append(t)
            p0, p1, q0, q1 = t * p0 + p1, p0, t * q0 + q1, q0
            if q0 > max_den:
                return None
            # x -> 1/(x - t) swaps the endpoints
            a, b, c, d = d, c - t * d, b, r
            continue
        t = terms[-1]
        p, q = t * p0 + p1, t * q0 + q1
        return Fraction(p, q) if q <= max_den else None


@dataclass(frozen=True)
class OperationResult:
    label: str
    interval: PrecisionInterval
    table: FrequencyTable
    word: CFWord | None = None
    constant: Fraction | None = None

    @property
    def degenerate(self) -> bool:
        return self.constant is not None


def operate_and_tabulate(a: PrecisionInterval | CFWord, b: PrecisionInterval | CFWord | None, op: str,
                         q: Fraction | int | None = None, label: str = "") -> OperationResult:
    """Apply ``op`` (``add``, ``mul`` or ``qmul``) to certified enclosures and
    tabulate the quotients of the certified result.

    A result that sits on a rational with a tiny denominator (relative to
    the enclosure width) is reported as that constant with an empty table.
    Operands may also be certified words; multiplying a word by 1 returns
    it untouched.
    """
    if op == "qmul" and q is not None and Fraction(q) == 1 and isinstance(a, CFWord):
        return OperationResult(label, value_interval(a), frequency_table(a), a)
    if isinstance(a, CFWord):
        a = value_interval(a)
    if isinstance(b, CFWord):
        b = value_interval(b)
    if op == "add":
        iv = a + b
    elif op == "mul":
        iv = a * b
    elif op == "qmul":
        if q is None:
            raise ValueError("qmul needs the rational factor q")
        iv = a * Fraction(q)
    else:
        raise ValueError(f"unknown operation {op!r}")
    if iv.is_exact:
        const = iv.lo
        return OperationResult(label, iv, FrequencyTable({}, 0), None, const)
    width = iv.width
    # a generic enclosure only holds rationals with denominator about width**-1/2
    bits = width.denominator.bit_length() - width.numerator.bit_length()
    bound = 1 << max(0, bits // 4)
    const = small_rational_in(iv, bound)
    if const is not None:
        return OperationResult(label, iv, FrequencyTable({}, 0), None, const)
    try:
        word = cf_from_interval(iv)
    except ValueError as exc:
        raise PrecisionError(f"{label or op}: {exc}; supply more digits") from exc
    if len(word.quotients) < 10:
        raise PrecisionError(f"{label or op}: only {len(word.quotients)} certified quotients; "
                             "supply more digits")
    return OperationResult(label, iv, frequency_table(word), word)


def frequency_csv(tables: Mapping[str, FrequencyTable], max_quotient: int = 20,
                  delimiter: str = ",") -> str:
    """CSV with header ``quotient,percent,series`` for external plotting."""
    buf = io.StringIO()
    wr = csv.writer(buf, delimiter=delimiter, lineterminator="\n")
    wr.writerow(["quotient", "percent", "series"])
    for label, t in tables.items():
        for k in range(1, max_quotient + 1):
            wr.writerow([k, t.percent_str(k), label])
    return buf.getvalue()
