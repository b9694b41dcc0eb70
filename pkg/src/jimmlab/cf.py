"""Exact continued-fraction arithmetic.

Rationals are :class:`fractions.Fraction` throughout.  A :class:`CFWord` holds
the integer part and the positive partial quotients of a (possibly truncated)
simple continued fraction; a :class:`PrecisionInterval` brackets a real number
between two rationals and is the only route from real numbers to words.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import groupby
from typing import Iterable, Sequence

__all__ = [
    "CFWord",
    "PrecisionInterval",
    "cf_from_rational",
    "rational_from_cf",
    "convergents",
    "cf_matrix",
    "cf_from_interval",
    "value_interval",
    "gauss_map",
    "fibonacci_map",
]


@dataclass(frozen=True)
class CFWord:
    """``[integer_part; q1, q2, ...]``.

    ``truncated=True`` marks a certified prefix of a longer (usually infinite)
    expansion.  A finite word with ``truncated=False`` denotes the rational
    it folds to.
    """

    integer_part: int
    quotients: tuple[int, ...] = ()
    truncated: bool = False

    def __post_init__(self):
        q = tuple(int(v) for v in self.quotients)
        if any(v < 1 for v in q):
            raise ValueError(f"partial quotients must be >= 1, got {q[:10]}...")
        object.__setattr__(self, "quotients", q)
        object.__setattr__(self, "integer_part", int(self.integer_part))

    @classmethod
    def from_terms(cls, terms: Sequence[int], truncated: bool = False) -> "CFWord":
        if not terms:
            raise ValueError("a word needs at least its integer part")
        return cls(terms[0], tuple(terms[1:]), truncated)

    @classmethod
    def from_runs(cls, integer_part: int, runs: Iterable[tuple[int, int]],
                  truncated: bool = False) -> "CFWord":
        q: list[int] = []
        for value, count in runs:
            q.extend([value] * count)
        return cls(integer_part, tuple(q), truncated)

    @property
    def terms(self) -> tuple[int, ...]:
        return (self.integer_part,) + self.quotients

    def runs(self) -> list[tuple[int, int]]:
        """Run-length view of the quotients: ``[(value, multiplicity), ...]``."""
        return [(v, len(list(g))) for v, g in groupby(self.quotients)]

    def __len__(self) -> int:
        return len(self.quotients)

    @property
    def is_canonical(self) -> bool:
        return self.truncated or not self.quotients or self.quotients[-1] >= 2

    def alternate(self) -> "CFWord":
        """The other representation of the same rational (toggles a trailing 1)."""
        if self.truncated:
            raise ValueError("only exact words have an alternate form")
        q = self.quotients
        if q and q[-1] == 1:
            if len(q) == 1:
                return CFWord(self.integer_part + 1)
            return CFWord(self.integer_part, q[:-2] + (q[-2] + 1,))
        if not q:
            return CFWord(self.integer_part - 1, (1,))
        return CFWord(self.integer_part, q[:-1] + (q[-1] - 1, 1))

    def canonical(self) -> "CFWord":
        return self if self.is_canonical else self.alternate()

    def prefix(self, n: int) -> "CFWord":
        """First ``n`` quotients, flagged truncated."""
        return CFWord(self.integer_part, self.quotients[:n], True)

    def to_json(self) -> dict:
        return {"integer_part": self.integer_part, "quotients": list(self.quotients),
                "truncated": self.truncated}

    @classmethod
    def from_json(cls, obj: dict) -> "CFWord":
        return cls(obj["integer_part"], tuple(obj.get("quotients", ())),
                   bool(obj.get("truncated", False)))

    def __str__(self) -> str:
        body = ", ".join(map(str, self.quotients[:40]))
        more = ", ..." if self.truncated or len(self.quotients) > 40 else ""
        return f"[{self.integer_part}; {body}{more}]"


@dataclass(frozen=True)
class PrecisionInterval:
    """Closed interval ``[lo, hi]`` with rational endpoints."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        lo, hi = Fraction(self.lo), Fraction(self.hi)
        if lo > hi:
            raise ValueError(f"empty interval [{lo}, {hi}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def exact(cls, x) -> "PrecisionInterval":
        return cls(Fraction(x), Fraction(x))

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    @property
    def is_exact(self) -> bool:
        return self.lo == self.hi

    def contains(self, x) -> bool:
        return self.lo <= x <= self.hi

    def correct_digits(self) -> int:
        """Decimal digits after the point fixed by the interval width."""
        if self.is_exact:
            return math.inf  # type: ignore[return-value]
        w = self.width
        return max(0, ((w.denominator // w.numerator).bit_length() - 1) * 30102 // 100000)

    def __neg__(self):
        return PrecisionInterval(-self.hi, -self.lo)

    def __add__(self, other):
        if isinstance(other, PrecisionInterval):
            return PrecisionInterval(self.lo + other.lo, self.hi + other.hi)
        other = Fraction(other)
        return PrecisionInterval(self.lo + other, self.hi + other)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, PrecisionInterval):
            other = PrecisionInterval.exact(other)
        c = (self.lo * other.lo, self.lo * other.hi, self.hi * other.lo, self.hi * other.hi)
        return PrecisionInterval(min(c), max(c))

    __rmul__ = __mul__

    def reciprocal(self) -> "PrecisionInterval":
        if self.lo <= 0 <= self.hi:
            raise ZeroDivisionError("interval contains zero")
        return PrecisionInterval(1 / self.hi, 1 / self.lo)

    def __truediv__(self, other):
        if not isinstance(other, PrecisionInterval):
            other = PrecisionInterval.exact(other)
        return self * other.reciprocal()

    def __rtruediv__(self, other):
        return PrecisionInterval.exact(other) * self.reciprocal()

    def __str__(self) -> str:
        return f"[{float(self.lo)!r}, {float(self.hi)!r}] (width {float(self.width):.3g})"


def cf_from_rational(x, alternate: bool = False) -> CFWord:
    """Floor-based Euclidean expansion; canonical (last quotient >= 2) unless
    ``alternate`` asks for the 1-terminated twin."""
    x = Fraction(x)
    p, q = x.numerator, x.denominator
    terms = []
    while q:
        a, r = divmod(p, q)
        terms.append(a)
        p, q = q, r
    w = CFWord.from_terms(terms)
    return w.alternate() if alternate else w


def _mat_product(terms: Sequence[int], lo: int, hi: int) -> tuple[int, int, int, int]:
    # product of [[a,1],[1,0]] over terms[lo:hi], as (m00, m01, m10, m11)
    if hi - lo <= 32:
        a, b, c, d = 1, 0, 0, 1
        for t in terms[lo:hi]:
            a, b, c, d = a * t + b, a, c * t + d, c
        return a, b, c, d
    mid = (lo + hi) // 2
    a, b, c, d = _mat_product(terms, lo, mid)
    e, f, g, h = _mat_product(terms, mid, hi)
    return a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h


def cf_matrix(terms: Sequence[int]) -> tuple[int, int, int, int]:
    """``[[p_n, p_{n-1}], [q_n, q_{n-1}]]`` flattened, via a product tree."""
    return _mat_product(terms, 0, len(terms))


def rational_from_cf(w: CFWord) -> Fraction:
    if w.truncated:
        raise ValueError("a truncated word has no exact value; use value_interval")
    p, _, q, _ = cf_matrix(w.terms)
    return Fraction(p, q)


def convergents(w: CFWord, k: int | None = None) -> list[Fraction]:
    """The first ``k`` convergents (``k`` defaults to all ``len(w) + 1`` of them)."""
    terms = w.terms
    if k is None:
        k = len(terms)
    if k > len(terms):
        raise ValueError(f"asked for {k} convergents of a word with {len(terms)} terms")
    out = []
    p0, p1, q0, q1 = 1, 0, 0, 1
    for t in terms[:k]:
        p0, p1 = t * p0 + p1, p0
        q0, q1 = t * q0 + q1, q0
        out.append(Fraction(p0, q0))
    return out


def value_interval(w: CFWord) -> PrecisionInterval:
    """Interval containing every real whose expansion extends ``w``."""
    p, pp, q, qq = cf_matrix(w.terms)
    if not w.truncated:
        return PrecisionInterval.exact(Fraction(p, q))
    a, b = Fraction(p, q), Fraction(p + pp, q + qq)
    return PrecisionInterval(min(a, b), max(a, b))


def cf_from_interval(iv: PrecisionInterval, max_terms: int | None = None) -> CFWord:
    """Longest prefix shared by the expansions of every real in ``iv``.

    Both endpoints are expanded in lock step; a quotient is emitted only when
    the two floors agree, so every emitted quotient is certified.
    """
    if iv.is_exact:
        return cf_from_rational(iv.lo)
    a, b = iv.lo.numerator, iv.lo.denominator
    c, d = iv.hi.numerator, iv.hi.denominator
    terms: list[int] = []
    limit = math.inf if max_terms is None else max_terms + 1
    while b and d and len(terms) < limit:
        t, r = divmod(a, b)
        if t != c // d:
            break
        terms.append(t)
        a, b, c, d = b, r, d, c - t * d
    if not terms:
        raise ValueError(f"interval {iv} straddles an integer; no quotient is certified")
    return CFWord(terms[0], tuple(terms[1:]), True)


def gauss_map(w: CFWord) -> CFWord:
    """Forget the first partial quotient of ``[0; n1, n2, ...]``."""
    if w.integer_part != 0:
        raise ValueError("the Gauss map acts on [0; ...] words")
    if not w.quotients:
        raise ValueError("the Gauss map needs at least one quotient")
    return CFWord(0, w.quotients[1:], w.truncated)


def fibonacci_map(w: CFWord) -> CFWord:
    """``[0; 1_k, n, ...] -> [0; n - 1, ...]`` for the first quotient ``n > 1``."""
    if w.integer_part != 0:
        raise ValueError("the Fibonacci map acts on [0; ...] words")
    q = w.quotients
    k = 0
    while k < len(q) and q[k] == 1:
        k += 1
    if k == len(q):
        raise ValueError("word is a run of ones; the Fibonacci map needs some quotient > 1")
    return CFWord(0, (q[k] - 1,) + q[k + 1:], w.truncated)
