"""Real quadratic surds ``(p + q*sqrt(d)) / r`` and their periodic expansions."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from sympy import factorint

from .cf import CFWord, PrecisionInterval, cf_matrix

__all__ = [
    "QuadraticSurd",
    "PeriodicCF",
    "squarefree_decompose",
    "surd_to_periodic_cf",
    "periodic_cf_to_surd",
    "surd_norm",
]


def squarefree_decompose(n: int) -> tuple[int, int]:
    """Return ``(s, f)`` with ``n == s*s*f`` and ``f`` squarefree (``n > 0``)."""
    if n <= 0:
        raise ValueError("squarefree_decompose needs a positive integer")
    s, f = 1, 1
    for p, e in factorint(n).items():
        p, e = int(p), int(e)  # sympy may hand back gmpy2 integers
        s *= p ** (e // 2)
        if e % 2:
            f *= p
    return s, f


@dataclass(frozen=True)
class QuadraticSurd:
    """``(p + q*sqrt(d)) / r`` with ``d > 1`` squarefree, ``q != 0``, ``r > 0``
    and ``gcd(p, q, r) == 1``.  Any input is brought to that canonical form."""

    p: int
    q: int
    d: int
    r: int = 1

    def __post_init__(self):
        p, q, d, r = int(self.p), int(self.q), int(self.d), int(self.r)
        if q == 0:
            raise ValueError("q must be nonzero; the value would be rational")
        if d <= 0 or r == 0:
            raise ValueError(f"invalid surd parameters d={d}, r={r}")
        s, d = squarefree_decompose(d)
        if d == 1:
            raise ValueError("d is a perfect square; the value is rational")
        q *= s
        if r < 0:
            p, q, r = -p, -q, -r
        g = math.gcd(math.gcd(p, q), r)
        object.__setattr__(self, "p", p // g)
        object.__setattr__(self, "q", q // g)
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "r", r // g)

    @classmethod
    def sqrt(cls, n) -> "QuadraticSurd":
        n = Fraction(n)
        # sqrt(a/b) = sqrt(a*b)/b
        return cls(0, 1, n.numerator * n.denominator, n.denominator)

    @classmethod
    def from_parts(cls, a, b, d: int) -> Union["QuadraticSurd", Fraction]:
        """``a + b*sqrt(d)``; collapses to a Fraction when ``b == 0``."""
        a, b = Fraction(a), Fraction(b)
        if b == 0:
            return a
        r = a.denominator * b.denominator // math.gcd(a.denominator, b.denominator)
        return cls(int(a * r), int(b * r), d, r)

    @classmethod
    def parse(cls, text: str) -> "QuadraticSurd":
        """Parse ``"(p + q√d)/r"``-style strings; ``sqrt(d)`` is accepted too."""
        t = text.replace(" ", "").replace("sqrt", "√").replace("*", "")
        m = re.fullmatch(r"\(?([+-]?\d+)?([+-]?\d*)√\(?(\d+)\)?\)?(?:/(\d+))?", t)
        if not m:
            raise ValueError(f"cannot parse surd {text!r}")
        p = int(m.group(1) or 0)
        qs = m.group(2)
        q = -1 if qs == "-" else 1 if qs in ("", "+") else int(qs)
        return cls(p, q, int(m.group(3)), int(m.group(4) or 1))

    @property
    def parts(self) -> tuple[Fraction, Fraction]:
        """``(a, b)`` with value ``a + b*sqrt(d)``."""
        return Fraction(self.p, self.r), Fraction(self.q, self.r)

    def conjugate(self) -> "QuadraticSurd":
        return QuadraticSurd(self.p, -self.q, self.d, self.r)

    def norm(self) -> Fraction:
        a, b = self.parts
        return a * a - b * b * self.d

    def trace(self) -> Fraction:
        return Fraction(2 * self.p, self.r)

    def sign(self) -> int:
        # sign of p + q*sqrt(d)
        p, q = self.p, self.q
        if p >= 0 and q > 0:
            return 1
        if p <= 0 and q < 0:
            return -1
        lhs, rhs = p * p, q * q * self.d
        return (1 if p > 0 else -1) if lhs > rhs else (1 if q > 0 else -1)

    def floor(self) -> int:
        s = math.isqrt(self.q * self.q * self.d)
        if self.q > 0:
            return (self.p + s) // self.r
        return (self.p - s - 1) // self.r

    def interval(self, digits: int) -> PrecisionInterval:
        """Rational enclosure of width at most ``2 * 10**-digits``."""
        scale = 10 ** (digits + 1)
        s = math.isqrt(self.q * self.q * self.d * scale * scale)
        sign = 1 if self.q > 0 else -1
        a = Fraction(self.p * scale + sign * s, self.r * scale)
        b = Fraction(self.p * scale + sign * (s + 1), self.r * scale)
        return PrecisionInterval(min(a, b), max(a, b))

    def __float__(self) -> float:
        return (self.p + self.q * math.sqrt(self.d)) / self.r

    def _coerce(self, other):
        if isinstance(other, QuadraticSurd):
            if other.d != self.d:
                raise ValueError(f"surds over different fields: sqrt({self.d}) vs sqrt({other.d})")
            return other.parts
        if isinstance(other, (int, Fraction)):
            return Fraction(other), Fraction(0)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        a, b = self.parts
        return QuadraticSurd.from_parts(a + o[0], b + o[1], self.d)

    __radd__ = __add__

    def __neg__(self):
        return QuadraticSurd(-self.p, -self.q, self.d, self.r)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        a, b = self.parts
        return QuadraticSurd.from_parts(a - o[0], b - o[1], self.d)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        a, b = self.parts
        c, e = o
        return QuadraticSurd.from_parts(a * c + b * e * self.d, a * e + b * c, self.d)

    __rmul__ = __mul__

    def reciprocal(self):
        # 1/(a + b√d) = (a - b√d) / (a² - b²d)
        n = self.norm()
        a, b = self.parts
        return QuadraticSurd.from_parts(a / n, -b / n, self.d)

    def __truediv__(self, other):
        if isinstance(other, QuadraticSurd):
            return self * other.reciprocal()
        o = Fraction(other)
        return self * (1 / o)

    def __rtruediv__(self, other):
        return self.reciprocal() * Fraction(other)

    def __lt__(self, other):
        return _sign(self - other) < 0

    def __gt__(self, other):
        return _sign(self - other) > 0

    def to_json(self) -> dict:
        return {"p": self.p, "q": self.q, "d": self.d, "r": self.r}

    @classmethod
    def from_json(cls, obj: dict) -> "QuadraticSurd":
        return cls(obj["p"], obj["q"], obj["d"], obj.get("r", 1))

    def __str__(self) -> str:
        q = "" if abs(self.q) == 1 else str(abs(self.q))
        op = "+" if self.q > 0 else "-"
        if self.p:
            num = f"{self.p} {op} {q}√{self.d}"
        else:
            num = f"{'-' if self.q < 0 else ''}{q}√{self.d}"
        return f"({num})/{self.r}" if self.r != 1 else f"{num}"


def _sign(x) -> int:
    if isinstance(x, QuadraticSurd):
        return x.sign()
    return (x > 0) - (x < 0)


def surd_norm(s: QuadraticSurd) -> Fraction:
    """``a**2 - b`` for ``s = a + sqrt(b)``, i.e. ``(p/r)**2 - q**2*d/r**2``."""
    return s.norm()


@dataclass(frozen=True)
class PeriodicCF:
    """Eventually periodic expansion ``[preperiod..., (period...)^inf]``.

    ``preperiod`` lists flat terms (integer part first); when it is empty the
    period starts at the integer part.  The stored form is minimal: the period
    is primitive and cannot be rotated into the preperiod.
    """

    preperiod: tuple[int, ...]
    period: tuple[int, ...]

    def __post_init__(self):
        pre, per = tuple(map(int, self.preperiod)), tuple(map(int, self.period))
        if not per:
            raise ValueError("period must be nonempty")
        if any(v < 1 for v in per) or any(v < 1 for v in pre[1:]):
            raise ValueError("partial quotients must be >= 1")
        n = len(per)
        for t in range(1, n + 1):
            if n % t == 0 and per[:t] * (n // t) == per:
                per = per[:t]
                break
        while pre and pre[-1] == per[-1]:
            per = (pre[-1],) + per[:-1]
            pre = pre[:-1]
        object.__setattr__(self, "preperiod", pre)
        object.__setattr__(self, "period", per)

    def terms(self, n: int) -> list[int]:
        """First ``n`` flat terms of the expansion."""
        out = list(self.preperiod[:n])
        while len(out) < n:
            k = len(out) - len(self.preperiod)
            out.append(self.period[k % len(self.period)])
        return out

    def word(self, n_quotients: int) -> CFWord:
        return CFWord.from_terms(self.terms(n_quotients + 1), truncated=True)

    def to_json(self) -> dict:
        pre = self.preperiod
        head = {"integer_part": pre[0], "quotients": list(pre[1:]), "truncated": True} if pre else None
        return {"preperiod": head, "period": list(self.period)}

    @classmethod
    def from_json(cls, obj: dict) -> "PeriodicCF":
        head = obj.get("preperiod")
        pre = () if not head else (head["integer_part"], *head.get("quotients", ()))
        return cls(tuple(pre), tuple(obj["period"]))

    def __str__(self) -> str:
        pre = ", ".join(map(str, self.preperiod))
        per = ", ".join(map(str, self.period))
        return f"[{pre}{'; ' if pre else ''}({per})]"


def surd_to_periodic_cf(s: QuadraticSurd) -> PeriodicCF:
    """Classical ``(P + sqrt(D)) / Q`` recursion, stopped at the first repeated state."""
    D = s.q * s.q * s.d
    P, Q = s.p, s.r
    if s.q < 0:
        P, Q = -P, -Q
    if (D - P * P) % Q:
        P, D, Q = P * abs(Q), D * Q * Q, Q * abs(Q)
    root = math.isqrt(D)
    if root * root == D:
        raise ValueError("perfect-square discriminant: the value is rational")
    seen: dict[tuple[int, int], int] = {}
    terms: list[int] = []
    while (P, Q) not in seen:
        seen[P, Q] = len(terms)
        if Q > 0:
            a = (P + root) // Q
        else:
            a = (-P - root - 1) // -Q
        terms.append(a)
        P = a * Q - P
        Q = (D - P * P) // Q
    start = seen[P, Q]
    return PeriodicCF(tuple(terms[:start]), tuple(terms[start:]))


def periodic_cf_to_surd(pc: PeriodicCF) -> QuadraticSurd:
    """Fixed point of the period's Moebius map, pushed through the preperiod."""
    A, B, C, Dm = cf_matrix(pc.period)
    # y solves C y^2 + (Dm - A) y - B = 0; the primitive form keeps the
    # discriminant small enough to factor
    g = math.gcd(math.gcd(C, Dm - A), B)
    a, b, c = C // g, (Dm - A) // g, -B // g
    disc = b * b - 4 * a * c
    r = math.isqrt(disc)
    if r * r == disc:
        raise ValueError(f"degenerate period matrix for {pc}: rational fixed point")
    y = QuadraticSurd(-b, 1, disc, 2 * a)  # the root > 1
    h00, h01, h10, h11 = cf_matrix(pc.preperiod)
    return (h00 * y + h01) / (h10 * y + h11)
