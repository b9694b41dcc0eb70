"""Certified enclosures of real inputs: rationals, surds, algebraic roots, digit files, pi."""

from __future__ import annotations

import math
import os
import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from .cf import CFWord, PrecisionInterval, cf_from_interval, cf_from_rational
from .errors import BudgetExceeded, PrecisionError
from .surd import QuadraticSurd

__all__ = [
    "RealSource",
    "refine_root",
    "load_digits",
    "parse_digits",
    "pi_interval",
    "expand",
    "sturm_count",
]

LEVY_DIGITS_PER_TERM = math.pi ** 2 / (12 * math.log(2) * math.log(10))


@dataclass(frozen=True)
class RealSource:
    """Where a real number comes from.

    ``kind`` is one of ``rational``, ``surd``, ``algebraic-root``,
    ``digit-stream``.  Algebraic roots carry ``coefficients`` in ascending
    order of powers and an isolating ``bounds`` pair.  A digit stream names a
    ``path``; the special name ``pi`` is computed internally when no file is
    found.
    """

    kind: str
    label: str = ""
    value: Fraction | None = None
    surd: QuadraticSurd | None = None
    coefficients: tuple[int, ...] = ()
    bounds: tuple[Fraction, Fraction] | None = None
    path: str | None = None
    name: str | None = None
    text: str | None = field(default=None, repr=False)

    @classmethod
    def rational(cls, x, label: str = "") -> "RealSource":
        x = Fraction(x)
        return cls("rational", label or str(x), value=x)

    @classmethod
    def of_surd(cls, s: QuadraticSurd, label: str = "") -> "RealSource":
        return cls("surd", label or str(s), surd=s)

    @classmethod
    def algebraic(cls, coefficients: Sequence[int], lo, hi, label: str = "") -> "RealSource":
        src = cls("algebraic-root", label or f"root{tuple(coefficients)}",
                  coefficients=tuple(int(c) for c in coefficients),
                  bounds=(Fraction(lo), Fraction(hi)))
        n = sturm_count(src.coefficients, *src.bounds)
        if n != 1:
            raise ValueError(f"interval [{lo}, {hi}] isolates {n} roots, expected 1")
        return src

    @classmethod
    def nth_root(cls, a, n: int, label: str = "") -> "RealSource":
        """Positive real root of ``x**n = a`` for rational ``a > 0``."""
        a = Fraction(a)
        coeffs = [-a.numerator] + [0] * (n - 1) + [a.denominator]
        hi = max(Fraction(1), a) + 1
        return cls.algebraic(coeffs, 0, hi, label or f"{a}^(1/{n})")

    @classmethod
    def digits(cls, path: str | os.PathLike | None = None, text: str | None = None,
               name: str | None = None, label: str = "") -> "RealSource":
        return cls("digit-stream", label or name or str(path),
                   path=None if path is None else str(path), text=text, name=name)

    @classmethod
    def pi(cls) -> "RealSource":
        return cls.digits(name="pi", label="pi")

    @property
    def refinable(self) -> bool:
        """Can more precision be produced on demand (i.e. not a fixed digit file)?"""
        if self.kind != "digit-stream":
            return True
        return self.text is None and self.name == "pi" and _resolve_digit_path(self) is None

    def interval(self, digits: int, budget: int = 10_000) -> PrecisionInterval:
        """Enclosure of width below ``10**-digits`` (digit streams give what they hold)."""
        if self.kind == "rational":
            return PrecisionInterval.exact(self.value)
        if self.kind == "surd":
            return self.surd.interval(digits + 1)
        if self.kind == "algebraic-root":
            return refine_root(self, digits, budget)
        if self.kind == "digit-stream":
            return _digit_stream_interval(self, digits)
        raise ValueError(f"unknown source kind {self.kind!r}")

    def to_json(self) -> dict:
        out: dict = {"kind": self.kind, "label": self.label}
        if self.kind == "rational":
            out["value"] = str(self.value)
        elif self.kind == "surd":
            out["surd"] = self.surd.to_json()
        elif self.kind == "algebraic-root":
            out["coefficients"] = list(self.coefficients)
            out["bounds"] = [str(b) for b in self.bounds]
        else:
            if self.path:
                out["path"] = self.path
            if self.name:
                out["name"] = self.name
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "RealSource":
        kind = obj["kind"]
        label = obj.get("label", "")
        if kind == "rational":
            return cls.rational(Fraction(obj["value"]), label)
        if kind == "surd":
            return cls.of_surd(QuadraticSurd.from_json(obj["surd"]), label)
        if kind == "algebraic-root":
            lo, hi = (Fraction(b) for b in obj["bounds"])
            return cls.algebraic(obj["coefficients"], lo, hi, label)
        if kind == "digit-stream":
            return cls.digits(obj.get("path"), name=obj.get("name"), label=label)
        # manifest shorthands
        if kind == "nth-root":
            return cls.nth_root(Fraction(obj["a"]), int(obj["n"]), label)
        if kind == "pi":
            return cls.pi()
        raise ValueError(f"unknown source kind {kind!r}")


# -- polynomials (ascending coefficients) -------------------------------------

def _homog(coeffs: Sequence[int], n: int, d: int) -> int:
    acc = 0
    dp = 1
    for c in reversed(coeffs):
        acc = acc * n + c * dp
        dp *= d
    return acc


def _homog_sign(coeffs, n, d) -> int:
    v = _homog(coeffs, n, d)
    return (v > 0) - (v < 0)


def _derivative(coeffs: Sequence) -> list:
    return [i * c for i, c in enumerate(coeffs)][1:]


def _trim(p: list) -> list:
    while p and p[-1] == 0:
        p.pop()
    return p


def _poly_rem(a: list, b: list) -> list:
    a = [Fraction(c) for c in a]
    while len(a) >= len(b) and a:
        f = a[-1] / b[-1]
        shift = len(a) - len(b)
        for i, c in enumerate(b):
            a[shift + i] -= f * c
        a.pop()
        _trim(a)
    return a


def sturm_count(coeffs: Sequence[int], lo: Fraction, hi: Fraction) -> int:
    """Number of distinct real roots in ``(lo, hi]``."""
    p0 = _trim([Fraction(c) for c in coeffs])
    seq = [p0, _trim(_derivative(p0))]
    while seq[-1]:
        r = _poly_rem(seq[-2], seq[-1])
        seq.append([-c for c in r])
    seq = [p for p in seq if p]

    def variations(x):
        signs = []
        for p in seq:
            v = sum(c * x ** i for i, c in enumerate(p))
            if v:
                signs.append(v > 0)
        return sum(1 for a, b in zip(signs, signs[1:]) if a != b)

    return variations(lo) - variations(hi)


def refine_root(src: RealSource, digits: int, budget: int = 10_000) -> PrecisionInterval:
    """Shrink the isolating interval of an algebraic root below ``10**-digits``.

    Each step tries a Newton jump from the midpoint and keeps it only if a
    sign change certifies a small bracket around it; otherwise it bisects.
    """
    coeffs = src.coefficients
    lo, hi = src.bounds
    target = Fraction(1, 10 ** digits)
    s_lo = _homog_sign(coeffs, lo.numerator, lo.denominator)
    s_hi = _homog_sign(coeffs, hi.numerator, hi.denominator)
    if s_lo == 0:
        return PrecisionInterval.exact(lo)
    if s_hi == 0:
        return PrecisionInterval.exact(hi)
    if s_lo == s_hi:
        raise ValueError(f"no sign change of the polynomial on [{lo}, {hi}]")
    deriv = _derivative(coeffs)
    steps = 0
    while hi - lo >= target:
        steps += 1
        if steps > budget:
            raise BudgetExceeded(f"root refinement did not reach 1e-{digits} in {budget} steps")
        width = hi - lo
        m = _dyadic_round((lo + hi) / 2, width / 4)
        n, d = m.numerator, m.denominator
        pv = _homog(coeffs, n, d)
        if pv == 0:
            return PrecisionInterval.exact(m)
        dv = _homog(deriv, n, d)
        narrowed = False
        if dv:
            # p(m)/p'(m) with both homogenised: p = pv/d^deg, p' = dv/d^(deg-1)
            x = m - Fraction(pv, dv * d)
            for radius in (max(width * width, target / 4), width / 64):
                if radius >= width / 2:
                    continue
                x0 = _dyadic_round(x, radius / 2)
                a, b = x0 - radius, x0 + radius
                if a <= lo or b >= hi:
                    continue
                sa = _homog_sign(coeffs, a.numerator, a.denominator)
                sb = _homog_sign(coeffs, b.numerator, b.denominator)
                if sa == 0:
                    return PrecisionInterval.exact(a)
                if sb == 0:
                    return PrecisionInterval.exact(b)
                if sa == s_lo and sb == s_hi:
                    lo, hi = a, b
                    narrowed = True
                    break
        if not narrowed:
            if (pv > 0) == (s_lo > 0):
                lo = m
            else:
                hi = m
    return PrecisionInterval(lo, hi)


def _dyadic_round(x: Fraction, tol: Fraction) -> Fraction:
    """A dyadic rational within ``tol`` of ``x`` with a small denominator."""
    if tol <= 0:
        return x
    k = max(0, (tol.denominator // max(tol.numerator, 1)).bit_length())
    return Fraction((x.numerator << k) // x.denominator, 1 << k)


# -- digit streams and pi -----------------------------------------------------

_DIGITS_RE = re.compile(r"[0-9]")


def parse_digits(text: str) -> PrecisionInterval:
    """Parse ``"I.dddd..."`` (whitespace ignored) into ``[v, v + 10**-count]``."""
    sign = 1
    int_part = 0
    frac: list[str] = []
    seen_point = False
    seen_any = False
    line, col = 1, 0
    for ch in text:
        col += 1
        if ch == "\n":
            line, col = line + 1, 0
            continue
        if ch.isspace():
            continue
        if ch == "-" and not seen_any and sign == 1:
            sign = -1
            continue
        if ch == ".":
            if seen_point:
                raise ValueError(f"second decimal point at line {line}, column {col}")
            seen_point = True
            seen_any = True
            continue
        if not _DIGITS_RE.fullmatch(ch):
            raise ValueError(f"unexpected character {ch!r} at line {line}, column {col}")
        seen_any = True
        if seen_point:
            frac.append(ch)
        else:
            int_part = int_part * 10 + int(ch)
    if not seen_point:
        raise ValueError("digit file needs an integer part followed by '.'")
    if not frac:
        raise ValueError("digit file holds no fractional digits")
    scale = 10 ** len(frac)
    v = Fraction(int_part * scale + int("".join(frac)), scale)
    ulp = Fraction(1, scale)
    if sign < 0:
        return PrecisionInterval(-v - ulp, -v)
    return PrecisionInterval(v, v + ulp)


def load_digits(src: RealSource) -> PrecisionInterval:
    if src.text is not None:
        return parse_digits(src.text)
    path = _resolve_digit_path(src)
    if path is None:
        raise FileNotFoundError(f"no digit file for {src.label!r}")
    return parse_digits(Path(path).read_text())


def _resolve_digit_path(src: RealSource) -> str | None:
    if src.path and Path(src.path).exists():
        return src.path
    base = os.environ.get("JIMMLAB_DIGITS_DIR")
    if base:
        for cand in (src.path, f"{src.name}.txt" if src.name else None):
            if cand and (Path(base) / cand).exists():
                return str(Path(base) / cand)
    return None


def _digit_stream_interval(src: RealSource, digits: int) -> PrecisionInterval:
    if src.refinable:
        return pi_interval(digits)
    return load_digits(src)


def _chudnovsky(a: int, b: int) -> tuple[int, int, int]:
    if b - a == 1:
        if a == 0:
            p = q = 1
        else:
            p = (6 * a - 5) * (2 * a - 1) * (6 * a - 1)
            q = a * a * a * 10939058860032000  # 640320**3 // 24
        t = p * (13591409 + 545140134 * a)
        return p, q, -t if a & 1 else t
    m = (a + b) // 2
    p1, q1, t1 = _chudnovsky(a, m)
    p2, q2, t2 = _chudnovsky(m, b)
    return p1 * p2, q1 * q2, q2 * t1 + p1 * t2


def pi_interval(digits: int) -> PrecisionInterval:
    """Enclosure of pi of width below ``10**-digits`` by binary splitting."""
    n = digits + 10
    terms = n // 14 + 2
    _, q, t = _chudnovsky(0, terms)
    one = 10 ** n
    root = math.isqrt(10005 * one * one)
    approx = (q * 426880 * root) // t
    return PrecisionInterval(Fraction(approx - 4, one), Fraction(approx + 4, one))


# -- expansion ----------------------------------------------------------------

def expand(src: RealSource, n_terms: int, max_digits: int = 2_000_000) -> CFWord:
    """Certified expansion with ``n_terms`` partial quotients after the integer part.

    Rationals and surds with a finite/short expansion return what exists.
    Precision grows until enough quotients are certified.
    """
    if src.kind == "rational":
        return cf_from_rational(src.value)
    digits = int(n_terms * LEVY_DIGITS_PER_TERM * 1.05) + 30
    while True:
        iv = src.interval(digits)
        if iv.is_exact:
            return cf_from_rational(iv.lo)
        w = cf_from_interval(iv, max_terms=n_terms)
        if len(w) >= n_terms:
            return w.prefix(n_terms)
        if not src.refinable:
            raise PrecisionError(
                f"{src.label}: digit file certifies only {len(w)} quotients, {n_terms} requested")
        if digits > max_digits:
            raise PrecisionError(f"{src.label}: {max_digits} digits certify only {len(w)} quotients")
        digits = int(digits * 1.5)
