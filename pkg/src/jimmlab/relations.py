"""Multiprecision helpers, minimal-polynomial search and dictionary searches
for algebraic relations between J-images."""

from __future__ import annotations

import logging
import math
import statistics
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import mpmath

from .cf import PrecisionInterval
from .errors import PrecisionError
from .pslq import RelationResult, bailey_precision, pslq

__all__ = [
    "MPReal",
    "mp_from_interval",
    "mp_elementary",
    "MinpolyResult",
    "minpoly_search",
    "profile_correlation",
    "DictionaryEntry",
    "build_dictionary",
    "RungResult",
    "dictionary_relation_search",
]

log = logging.getLogger(__name__)

# Multiprecision reals are mpmath floats; the working precision is mpmath's.
MPReal = mpmath.mpf


def mp_from_interval(iv: PrecisionInterval, digits: int) -> MPReal:
    """Midpoint of a certified enclosure, refusing if it does not fix ``digits`` digits."""
    if not iv.is_exact and iv.width * 10 ** digits > 1:
        raise PrecisionError(f"enclosure fixes only {iv.correct_digits()} digits, {digits} requested")
    with mpmath.workdps(digits + 10):
        m = iv.mid
        return mpmath.mpf(m.numerator) / m.denominator


def mp_elementary(f: str, x, digits: int | None = None, exponent: Fraction | None = None) -> MPReal:
    """``exp``, ``log``, ``sqrt`` or ``pow_rational`` (``x**exponent``) at ``digits`` digits."""
    digits = mpmath.mp.dps if digits is None else digits
    with mpmath.workdps(digits + 10):
        x = mpmath.mpf(x)
        if f == "exp":
            r = mpmath.exp(x)
        elif f == "log":
            if x <= 0:
                raise ValueError("log needs x > 0")
            r = mpmath.log(x)
        elif f == "sqrt":
            if x < 0:
                raise ValueError("sqrt needs x >= 0")
            r = mpmath.sqrt(x)
        elif f == "pow_rational":
            e = Fraction(exponent)
            if x < 0 and e.denominator % 2 == 0:
                raise ValueError("even root of a negative number")
            if x < 0:
                r = -mpmath.root(-x, e.denominator) ** e.numerator
            else:
                r = mpmath.root(x, e.denominator) ** e.numerator
        else:
            raise ValueError(f"unknown function {f!r}")
    with mpmath.workdps(digits):
        return +r


# -- minimal polynomials --------------------------------------------------------

@dataclass(frozen=True)
class MinpolyResult:
    """``polynomial`` lists coefficients in ascending powers, leading one positive.

    ``profile`` holds ``(degree, smallest bounded |P(x)|, norm bound)`` for
    every degree tried.
    """

    polynomial: tuple[int, ...] | None
    profile: tuple[tuple[int, float, float], ...]

    @property
    def found(self) -> bool:
        return self.polynomial is not None

    def __str__(self) -> str:
        if self.polynomial is None:
            return "absent"
        parts = []
        for k in range(len(self.polynomial) - 1, -1, -1):
            c = self.polynomial[k]
            if c:
                mono = "" if k == 0 else ("x" if k == 1 else f"x^{k}")
                coef = str(abs(c)) if abs(c) != 1 or k == 0 else ""
                parts.append(("-" if c < 0 else "+") + coef + mono)
        s = "".join(parts)
        return s[1:] if s.startswith("+") else s


def minpoly_search(x, max_degree: int, c_max: int, eps=None, digits: int | None = None,
                   max_iter: int = 20_000) -> MinpolyResult:
    """Try degrees 1..max_degree in turn with PSLQ on ``[1, x, ..., x^m]``."""
    digits = mpmath.mp.dps if digits is None else digits
    need = bailey_precision(max_degree + 1, max(2, c_max))
    if digits < need:
        raise PrecisionError(f"{digits} digits is below the {need} digits needed for "
                             f"degree {max_degree} and coefficients up to {c_max}")
    profile = []
    with mpmath.workdps(digits):
        x = mpmath.mpf(x)
        powers = [mpmath.mpf(1)]
        for m in range(1, max_degree + 1):
            powers.append(powers[-1] * x)
            r = pslq(powers, eps, c_max, max_iter, digits)
            profile.append((m, float(r.residual), float(r.norm_bound)))
            if r.found and r.coefficients[-1] != 0:
                poly = r.coefficients if r.coefficients[-1] > 0 else tuple(-c for c in r.coefficients)
                return MinpolyResult(poly, tuple(profile))
    return MinpolyResult(None, tuple(profile))


def profile_correlation(profile: Sequence[tuple[int, float, float]]) -> float:
    """Pearson correlation of ``-log10 |P(x)|`` against degree."""
    xs = [float(m) for m, _, _ in profile]
    ys = [-math.log10(r) for _, r, _ in profile]
    return statistics.correlation(xs, ys)


# -- dictionaries ---------------------------------------------------------------

@dataclass(frozen=True)
class DictionaryEntry:
    """``expr`` is a nested tuple: a base label, ``(op, child)`` or ``(op, left, right)``."""

    label: str
    expr: object
    value: MPReal
    bases: frozenset

    def evaluate(self, env: dict, digits: int) -> MPReal:
        return _eval(self.expr, env, digits)


_UNARY: dict[str, tuple[Callable, str]] = {
    "inv": (lambda v: 1 / v, "1/{}"),
    "exp": (mpmath.exp, "exp({})"),
    "log": (mpmath.log, "log({})"),
    "sqrt": (mpmath.sqrt, "sqrt({})"),
    "sq": (lambda v: v * v, "{}^2"),
}
_BINARY: dict[str, tuple[Callable, str]] = {
    "mul": (lambda a, b: a * b, "{}*{}"),
    "div": (lambda a, b: a / b, "{}/{}"),
    "rdiv": (lambda a, b: b / a, "{1}/{0}"),
}


def _apply_unary(op: str, v):
    if op == "log" and v <= 0:
        raise ValueError("log of a nonpositive value")
    if op == "sqrt" and v < 0:
        raise ValueError("sqrt of a negative value")
    if op == "inv" and v == 0:
        raise ValueError("reciprocal of zero")
    if op == "exp" and v > 10 ** 6:
        raise ValueError("exp overflow")
    return _UNARY[op][0](v)


def _eval(expr, env, digits):
    with mpmath.workdps(digits + 10):
        if isinstance(expr, str):
            return env[expr]
        if len(expr) == 2:
            return _apply_unary(expr[0], _eval(expr[1], env, digits))
        return _BINARY[expr[0]][0](_eval(expr[1], env, digits), _eval(expr[2], env, digits))


def _wrap(label: str) -> str:
    return label if label.isidentifier() or label.startswith(("exp(", "log(", "sqrt(")) and \
        label.endswith(")") and label.count("(") == 1 else f"({label})"


def _unary_label(op: str, label: str) -> str:
    if op in ("exp", "log", "sqrt"):
        return _UNARY[op][1].format(label)
    return _UNARY[op][1].format(_wrap(label))


def _binary_label(op: str, a: str, b: str) -> str:
    return _BINARY[op][1].format(_wrap(a), _wrap(b))


def build_dictionary(bases: Sequence[tuple[str, object]], digits: int | None = None) -> list[DictionaryEntry]:
    """Bases, their transforms, pairwise combinations, transforms of
    combinations and combinations of transforms, in that order.

    Values closer than ``10**(-digits/2)`` to an earlier entry are dropped;
    entries outside a transform's domain are skipped with a log note.
    """
    digits = mpmath.mp.dps if digits is None else digits
    if not 1 <= len(bases) <= 3:
        raise ValueError("a dictionary takes one to three bases")
    env = {}
    with mpmath.workdps(digits + 10):
        for label, v in bases:
            env[label] = mpmath.mpf(v)
        tol = mpmath.mpf(10) ** (-(digits // 2))
        entries: list[DictionaryEntry] = []

        def add(label, expr, used):
            try:
                v = _eval(expr, env, digits)
            except (ValueError, ZeroDivisionError) as exc:
                log.info("skipping %s: %s", label, exc)
                return None
            if not mpmath.isfinite(v):
                log.info("skipping %s: not finite", label)
                return None
            for e in entries:
                if abs(e.value - v) < tol:
                    return None
            entry = DictionaryEntry(label, expr, v, frozenset(used))
            entries.append(entry)
            return entry

        for label, _ in bases:
            add(label, label, {label})
        transforms: dict[str, list[tuple[str, object]]] = {}
        for label, _ in bases:
            transforms[label] = [(label, label)]
            for op in _UNARY:
                lab = _unary_label(op, label)
                add(lab, (op, label), {label})
                if _evaluates((op, label), env, digits):
                    transforms[label].append((lab, (op, label)))
        pairs = [(bases[i][0], bases[j][0]) for i in range(len(bases)) for j in range(i + 1, len(bases))]
        combos = []
        for a, b in pairs:
            for op in _BINARY:
                lab = _binary_label(op, a, b)
                add(lab, (op, a, b), {a, b})
                combos.append((lab, (op, a, b), {a, b}))
        for lab, expr, used in combos:
            for op in _UNARY:
                add(_unary_label(op, lab), (op, expr), used)
        for a, b in pairs:
            for la, ea in transforms[a]:
                for lb, eb in transforms[b]:
                    if isinstance(ea, str) and isinstance(eb, str):
                        continue
                    for op in _BINARY:
                        add(_binary_label(op, la, lb), (op, ea, eb), {a, b})
    return entries


def _evaluates(expr, env, digits) -> bool:
    try:
        v = _eval(expr, env, digits)
    except (ValueError, ZeroDivisionError):
        return False
    return bool(mpmath.isfinite(v))


# -- dictionary relation search -------------------------------------------------

@dataclass(frozen=True)
class RungResult:
    tolerance: float
    found: bool
    coefficients: tuple[int, ...] | None = None
    expression: str | None = None
    residual: float | None = None
    norm_bound: float | None = None
    family: str | None = None

    def to_json(self) -> dict:
        return {"tolerance": self.tolerance, "found": self.found,
                "coefficients": list(self.coefficients) if self.coefficients else None,
                "expression": self.expression, "residual": self.residual,
                "norm_bound": self.norm_bound, "family": self.family}


_LOG_PRIMES = (2, 3)


def _fmt_frac(f: Fraction) -> str:
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


def _render_linear(lhs: str, rhs: str, c: tuple[int, ...]) -> str:
    a, b, d = c  # a*L + b + d*R = 0
    k0, k1 = Fraction(-b, a), Fraction(-d, a)
    return f"{lhs} = {_fmt_frac(k0)} + ({_fmt_frac(k1)})*{_wrap(rhs)}"


def _render_mult(lhs: str, rhs: str, c: tuple[int, ...]) -> str:
    a = c[0]
    names = [_wrap(rhs)] + [str(p) for p in _LOG_PRIMES]
    parts = []
    for name, v in zip(names, c[1:]):
        e = Fraction(-v, a)
        if e:
            parts.append(f"{name}^({_fmt_frac(e)})")
    return f"{lhs} = " + (" * ".join(parts) if parts else "1")


def dictionary_relation_search(entries: Sequence[DictionaryEntry], ladder: Sequence[float],
                               c_max: int = 1000, target: str | None = None,
                               digits: int | None = None) -> list[RungResult]:
    """For each tolerance, the simplest relation tying an entry that involves
    ``target`` to an entry that does not.

    Two relation shapes are searched for every such pair ``(L, R)``:
    ``a*L + b + c*R = 0`` and ``a*log L + b*log R + c*log 2 + d*log 3 = 0``.
    Each pair gets one PSLQ run; the run's trace answers every rung.
    Among the hits at a rung the smallest largest coefficient wins, then
    dictionary order.
    """
    digits = mpmath.mp.dps if digits is None else digits
    if list(ladder) != sorted(ladder, reverse=True):
        raise ValueError("ladder must be decreasing")
    if target is None:
        target = next(iter(entries[0].bases))
    left = [e for e in entries if target in e.bases]
    right = [e for e in entries if target not in e.bases]
    runs: list[tuple[str, DictionaryEntry, DictionaryEntry, RelationResult]] = []
    with mpmath.workdps(digits):
        logs = [mpmath.log(p) for p in _LOG_PRIMES]
        eps = min(ladder) / 10
        for L in left:
            for R in right:
                r = pslq([L.value, mpmath.mpf(1), R.value], eps, c_max, digits=digits)
                runs.append(("linear", L, R, r))
                if L.value > 0 and R.value > 0 and L.value != 1 and R.value != 1:
                    vec = [mpmath.log(L.value), mpmath.log(R.value)] + logs
                    r = pslq(vec, eps, c_max, digits=digits)
                    runs.append(("multiplicative", L, R, r))
    out = []
    for tol in ladder:
        best = None
        for idx, (family, L, R, r) in enumerate(runs):
            rec = r.first_below(tol)
            if rec is None:
                continue
            c = rec.coefficients
            if c[0] == 0 or (family == "linear" and c[2] == 0) or (family != "linear" and c[1] == 0):
                continue  # does not tie L to R
            key = (max(abs(v) for v in c), idx)
            if best is None or key < best[0]:
                best = (key, family, L, R, rec, r)
        if best is None:
            bound = min((float(r.norm_bound) for *_, r in runs), default=None)
            out.append(RungResult(tol, False, norm_bound=bound))
            continue
        _, family, L, R, rec, r = best
        expr = (_render_linear if family == "linear" else _render_mult)(L.label, R.label, rec.coefficients)
        out.append(RungResult(tol, True, rec.coefficients, expr, rec.residual,
                              float(r.norm_bound), family))
    return out
