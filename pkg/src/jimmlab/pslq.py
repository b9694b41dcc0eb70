"""Integer relation detection: single-level PSLQ in integer fixed point.

All internal quantities are Python integers scaled by ``2**prec``.  The
iteration does not depend on the tolerance except through its stopping
test, so one run also records every intermediate "best so far" relation;
callers can replay the run for any looser tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import mpmath

from .errors import PrecisionError

__all__ = ["RelationResult", "Record", "pslq", "bailey_precision", "canonical_relation"]


def bailey_precision(n: int, G: int) -> int:
    """Digits needed to recover a relation of dimension ``n`` with coefficients up to ``G``."""
    if n < 1 or G < 2:
        raise ValueError("need n >= 1 and G >= 2")
    # exact ceil(n * log10(G)) for powers of ten, float otherwise
    k = len(str(G)) - 1
    if G == 10 ** k:
        return n * k
    return math.ceil(n * math.log10(G))


@dataclass(frozen=True)
class Record:
    """A relation seen during the run that beat every earlier one."""

    iteration: int
    coefficients: tuple[int, ...]
    residual: float  # |sum a_i x_i| in the caller's units


@dataclass(frozen=True)
class RelationResult:
    coefficients: tuple[int, ...] | None
    residual: mpmath.mpf
    norm_bound: mpmath.mpf
    iterations: int
    reason: str = ""
    trace: tuple[Record, ...] = field(default=(), repr=False)

    @property
    def found(self) -> bool:
        return self.coefficients is not None

    def first_below(self, tol: float) -> Record | None:
        """The relation a run with tolerance ``tol`` would have stopped at."""
        for r in self.trace:
            if r.residual < tol:
                return r
        return None


def canonical_relation(vec: Sequence[int]) -> tuple[int, ...]:
    """Primitive, with the first nonzero entry positive."""
    g = 0
    for v in vec:
        g = math.gcd(g, v)
    if g == 0:
        return tuple(vec)
    out = [v // g for v in vec]
    first = next(v for v in out if v)
    if first < 0:
        out = [-v for v in out]
    return tuple(out)


def _round_div(a: int, b: int) -> int:
    # nearest integer to a/b
    if b < 0:
        a, b = -a, -b
    return (2 * a + b) // (2 * b)


def pslq(xs: Sequence, eps=None, c_max: int = 10 ** 6, max_iter: int = 10_000,
         digits: int | None = None) -> RelationResult:
    """Find integers ``a`` with ``|sum a_i x_i| < eps`` and ``max |a_i| <= c_max``.

    ``digits`` defaults to the current mpmath precision and must reach
    :func:`bailey_precision` ``(len(xs), c_max)``.  Without a relation the
    result carries ``1 / max |H_jj|``, a lower bound on the norm of any
    relation, and the smallest bounded residual met on the way.
    """
    n = len(xs)
    if n < 2:
        raise ValueError("pslq needs at least two numbers")
    digits = mpmath.mp.dps if digits is None else digits
    need = bailey_precision(n, max(2, c_max))
    if digits < need:
        raise PrecisionError(f"{digits} digits is below the {need} digits needed for "
                             f"dimension {n} and coefficients up to {c_max}")
    prec = int(digits * 3.3219280948873626) + 16
    one = 1 << prec
    with mpmath.workprec(prec + 32):
        vals = [mpmath.mpf(v) if not isinstance(v, Fraction)
                else mpmath.mpf(v.numerator) / v.denominator for v in xs]
        x = [int(mpmath.nint(v * one)) for v in vals]
        if eps is None:
            eps = mpmath.mpf(10) ** (-(digits * 3 // 4))
        eps = mpmath.mpf(eps)
        if any(v == 0 for v in x):
            raise ValueError("pslq needs nonzero inputs")
        norm_x = math.isqrt(sum(v * v for v in x))
        scale = mpmath.mpf(norm_x) / one  # y is x / |x|
        tol = int(mpmath.nint(eps / scale * one))
        g_fix = math.isqrt((4 * one * one) // 3)

    s = [0] * n
    acc = 0
    for k in range(n - 1, -1, -1):
        acc += x[k] * x[k]
        s[k] = math.isqrt(acc)
    t = s[0]
    y = [(v << prec) // t for v in x]
    s = [(v << prec) // t for v in s]
    H = [[0] * (n - 1) for _ in range(n)]
    for i in range(n):
        if i < n - 1 and s[i]:
            H[i][i] = (s[i + 1] << prec) // s[i]
        for j in range(min(i, n - 1)):
            den = s[j] * s[j + 1]
            if den:
                H[i][j] = ((-y[i] * y[j]) << prec) // den
    A = [[int(i == j) for j in range(n)] for i in range(n)]
    B = [[int(i == j) for j in range(n)] for i in range(n)]

    def reduce_row(i: int, j_top: int) -> None:
        for j in range(j_top, -1, -1):
            if not H[j][j]:
                continue
            q = _round_div(H[i][j], H[j][j])
            if not q:
                continue
            y[j] += q * y[i]
            Hi, Hj = H[i], H[j]
            for k in range(j + 1):
                Hi[k] -= q * Hj[k]
            Ai, Aj = A[i], A[j]
            for k in range(n):
                Ai[k] -= q * Aj[k]
                B[k][j] += q * B[k][i]

    for i in range(1, n):
        reduce_row(i, i - 1)

    gpow = [g_fix]
    for _ in range(n - 2):
        gpow.append((gpow[-1] * g_fix) >> prec)

    trace: list[Record] = []
    best_err: int | None = None
    best_vec: tuple[int, ...] | None = None
    bound = mpmath.mpf(0)
    reason = "iteration limit"
    it = 0
    for it in range(1, max_iter + 1):
        m = max(range(n - 1), key=lambda i: gpow[i] * abs(H[i][i]))
        y[m], y[m + 1] = y[m + 1], y[m]
        A[m], A[m + 1] = A[m + 1], A[m]
        H[m], H[m + 1] = H[m + 1], H[m]
        for row in B:
            row[m], row[m + 1] = row[m + 1], row[m]
        if m <= n - 3:
            a, b = H[m][m], H[m][m + 1]
            t0 = math.isqrt(a * a + b * b)
            if not t0:
                reason = "precision exhausted"
                break
            t1 = (a << prec) // t0
            t2 = (b << prec) // t0
            for i in range(m, n):
                t3, t4 = H[i][m], H[i][m + 1]
                H[i][m] = (t1 * t3 + t2 * t4) >> prec
                H[i][m + 1] = (-t2 * t3 + t1 * t4) >> prec
        for i in range(m + 1, n):
            reduce_row(i, min(i - 1, m + 1))

        found = None
        for j in range(n):
            col = tuple(B[k][j] for k in range(n))
            if max(abs(v) for v in col) > c_max:
                continue
            err = abs(y[j])
            if best_err is None or err < best_err:
                best_err, best_vec = err, col
                trace.append(Record(it, canonical_relation(col), float(mpmath.mpf(err) / one * scale)))
            if err < tol and found is None:
                found = col
        if found is not None:
            return _result(found, vals, prec, bound, it, "relation found", trace)

        hmax = max(abs(H[j][j]) for j in range(n - 1))
        if not hmax:
            reason = "precision exhausted"
            break
        with mpmath.workprec(64):
            bound = mpmath.mpf(one) / hmax
        if bound > c_max:
            reason = "norm bound exceeds c_max"
            break
        if max(abs(v) for row in B for v in row) >> (prec // 2):
            reason = "precision exhausted"
            break

    residual = _residual(best_vec, vals, prec) if best_vec is not None else mpmath.inf
    return RelationResult(None, residual, bound, it, reason, tuple(trace))


def _residual(vec, vals, prec):
    with mpmath.workprec(prec):
        return abs(mpmath.fsum(a * v for a, v in zip(vec, vals)))


def _result(vec, vals, prec, bound, it, reason, trace):
    rel = canonical_relation(vec)
    return RelationResult(rel, _residual(rel, vals, prec), bound, it, reason, tuple(trace))
