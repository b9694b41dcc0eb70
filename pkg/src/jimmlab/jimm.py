"""The involution J on continued fractions.

For ``x = [n0; n1, n2, ...]`` with ``n0 >= 1`` the image is the word

    1_{n0-1}, 2, 1_{n1-2}, 2, 1_{n2-2}, 2, ...

(with ``[0; 1_{n1-1}, 2, 1_{n2-2}, ...]`` when ``n0 == 0``), where ``1_k`` is
a run of ``k`` ones.  Runs of length 0 disappear and a run of length -1 glues
its neighbours ``m`` and ``n`` into ``m + n - 1``.  Rewriting happens left to
right on the fly: a pending -1 run folds the next separator into the last
emitted value.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

from .cf import (CFWord, PrecisionInterval, cf_from_interval, cf_from_rational,
                 gauss_map, rational_from_cf, value_interval)
from .errors import BudgetExceeded, PrecisionError
from .reals import RealSource
from .surd import PeriodicCF, QuadraticSurd, periodic_cf_to_surd, surd_to_periodic_cf

__all__ = [
    "CertifiedJimm",
    "JimmReal",
    "jimm_terms",
    "jimm_word",
    "jimm_involution_check",
    "jimm_rational",
    "jimm_surd",
    "jimm_noble",
    "noble_twin",
    "jimm_real",
    "harmonic_check",
    "negate_word",
    "reciprocal_word",
    "gauss_conjugate",
    "jimm_of_expansion",
    "decimal_string",
    "jimm_interval",
]

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class CertifiedJimm:
    """Image of a truncated word.

    ``output.terms[:certified_len]`` is fixed no matter how the input
    continues; the final term is the still-open separator.  ``input_consumed``
    counts flat input terms (integer part included).
    """

    output: CFWord
    certified_len: int
    input_consumed: int

    @property
    def certified(self) -> CFWord | None:
        terms = self.output.terms[:self.certified_len]
        return CFWord.from_terms(terms, truncated=True) if terms else None

    def to_json(self) -> dict:
        return {"output": self.output.to_json(), "certified_len": self.certified_len,
                "input_consumed": self.input_consumed}


def jimm_terms(terms: Sequence[int], open_end: bool = True) -> list[int]:
    """Flat image of the flat input ``terms`` (``terms[0] >= 0``).

    With ``open_end`` the input is a prefix of an infinite expansion and the
    output ends with the separator that the next input term may still grow.
    Without it the word is read literally and ends with the last run.
    """
    if not terms:
        return []
    if terms[0] < 0:
        raise ValueError("jimm_terms needs a nonnegative integer part")
    out: list[int] = []
    it = iter(terms)
    if terms[0] == 0:
        out.append(0)
        next(it)
    merge = False
    first = True
    for t in it:
        if first:
            k = t - 1
            first = False
        else:
            if merge:
                out[-1] += 1
                merge = False
            else:
                out.append(2)
            k = t - 2
        if k > 0:
            out.extend([1] * k)
        elif k == -1:
            merge = True
    if first:
        # only the integer part 0 was given
        return out
    if open_end:
        if merge:
            out[-1] += 1
        else:
            out.append(2)
    elif merge:
        raise ValueError("a literal word cannot end in a 1_{-1} run")
    return out


def negate_word(w: CFWord) -> CFWord:
    """Certified expansion of ``-x`` from a truncated expansion of ``x``."""
    q = w.quotients
    if not w.truncated:
        return cf_from_rational(-rational_from_cf(w))
    if not q:
        return CFWord(-w.integer_part - 1, (), True)
    if q[0] > 1:
        return CFWord(-w.integer_part - 1, (1, q[0] - 1) + q[1:], True)
    if len(q) == 1:
        return CFWord(-w.integer_part - 1, (), True)
    return CFWord(-w.integer_part - 1, (q[1] + 1,) + q[2:], True)


def reciprocal_word(w: CFWord) -> CFWord:
    """Certified expansion of ``1/x`` for ``x > 0``."""
    if w.integer_part < 0 or (w.integer_part == 0 and not w.quotients and not w.truncated):
        raise ValueError("reciprocal_word needs a positive value")
    if w.integer_part > 0:
        return CFWord(0, (w.integer_part,) + w.quotients, w.truncated)
    if not w.quotients:
        raise PrecisionError("value too close to 0 to certify its reciprocal")
    return CFWord(w.quotients[0], w.quotients[1:], w.truncated)


def jimm_word(w: CFWord) -> CertifiedJimm:
    """J of the real whose expansion starts with ``w`` (read as a prefix)."""
    if w.integer_part < 0:
        # J(x) = -1/J(-x)
        inner = jimm_word(negate_word(w)).certified
        if inner is None:
            return CertifiedJimm(CFWord(0, (), True), 0, len(w.terms))
        try:
            out = negate_word(reciprocal_word(inner))
        except PrecisionError:
            return CertifiedJimm(CFWord(0, (), True), 0, len(w.terms))
        return CertifiedJimm(out, len(out.terms), len(w.terms))
    terms = jimm_terms(w.terms, open_end=True)
    out = CFWord.from_terms(terms, truncated=True)
    if w.integer_part == 0 and not w.quotients:
        return CertifiedJimm(out, 1, 1)
    return CertifiedJimm(out, len(terms) - 1, len(w.terms))


def jimm_involution_check(w: CFWord) -> bool:
    """Does J(J(w)) agree with ``w`` wherever both applications are certified?"""
    once = jimm_word(w).certified
    if once is None:
        return True
    twice = jimm_word(once).certified
    if twice is None:
        return True
    n = len(twice.terms)
    return n <= len(w.terms) and twice.terms == w.terms[:n]


# -- rationals ----------------------------------------------------------------

_T = (1, 1, 1, 0)
_U = (0, 1, 1, 0)


def _mul(a, b):
    return (a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3],
            a[2] * b[0] + a[3] * b[2], a[2] * b[1] + a[3] * b[3])


def _pow(m, e: int):
    out = (1, 0, 0, 1)
    while e:
        if e & 1:
            out = _mul(out, m)
        m = _mul(m, m)
        e >>= 1
    return out


def jimm_rational(x) -> Fraction:
    """J on Q via the matrix product ``prod T^{a_i} U`` over the canonical expansion.

    ``T = [[1,1],[1,0]]``, ``U = [[0,1],[1,0]]``.  Words starting with 0 skip
    that term and return ``M22/M12``; other words return ``M12/M22``.  The
    value 0 is mapped to 0 and negative values use ``J(x) = -1/J(-x)``.
    """
    x = Fraction(x)
    if x == 0:
        return Fraction(0)
    if x < 0:
        # the raw matrix product breaks J(-x) = -1/J(x) here (it sends -1 to 0)
        return -1 / jimm_rational(-x)
    terms = cf_from_rational(x).terms
    m = (1, 0, 0, 1)
    starts_with_zero = terms[0] == 0
    for a in terms[1:] if starts_with_zero else terms:
        m = _mul(_mul(m, _pow(_T, a)), _U)
    if starts_with_zero:
        return Fraction(m[3], m[1])
    return Fraction(m[1], m[3])


# -- nobles -------------------------------------------------------------------

def _noble_head(head: CFWord) -> list[int]:
    terms = list(head.terms)
    while len(terms) > 1 and terms[-1] == 1:
        terms.pop()
    return terms


def jimm_noble(head: CFWord) -> Fraction:
    """J of the noble number ``[head, 1, 1, 1, ...]``; always rational.

    Raises ``ZeroDivisionError`` for the golden ratio itself, whose image is
    infinite.
    """
    terms = _noble_head(head)
    if terms[0] < 0:
        raise ValueError("noble heads need a nonnegative integer part")
    if terms == [0]:
        return Fraction(0)
    out = jimm_terms(terms, open_end=False)
    if not out:
        raise ZeroDivisionError("J of the golden ratio is infinite")
    return rational_from_cf(CFWord.from_terms(out))


def noble_twin(head: CFWord) -> CFWord:
    """The other head with the same J-image: ``[..., n_k - 2, 2]``."""
    terms = _noble_head(head)
    terms = terms[:-1] + [terms[-1] - 2, 2]
    # a zero quotient glues its neighbours: [.., a, 0, b, ..] = [.., a + b, ..]
    while 0 in terms[1:]:
        i = terms.index(0, 1)
        if i + 1 < len(terms):
            terms[i - 1:i + 2] = [terms[i - 1] + terms[i + 1]]
        else:
            terms = terms[:i]
    return CFWord.from_terms(terms)


# -- quadratic surds ----------------------------------------------------------

def _eventual_period(seq: Sequence[int]) -> tuple[int, int] | None:
    n = len(seq)
    for t in range(1, n // 2 + 1):
        i = n - t - 1
        while i >= 0 and seq[i] == seq[i + t]:
            i -= 1
        pre = i + 1
        if n - pre >= max(2 * t, n // 2):
            return pre, t
    return None


def jimm_surd(s: QuadraticSurd, k_start: int = 4, k_max: int = 64):
    """Exact J of a real quadratic irrational.

    J is applied to the preperiod followed by K copies of the period; the
    periodic part of the image is read off and checked against 2K copies.
    K doubles from ``k_start`` up to ``k_max``.  Noble inputs (period of
    ones) go to :func:`jimm_noble` and give a rational.
    """
    pc = surd_to_periodic_cf(s)
    if set(pc.period) == {1}:
        return jimm_noble(CFWord.from_terms(list(pc.preperiod) or [1]))
    if pc.preperiod and pc.preperiod[0] < 0 or not pc.preperiod and pc.period[0] < 0:
        # J(x) = -1/J(-x)
        return -1 / jimm_surd(-s, k_start, k_max)
    k = k_start
    tried = []
    while k <= k_max:
        cert = _certified_image(pc, k)
        found = _eventual_period(cert)
        if found:
            pre, t = found
            cand = PeriodicCF(tuple(cert[:pre]), tuple(cert[pre:pre + t]))
            check = _certified_image(pc, 2 * k)
            if len(check) > len(cert) and cand.terms(len(check)) == check:
                return periodic_cf_to_surd(cand)
            tried.append((k, str(cand)))
        else:
            tried.append((k, None))
        k *= 2
    raise BudgetExceeded(f"no stable period in J({s}) after K={k_max} copies; tried {tried}")


def _certified_image(pc: PeriodicCF, copies: int) -> list[int]:
    terms = pc.terms(len(pc.preperiod) + copies * len(pc.period))
    img = jimm_word(CFWord.from_terms(terms, truncated=True))
    return list(img.output.terms[:img.certified_len])


Exact = Union[Fraction, QuadraticSurd]


def _jimm_exact(x) -> Exact:
    if isinstance(x, QuadraticSurd):
        return jimm_surd(x)
    return jimm_rational(x)


def harmonic_check(x, y) -> bool:
    """For ``1/x + 1/y == 1``, check ``1/J(x) + 1/J(y) == 1`` exactly."""
    if 1 / x + 1 / y != 1:
        raise ValueError(f"{x} and {y} are not a harmonic pair")
    return 1 / _jimm_exact(x) + 1 / _jimm_exact(y) == 1


# -- arbitrary reals ----------------------------------------------------------

@dataclass(frozen=True)
class JimmReal:
    interval: PrecisionInterval
    jimm: CertifiedJimm
    input_word: CFWord

    def decimal(self, places: int) -> str:
        return decimal_string(self.interval, places)


def decimal_string(iv: PrecisionInterval, places: int) -> str:
    """Decimal expansion truncated to ``places`` digits, if ``iv`` pins it down."""
    scale = 10 ** places
    lo = (iv.lo * scale).__floor__()
    hi = (iv.hi * scale).__floor__()
    if lo != hi:
        raise PrecisionError(f"interval {iv} does not fix {places} decimals")
    sign = "-" if lo < 0 else ""
    whole, frac = divmod(abs(lo), scale)
    return f"{sign}{whole}.{frac:0{places}d}" if places else f"{sign}{whole}"


def jimm_interval(iv: PrecisionInterval) -> PrecisionInterval:
    """Enclosure of J over every real in ``iv`` (``iv`` must avoid 0)."""
    if iv.lo <= 0 <= iv.hi:
        raise PrecisionError("enclosure contains 0; J is not continuous there")
    if iv.hi < 0:
        # J(x) = -1/J(-x)
        return -1 / jimm_interval(-iv)
    try:
        word = cf_from_interval(iv)
    except ValueError as exc:
        raise PrecisionError(str(exc)) from exc
    out = jimm_word(word).certified
    if out is None:
        raise PrecisionError("enclosure too wide to certify any term of J")
    return value_interval(out)


def jimm_real(src: RealSource, digits: int, max_input_digits: int = 200_000) -> JimmReal:
    """Certified J(x) to at least ``digits`` decimals.

    Rationals go through :func:`jimm_rational` and surds through
    :func:`jimm_surd`.  Otherwise the input precision is raised until the
    certified image pins ``digits`` decimals.
    """
    target = Fraction(1, 10 ** digits)
    if src.kind == "rational":
        v = jimm_rational(src.value)
        w = cf_from_rational(v)
        return JimmReal(PrecisionInterval.exact(v), CertifiedJimm(w, len(w.terms), len(w.terms)),
                        cf_from_rational(src.value))
    if src.kind == "surd":
        v = jimm_surd(src.surd)
        if isinstance(v, Fraction):
            iv = PrecisionInterval.exact(v)
            w = cf_from_rational(v)
        else:
            iv = v.interval(digits + 2)
            w = cf_from_interval(iv)
        return JimmReal(iv, CertifiedJimm(w, len(w.terms), len(w.terms)),
                        surd_to_periodic_cf(src.surd).word(8))
    in_digits = max(20, digits // 4)
    while True:
        iv = src.interval(in_digits)
        if iv.is_exact:
            return jimm_real(RealSource.rational(iv.lo), digits)
        word = cf_from_interval(iv)
        img = jimm_word(word)
        out = img.certified
        if out is not None:
            out_iv = value_interval(out) if iv.lo > 0 else jimm_interval(iv)
            if out_iv.width < target:
                return JimmReal(out_iv, img, word)
        got = 0 if out is None else value_interval(out).correct_digits()
        if not src.refinable:
            raise PrecisionError(f"{src.label}: input digits certify J only to {got} decimals; "
                                 "supply more digits")
        if in_digits > max_input_digits:
            raise PrecisionError(f"{src.label}: {in_digits} input digits certify J only to {got} decimals")
        in_digits *= 2


def jimm_of_expansion(src: RealSource, n_terms: int) -> CertifiedJimm:
    """J applied to the first ``n_terms`` flat terms of ``src`` (integer part included)."""
    from .reals import expand
    w = expand(src, n_terms - 1)
    return jimm_word(w)


def gauss_conjugate(w: CFWord) -> CFWord | None:
    """``J(T_G(J(w)))`` on the certified part; ``None`` when nothing is certified."""
    once = jimm_word(w).certified
    if once is None or not once.quotients or once.integer_part != 0:
        return None
    return jimm_word(gauss_map(once)).certified
