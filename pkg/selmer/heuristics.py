"""
Closed-form predictions for 2-ranks, unit signature ranks and splitting.

Everything that is a finite product or sum of q-Pochhammer symbols is
evaluated exactly with Fraction. The infinite products (2)_inf and (4)_inf
enter through TruncatedReal, an mpmath value carrying a rigorous absolute
error bound, and so do the infinite sums over the class-group 2-rank.

Signatures (r1, r2) are restricted to odd degree n = r1 + 2 r2.
"""

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Sequence, Union

import mpmath
from mpmath import mp, mpf

from .errors import InadmissibleError, OutsideSupportError
from .f2linalg import Subspace, enumerate_subspaces

logger = logging.getLogger(__name__)

# working precision for mpmath; far beyond any printed digit
DPS = 50
DEFAULT_TERMS = 64
DEFAULT_EPS = Fraction(1, 10 ** 9)

Rational = Fraction
Number = Union[Fraction, int]


def _mpf(x: Number) -> mpf:
    x = Fraction(x)
    with mp.workdps(DPS):
        return mpf(x.numerator) / x.denominator


def _rounding(x: mpf) -> mpf:
    with mp.workdps(DPS):
        return abs(x) * mpf(10) ** (8 - DPS)


@dataclass(frozen=True)
class TruncatedReal:
    """
    Real number known to lie in [value - err, value + err].

    Attributes:
        value: Midpoint
        err: Rigorous absolute error bound (nonnegative)
    """
    value: mpf
    err: mpf = field(default_factory=lambda: mpf(0))

    def __post_init__(self) -> None:
        if self.err < 0:
            raise InadmissibleError("error bound must be nonnegative")

    @classmethod
    def exact(cls, x: Number) -> "TruncatedReal":
        v = _mpf(x)
        return cls(v, _rounding(v))

    @staticmethod
    def _lift(other: "TruncatedReal | Number") -> "TruncatedReal":
        return other if isinstance(other, TruncatedReal) else TruncatedReal.exact(other)

    def __add__(self, other: "TruncatedReal | Number") -> "TruncatedReal":
        other = self._lift(other)
        with mp.workdps(DPS):
            v = self.value + other.value
            return TruncatedReal(v, self.err + other.err + _rounding(v))

    __radd__ = __add__

    def __mul__(self, other: "TruncatedReal | Number") -> "TruncatedReal":
        other = self._lift(other)
        with mp.workdps(DPS):
            v = self.value * other.value
            err = abs(self.value) * other.err + abs(other.value) * self.err + self.err * other.err
            return TruncatedReal(v, err + _rounding(v))

    __rmul__ = __mul__

    def __truediv__(self, other: "TruncatedReal | Number") -> "TruncatedReal":
        other = self._lift(other)
        with mp.workdps(DPS):
            margin = abs(other.value) - other.err
            if margin <= 0:
                raise InadmissibleError("division by an interval containing zero")
            v = self.value / other.value
            err = (abs(self.value) * other.err + abs(other.value) * self.err) / (abs(other.value) * margin)
            return TruncatedReal(v, err + _rounding(v))

    def scale(self, x: Number) -> "TruncatedReal":
        return self * x

    def contains(self, x: "float | Number | mpf") -> bool:
        target = _mpf(x) if isinstance(x, (Fraction, int)) else mpf(x)
        with mp.workdps(DPS):
            return abs(target - self.value) <= self.err

    def __float__(self) -> float:
        return float(self.value)

    def format_fixed(self, places: int = 6) -> str:
        """Value rounded to `places` decimals; refuses when the error bound does not certify them."""
        if self.err * 2 * 10 ** places > 1:
            raise InadmissibleError(f"error {mpmath.nstr(self.err, 3)} does not certify {places} places")
        return f"{float(self.value):.{places}f}"

    def format_sci(self, digits: int = 2) -> str:
        """Value with `digits` significant digits, e.g. 1.9e-07."""
        if self.value == 0:
            return "0"
        exponent = int(mpmath.floor(mpmath.log10(abs(self.value))))
        if self.err * 2 * 10 ** (digits - 1 - exponent) > 1:
            raise InadmissibleError(f"error {mpmath.nstr(self.err, 3)} does not certify {digits} digits")
        return f"{float(self.value):.{digits - 1}e}"

    def format_cell(self, places: int = 6) -> str:
        if abs(self.value) >= mpf(10) ** -places:
            return self.format_fixed(places)
        return self.format_sci(2)

    def __str__(self) -> str:
        return f"{mpmath.nstr(self.value, 12)} ± {mpmath.nstr(self.err, 2)}"


# Pochhammer symbols


@lru_cache(maxsize=None)
def pochhammer(q: Number, m: int) -> Fraction:
    """(q)_m = prod_{i=1}^m (1 - q^-i); the empty product is 1."""
    if m < 0:
        raise InadmissibleError(f"Pochhammer index must be nonnegative, got {m}")
    q = Fraction(q)
    if q <= 1:
        raise InadmissibleError(f"need q > 1, got {q}")
    out = Fraction(1)
    for i in range(1, m + 1):
        out *= 1 - 1 / q ** i
    return out


def _terms_for(q: int, eps: Number) -> int:
    terms = DEFAULT_TERMS
    while Fraction(2, q ** terms) > Fraction(eps) / 2:
        terms += 8
    return terms


@lru_cache(maxsize=None)
def pochhammer_inf(q: int, eps: Number = DEFAULT_EPS) -> TruncatedReal:
    """
    (q)_inf truncated after M factors. The omitted tail lies in
    [exp(-2 q^-M), 1], which bounds the error by P_M (1 - exp(-2 q^-M)).
    """
    if Fraction(eps) <= 0:
        raise InadmissibleError("eps must be positive")
    if not isinstance(q, int) or q < 2:
        raise InadmissibleError(f"need an integer q >= 2, got {q}")
    terms = _terms_for(q, eps)
    head = _mpf(pochhammer(q, terms))
    with mp.workdps(DPS):
        err = head * (1 - mpmath.exp(-2 * mpf(q) ** -terms))
    logger.debug("(%d)_inf truncated at %d factors", q, terms)
    return TruncatedReal(head, err + _rounding(head))


def malle_constant(eps: Number = DEFAULT_EPS) -> TruncatedReal:
    """(2)_inf / (4)_inf."""
    return pochhammer_inf(2, eps) / pochhammer_inf(4, eps)


@dataclass(frozen=True, order=True)
class Signature:
    """
    Signature (r1, r2) of a number field of odd degree.

    Attributes:
        r1: Real places (odd)
        r2: Complex places
    """
    r1: int
    r2: int

    def __post_init__(self) -> None:
        if self.r1 < 1 or self.r2 < 0:
            raise InadmissibleError(f"bad signature ({self.r1},{self.r2})")
        if self.r1 % 2 == 0:
            raise InadmissibleError(f"degree {self.n} is even; only odd degree is supported")

    @property
    def n(self) -> int:
        return self.r1 + 2 * self.r2

    @property
    def u(self) -> int:
        """Unit rank r1 + r2 - 1."""
        return self.r1 + self.r2 - 1

    @property
    def half(self) -> int:
        return (self.r1 - 1) // 2

    def __str__(self) -> str:
        return f"({self.r1},{self.r2})"


STANDARD_SIGNATURES = [
    Signature(3, 0), Signature(1, 1),
    Signature(5, 0), Signature(3, 1), Signature(1, 2),
    Signature(7, 0), Signature(5, 1), Signature(3, 2), Signature(1, 3),
]


def _p2(m: int) -> Fraction:
    return pochhammer(2, m)


def _p4(m: int) -> Fraction:
    return pochhammer(4, m)


def _pow2(e: int) -> Fraction:
    return Fraction(2) ** e


def p_k(sig: Signature, k: int) -> Fraction:
    """Probability that the image of the Selmer signature map meets V_inf in dimension k."""
    if not 0 <= k <= sig.r1 // 2:
        raise InadmissibleError(f"k={k} outside 0..{sig.r1 // 2}")
    u, h, r2 = sig.u, sig.half, sig.r2
    num = _p2(u) * _p4(h) * _p4(h + r2)
    den = _pow2(k * (k + r2)) * _p2(k) * _p2(k + r2) * _p4(u) * _p4(h - k)
    return num / den


def k_distribution(sig: Signature) -> list[Fraction]:
    return [p_k(sig, k) for k in range(sig.r1 // 2 + 1)]


def eta_rational(sig: Signature, rho: int) -> Fraction:
    """eta(rho) / ((2)_inf / (4)_inf)."""
    if rho < 0:
        raise InadmissibleError(f"rho must be nonnegative, got {rho}")
    u = sig.u
    return _p4(u) / (_pow2(rho * u + rho * (rho + 1) // 2) * _p2(rho) * _p2(u))


def eta_malle(sig: Signature, rho: int, eps: Number = DEFAULT_EPS) -> TruncatedReal:
    """Predicted probability that the class group has 2-rank rho."""
    return malle_constant(eps).scale(eta_rational(sig, rho))


def eta_plus_rational(sig: Signature, rho_plus: int) -> Fraction:
    return sum(
        (eta_rational(sig, rho_plus - k) * p_k(sig, k)
         for k in range(min(rho_plus, sig.r1 // 2) + 1)),
        Fraction(0),
    )


def eta_plus(sig: Signature, rho_plus: int, eps: Number = DEFAULT_EPS) -> TruncatedReal:
    """Narrow class group 2-rank distribution: sum_k eta(rho+ - k) p(k)."""
    if rho_plus < 0:
        raise InadmissibleError(f"rho+ must be nonnegative, got {rho_plus}")
    return malle_constant(eps).scale(eta_plus_rational(sig, rho_plus))


def eta_plus_displayed_rational(sig: Signature, rho_plus: int) -> Fraction:
    r1, r2, h = sig.r1, sig.r2, sig.half
    total = Fraction(0)
    for k in range(min(rho_plus, r1 // 2) + 1):
        j = rho_plus - k
        total += _pow2(k * (r1 - 1 - k) - j * (j + 1) // 2) / (
            _p2(k) * _p2(k + r2) * _p2(j) * _p4(h - k)
        )
    return _p4(h) * _p4(h + r2) / _pow2(sig.u * rho_plus) * total


def eta_plus_displayed(sig: Signature, rho_plus: int, eps: Number = DEFAULT_EPS) -> TruncatedReal:
    """The closed single-sum form of eta_plus."""
    if rho_plus < 0:
        raise InadmissibleError(f"rho+ must be nonnegative, got {rho_plus}")
    return malle_constant(eps).scale(eta_plus_displayed_rational(sig, rho_plus))


def eta_plus_limit(r2: int, rho_plus: int, eps: Number = DEFAULT_EPS) -> TruncatedReal:
    """Limit of eta_plus as r1 grows with r2 fixed."""
    if r2 < 0 or rho_plus < 0:
        raise InadmissibleError("r2 and rho+ must be nonnegative")
    factor = 1 / (_pow2(rho_plus * (rho_plus + r2)) * _p2(rho_plus) * _p2(r2 + rho_plus))
    return pochhammer_inf(2, eps).scale(factor)


def malle_moment(sig: Signature, t: int) -> Fraction:
    """t-th moment of 2^rho under the class group 2-rank distribution."""
    if t < 1:
        raise InadmissibleError(f"t must be >= 1, got {t}")
    out = Fraction(1)
    for s in range(1, t + 1):
        out *= 1 + _pow2(s - sig.r1 - sig.r2)
    return out


def moment(sig: Signature, t: int) -> Fraction:
    """t-th moment sum 2^{t rho+} eta_plus(rho+), exactly."""
    return malle_moment(sig, t) * sum(
        (_pow2(t * k) * p_k(sig, k) for k in range(sig.r1 // 2 + 1)), Fraction(0)
    )


# Weighted sum q^k p~(k) and its WZ certificate


@dataclass(frozen=True)
class WzTriple:
    """
    Data of the WZ proof that sum_k f_{m,k} = 1.

    f holds f_{m-1,k} and f_{m,k} keyed by (row, k); g and cert are indexed
    by k for row m.
    """
    q: Fraction
    m: int
    r2: int
    f: dict
    g: list
    cert: list
    lhs: Fraction
    rhs: Fraction


def ptilde(q: Number, m: int, r2: int, k: int) -> Fraction:
    q = Fraction(q)
    q2 = q * q
    num = pochhammer(q, 2 * m + r2) * pochhammer(q2, m) * pochhammer(q2, m + r2)
    den = (q ** (k * (k + r2)) * pochhammer(q, k) * pochhammer(q, k + r2)
           * pochhammer(q2, 2 * m + r2) * pochhammer(q2, m - k))
    return num / den


def _wz_f(q: Fraction, m: int, r2: int, k: int) -> Fraction:
    if k < 0 or k > m:
        return Fraction(0)
    return q ** k * ptilde(q, m, r2, k) * (1 + q ** (-2 * m - r2)) / (1 + q ** (-r2))


def _wz_cert(q: Fraction, m: int, r2: int, k: int) -> Fraction:
    num = (q ** (2 * k) - q ** (2 * m)) * (
        q ** (3 + 2 * k) + q ** (2 * m) - q ** (1 + 2 * m) + q ** (1 + k + 2 * m)
        + q ** (1 + k + 2 * m + r2) + q ** (2 + 2 * k + 2 * m + r2)
    )
    den = q ** (2 * k + 2 * m) * (q ** (2 * m) - 1) * (q ** (2 * (m + r2)) - 1)
    return num / den


def pksum_wz_check(q: Number, m: int, r2: int) -> tuple[WzTriple, bool]:
    """Check sum_k q^k p~(k) = (1+q^-r2)/(1+q^(-2m-r2)) and the WZ recurrence, exactly."""
    q = Fraction(q)
    if q <= 1:
        raise InadmissibleError(f"need q > 1, got {q}")
    if m < 0 or r2 < 0:
        raise InadmissibleError("m and r2 must be nonnegative")
    lhs = sum((q ** k * ptilde(q, m, r2, k) for k in range(m + 1)), Fraction(0))
    rhs = (1 + q ** (-r2)) / (1 + q ** (-2 * m - r2))
    f = {(row, k): _wz_f(q, row, r2, k) for row in (m - 1, m) if row >= 0 for k in range(row + 1)}
    ok = lhs == rhs and sum(f[(m, k)] for k in range(m + 1)) == 1
    cert: list[Fraction] = []
    g: list[Fraction] = []
    if m >= 1:
        cert = [_wz_cert(q, m, r2, k) for k in range(m + 1)]
        g = [c * _wz_f(q, m, r2, k) for k, c in enumerate(cert)]
        ok = ok and cert[m] == 0
        for k in range(m + 1):
            g_prev = g[k - 1] if k > 0 else Fraction(0)
            if _wz_f(q, m, r2, k) - _wz_f(q, m - 1, r2, k) != g[k] - g_prev:
                logger.info("WZ recurrence fails at q=%s m=%d r2=%d k=%d", q, m, r2, k)
                ok = False
    return WzTriple(q, m, r2, f, g, cert, lhs, rhs), ok


# Unit signature ranks


def random_subspace_prob(q: Number, m: int, r: int, t: int, s_prime: int) -> Fraction:
    """
    P(dim(E ∩ Y) = s') for E uniform among t-dimensional subspaces of F_q^m
    through a fixed e, where Y has dimension r and misses e.
    """
    if t < 1 or t > m or r < 0 or r > m - 1:
        raise InadmissibleError(f"need 1 <= t <= m and 0 <= r <= m-1, got m={m} r={r} t={t}")
    if not max(0, r + t - m) <= s_prime <= min(r, t - 1):
        raise OutsideSupportError(f"dim(E ∩ Y) = {s_prime} is impossible for m={m} r={r} t={t}")
    q = Fraction(q)
    P = lambda i: pochhammer(q, i)  # noqa: E731
    num = P(r) * P(t - 1) * P(m - 1 - r) * P(m - t)
    den = P(r - s_prime) * P(s_prime) * P(t - 1 - s_prime) * P(m - 1) * P(m + s_prime - r - t)
    return q ** (s_prime * (r + t - m - s_prime)) * num / den


def sigrank_bounds(sig: Signature, k: int, rho: int) -> tuple[int, int]:
    """Range of the unit signature rank s given k and rho."""
    return sig.r1 - min(rho + k, sig.r1 - 1), sig.r1 - k


def _check_s(sig: Signature, s: int) -> None:
    if not 1 <= s <= sig.r1:
        raise InadmissibleError(f"s={s} outside 1..{sig.r1}")


def cond_sigrank(sig: Signature, s: int, k: int, rho: int) -> Fraction:
    """P(signature rank = s | dim(im ∩ V_inf) = k, class group 2-rank = rho)."""
    _check_s(sig, s)
    if not 0 <= k <= sig.r1 // 2 or rho < 0:
        raise InadmissibleError(f"bad k={k} or rho={rho}")
    lo, hi = sigrank_bounds(sig, k, rho)
    if not lo <= s <= hi:
        raise OutsideSupportError(f"s={s} has probability zero for k={k}, rho={rho} (need {lo}..{hi})")
    r1, r2, u = sig.r1, sig.r2, sig.u
    num = _p2(rho + k + r2) * _p2(u) * _p2(r1 - k - 1) * _p2(rho)
    den = (_p2(rho + k - r1 + s) * _p2(r1 + r2 - s) * _p2(s - 1)
           * _p2(u + rho) * _p2(r1 - s - k))
    return _pow2((r1 + r2 - s) * (k - r1 + s)) * num / den


def _armitage_frohlich_floor(sig: Signature, s: int) -> int:
    return max(0, (sig.r1 + 1) // 2 - s)


def _sigrank_inner(sig: Signature, s: int, rho: int) -> Fraction:
    r1, r2, h = sig.r1, sig.r2, sig.half
    total = Fraction(0)
    for k in range(max(0, r1 - s - rho), min(r1 - s, h) + 1):
        total += _pow2(k * (r1 - s - k)) * _p2(r1 - 1 - k) * _p2(rho + k + r2) / (
            _p2(r1 - s - k) * _p4(h - k) * _p2(k) * _p2(k + r2) * _p2(rho + k - r1 + s)
        )
    return total


def sigrank_given_rho(sig: Signature, s: int, rho: int) -> Fraction:
    """P(signature rank = s | class group 2-rank = rho)."""
    _check_s(sig, s)
    if rho < 0:
        raise InadmissibleError(f"rho must be nonnegative, got {rho}")
    if rho < _armitage_frohlich_floor(sig, s):
        raise OutsideSupportError(
            f"signature rank {s} with 2-rank {rho} violates rho >= (r1+1)/2 - s"
        )
    r1, r2, u, h = sig.r1, sig.r2, sig.u, sig.half
    pre = (_pow2((r1 + r2 - s) * (s - r1)) * _p2(u) ** 2 * _p4(h) * _p4(h + r2) * _p2(rho)
           / (_p2(r1 + r2 - s) * _p2(s - 1) * _p2(u + rho) * _p4(u)))
    return pre * _sigrank_inner(sig, s, rho)


def _rho_cutoff(eps: Number, start: int) -> tuple[int, Fraction]:
    """
    Last rho to sum and the bound on the rest. Each summand is at most
    16 * 2^{-rho(rho+1)/2}, so the tail after R is at most 32 * 2^{-(R+1)(R+2)/2}.
    """
    eps = Fraction(eps)
    if eps <= 0:
        raise InadmissibleError("eps must be positive")
    R = start
    while Fraction(32) / _pow2((R + 1) * (R + 2) // 2) > eps / 4:
        R += 1
    return R, Fraction(32) / _pow2((R + 1) * (R + 2) // 2)


def _series(constant: TruncatedReal, rational_sum: Fraction, tail: Fraction) -> TruncatedReal:
    body = constant.scale(rational_sum)
    return TruncatedReal(body.value, body.err + _mpf(tail))


def sigrank(sig: Signature, s: int, eps: Number = DEFAULT_EPS) -> TruncatedReal:
    """Predicted probability that the units have signature rank s."""
    _check_s(sig, s)
    r1, r2, u, h = sig.r1, sig.r2, sig.u, sig.half
    start = _armitage_frohlich_floor(sig, s)
    R, tail = _rho_cutoff(eps, start)
    total = Fraction(0)
    for rho in range(start, R + 1):
        total += _sigrank_inner(sig, s, rho) / (
            _pow2(rho * u + rho * (rho + 1) // 2) * _p2(u + rho)
        )
    pre = (_pow2((r1 + r2 - s) * (s - r1)) * _p2(u) * _p4(h) * _p4(h + r2)
           / (_p2(r1 + r2 - s) * _p2(s - 1)))
    logger.debug("sigrank %s s=%d summed rho %d..%d", sig, s, start, R)
    return _series(malle_constant(eps), pre * total, tail)


def _split_inner(sig: Signature, rho: int) -> Fraction:
    r2, h = sig.r2, sig.half
    return sum(
        (_p2(rho + k + r2) / (_pow2(k * (k + r2)) * _p2(k + r2) ** 2 * _p2(k) * _p4(h - k))
         for k in range(sig.r1 // 2 + 1)),
        Fraction(0),
    )


def split_prob_given_rho(sig: Signature, rho: int) -> Fraction:
    """P(class group is a direct summand of the narrow class group | 2-rank rho)."""
    if rho < 0:
        raise InadmissibleError(f"rho must be nonnegative, got {rho}")
    u, h, r2 = sig.u, sig.half, sig.r2
    pre = _p2(u) ** 2 * _p4(h) * _p4(h + r2) / (_p4(u) * _p2(u + rho))
    return pre * _split_inner(sig, rho)


def split_prob(sig: Signature, eps: Number = DEFAULT_EPS) -> TruncatedReal:
    """P(class group is a direct summand of the narrow class group)."""
    u, h, r2 = sig.u, sig.half, sig.r2
    R, tail = _rho_cutoff(eps, 0)
    total = Fraction(0)
    for rho in range(R + 1):
        total += _split_inner(sig, rho) / (
            _pow2(rho * u + rho * (rho + 1) // 2) * _p2(u + rho) * _p2(rho)
        )
    pre = _p2(u) * _p4(h) * _p4(h + r2)
    return _series(malle_constant(eps), pre * total, tail)


def eta_partial_mass(sig: Signature, upto: int, eps: Number = DEFAULT_EPS) -> TruncatedReal:
    """sum_{rho <= upto} eta(rho)."""
    return malle_constant(eps).scale(
        sum((eta_rational(sig, rho) for rho in range(upto + 1)), Fraction(0))
    )


# Tables

Cell = Union[Fraction, TruncatedReal, None]


@dataclass
class TableRow:
    sig: Signature
    cells: list = field(default_factory=list)


TABLES = ("k", "rho-plus", "sigrank", "split")
RHO_PLUS_COLUMNS = 3
MOMENT_COLUMNS = 4


def table_k(sig: Signature, eps: Number = DEFAULT_EPS) -> TableRow:
    return TableRow(sig, k_distribution(sig))


def table_moments(sig: Signature, eps: Number = DEFAULT_EPS) -> TableRow:
    return TableRow(sig, [moment(sig, t) for t in range(1, MOMENT_COLUMNS + 1)])


def table_eta_plus(sig: Signature, eps: Number = DEFAULT_EPS) -> TableRow:
    cells: list[Cell] = [eta_plus(sig, rho, eps) for rho in range(RHO_PLUS_COLUMNS)]
    return TableRow(sig, cells + table_moments(sig).cells)


def table_sigrank(sig: Signature, eps: Number = DEFAULT_EPS) -> TableRow:
    if sig.r1 == 1:
        return TableRow(sig, [Fraction(1)])
    return TableRow(sig, [sigrank(sig, s, eps) for s in range(1, sig.r1 + 1)])


def table_split(sig: Signature, eps: Number = DEFAULT_EPS) -> TableRow:
    if sig.r1 == 1:
        return TableRow(sig, [Fraction(1)])
    return TableRow(sig, [split_prob(sig, eps)])


_BUILDERS = {
    "k": table_k,
    "rho-plus": table_eta_plus,
    "sigrank": table_sigrank,
    "split": table_split,
}


def _build_row(which: str, sig: Signature, eps: Fraction) -> TableRow:
    return _BUILDERS[which](sig, eps)


def build_table(
    which: str,
    sigs: Optional[Sequence[Signature]] = None,
    eps: Number = DEFAULT_EPS,
    threads: int = 1,
) -> list[TableRow]:
    if which not in _BUILDERS:
        raise InadmissibleError(f"unknown table {which!r}; expected one of {', '.join(TABLES)}")
    sigs = list(sigs or STANDARD_SIGNATURES)
    eps = Fraction(eps)
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(_build_row, [which] * len(sigs), sigs, [eps] * len(sigs)))
    return [_build_row(which, sig, eps) for sig in sigs]


# Identity checks


@dataclass(frozen=True)
class IdentityResult:
    name: str
    ok: bool
    detail: str = ""


def wz_identities(qs: Sequence[int] = (2, 4), max_m: int = 8, max_r2: int = 4) -> list[IdentityResult]:
    out = []
    for q in qs:
        for m in range(max_m + 1):
            for r2 in range(max_r2 + 1):
                triple, ok = pksum_wz_check(q, m, r2)
                out.append(IdentityResult(f"wz q={q} m={m} r2={r2}", ok, f"sum = {triple.lhs}"))
    return out


def subspace_counts(m: int, r: int, t: int) -> dict[int, int]:
    """
    Exhaustive counts of dim(E ∩ Y) over t-dimensional E through e = bit 0,
    with Y spanned by bits 1..r.
    """
    Y = Subspace.span([1 << i for i in range(1, r + 1)], m)
    counts: dict[int, int] = {}
    for E in enumerate_subspaces(m, t):
        if E.contains(1):
            s_prime = E.meet(Y).dim
            counts[s_prime] = counts.get(s_prime, 0) + 1
    return counts


def subspace_count_identities(max_m: int = 5) -> list[IdentityResult]:
    """random_subspace_prob against exhaustive enumeration over F2."""
    out = []
    for m in range(1, max_m + 1):
        for r in range(m):
            for t in range(1, m + 1):
                counts = subspace_counts(m, r, t)
                total = sum(counts.values())
                lo, hi = max(0, r + t - m), min(r, t - 1)
                predicted = {s: random_subspace_prob(2, m, r, t, s) * total for s in range(lo, hi + 1)}
                ok = all(counts.get(s, 0) == p for s, p in predicted.items()) and set(counts) <= set(predicted)
                out.append(IdentityResult(f"subspaces m={m} r={r} t={t}", ok, f"counts {counts}"))
    return out


def moment_identities(sigs: Sequence[Signature] = STANDARD_SIGNATURES, max_t: int = 4,
                      upto: int = 40) -> list[IdentityResult]:
    """Closed-form moments against the truncated series over rho and rho+."""
    constant = malle_constant()
    out = []
    for sig in sigs:
        for t in range(1, max_t + 1):
            series = [
                ("rho", malle_moment(sig, t),
                 sum((_pow2(t * rho) * eta_rational(sig, rho) for rho in range(upto + 1)), Fraction(0))),
                ("rho+", moment(sig, t),
                 sum((_pow2(t * rp) * eta_plus_rational(sig, rp) for rp in range(upto + 1)), Fraction(0))),
            ]
            for which, exact, partial in series:
                approx = constant.scale(partial)
                ok = abs(float(approx) - float(exact)) <= float(approx.err) + 1e-12 * float(exact)
                out.append(IdentityResult(f"moment {which} {sig} t={t}", ok, f"{exact} vs {approx}"))
    return out


def normalization_identities(sigs: Sequence[Signature] = STANDARD_SIGNATURES,
                             max_rho: int = 3) -> list[IdentityResult]:
    out = []
    for sig in sigs:
        total_k = sum(k_distribution(sig), Fraction(0))
        out.append(IdentityResult(f"sum p(k) {sig}", total_k == 1, str(total_k)))
        mass = eta_partial_mass(sig, 40)
        out.append(IdentityResult(f"sum eta {sig}", abs(float(mass) - 1) <= float(mass.err) + 1e-12, str(mass)))
        same = all(eta_plus_rational(sig, rp) == eta_plus_displayed_rational(sig, rp) for rp in range(6))
        out.append(IdentityResult(f"eta+ forms agree {sig}", same))
        for rho in range(max_rho + 1):
            given = sum(
                (sigrank_given_rho(sig, s, rho) for s in range(1, sig.r1 + 1)
                 if rho >= _armitage_frohlich_floor(sig, s)),
                Fraction(0),
            )
            out.append(IdentityResult(f"sum P(s | rho={rho}) {sig}", given == 1, str(given)))
            for k in range(sig.r1 // 2 + 1):
                lo, hi = sigrank_bounds(sig, k, rho)
                cond = sum((cond_sigrank(sig, s, k, rho) for s in range(lo, hi + 1)), Fraction(0))
                out.append(IdentityResult(f"sum P(s | k={k}, rho={rho}) {sig}", cond == 1, str(cond)))
        if sig.r1 > 1:
            ranks = [sigrank(sig, s) for s in range(1, sig.r1 + 1)]
            total = sum(ranks[1:], ranks[0])
            out.append(IdentityResult(f"sum P(s) {sig}", total.contains(1), str(total)))
    return out
