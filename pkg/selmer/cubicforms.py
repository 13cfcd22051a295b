"""
Integral binary cubic forms f = ax^3 + bx^2y + cxy^2 + dy^3.

GL2(Z) acts with a determinant twist, f -> det(M)^-1 f((x, y) M), which
preserves the discriminant and moves the Hessian Px^2 + Qxy + Ry^2 as a
quadratic form. Reduced forms are unique class representatives, and the
reduced, irreducible, maximal ones with positive discriminant are in
bijection with totally real cubic fields.
"""

import logging
from dataclasses import dataclass
from itertools import product
from math import gcd, isqrt
from typing import Iterator, Optional

import numpy as np
from sympy import Poly, Symbol, divisors, factorint, isprime, resultant

from .errors import CheckFailedError, InadmissibleError, RealFormsOnlyError, ResourceLimitError

logger = logging.getLogger(__name__)

MAX_SCAN_DISC = 10 ** 6

Matrix = tuple[int, int, int, int]


@dataclass(frozen=True)
class Hessian:
    P: int
    Q: int
    R: int

    def evaluate(self, x: int, y: int) -> int:
        return self.P * x * x + self.Q * x * y + self.R * y * y

    @property
    def is_reduced(self) -> bool:
        return abs(self.Q) <= self.P <= self.R


@dataclass(frozen=True, order=True)
class CubicForm:
    a: int
    b: int
    c: int
    d: int

    @property
    def coefficients(self) -> tuple[int, int, int, int]:
        return self.a, self.b, self.c, self.d

    @property
    def disc(self) -> int:
        a, b, c, d = self.coefficients
        return b * b * c * c - 4 * a * c ** 3 - 4 * b ** 3 * d - 27 * a * a * d * d + 18 * a * b * c * d

    @property
    def hessian(self) -> Hessian:
        a, b, c, d = self.coefficients
        h = Hessian(b * b - 3 * a * c, b * c - 9 * a * d, c * c - 3 * b * d)
        if h.Q * h.Q - 4 * h.P * h.R != -3 * self.disc:
            raise CheckFailedError(f"Hessian identity fails for {self}")
        return h

    @property
    def content(self) -> int:
        return gcd(gcd(self.a, self.b), gcd(self.c, self.d))

    @property
    def is_zero(self) -> bool:
        return not any(self.coefficients)

    def evaluate(self, x: int, y: int) -> int:
        return self.a * x ** 3 + self.b * x * x * y + self.c * x * y * y + self.d * y ** 3

    def transform(self, alpha: int, beta: int, gamma: int, delta: int) -> "CubicForm":
        """det^-1 f(alpha x + beta y, gamma x + delta y) for a unimodular matrix."""
        det = alpha * delta - beta * gamma
        if det not in (1, -1):
            raise InadmissibleError(f"matrix has determinant {det}, expected ±1")
        a, b, c, d = self.coefficients
        x3 = self.evaluate(alpha, gamma)
        y3 = self.evaluate(beta, delta)
        x2y = (3 * a * alpha * alpha * beta
               + b * (alpha * alpha * delta + 2 * alpha * beta * gamma)
               + c * (beta * gamma * gamma + 2 * alpha * gamma * delta)
               + 3 * d * gamma * gamma * delta)
        xy2 = (3 * a * alpha * beta * beta
               + b * (2 * alpha * beta * delta + beta * beta * gamma)
               + c * (alpha * delta * delta + 2 * beta * gamma * delta)
               + 3 * d * gamma * delta * delta)
        return CubicForm(det * x3, det * x2y, det * xy2, det * y3)

    def apply(self, m: Matrix) -> "CubicForm":
        return self.transform(*m)

    def __str__(self) -> str:
        return f"({self.a},{self.b},{self.c},{self.d})"


def disc_cubic(f: CubicForm) -> int:
    return f.disc


def hessian(f: CubicForm) -> Hessian:
    return f.hessian


def poly_disc(coeffs: list[int]) -> int:
    """Discriminant of a_n x^n + ... + a_0 (coefficients from the leading one down)."""
    if not coeffs or coeffs[0] == 0:
        raise InadmissibleError("leading coefficient must be nonzero")
    x = Symbol("x")
    f = Poly([int(c) for c in coeffs], x)
    n = f.degree()
    if n < 1:
        raise InadmissibleError("polynomial must have positive degree")
    res = resultant(f.as_expr(), f.diff(x).as_expr(), x)
    sign = -1 if (n * (n - 1) // 2) % 2 else 1
    value, rem = divmod(int(sign * res), int(coeffs[0]))
    if rem:
        raise CheckFailedError("resultant is not divisible by the leading coefficient")
    return value


def _require_real(f: CubicForm) -> None:
    if f.disc <= 0:
        raise RealFormsOnlyError(f"{f} has discriminant {f.disc} <= 0; real forms only")


def is_reduced(f: CubicForm) -> bool:
    _require_real(f)
    a, b, c, d = f.coefficients
    h = f.hessian
    P, Q, R = h.P, h.Q, h.R
    if not h.is_reduced:
        return False
    return (
        (b > 0 or d < 0)
        and (Q != 0 or d < 0)
        and (P != Q or b < abs(3 * a - b))
        and (P != R or (a <= abs(d) and (a != abs(d) or b < abs(c))))
    )


SWAP: Matrix = (0, 1, 1, 0)


def _translate(n: int) -> Matrix:
    return 1, n, 0, 1


def hessian_reduce(f: CubicForm) -> CubicForm:
    """Gauss reduction of the positive-definite Hessian, carried along on f."""
    _require_real(f)
    while True:
        h = f.hessian
        if abs(h.Q) > h.P:
            f = f.apply(_translate((h.P - h.Q) // (2 * h.P)))
        elif h.P > h.R:
            f = f.apply(SWAP)
        else:
            return f


# unimodular matrices with entries in {-1, 0, 1}; they relate any two
# Hessian-reduced forms in one class
_BOUNDARY = [
    m for m in product((-1, 0, 1), repeat=4) if m[0] * m[3] - m[1] * m[2] in (1, -1)
]


def _preference(f: CubicForm) -> tuple:
    # a > 0 first, then b >= 0, then the least coefficients
    return f.a <= 0, f.b < 0, f.coefficients


def reduce(f: CubicForm) -> CubicForm:
    """
    The reduced representative of the class of a real form.

    f and -f can both pass the reducedness conditions, and a few classes
    have two reduced forms with a > 0, e.g. (3,-2,-12,-1) and (3,2,-12,1).
    The representative is the one with a > 0, then b >= 0, then the least.
    """
    g = hessian_reduce(f)
    candidates = {h for h in (g.apply(m) for m in _BOUNDARY) if is_reduced(h)}
    if not candidates:
        raise CheckFailedError(f"no reduced form found in the class of {f}")
    if len(candidates) > 1:
        logger.debug("class of %s has %d reduced forms", f, len(candidates))
    return min(candidates, key=_preference)


def is_irreducible(f: CubicForm) -> bool:
    """No linear factor over Q, by the rational root test."""
    if f.is_zero:
        raise InadmissibleError("the zero form has no factorization")
    a, b, c, d = f.coefficients
    if a == 0 or d == 0:
        return False
    for p in divisors(abs(d)):
        for q in divisors(abs(a)):
            if gcd(p, q) != 1:
                continue
            if f.evaluate(p, q) == 0 or f.evaluate(-p, q) == 0:
                return False
    return True


def _projective_points(p: int) -> Iterator[tuple[int, int]]:
    for u in range(p):
        yield u, 1
    yield 1, 0


def is_maximal_at(f: CubicForm, p: int) -> bool:
    """
    False iff p divides f, or f has a multiple root (u:v) mod p with
    f(u, v) ≡ 0 mod p^2. At a multiple root the gradient vanishes mod p, so
    f(u, v) mod p^2 does not depend on the lift.
    """
    if not isprime(p):
        raise InadmissibleError(f"{p} is not prime")
    if f.content % p == 0:
        return False
    a, b, c, d = f.coefficients
    for u, v in _projective_points(p):
        if f.evaluate(u, v) % p:
            continue
        fx = 3 * a * u * u + 2 * b * u * v + c * v * v
        fy = b * u * u + 2 * c * u * v + 3 * d * v * v
        if fx % p == 0 and fy % p == 0 and f.evaluate(u, v) % (p * p) == 0:
            return False
    return True


def is_maximal(f: CubicForm) -> bool:
    disc = f.disc
    if disc == 0:
        raise InadmissibleError(f"{f} has zero discriminant")
    for p, e in factorint(abs(disc)).items():
        if e >= 2 and not is_maximal_at(f, p):
            return False
    return True


@dataclass(frozen=True)
class FormClassRecord:
    """A reduced form standing for one cubic ring."""
    reduced_form: CubicForm
    disc: int
    maximal: bool
    irreducible: bool

    @property
    def real(self) -> bool:
        return self.disc > 0

    def as_row(self) -> tuple:
        f = self.reduced_form
        return f.a, f.b, f.c, f.d, self.disc, int(self.maximal), int(self.irreducible)


CSV_HEADER = ("a", "b", "c", "d", "disc", "maximal", "irreducible")


def classify_form(f: CubicForm) -> Optional[FormClassRecord]:
    """
    A record iff f is real, irreducible, maximal and the representative
    reduce() picks for its class.
    """
    if f.is_zero or f.disc <= 0:
        return None
    if not is_reduced(f) or not is_irreducible(f) or not is_maximal(f):
        return None
    if reduce(f) != f:
        return None
    return FormClassRecord(f, f.disc, True, True)


def sample_form(X: int, rng: np.random.Generator) -> Optional[FormClassRecord]:
    """One draw with a, b uniform in [0, X] and c, d uniform in [-X, X]."""
    if X < 1:
        raise InadmissibleError(f"height bound must be >= 1, got {X}")
    a, b = (int(v) for v in rng.integers(0, X + 1, size=2))
    c, d = (int(v) for v in rng.integers(-X, X + 1, size=2))
    return classify_form(CubicForm(a, b, c, d))


def sample_forms(X: int, trials: int, rng: np.random.Generator) -> list[FormClassRecord]:
    accepted = [r for r in (sample_form(X, rng) for _ in range(trials)) if r is not None]
    logger.info("sampled %d forms at height %d, accepted %d", trials, X, len(accepted))
    return accepted


def _d_range(a: int, bc: int, P: int) -> range:
    """Integers d with |bc - 9ad| <= P."""
    lo_num, hi_num = bc - P, bc + P
    if a < 0:
        lo_num, hi_num = -hi_num, -lo_num
        a = -a
    return range(-((-lo_num) // (9 * a)), hi_num // (9 * a) + 1)


def scan(D: int) -> list[FormClassRecord]:
    """
    Every reduced, irreducible, maximal form with 0 < disc <= D, once per class.

    For Hessian-reduced forms P^2 <= disc, the syzygy 4H^3 = G^2 + 27 disc f^2
    at (1, 0) gives 729 a^4 <= 16 disc, and shifting to the depressed form
    gives |b| <= 3|a|/2 + sqrt(P). c and d then follow from P and |Q| <= P.
    """
    if D > MAX_SCAN_DISC:
        raise ResourceLimitError(f"scan limited to D <= {MAX_SCAN_DISC}, got {D}")
    if D < 1:
        return []
    p_max = isqrt(D)
    a_max = 0
    while 729 * (a_max + 1) ** 4 <= 16 * D:
        a_max += 1
    b_extra = isqrt(p_max) + 1
    records = {}
    for a in range(-a_max, a_max + 1):
        if a == 0:
            continue
        b_max = (3 * abs(a) + 1) // 2 + b_extra
        for b in range(-b_max, b_max + 1):
            for P in range(1, p_max + 1):
                num = b * b - P
                if num % (3 * a):
                    continue
                c = num // (3 * a)
                for d in _d_range(a, b * c, P):
                    f = CubicForm(a, b, c, d)
                    if not 0 < f.disc <= D:
                        continue
                    record = classify_form(f)
                    if record is not None:
                        records[f] = record
    result = sorted(records.values(), key=lambda r: (r.disc, r.reduced_form.coefficients))
    logger.info("scan up to %d: %d forms", D, len(result))
    return result


_GENERATORS: list[Matrix] = [SWAP, (1, 1, 0, 1), (1, -1, 0, 1), (-1, 0, 0, 1)]


def matmul(m: Matrix, n: Matrix) -> Matrix:
    a, b, c, d = m
    e, f, g, h = n
    return a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h


def random_unimodular(rng: np.random.Generator, word_length: int = 8) -> Matrix:
    """Product of word_length random generators of GL2(Z)."""
    m: Matrix = (1, 0, 0, 1)
    for i in rng.integers(0, len(_GENERATORS), size=word_length):
        m = matmul(m, _GENERATORS[int(i)])
    return m
