"""
Nondegenerate symmetric bilinear spaces over F2.

A space is given by its Gram matrix. Classification puts it into one of
three isometry types (alternating, nonalternating of odd dimension,
nonalternating of even dimension), finds an orthonormal or hyperbolic basis
and the canonical vector, and builds the standard basis

    e_1, f_1, ..., e_m, f_m  followed by the D block

where D is empty (alternating), <vcan> (odd) or <vcan, v_n> (even).

Isometry-group orders are parametric in q = 2^e; all concrete linear algebra
happens over F2.
"""

import logging
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, Optional, Sequence

import numpy as np

from .errors import (
    CheckFailedError,
    DegenerateFormError,
    DimensionMismatchError,
    InadmissibleError,
    WittPreconditionError,
)
from .f2linalg import (
    BitMatrix,
    Subspace,
    annihilator,
    block_diagonal,
    inverse,
    low_bit,
    parity,
    random_independent_rows,
    random_subspace,
    random_vector,
    rank_of,
    solve_left,
)

logger = logging.getLogger(__name__)


class SpaceType(str, Enum):
    ALTERNATING = "alt"
    NONALT_ODD = "nonalt-odd"
    NONALT_EVEN = "nonalt-even"

    @property
    def is_alternating(self) -> bool:
        return self is SpaceType.ALTERNATING

    def admits(self, n: int) -> bool:
        """Whether a nondegenerate space of this type exists in dimension n."""
        if self is SpaceType.NONALT_ODD:
            return n >= 1 and n % 2 == 1
        return n >= 2 and n % 2 == 0


def form_value(gram: BitMatrix, u: int, v: int) -> int:
    """b(u, v) = u·G·v^T."""
    return parity(gram.apply(u) & v)


def restricted_gram(gram: BitMatrix, rows: Sequence[int]) -> BitMatrix:
    out = []
    for u in rows:
        gu = gram.apply(u)
        out.append(sum(parity(gu & v) << j for j, v in enumerate(rows)))
    return BitMatrix.from_rows(out, len(rows))


def orthogonal_of(gram: BitMatrix, rows: Sequence[int]) -> Subspace:
    """{v : b(v, r) = 0 for every r in rows}."""
    return annihilator((gram.apply(r) for r in rows), gram.nrows)


@dataclass(frozen=True)
class SymSpace:
    """
    Nondegenerate symmetric bilinear space over F2.

    Attributes:
        n: Dimension
        gram: Symmetric invertible n × n Gram matrix
        type: Isometry type
        std_basis: Standard basis as rows (hyperbolic pairs, then the D block)
        vcan: Canonical vector, present iff the form is nonalternating
        orthonormal: Orthonormal basis found by classification (nonalternating only)
    """
    n: int
    gram: BitMatrix
    type: SpaceType
    std_basis: BitMatrix
    vcan: Optional[int] = None
    orthonormal: Optional[BitMatrix] = None

    def __post_init__(self) -> None:
        if self.gram.nrows != self.n or self.gram.ncols != self.n:
            raise DimensionMismatchError(f"gram must be {self.n}x{self.n}")
        if not self.gram.is_symmetric():
            raise DegenerateFormError("gram matrix is not symmetric")
        if rank_of(self.gram.rows) != self.n:
            raise DegenerateFormError("gram matrix is singular over F2")
        diagonal = self.gram.diagonal()
        if (diagonal == 0) != self.type.is_alternating:
            raise InadmissibleError(f"gram diagonal does not match type {self.type.value}")
        if not self.type.admits(self.n):
            raise InadmissibleError(f"type {self.type.value} impossible in dimension {self.n}")
        if (self.vcan is None) != self.type.is_alternating:
            raise InadmissibleError("vcan is present exactly for nonalternating spaces")
        if self.vcan is not None and self.gram.apply(self.vcan) != diagonal:
            raise InadmissibleError("vcan does not represent v -> b(v, v)")

    @classmethod
    def standard(cls, space_type: SpaceType, n: int) -> "SymSpace":
        """Identity Gram for nonalternating types, hyperbolic blocks for alternating."""
        if not space_type.admits(n):
            raise InadmissibleError(f"type {space_type.value} impossible in dimension {n}")
        if space_type.is_alternating:
            rows = [1 << (i ^ 1) for i in range(n)]
            return classify(BitMatrix.from_rows(rows, n))
        return classify(BitMatrix.identity(n))

    @property
    def m(self) -> int:
        return self.n // 2

    def b(self, u: int, v: int) -> int:
        return form_value(self.gram, u, v)

    def norm(self, v: int) -> int:
        """b(v, v); linear in v over F2."""
        return parity(self.gram.diagonal() & v)

    def std_vectors(self) -> list[int]:
        return list(self.std_basis.rows)

    def _check(self, sub: Subspace) -> None:
        if sub.ambient_dim != self.n:
            raise DimensionMismatchError(f"subspace lives in F2^{sub.ambient_dim}, space is F2^{self.n}")

    def alternating_subspace(self) -> Subspace:
        """Kernel of the diagonal functional v -> b(v, v)."""
        return annihilator([self.gram.diagonal()], self.n)

    def orth_complement(self, sub: Subspace) -> Subspace:
        self._check(sub)
        return orthogonal_of(self.gram, sub.rows)

    def radical(self, sub: Subspace) -> Subspace:
        return sub.meet(self.orth_complement(sub))

    def is_totally_isotropic(self, sub: Subspace) -> bool:
        self._check(sub)
        return not any(restricted_gram(self.gram, sub.rows).rows)

    def is_isometry(self, m: BitMatrix) -> bool:
        if m.nrows != self.n or m.ncols != self.n:
            raise DimensionMismatchError(f"matrix must be {self.n}x{self.n}")
        if rank_of(m.rows) != self.n:
            return False
        return m @ self.gram @ m.transpose() == self.gram


def _smallest(sub: Subspace, predicate) -> int:
    best = None
    for v in sub.vectors():
        if predicate(v) and (best is None or v < best):
            best = v
    if best is None:
        raise CheckFailedError("no qualifying vector")
    return best


def hyperbolic_pairs(gram: BitMatrix, space: Subspace) -> list[tuple[int, int]]:
    """
    Hyperbolic basis of a subspace on which the form is alternating and
    nondegenerate: take the smallest nonzero x, the smallest y with b(x, y) = 1,
    and recurse into the orthogonal complement of <x, y>.
    """
    pairs = []
    rest = space
    while rest.dim:
        x = _smallest(rest, lambda v: v != 0)
        y = _smallest(rest, lambda v: form_value(gram, x, v) == 1)
        pairs.append((x, y))
        rest = rest.meet(orthogonal_of(gram, [x, y]))
    return pairs


def orthonormal_basis(gram: BitMatrix) -> list[int]:
    """
    Orthonormal basis of a nonalternating space.

    At each step the remaining space R is nondegenerate and nonalternating;
    pick the smallest length-1 vector outside the orthogonal of R_alt inside R
    and split it off.
    """
    n = gram.nrows
    diagonal = gram.diagonal()
    rest = Subspace.full(n)
    found = []
    while rest.dim:
        if rest.dim == 1:
            v = rest.rows[0]
        else:
            rest_alt = rest.meet(annihilator([diagonal], n))
            centre = rest.meet(orthogonal_of(gram, rest_alt.rows))
            v = _smallest(
                rest,
                lambda w: parity(diagonal & w) == 1 and not centre.contains(w),
            )
        if not parity(diagonal & v):
            raise DegenerateFormError("remaining space became alternating")
        found.append(v)
        rest = rest.meet(orthogonal_of(gram, [v]))
    return found


def standard_from_orthonormal(onb: Sequence[int]) -> list[int]:
    """e_i = v_{2i-1} + v_{2i}, f_i = tail sums, then the D block."""
    n = len(onb)
    vcan = 0
    for v in onb:
        vcan ^= v
    out = []
    if n % 2:
        npairs, tail_end = (n - 1) // 2, n
    else:
        npairs, tail_end = n // 2 - 1, n - 1
    for i in range(npairs):
        e = onb[2 * i] ^ onb[2 * i + 1]
        f = 0
        for v in onb[2 * i + 1:tail_end]:
            f ^= v
        out.extend((e, f))
    out.append(vcan)
    if n % 2 == 0:
        out.append(onb[n - 1])
    return out


def classify(gram: BitMatrix) -> SymSpace:
    """Determine the isometry type and standard basis of a Gram matrix."""
    n = gram.nrows
    if gram.ncols != n:
        raise DimensionMismatchError("gram matrix must be square")
    if not gram.is_symmetric():
        raise DegenerateFormError("gram matrix is not symmetric")
    if rank_of(gram.rows) != n:
        raise DegenerateFormError("gram matrix is singular over F2")
    if n == 0:
        raise InadmissibleError("zero-dimensional space")

    if gram.diagonal() == 0:
        pairs = hyperbolic_pairs(gram, Subspace.full(n))
        rows = [v for pair in pairs for v in pair]
        return SymSpace(n, gram, SpaceType.ALTERNATING, BitMatrix.from_rows(rows, n))

    onb = orthonormal_basis(gram)
    vcan = 0
    for v in onb:
        vcan ^= v
    space_type = SpaceType.NONALT_ODD if n % 2 else SpaceType.NONALT_EVEN
    return SymSpace(
        n,
        gram,
        space_type,
        BitMatrix.from_rows(standard_from_orthonormal(onb), n),
        vcan,
        BitMatrix.from_rows(onb, n),
    )


# Isometry orders


def _check_q(q: int) -> None:
    if q < 2 or q & (q - 1):
        raise InadmissibleError(f"q must be a power of 2, got {q}")


def _prod(q: int, upto: int, step: int = 1) -> int:
    """prod_{i=1}^{upto} (q^{step*i} - 1)."""
    out = 1
    for i in range(1, upto + 1):
        out *= q ** (step * i) - 1
    return out


def max_isotropic_dim(space_type: SpaceType, n: int, contains_vcan: bool) -> tuple[int, int]:
    """Admissible range (lo, hi) of k for totally isotropic U of the given kind."""
    if not space_type.admits(n):
        raise InadmissibleError(f"type {space_type.value} impossible in dimension {n}")
    if space_type is SpaceType.NONALT_EVEN:
        return (1, n // 2) if contains_vcan else (0, n // 2 - 1)
    if contains_vcan:
        raise InadmissibleError(f"{space_type.value} space has no isotropic canonical vector")
    return 0, n // 2


def aut_order(
    space_type: SpaceType,
    n: int,
    q: int = 2,
    iso: Optional[tuple[int, bool]] = None,
) -> int:
    """
    |Aut(V)|, or with iso = (k, contains_vcan) the order of the stabilizer of
    a totally isotropic subspace U of dimension k.
    """
    _check_q(q)
    if not space_type.admits(n):
        raise InadmissibleError(f"type {space_type.value} impossible in dimension {n}")
    m = n // 2
    if iso is None:
        if space_type is SpaceType.NONALT_EVEN:
            return q ** (m * m) * _prod(q, m - 1, 2)
        return q ** (m * m) * _prod(q, m, 2)

    k, contains_vcan = iso
    lo, hi = max_isotropic_dim(space_type, n, contains_vcan)
    if not lo <= k <= hi:
        raise InadmissibleError(
            f"k={k} inadmissible for {space_type.value} n={n} contains_vcan={contains_vcan}"
        )
    if space_type is not SpaceType.NONALT_EVEN:
        return q ** (m * m) * _prod(q, k) * _prod(q, m - k, 2)
    if contains_vcan:
        return q ** (m * m) * _prod(q, k - 1) * _prod(q, m - k, 2)
    return q ** (m * m - k) * _prod(q, k) * _prod(q, m - k - 1, 2)


# Isometry enumeration and random generation


def brute_isometries(space: SymSpace) -> Iterator[BitMatrix]:
    """All isometries of a small space, by backtracking over basis images."""
    n = space.n
    gram = space.gram
    targets = [[gram.entry(i, j) for j in range(n)] for i in range(n)]
    images: list[int] = []

    def extend(i: int) -> Iterator[BitMatrix]:
        if i == n:
            yield BitMatrix.from_rows(images, n)
            return
        for v in range(1, 1 << n):
            if form_value(gram, v, v) != targets[i][i]:
                continue
            if any(form_value(gram, v, images[j]) != targets[i][j] for j in range(i)):
                continue
            if rank_of(images + [v]) != i + 1:
                continue
            images.append(v)
            yield from extend(i + 1)
            images.pop()

    yield from extend(0)


def random_space(space_type: SpaceType, n: int, rng: np.random.Generator) -> SymSpace:
    """Standard space of the type, moved by a random change of basis."""
    base = SymSpace.standard(space_type, n)
    change = BitMatrix.from_rows(random_independent_rows(n, n, rng), n)
    return classify(change @ base.gram @ change.transpose())


def transvection(space: SymSpace, v: int) -> BitMatrix:
    """x -> x + b(x, v) v; an isometry when b(v, v) = 0."""
    gv = space.gram.apply(v)
    return BitMatrix.from_rows(
        ((1 << i) ^ (v if gv >> i & 1 else 0) for i in range(space.n)), space.n
    )


def random_isometry(space: SymSpace, rng: np.random.Generator, steps: Optional[int] = None) -> BitMatrix:
    """Product of random transvections by isotropic vectors."""
    steps = 2 * space.n + 2 if steps is None else steps
    result = BitMatrix.identity(space.n)
    for _ in range(steps):
        v = random_vector(space.n, rng)
        if v and not space.norm(v):
            result = result @ transvection(space, v)
    return result


# Witt extension


def _linear_map(src: Sequence[int], dst: Sequence[int]):
    """The linear map sending src[i] to dst[i], defined on the span of src."""
    def apply(v: int) -> int:
        y = solve_left(src, v)
        out = 0
        for k, d in enumerate(dst):
            if y >> k & 1:
                out ^= d
        return out
    return apply


def _solve_in(space: Subspace, functionals: Sequence[int], targets: Sequence[int]) -> int:
    """Some v in space with <f_i, v> = t_i for every i."""
    rows = [sum(parity(b & f) << i for i, f in enumerate(functionals)) for b in space.rows]
    target = sum(t << i for i, t in enumerate(targets))
    y = solve_left(rows, target)
    if y is None:
        raise CheckFailedError("linear system for a hyperbolic partner is inconsistent")
    v = 0
    for k, b in enumerate(space.rows):
        if y >> k & 1:
            v ^= b
    return v


def _complete_basis(
    gram: BitMatrix,
    space: Subspace,
    pairs: Sequence[tuple[int, int]],
    radical: Sequence[int],
) -> list[int]:
    """
    Extend hyperbolic pairs plus isotropic radical vectors r_j to a full
    hyperbolic basis of space: each r_j gets a partner s_j, the rest is the
    orthogonal complement split into pairs.
    """
    fixed = [v for pair in pairs for v in pair] + list(radical)
    partners: list[int] = []
    for j in range(len(radical)):
        constraints = fixed + partners
        targets = [0] * len(constraints)
        targets[2 * len(pairs) + j] = 1
        partners.append(_solve_in(space, [gram.apply(c) for c in constraints], targets))
    basis = [v for pair in pairs for v in pair]
    for r, s in zip(radical, partners):
        basis.extend((r, s))
    rest = space.meet(orthogonal_of(gram, basis))
    basis.extend(v for pair in hyperbolic_pairs(gram, rest) for v in pair)
    return basis


def _extend_alternating(
    gram: BitMatrix,
    space: Subspace,
    src: Sequence[int],
    dst: Sequence[int],
) -> tuple[list[int], list[int]]:
    """
    Matched hyperbolic bases of an alternating nondegenerate space, the first
    adapted to <src>, the second its image under src_i -> dst_i.
    """
    n = gram.nrows
    domain = Subspace.span(src, n)

    sigma = _linear_map(src, dst)

    rad = domain.meet(orthogonal_of(gram, domain.rows))
    nondeg = rad.complement_in(domain)
    pairs = hyperbolic_pairs(gram, nondeg)
    image_pairs = [(sigma(x), sigma(y)) for x, y in pairs]
    src_basis = _complete_basis(gram, space, pairs, list(rad.rows))
    dst_basis = _complete_basis(gram, space, image_pairs, [sigma(r) for r in rad.rows])
    return src_basis, dst_basis


def _independent_pairs(pairs: Sequence[tuple[int, int]]) -> tuple[list[int], list[int]]:
    src, dst = [], []
    for x, y in pairs:
        if rank_of(src + [x]) > len(src):
            src.append(x)
            dst.append(y)
    return src, dst


def _extend(space: SymSpace, src: list[int], dst: list[int]) -> BitMatrix:
    n = space.n
    image = Subspace.span(dst, n)
    domain = Subspace.span(src, n)

    sigma = _linear_map(src, dst)

    if space.vcan is not None:
        in_domain = domain.contains(space.vcan)
        if in_domain != image.contains(space.vcan):
            raise WittPreconditionError(
                "canonical-vector", "vcan lies in exactly one of W0 and its image"
            )
        if in_domain and sigma(space.vcan) != space.vcan:
            raise WittPreconditionError("canonical-vector", "sigma does not fix vcan")
    if image.dim != len(src) or domain.dim != len(src):
        raise WittPreconditionError("isometry", "sigma is not injective")
    if restricted_gram(space.gram, src) != restricted_gram(space.gram, dst):
        raise WittPreconditionError("isometry", "sigma does not preserve the form")

    if space.type is SpaceType.ALTERNATING:
        src_basis, dst_basis = _extend_alternating(space.gram, Subspace.full(n), src, dst)
    elif space.type is SpaceType.NONALT_ODD:
        vcan = space.vcan

        def project(v: int) -> int:
            return v ^ vcan if space.norm(v) else v

        alt_src, alt_dst = _independent_pairs(
            [(project(w), project(sigma(w))) for w in src]
        )
        src_basis, dst_basis = _extend_alternating(
            space.gram, space.alternating_subspace(), alt_src, alt_dst
        )
        src_basis.append(vcan)
        dst_basis.append(vcan)
    else:
        # embed into dimension n + 1 with a new length-1 vector fixed by sigma
        extra = 1 << n
        bigger = classify(block_diagonal(space.gram, BitMatrix.identity(1)))
        lifted = _extend(bigger, src + [extra], dst + [extra])
        restricted = lifted.submatrix(n, n)
        if any(r >> n for r in lifted.rows[:n]):
            raise CheckFailedError("lifted isometry does not preserve the original space")
        return restricted

    return inverse(BitMatrix.from_rows(src_basis, n)) @ BitMatrix.from_rows(dst_basis, n)


def witt_extend(space: SymSpace, domain: Subspace, sigma: BitMatrix) -> BitMatrix:
    """
    Extend sigma: W0 -> W0' to an isometry of the whole space.

    Args:
        space: The ambient space
        domain: W0
        sigma: Row i is the image of the i-th canonical basis row of W0

    Returns:
        n × n isometry M (row convention: v -> v·M) with M = sigma on W0.

    Raises:
        WittPreconditionError: sigma is not an isometry, or mishandles vcan.
    """
    if domain.ambient_dim != space.n:
        raise DimensionMismatchError("domain lives in a different space")
    if sigma.nrows != domain.dim or sigma.ncols != space.n:
        raise DimensionMismatchError(
            f"sigma must be {domain.dim}x{space.n}, got {sigma.nrows}x{sigma.ncols}"
        )
    result = _extend(space, list(domain.rows), list(sigma.rows))
    if not space.is_isometry(result):
        raise CheckFailedError("constructed map is not an isometry")
    if any(result.apply(w) != s for w, s in zip(domain.rows, sigma.rows)):
        raise CheckFailedError("constructed map does not restrict to sigma")
    logger.debug("extended isometry from dim %d in %s space of dim %d",
                  domain.dim, space.type.value, space.n)
    return result


# Self-test


@dataclass
class WittSelfTest:
    """
    Tally of random extension attempts.

    Attributes:
        trials: Instances generated
        extended: Valid instances extended and verified
        rejected: Invalid instances rejected with the right hypothesis
        failures: Descriptions of every wrong outcome
        by_type: Instances per space type
    """
    trials: int
    extended: int = 0
    rejected: int = 0
    failures: list[str] = field(default_factory=list)
    by_type: Counter = field(default_factory=Counter)

    @property
    def ok(self) -> bool:
        return not self.failures


# instances up to this dimension are also checked against all of Aut(V)
BRUTE_WITT_DIM = 4


def _graph(domain: Subspace, sigma: BitMatrix) -> list[tuple[int, int]]:
    """(w, sigma(w)) for every w in the domain, walked in Gray-code order."""
    rows, images = domain.rows, sigma.rows
    w = s = 0
    graph = [(w, s)]
    for i in range(1, 1 << len(rows)):
        j = low_bit(i)
        w ^= rows[j]
        s ^= images[j]
        graph.append((w, s))
    return graph


def expected_witt_failure(space: SymSpace, domain: Subspace, sigma: BitMatrix) -> Optional[str]:
    """
    The hypothesis an extension attempt must report as failing, or None,
    read off the full graph of sigma. The canonical-vector hypothesis is
    reported first when both fail.
    """
    graph = _graph(domain, sigma)
    vcan = space.vcan
    if vcan is not None:
        if domain.contains(vcan):
            if dict(graph)[vcan] != vcan:
                return "canonical-vector"
        elif any(s == vcan for _, s in graph):
            return "canonical-vector"
    if any(w and not s for w, s in graph):
        return "isometry"
    pairs = list(zip(domain.rows, sigma.rows))
    for w, s in graph:
        if any(space.b(w, r) != space.b(s, t) for r, t in pairs):
            return "isometry"
    return None


def extends_somewhere(space: SymSpace, domain: Subspace, sigma: BitMatrix) -> bool:
    """Whether some isometry of the whole space restricts to sigma, by exhaustion."""
    pairs = list(zip(domain.rows, sigma.rows))
    return any(
        all(g.apply(r) == t for r, t in pairs) for g in brute_isometries(space)
    )


def _moved_vcan(space: SymSpace, rng: np.random.Generator) -> Optional[int]:
    """A vector of the same length as vcan other than vcan, if one turns up."""
    for _ in range(32):
        w = random_vector(space.n, rng)
        if w and w != space.vcan and space.norm(w) == space.norm(space.vcan):
            return w
    return None


def witt_selftest(
    trials: int,
    rng: np.random.Generator,
    max_dim: int = 8,
    space_types: Optional[Sequence[SpaceType]] = None,
) -> WittSelfTest:
    """
    Random (V, W0, sigma) instances up to max_dim, in every type or only in
    space_types. A third restrict a random isometry, a third use random
    images and a third send vcan elsewhere; valid ones must extend exactly,
    invalid ones must be rejected naming the failed hypothesis. Up to
    BRUTE_WITT_DIM, validity is also compared with an exhaustive search
    over Aut(V).
    """
    if trials < 1 or max_dim < 1:
        raise InadmissibleError("trials and max_dim must be positive")
    types = list(SpaceType) if space_types is None else list(space_types)
    kinds = [(t, n) for n in range(1, max_dim + 1) for t in types if t.admits(n)]
    if not kinds:
        raise InadmissibleError(f"no space of the given types has dimension <= {max_dim}")
    report = WittSelfTest(trials)
    for i in range(trials):
        space_type, n = kinds[int(rng.integers(len(kinds)))]
        space = random_space(space_type, n, rng)
        report.by_type[space_type.value] += 1
        domain = random_subspace(n, int(rng.integers(0, n + 1)), rng)
        images = None
        if i % 3 == 2 and space.vcan is not None:
            w = _moved_vcan(space, rng)
            if w is not None:
                domain = Subspace.span([space.vcan], n)
                images = [w]
        if images is None and i % 3 == 0:
            g = random_isometry(space, rng)
            images = [g.apply(r) for r in domain.rows]
        if images is None:
            images = [random_vector(n, rng) for _ in domain.rows]
        sigma = BitMatrix.from_rows(images, n)
        expected = expected_witt_failure(space, domain, sigma)
        where = f"{space_type.value} n={n} dim W0={domain.dim}"
        if n <= BRUTE_WITT_DIM and extends_somewhere(space, domain, sigma) != (expected is None):
            report.failures.append(f"{where}: exhaustive search disagrees, expected {expected}")
            continue
        try:
            m = witt_extend(space, domain, sigma)
        except WittPreconditionError as e:
            if e.hypothesis == expected:
                report.rejected += 1
            else:
                report.failures.append(f"{where}: rejected on {e.hypothesis}, expected {expected}")
            continue
        except CheckFailedError as e:
            report.failures.append(f"{where}: {e}")
            continue
        if expected is not None:
            report.failures.append(f"{where}: extended although {expected} fails")
        elif not space.is_isometry(m) or any(m.apply(r) != s for r, s in zip(domain.rows, images)):
            report.failures.append(f"{where}: result is wrong")
        else:
            report.extended += 1
    logger.info("witt self-test: %d extended, %d rejected, %d failures",
                report.extended, report.rejected, len(report.failures))
    return report
