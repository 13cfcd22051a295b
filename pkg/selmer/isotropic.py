"""
Maximal totally isotropic subspaces of an orthogonal sum V = W ⊥ W'.

Every such S decomposes as U ⊥ {w + tau(w) : w in K} ⊥ U' where U = S ∩ W,
U' = S ∩ W', K is a complement of U in U^⊥ ∩ W and tau: K -> K' is an
isometry. The pair (dim U, whether wcan lies in U) on each side labels the
equivalence class of S under Aut(W) × Aut(W'); this module turns labels
into representatives, stabilizer and orbit sizes, and checks the mass
formula against a brute-force enumerator.
"""

import logging
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Optional, Sequence

from .errors import (
    CheckFailedError,
    DimensionMismatchError,
    InadmissibleError,
    NotIsotropicError,
    NotMaximalError,
    OppositeParityError,
    ResourceLimitError,
)
from .f2linalg import BitMatrix, Subspace, bits_to_str, block_diagonal, parity, solve_left
from .symspace import (
    SpaceType,
    SymSpace,
    aut_order,
    brute_isometries,
    classify,
    max_isotropic_dim,
    restricted_gram,
)

logger = logging.getLogger(__name__)

# brute-force enumeration is exponential in dim V
MAX_BRUTE_DIM = 12


@dataclass(frozen=True)
class OrthoSum:
    """
    V = W ⊥ W' with W on coordinates 0..n-1 and W' on n..n+n'-1.

    Attributes:
        W: First summand
        Wp: Second summand
        V: The sum, with block-diagonal Gram matrix
    """
    W: SymSpace
    Wp: SymSpace
    V: SymSpace

    @classmethod
    def of(cls, W: SymSpace, Wp: SymSpace) -> "OrthoSum":
        if (W.n - Wp.n) % 2:
            raise OppositeParityError(
                f"dimensions {W.n} and {Wp.n} have opposite parity"
            )
        return cls(W, Wp, classify(block_diagonal(W.gram, Wp.gram)))

    @classmethod
    def standard(cls, w_type: SpaceType, n: int, wp_type: SpaceType, np_: int) -> "OrthoSum":
        if (n - np_) % 2:
            raise OppositeParityError(f"dimensions {n} and {np_} have opposite parity")
        return cls.of(SymSpace.standard(w_type, n), SymSpace.standard(wp_type, np_))

    @property
    def n(self) -> int:
        return self.W.n

    @property
    def np(self) -> int:
        return self.Wp.n

    @property
    def N(self) -> int:
        return self.W.n + self.Wp.n

    def embed_W(self, v: int) -> int:
        return v

    def embed_Wp(self, v: int) -> int:
        return v << self.W.n

    def project_W(self, v: int) -> int:
        return v & ((1 << self.W.n) - 1)

    def project_Wp(self, v: int) -> int:
        return v >> self.W.n

    def W_part(self) -> Subspace:
        return Subspace.span((1 << i for i in range(self.n)), self.N)

    def Wp_part(self) -> Subspace:
        return Subspace.span((1 << (self.n + i) for i in range(self.np)), self.N)

    def format_row(self, v: int) -> str:
        return f"{bits_to_str(self.project_W(v), self.n)}|{bits_to_str(self.project_Wp(v), self.np)}"


def _side_flag_ok(space_type: SpaceType, flag: bool) -> bool:
    return flag is False or space_type is SpaceType.NONALT_EVEN


def _radical_in_U(space_type: SpaceType, flag: bool) -> bool:
    """rad(W_alt) ⊆ U; the radical is <wcan> for nonalternating even W, zero otherwise."""
    return flag if space_type is SpaceType.NONALT_EVEN else True


@dataclass(frozen=True, order=True)
class IsoClass:
    """
    Equivalence-class label of a maximal totally isotropic subspace.

    Attributes:
        w_type, n: Type and dimension of W
        wp_type, np: Type and dimension of W'
        k: dim(S ∩ W)
        wcan_in_U: wcan ∈ U (only meaningful for nonalternating even W)
        wcan_in_Up: wcan' ∈ U' (only meaningful for nonalternating even W')
    """
    w_type: SpaceType
    n: int
    wp_type: SpaceType
    np: int
    k: int
    wcan_in_U: bool = False
    wcan_in_Up: bool = False

    def __post_init__(self) -> None:
        if (self.n - self.np) % 2:
            raise OppositeParityError(f"dimensions {self.n} and {self.np} have opposite parity")
        for t, dim, flag in ((self.w_type, self.n, self.wcan_in_U),
                             (self.wp_type, self.np, self.wcan_in_Up)):
            if not t.admits(dim):
                raise InadmissibleError(f"type {t.value} impossible in dimension {dim}")
            if not _side_flag_ok(t, flag):
                raise InadmissibleError(f"wcan flag set on a {t.value} side")
        for t, dim, flag, kk in ((self.w_type, self.n, self.wcan_in_U, self.k),
                                 (self.wp_type, self.np, self.wcan_in_Up, self.kp)):
            lo, hi = max_isotropic_dim(t, dim, flag)
            if not lo <= kk <= hi:
                raise InadmissibleError(
                    f"isotropic dimension {kk} inadmissible for {t.value} n={dim} flag={flag}"
                )
        if _radical_in_U(self.w_type, self.wcan_in_U) != _radical_in_U(self.wp_type, self.wcan_in_Up):
            raise InadmissibleError("isotropy types of U and U' are not compatible")

    @property
    def kp(self) -> int:
        return self.k + (self.np - self.n) // 2

    @property
    def k_type(self) -> Optional[SpaceType]:
        """Type of the complement K (None when K = 0)."""
        if self.n - 2 * self.k == 0:
            return None
        if self.w_type is SpaceType.NONALT_EVEN:
            return SpaceType.ALTERNATING if self.wcan_in_U else SpaceType.NONALT_EVEN
        return self.w_type

    def swapped(self) -> "IsoClass":
        return IsoClass(self.wp_type, self.np, self.w_type, self.n,
                        self.kp, self.wcan_in_Up, self.wcan_in_U)

    def __str__(self) -> str:
        flags = []
        if self.w_type is SpaceType.NONALT_EVEN:
            flags.append("wcan in U" if self.wcan_in_U else "wcan not in U")
        if self.wp_type is SpaceType.NONALT_EVEN:
            flags.append("wcan' in U'" if self.wcan_in_Up else "wcan' not in U'")
        suffix = f" ({', '.join(flags)})" if flags else ""
        return f"k={self.k} k'={self.kp}{suffix}"


@dataclass(frozen=True)
class MaxIsotropic:
    """
    Maximal totally isotropic S of V with its structure data.

    U, K live in W coordinates; Up, Kp in W' coordinates; tau row i is the
    image of the i-th canonical basis row of K.
    """
    space: OrthoSum
    S: Subspace
    U: Subspace
    Up: Subspace
    K: Subspace
    Kp: Subspace
    tau: BitMatrix

    @property
    def k(self) -> int:
        return self.U.dim

    @property
    def kp(self) -> int:
        return self.Up.dim

    def assemble(self) -> Subspace:
        """U ⊥ {w + tau(w)} ⊥ U' as a subspace of V."""
        vs = self.space
        rows = [vs.embed_W(u) for u in self.U.rows]
        rows += [vs.embed_Wp(u) for u in self.Up.rows]
        rows += [vs.embed_W(w) | vs.embed_Wp(t) for w, t in zip(self.K.rows, self.tau.rows)]
        return Subspace.span(rows, vs.N)

    def format_rows(self) -> list[str]:
        return [self.space.format_row(r) for r in self.S.rows]


def decompose(vs: OrthoSum, S: Subspace) -> MaxIsotropic:
    """Structure decomposition of a maximal totally isotropic subspace."""
    if S.ambient_dim != vs.N:
        raise DimensionMismatchError(f"S lives in F2^{S.ambient_dim}, V is F2^{vs.N}")
    if not vs.V.is_totally_isotropic(S):
        raise NotIsotropicError("S is not totally isotropic")
    if 2 * S.dim != vs.N:
        raise NotMaximalError(f"dim S = {S.dim}, maximal is {vs.N // 2}")

    U = Subspace.span((vs.project_W(r) for r in S.meet(vs.W_part()).rows), vs.n)
    Up = Subspace.span((vs.project_Wp(r) for r in S.meet(vs.Wp_part()).rows), vs.np)
    if vs.n - vs.np != 2 * (U.dim - Up.dim):
        raise CheckFailedError("n - n' != 2(k - k')")

    K = U.complement_in(vs.W.orth_complement(U))
    Kp = Up.complement_in(vs.Wp.orth_complement(Up))
    glued = Subspace.span(
        [vs.embed_W(r) for r in K.rows] + [vs.embed_Wp(r) for r in Kp.rows], vs.N
    )
    diagonal = S.meet(glued)
    if not diagonal.dim == K.dim == Kp.dim:
        raise CheckFailedError("diagonal part has the wrong dimension")

    w_parts = [vs.project_W(r) for r in diagonal.rows]
    wp_parts = [vs.project_Wp(r) for r in diagonal.rows]
    tau_rows = []
    for x in K.rows:
        y = solve_left(w_parts, x)
        image = 0
        for i, t in enumerate(wp_parts):
            if y >> i & 1:
                image ^= t
        tau_rows.append(image)
    tau = BitMatrix.from_rows(tau_rows, vs.np)

    if restricted_gram(vs.W.gram, K.rows) != restricted_gram(vs.Wp.gram, tau.rows):
        raise CheckFailedError("tau does not preserve the restricted forms")
    result = MaxIsotropic(vs, S, U, Up, K, Kp, tau)
    # compatibility is checked by the label constructor
    label_of(result)
    if result.assemble() != S:
        raise CheckFailedError("reassembly does not reproduce S")
    return result


def label_of(mts: MaxIsotropic) -> IsoClass:
    vs = mts.space
    flag = vs.W.vcan is not None and vs.W.type is SpaceType.NONALT_EVEN and mts.U.contains(vs.W.vcan)
    flag_p = vs.Wp.vcan is not None and vs.Wp.type is SpaceType.NONALT_EVEN and mts.Up.contains(vs.Wp.vcan)
    return IsoClass(vs.W.type, vs.n, vs.Wp.type, vs.np, mts.k, flag, flag_p)


_FLAG_ORDER = ((True, True), (True, False), (False, True), (False, False))


def class_labels(w_type: SpaceType, n: int, wp_type: SpaceType, np_: int) -> list[IsoClass]:
    """All equivalence-class labels, ordered by k and then with wcan flags set first."""
    if (n - np_) % 2:
        raise OppositeParityError(f"dimensions {n} and {np_} have opposite parity")
    for t, dim in ((w_type, n), (wp_type, np_)):
        if not t.admits(dim):
            raise InadmissibleError(f"type {t.value} impossible in dimension {dim}")
    labels = []
    for k in range(n // 2 + 1):
        for flag, flag_p in _FLAG_ORDER:
            try:
                labels.append(IsoClass(w_type, n, wp_type, np_, k, flag, flag_p))
            except InadmissibleError:
                continue
    return labels


def _side(space: SymSpace, k: int, flag: bool) -> tuple[list[int], list[int]]:
    """U and a complement K read off the standard basis."""
    std = space.std_vectors()
    d_len = {SpaceType.ALTERNATING: 0, SpaceType.NONALT_ODD: 1, SpaceType.NONALT_EVEN: 2}[space.type]
    npairs = (space.n - d_len) // 2
    pairs = [(std[2 * i], std[2 * i + 1]) for i in range(npairs)]
    block = std[2 * npairs:]
    if flag:
        used = k - 1
        U = [e for e, _ in pairs[:used]] + [space.vcan]
        K = [v for pair in pairs[used:] for v in pair]
    else:
        U = [e for e, _ in pairs[:k]]
        K = [v for pair in pairs[k:] for v in pair] + block
    return U, K


def representative(label: IsoClass) -> MaxIsotropic:
    """Build a representative of the class from the standard bases of W and W'."""
    vs = OrthoSum.standard(label.w_type, label.n, label.wp_type, label.np)
    u_rows, k_basis = _side(vs.W, label.k, label.wcan_in_U)
    up_rows, kp_basis = _side(vs.Wp, label.kp, label.wcan_in_Up)
    if len(k_basis) != len(kp_basis):
        raise CheckFailedError("complements have different dimensions")
    if restricted_gram(vs.W.gram, k_basis) != restricted_gram(vs.Wp.gram, kp_basis):
        raise CheckFailedError("standard complements are not isometric")

    K = Subspace.span(k_basis, vs.n)
    tau_rows = []
    for x in K.rows:
        y = solve_left(k_basis, x)
        image = 0
        for i, t in enumerate(kp_basis):
            if y >> i & 1:
                image ^= t
        tau_rows.append(image)
    partial = MaxIsotropic(
        vs,
        Subspace.zero(vs.N),
        Subspace.span(u_rows, vs.n),
        Subspace.span(up_rows, vs.np),
        K,
        Subspace.span(kp_basis, vs.np),
        BitMatrix.from_rows(tau_rows, vs.np),
    )
    S = partial.assemble()
    if not vs.V.is_totally_isotropic(S) or 2 * S.dim != vs.N:
        raise CheckFailedError("representative is not maximal totally isotropic")
    result = MaxIsotropic(vs, S, partial.U, partial.Up, partial.K, partial.Kp, partial.tau)
    if label_of(result) != label:
        raise CheckFailedError(f"representative has label {label_of(result)}, expected {label}")
    return result


# Orders


def _aut_k(label: IsoClass, q: int) -> int:
    k_type = label.k_type
    if k_type is None:
        return 1
    return aut_order(k_type, label.n - 2 * label.k, q)


def _qprod(q: int, upto: int, step: int = 1) -> int:
    out = 1
    for i in range(1, upto + 1):
        out *= q ** (step * i) - 1
    return out


def _poch(q: int, m: int) -> Fraction:
    out = Fraction(1)
    for i in range(1, m + 1):
        out *= 1 - Fraction(1, q ** i)
    return out


def closed_form_stabilizer(label: IsoClass, q: int = 2) -> Optional[int]:
    """
    Closed-form |Aut(S)| where one is known: both sides nonalternating odd
    (any q), or W nonalternating even against W' nonalternating even or
    alternating (q = 2). Labels with n > n' are read with the sides swapped.
    """
    if label.n > label.np:
        label = label.swapped()
    n, np_, k = label.n, label.np, label.k
    if label.w_type is SpaceType.NONALT_ODD and label.wp_type is SpaceType.NONALT_ODD:
        exponent = (np_ - 1) ** 2 // 4 + k * (n - k - 1)
        return (q ** exponent * _qprod(q, k) * _qprod(q, k + (np_ - n) // 2)
                * _qprod(q, (n - 1) // 2 - k, 2))
    if q != 2 or label.w_type is not SpaceType.NONALT_EVEN:
        return None
    r1, r2 = n, (np_ - n) // 2
    base = (r1 + r2 - 1) * (r1 + r2) // 2 + r2 * r2 + r2 * k + k * k
    if label.wp_type is SpaceType.NONALT_EVEN and not label.wcan_in_U:
        value = 2 ** base * _poch(2, k) * _poch(2, k + r2) * _poch(4, r1 // 2 - 1 - k)
    elif label.wp_type is SpaceType.NONALT_EVEN:
        value = (2 ** (base + r1 - 2 * k) * _poch(2, k - 1) * _poch(2, k + r2 - 1)
                 * _poch(4, r1 // 2 - k))
    elif label.wp_type is SpaceType.ALTERNATING:
        value = (2 ** (base + r1 + r2 - k) * _poch(2, k - 1) * _poch(2, k + r2)
                 * _poch(4, r1 // 2 - k))
    else:
        return None
    if value.denominator != 1:
        raise CheckFailedError(f"closed form is not an integer: {value}")
    return value.numerator


@dataclass(frozen=True)
class OrbitStats:
    """Stabilizer, orbit and total count for one class."""
    label: IsoClass
    stab: int
    orbit: int
    total: int
    closed_form: Optional[int] = None


def ambient_type(w_type: SpaceType, wp_type: SpaceType) -> SpaceType:
    if w_type is SpaceType.ALTERNATING and wp_type is SpaceType.ALTERNATING:
        return SpaceType.ALTERNATING
    return SpaceType.NONALT_EVEN


def total_count(w_type: SpaceType, n: int, wp_type: SpaceType, np_: int, q: int = 2) -> int:
    """|Aut(V)| / |Aut(V, S)|: number of maximal totally isotropic subspaces of V."""
    v_type = ambient_type(w_type, wp_type)
    N = n + np_
    return aut_order(v_type, N, q) // aut_order(
        v_type, N, q, (N // 2, v_type is SpaceType.NONALT_EVEN)
    )


def orbit_stats(label: IsoClass, q: int = 2) -> OrbitStats:
    aut_w_u = aut_order(label.w_type, label.n, q, (label.k, label.wcan_in_U))
    aut_wp_up = aut_order(label.wp_type, label.np, q, (label.kp, label.wcan_in_Up))
    aut_k = _aut_k(label, q)
    stab, rem = divmod(aut_w_u * aut_wp_up, aut_k)
    if rem:
        raise CheckFailedError(f"|Aut(K)| does not divide the stabilizer product for {label}")
    orbit, rem = divmod(aut_order(label.w_type, label.n, q) * aut_order(label.wp_type, label.np, q), stab)
    if rem:
        raise CheckFailedError(f"stabilizer order does not divide |Aut(W)||Aut(W')| for {label}")
    closed = closed_form_stabilizer(label, q)
    if closed is not None and closed != stab:
        raise CheckFailedError(f"closed form {closed} disagrees with quotient {stab} for {label}")
    return OrbitStats(label, stab, orbit, total_count(label.w_type, label.n, label.wp_type, label.np, q), closed)


def odd_mass_identity(n: int, np_: int, q: int = 2) -> tuple[Fraction, Fraction]:
    """Both sides of sum_k 1/|Aut(S_k)| = prod(q^i+1)/(...) for odd n <= n'."""
    if n % 2 == 0 or np_ % 2 == 0 or n > np_:
        raise InadmissibleError("need odd n <= n'")
    lhs = Fraction(0)
    for k in range((n - 1) // 2 + 1):
        label = IsoClass(SpaceType.NONALT_ODD, n, SpaceType.NONALT_ODD, np_, k)
        lhs += Fraction(1, orbit_stats(label, q).stab)
    num = 1
    for i in range(1, (n + np_) // 2):
        num *= q ** i + 1
    den = (q ** ((n - 1) ** 2 // 4 + (np_ - 1) ** 2 // 4)
           * _qprod(q, (n - 1) // 2, 2) * _qprod(q, (np_ - 1) // 2, 2))
    return lhs, Fraction(num, den)


# Brute force


def _mts_for_pivots(gram_rows: tuple[int, ...], N: int, pivots: tuple[int, ...]) -> list[tuple[int, ...]]:
    """All maximal totally isotropic subspaces whose RREF has the given pivot columns."""
    gram = BitMatrix.from_rows(gram_rows, N)
    diagonal = gram.diagonal()
    pivot_set = set(pivots)
    free = [[j for j in range(p + 1, N) if j not in pivot_set] for p in pivots]
    h = len(pivots)
    found = []
    rows: list[int] = [0] * h
    images: list[int] = []

    def search(i: int) -> None:
        if i < 0:
            found.append(tuple(rows))
            return
        cols = free[i]
        for fill in range(1 << len(cols)):
            r = 1 << pivots[i]
            for bit, j in enumerate(cols):
                if fill >> bit & 1:
                    r |= 1 << j
            if parity(diagonal & r):
                continue
            if any(parity(g & r) for g in images):
                continue
            rows[i] = r
            images.append(gram.apply(r))
            search(i - 1)
            images.pop()

    search(h - 1)
    return found


def brute_enumerate_mts(vs: OrthoSum, threads: int = 1) -> list[Subspace]:
    """
    Every maximal totally isotropic subspace of V, each exactly once.

    Depth-first over canonical (RREF) bases: fix the pivot columns, fill rows
    from the last pivot to the first, keeping only isotropic rows orthogonal
    to those already chosen. Work is split by pivot set and merged in sorted
    order.
    """
    N = vs.N
    if N > MAX_BRUTE_DIM:
        raise ResourceLimitError(f"brute force limited to dim V <= {MAX_BRUTE_DIM}, got {N}")
    half = N // 2
    pivot_sets = list(combinations(range(N), half))
    args = (vs.V.gram.rows, N)
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            chunks = list(pool.map(_mts_for_pivots, *zip(*[(*args, p) for p in pivot_sets])))
    else:
        chunks = [_mts_for_pivots(*args, p) for p in pivot_sets]
    result = [Subspace(N, BitMatrix.from_rows(rows, N)) for chunk in chunks for rows in chunk]
    result.sort(key=lambda s: s.rows)
    logger.debug("enumerated %d maximal isotropic subspaces in dim %d", len(result), N)
    return result


def orbit_partition(vs: OrthoSum, subspaces: Iterable[Subspace]) -> Counter:
    return Counter(label_of(decompose(vs, S)) for S in subspaces)


def _stabilizes(g: BitMatrix, sub: Subspace) -> bool:
    return Subspace.span((g.apply(r) for r in sub.rows), sub.ambient_dim) == sub


def brute_stabilizer_order(vs: OrthoSum, S: Subspace) -> int:
    """Number of (g, g') in Aut(W) × Aut(W') with (g ⊕ g')(S) = S."""
    mts = decompose(vs, S)
    left = [g for g in brute_isometries(vs.W) if _stabilizes(g, mts.U)]
    right = [g for g in brute_isometries(vs.Wp) if _stabilizes(g, mts.Up)]
    count = 0
    for g in left:
        for gp in right:
            if _stabilizes(block_diagonal(g, gp), S):
                count += 1
    return count


@dataclass
class MassReport:
    """Outcome of a mass-formula check for one pair of spaces."""
    w_type: SpaceType
    n: int
    wp_type: SpaceType
    np: int
    q: int
    stats: list[OrbitStats] = field(default_factory=list)
    brute: Optional[int] = None
    formula: int = 0

    @property
    def orbit_sum(self) -> int:
        return sum(s.orbit for s in self.stats)

    @property
    def ok(self) -> bool:
        return self.orbit_sum == self.formula and (self.brute is None or self.brute == self.formula)

    def summary(self) -> str:
        parts = "+".join(str(s.orbit) for s in self.stats)
        brute = f" = brute {self.brute}" if self.brute is not None else ""
        verdict = "OK" if self.ok else "FAIL"
        return f"orbits {parts} = {self.orbit_sum}{brute} = formula {self.formula} : {verdict}"


def mass_check(
    w_type: SpaceType,
    n: int,
    wp_type: SpaceType,
    np_: int,
    q: int = 2,
    brute: bool = True,
    threads: int = 1,
) -> MassReport:
    labels = class_labels(w_type, n, wp_type, np_)
    report = MassReport(w_type, n, wp_type, np_, q)
    report.stats = [orbit_stats(label, q) for label in labels]
    report.formula = total_count(w_type, n, wp_type, np_, q)
    if brute and q == 2:
        vs = OrthoSum.standard(w_type, n, wp_type, np_)
        report.brute = len(brute_enumerate_mts(vs, threads))
    logger.info("mass check %s %d / %s %d: %s", w_type.value, n, wp_type.value, np_, report.summary())
    return report


def same_parity_pairs(max_total: int) -> list[tuple[SpaceType, int, SpaceType, int]]:
    """Every ordered same-parity type pair with n + n' <= max_total."""
    out = []
    kinds = [(t, d) for d in range(1, max_total) for t in SpaceType if t.admits(d)]
    for t, d in kinds:
        for tp, dp in kinds:
            if (d - dp) % 2 == 0 and d + dp <= max_total:
                out.append((t, d, tp, dp))
    return out


def parse_rows(rows: Sequence[str], n: int, np_: int) -> Subspace:
    """Subspace of F2^(n+n') from strings like "110|000"."""
    matrix = BitMatrix.from_strings(rows)
    if matrix.ncols != n + np_:
        raise DimensionMismatchError(f"rows have {matrix.ncols} entries, expected {n + np_}")
    return Subspace.span(matrix.rows, n + np_)
