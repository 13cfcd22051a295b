"""
Bit-packed linear algebra over F2.

Vectors are Python ints: coordinate i is bit i. Matrices are tuples of such
ints, one per row. Linear maps are stored with the image of the i-th basis
vector as row i, so a row vector v is mapped to v·M.

Subspaces are kept only in reduced row echelon form (pivot = lowest set bit
of a row, rows ordered by pivot), which makes equality and hashing
structural.
"""

import logging
from dataclasses import dataclass
from itertools import combinations, product
from typing import Iterable, Iterator, Optional, Sequence

import numpy as np

from .errors import DegenerateFormError, DimensionMismatchError, InadmissibleError

logger = logging.getLogger(__name__)


def low_bit(row: int) -> int:
    """Index of the lowest set bit (the pivot column of a nonzero row)."""
    return (row & -row).bit_length() - 1


def parity(x: int) -> int:
    return bin(x).count("1") & 1


def bits_to_str(bits: int, dim: int) -> str:
    """Render coordinates 0..dim-1 left to right."""
    return "".join("1" if bits >> i & 1 else "0" for i in range(dim))


def _as_int(v: "int | BitVector") -> int:
    return v.bits if isinstance(v, BitVector) else int(v)


@dataclass(frozen=True)
class BitVector:
    """
    Element of F2^dim.

    Attributes:
        dim: Number of coordinates
        bits: Packed coordinates, bit i is coordinate i
    """
    dim: int
    bits: int

    def __post_init__(self) -> None:
        if self.dim < 0:
            raise InadmissibleError("dimension must be nonnegative")
        if self.bits < 0 or self.bits >> self.dim:
            raise InadmissibleError(
                f"bits {self.bits:#x} do not fit in dimension {self.dim}"
            )

    @classmethod
    def from_list(cls, coords: Sequence[int]) -> "BitVector":
        bits = 0
        for i, c in enumerate(coords):
            if c & 1:
                bits |= 1 << i
        return cls(len(coords), bits)

    @classmethod
    def unit(cls, dim: int, i: int) -> "BitVector":
        return cls(dim, 1 << i)

    def to_list(self) -> list[int]:
        return [self.bits >> i & 1 for i in range(self.dim)]

    def __getitem__(self, i: int) -> int:
        if not 0 <= i < self.dim:
            raise IndexError(i)
        return self.bits >> i & 1

    def __add__(self, other: "BitVector") -> "BitVector":
        if self.dim != other.dim:
            raise DimensionMismatchError(f"{self.dim} != {other.dim}")
        return BitVector(self.dim, self.bits ^ other.bits)

    def dot(self, other: "BitVector") -> int:
        if self.dim != other.dim:
            raise DimensionMismatchError(f"{self.dim} != {other.dim}")
        return parity(self.bits & other.bits)

    def is_zero(self) -> bool:
        return self.bits == 0

    def __str__(self) -> str:
        return bits_to_str(self.bits, self.dim)


@dataclass(frozen=True)
class BitMatrix:
    """
    Dense nrows × ncols matrix over F2 with bit-packed rows.

    Attributes:
        nrows: Row count
        ncols: Column count
        rows: Packed rows, bit j of rows[i] is entry (i, j)
    """
    nrows: int
    ncols: int
    rows: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.rows) != self.nrows:
            raise DimensionMismatchError(
                f"expected {self.nrows} rows, got {len(self.rows)}"
            )
        for r in self.rows:
            if r < 0 or r >> self.ncols:
                raise DimensionMismatchError(
                    f"row {r:#x} does not fit in {self.ncols} columns"
                )

    @classmethod
    def from_rows(cls, rows: Iterable[int], ncols: int) -> "BitMatrix":
        rows = tuple(rows)
        return cls(len(rows), ncols, rows)

    @classmethod
    def from_lists(cls, entries: Sequence[Sequence[int]]) -> "BitMatrix":
        if not entries:
            return cls(0, 0, ())
        ncols = len(entries[0])
        if any(len(r) != ncols for r in entries):
            raise DimensionMismatchError("ragged matrix")
        return cls.from_rows((BitVector.from_list(r).bits for r in entries), ncols)

    @classmethod
    def from_strings(cls, rows: Sequence[str]) -> "BitMatrix":
        """Build from strings such as "0110" (separators '|' and spaces ignored)."""
        cleaned = [r.replace("|", "").replace(" ", "") for r in rows]
        return cls.from_lists([[int(ch) for ch in r] for r in cleaned])

    @classmethod
    def identity(cls, n: int) -> "BitMatrix":
        return cls.from_rows((1 << i for i in range(n)), n)

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "BitMatrix":
        return cls(nrows, ncols, (0,) * nrows)

    def entry(self, i: int, j: int) -> int:
        if not (0 <= i < self.nrows and 0 <= j < self.ncols):
            raise IndexError((i, j))
        return self.rows[i] >> j & 1

    def row(self, i: int) -> BitVector:
        return BitVector(self.ncols, self.rows[i])

    def transpose(self) -> "BitMatrix":
        cols = []
        for j in range(self.ncols):
            c = 0
            for i, r in enumerate(self.rows):
                if r >> j & 1:
                    c |= 1 << i
            cols.append(c)
        return BitMatrix(self.ncols, self.nrows, tuple(cols))

    def apply(self, v: int) -> int:
        """Image v·M of a packed row vector with nrows coordinates."""
        out = 0
        i = 0
        while v:
            if v & 1:
                out ^= self.rows[i]
            v >>= 1
            i += 1
        return out

    def __matmul__(self, other: "BitMatrix") -> "BitMatrix":
        if self.ncols != other.nrows:
            raise DimensionMismatchError(
                f"cannot multiply {self.nrows}x{self.ncols} by {other.nrows}x{other.ncols}"
            )
        return BitMatrix(
            self.nrows, other.ncols, tuple(other.apply(r) for r in self.rows)
        )

    def is_symmetric(self) -> bool:
        return self.nrows == self.ncols and self == self.transpose()

    def diagonal(self) -> int:
        """Diagonal packed as a vector (bit i = entry (i, i))."""
        d = 0
        for i in range(min(self.nrows, self.ncols)):
            d |= (self.rows[i] >> i & 1) << i
        return d

    def submatrix(self, nrows: int, ncols: int) -> "BitMatrix":
        """Upper-left block."""
        mask = (1 << ncols) - 1
        return BitMatrix(nrows, ncols, tuple(r & mask for r in self.rows[:nrows]))

    def to_lists(self) -> list[list[int]]:
        return [self.row(i).to_list() for i in range(self.nrows)]

    def __str__(self) -> str:
        return "\n".join(bits_to_str(r, self.ncols) for r in self.rows)


def block_diagonal(a: BitMatrix, b: BitMatrix) -> BitMatrix:
    """[[a, 0], [0, b]]; coordinates of b follow those of a."""
    rows = list(a.rows) + [r << a.ncols for r in b.rows]
    return BitMatrix(a.nrows + b.nrows, a.ncols + b.ncols, tuple(rows))


def rref_rows(rows: Iterable[int]) -> list[int]:
    """Nonzero rows of the reduced row echelon form, ordered by pivot."""
    table: dict[int, int] = {}
    for r in rows:
        for p, pr in table.items():
            if r >> p & 1:
                r ^= pr
        if not r:
            continue
        p = low_bit(r)
        for q in table:
            if table[q] >> p & 1:
                table[q] ^= r
        table[p] = r
    return [table[p] for p in sorted(table)]


def rank_of(rows: Iterable[int]) -> int:
    table: dict[int, int] = {}
    for r in rows:
        while r:
            p = low_bit(r)
            if p not in table:
                table[p] = r
                break
            r ^= table[p]
    return len(table)


def rref(m: BitMatrix) -> tuple[BitMatrix, int]:
    """Reduced row echelon form of m (same shape, zero rows last) and its rank."""
    reduced = rref_rows(m.rows)
    rank = len(reduced)
    padded = tuple(reduced) + (0,) * (m.nrows - rank)
    return BitMatrix(m.nrows, m.ncols, padded), rank


def solve_left(rows: Sequence[int], target: int) -> Optional[int]:
    """
    Find y with XOR of rows[k] over the set bits k of y equal to target.

    Returns the packed coefficient vector y, or None when target is not in
    the row space.
    """
    table: dict[int, tuple[int, int]] = {}
    for k, r in enumerate(rows):
        tag = 1 << k
        while r:
            p = low_bit(r)
            if p not in table:
                table[p] = (r, tag)
                break
            pr, pt = table[p]
            r ^= pr
            tag ^= pt
    y = 0
    while target:
        p = low_bit(target)
        if p not in table:
            return None
        pr, pt = table[p]
        target ^= pr
        y ^= pt
    return y


def inverse(m: BitMatrix) -> BitMatrix:
    if m.nrows != m.ncols:
        raise DimensionMismatchError("only square matrices are invertible")
    out = []
    for i in range(m.nrows):
        y = solve_left(m.rows, 1 << i)
        if y is None:
            raise DegenerateFormError("matrix is singular over F2")
        out.append(y)
    return BitMatrix(m.nrows, m.ncols, tuple(out))


def annihilator(functionals: Iterable[int], n: int) -> "Subspace":
    """
    The subspace {v in F2^n : <f, v> = 0 for every f}.

    Built from the RREF of the functionals: every free column j gives the
    vector with a 1 at j and, at each pivot p, the entry (j) of the row
    pivoting at p.
    """
    reduced = rref_rows(functionals)
    pivots = [low_bit(r) for r in reduced]
    pivot_set = set(pivots)
    basis = []
    for j in range(n):
        if j in pivot_set:
            continue
        v = 1 << j
        for p, r in zip(pivots, reduced):
            if r >> j & 1:
                v |= 1 << p
        basis.append(v)
    return Subspace.span(basis, n)


def _is_rref(rows: Sequence[int]) -> bool:
    pivots = []
    for r in rows:
        if not r:
            return False
        pivots.append(low_bit(r))
    if any(a >= b for a, b in zip(pivots, pivots[1:])):
        return False
    mask = 0
    for p in pivots:
        mask |= 1 << p
    return all(r & mask == 1 << p for r, p in zip(rows, pivots))


@dataclass(frozen=True)
class Subspace:
    """
    Subspace of F2^ambient_dim in canonical form.

    Attributes:
        ambient_dim: Dimension of the surrounding space
        basis: RREF basis without zero rows
    """
    ambient_dim: int
    basis: BitMatrix

    def __post_init__(self) -> None:
        if self.basis.ncols != self.ambient_dim:
            raise DimensionMismatchError(
                f"basis has {self.basis.ncols} columns, ambient is {self.ambient_dim}"
            )
        if not _is_rref(self.basis.rows):
            raise InadmissibleError("basis is not in reduced row echelon form")

    @classmethod
    def span(cls, vectors: Iterable["int | BitVector"], n: int) -> "Subspace":
        reduced = rref_rows(_as_int(v) for v in vectors)
        return cls(n, BitMatrix.from_rows(reduced, n))

    @classmethod
    def zero(cls, n: int) -> "Subspace":
        return cls(n, BitMatrix.from_rows((), n))

    @classmethod
    def full(cls, n: int) -> "Subspace":
        return cls(n, BitMatrix.identity(n))

    @property
    def dim(self) -> int:
        return self.basis.nrows

    @property
    def rows(self) -> tuple[int, ...]:
        return self.basis.rows

    def _check(self, other: "Subspace") -> None:
        if self.ambient_dim != other.ambient_dim:
            raise DimensionMismatchError(
                f"ambient dimensions differ: {self.ambient_dim} != {other.ambient_dim}"
            )

    def reduce(self, v: "int | BitVector") -> int:
        """Remainder of v modulo the subspace (zero iff v is contained)."""
        v = _as_int(v)
        for r in self.rows:
            if v >> low_bit(r) & 1:
                v ^= r
        return v

    def contains(self, v: "int | BitVector") -> bool:
        if isinstance(v, BitVector) and v.dim != self.ambient_dim:
            raise DimensionMismatchError(f"{v.dim} != {self.ambient_dim}")
        return self.reduce(v) == 0

    def __contains__(self, v: "int | BitVector") -> bool:
        return self.contains(v)

    def coordinates(self, v: "int | BitVector") -> int:
        """Coefficients of v in the canonical basis, bit i for basis row i."""
        v = _as_int(v)
        if self.reduce(v):
            raise InadmissibleError("vector is not in the subspace")
        y = 0
        for i, r in enumerate(self.rows):
            if v >> low_bit(r) & 1:
                y |= 1 << i
        return y

    def join(self, other: "Subspace") -> "Subspace":
        self._check(other)
        return Subspace.span(self.rows + other.rows, self.ambient_dim)

    def meet(self, other: "Subspace") -> "Subspace":
        """Intersection via the kernel of the stacked system [a | a], [b | 0]."""
        self._check(other)
        n = self.ambient_dim
        stacked = [(r << n) | r for r in self.rows] + list(other.rows)
        low_mask = (1 << n) - 1
        kernel = [r >> n for r in rref_rows(stacked) if not r & low_mask]
        return Subspace.span(kernel, n)

    def is_subspace_of(self, other: "Subspace") -> bool:
        self._check(other)
        return all(other.contains(r) for r in self.rows)

    def equals(self, other: "Subspace") -> bool:
        self._check(other)
        return self == other

    def vectors(self) -> Iterator[int]:
        """All 2^dim elements, zero first, in Gray-code order."""
        v = 0
        yield v
        rows = self.rows
        for i in range(1, 1 << len(rows)):
            v ^= rows[low_bit(i)]
            yield v

    def complement_in(self, whole: "Subspace") -> "Subspace":
        """
        Complement of self inside whole, chosen greedily over the canonical
        basis rows of whole.
        """
        self._check(whole)
        if not self.is_subspace_of(whole):
            raise InadmissibleError("subspace is not contained in the given space")
        current = list(self.rows)
        chosen = []
        rank = len(current)
        for r in whole.rows:
            if rank_of(current + [r]) > rank:
                current.append(r)
                chosen.append(r)
                rank += 1
        return Subspace.span(chosen, self.ambient_dim)

    def __str__(self) -> str:
        if not self.dim:
            return f"<0 in F2^{self.ambient_dim}>"
        return "<" + ", ".join(bits_to_str(r, self.ambient_dim) for r in self.rows) + ">"


def gaussian_binomial(n: int, k: int, q: int = 2) -> int:
    """Number of k-dimensional subspaces of F_q^n."""
    if not 0 <= k <= n:
        return 0
    num = den = 1
    for i in range(k):
        num *= q ** (n - i) - 1
        den *= q ** (i + 1) - 1
    return num // den


def enumerate_subspaces(n: int, k: int) -> Iterator[Subspace]:
    """
    Every k-dimensional subspace of F2^n exactly once.

    Walks pivot sets and fills the free entries (non-pivot columns to the
    right of each pivot) in every possible way.
    """
    if not 0 <= k <= n:
        raise InadmissibleError(f"need 0 <= k <= n, got k={k}, n={n}")
    for pivots in combinations(range(n), k):
        pivot_set = set(pivots)
        free = [
            [j for j in range(p + 1, n) if j not in pivot_set] for p in pivots
        ]
        slots = [(i, j) for i, cols in enumerate(free) for j in cols]
        for fill in product((0, 1), repeat=len(slots)):
            rows = [1 << p for p in pivots]
            for (i, j), bit in zip(slots, fill):
                if bit:
                    rows[i] |= 1 << j
            yield Subspace(n, BitMatrix.from_rows(rows, n))


def random_vector(n: int, rng: np.random.Generator) -> int:
    if n == 0:
        return 0
    raw = int.from_bytes(rng.bytes((n + 7) // 8), "little")
    return raw & ((1 << n) - 1)


def random_independent_rows(
    n: int,
    k: int,
    rng: np.random.Generator,
    start: Sequence[int] = (),
) -> list[int]:
    """
    Extend the independent rows `start` to k independent rows by drawing
    uniform vectors and keeping those that raise the rank.
    """
    table: dict[int, int] = {}
    kept = []

    def insert(v: int) -> bool:
        while v:
            p = low_bit(v)
            if p not in table:
                table[p] = v
                return True
            v ^= table[p]
        return False

    for v in start:
        if not insert(v):
            raise InadmissibleError("starting rows are not independent")
        kept.append(v)
    while len(kept) < k:
        v = random_vector(n, rng)
        if insert(v):
            kept.append(v)
    return kept


def random_subspace(
    n: int,
    k: int,
    rng: np.random.Generator,
    containing: "Optional[int | BitVector]" = None,
) -> Subspace:
    """Uniformly random k-dimensional subspace, optionally through a given vector."""
    if not 0 <= k <= n:
        raise InadmissibleError(f"need 0 <= k <= n, got k={k}, n={n}")
    start: list[int] = []
    if containing is not None:
        e = _as_int(containing)
        if e == 0:
            raise InadmissibleError("the vector to contain must be nonzero")
        if k < 1:
            raise InadmissibleError("a 0-dimensional subspace contains no nonzero vector")
        start = [e]
    return Subspace.span(random_independent_rows(n, k, rng, start), n)
