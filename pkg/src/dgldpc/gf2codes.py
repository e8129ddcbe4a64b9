"""Exact GF(2) algebra and local-code enumerators.

Generator matrices are stored as tuples of Python ints, one bitset per row
(LSB = column 0).  All enumerators are computed by exhaustive enumeration and
carry exact integer coefficients.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from math import comb
from typing import Iterable, Sequence

import numpy as np

MAX_LENGTH = 24
MAX_DIMENSION = 24
# cap on (number of subsets) x (number of dual codewords) for stopping-set counts
MAX_STOPPING_WORK = 1 << 30


class CodeError(ValueError):
    """Invalid local code (rank, zero column, minimum distance)."""


class DimensionTooLarge(CodeError):
    """Exhaustive enumeration would exceed the configured bound."""


class EnumeratorKind(enum.Enum):
    WEIGHT = "weight"
    STOPPING_BD = "ss-bd"
    STOPPING_MAP = "ss-map"

    @classmethod
    def parse(cls, value: "str | EnumeratorKind") -> "EnumeratorKind":
        if isinstance(value, cls):
            return value
        for kind in cls:
            if kind.value == value or kind.name.lower() == str(value).lower():
                return kind
        raise ValueError(f"unknown enumerator kind {value!r}")


def _rank(rows: Iterable[int]) -> int:
    pivots: dict[int, int] = {}
    rank = 0
    for row in rows:
        while row:
            top = row.bit_length() - 1
            if top in pivots:
                row ^= pivots[top]
            else:
                pivots[top] = row
                rank += 1
                break
    return rank


def _in_span(vec: int, rows: Sequence[int]) -> bool:
    return _rank(rows) == _rank(list(rows) + [vec])


@dataclass(frozen=True)
class BinaryMatrix:
    """A full-rank k x q generator matrix over GF(2) with no zero column."""

    n_rows: int
    n_cols: int
    rows: tuple[int, ...]

    def __post_init__(self) -> None:
        k, q = self.n_rows, self.n_cols
        if len(self.rows) != k:
            raise CodeError(f"expected {k} rows, got {len(self.rows)}")
        if not 1 <= k <= q:
            raise CodeError(f"need 1 <= k <= q, got k={k}, q={q}")
        if q > MAX_LENGTH or k > MAX_DIMENSION:
            raise DimensionTooLarge(f"k={k}, q={q} exceeds enumeration bound {MAX_LENGTH}")
        mask = (1 << q) - 1
        if any(r & ~mask for r in self.rows):
            raise CodeError("row has bits beyond the column count")
        if _rank(self.rows) != k:
            raise CodeError("generator matrix is not full row rank")
        union = 0
        for r in self.rows:
            union |= r
        if union != mask:
            missing = [j for j in range(q) if not (union >> j) & 1]
            raise CodeError(f"all-zero column(s) {missing}")

    @classmethod
    def from_bits(cls, bits: Sequence[Sequence[int]]) -> "BinaryMatrix":
        if not bits:
            raise CodeError("empty generator matrix")
        q = len(bits[0])
        rows = []
        for line in bits:
            if len(line) != q:
                raise CodeError("ragged generator matrix")
            row = 0
            for j, b in enumerate(line):
                if b not in (0, 1):
                    raise CodeError(f"entry {b!r} is not a bit")
                if b:
                    row |= 1 << j
            rows.append(row)
        return cls(len(rows), q, tuple(rows))

    @classmethod
    def from_strings(cls, rows: Sequence[str]) -> "BinaryMatrix":
        """Parse rows such as ``"1101000"`` (leftmost character = column 0)."""
        bits = []
        for s in rows:
            s = s.strip()
            if not s or set(s) - {"0", "1"}:
                raise CodeError(f"row {s!r} is not a 0/1 string")
            bits.append([int(c) for c in s])
        return cls.from_bits(bits)

    def to_strings(self) -> list[str]:
        return ["".join("1" if (r >> j) & 1 else "0" for j in range(self.n_cols)) for r in self.rows]

    def column(self, j: int) -> int:
        """Column j as a bitset over the rows."""
        col = 0
        for i, r in enumerate(self.rows):
            if (r >> j) & 1:
                col |= 1 << i
        return col

    def permute_columns(self, perm: Sequence[int]) -> "BinaryMatrix":
        """Return the matrix whose column perm[j] is this matrix's column j."""
        rows = []
        for r in self.rows:
            new = 0
            for j in range(self.n_cols):
                if (r >> j) & 1:
                    new |= 1 << perm[j]
            rows.append(new)
        return BinaryMatrix(self.n_rows, self.n_cols, tuple(rows))


# -- named constructors -------------------------------------------------------


def repetition(q: int) -> BinaryMatrix:
    return BinaryMatrix(1, q, ((1 << q) - 1,))


def spc_cyclic(q: int) -> BinaryMatrix:
    """SPC-q generated by the shifts of 1 + x: row i has ones at i and i+1."""
    return BinaryMatrix(q - 1, q, tuple((0b11 << i) for i in range(q - 1)))


def spc_systematic(q: int) -> BinaryMatrix:
    """[I | 1] form of the length-q single parity-check code."""
    k = q - 1
    return BinaryMatrix(k, q, tuple((1 << i) | (1 << k) for i in range(k)))


def spc_antisystematic(q: int) -> BinaryMatrix:
    """Systematic form with the first q-1 columns complemented.

    Only odd q gives an SPC code; for even q the result has a weight-1
    codeword, so it is rejected.
    """
    if q % 2 == 0:
        raise CodeError(f"antisystematic SPC needs odd length, got {q}")
    k = q - 1
    full = (1 << k) - 1
    return BinaryMatrix(k, q, tuple((full ^ (1 << i)) | (1 << k) for i in range(k)))


def hamming_7_4() -> BinaryMatrix:
    return BinaryMatrix.from_strings(["1000110", "0100101", "0010011", "0001111"])


# -- enumerator containers ----------------------------------------------------


@dataclass(frozen=True)
class WeightEnumerator:
    """Univariate enumerator A(z) = sum_u coeffs[u] z^u."""

    coeffs: tuple[int, ...]
    kind: EnumeratorKind = EnumeratorKind.WEIGHT

    def __post_init__(self) -> None:
        if len(self.coeffs) < 2:
            raise CodeError("enumerator needs length >= 1")
        if self.coeffs[0] != 1:
            raise CodeError(f"A_0 must be 1, got {self.coeffs[0]}")
        if any((not isinstance(c, int)) or c < 0 for c in self.coeffs):
            raise CodeError("coefficients must be nonnegative integers")
        if not any(self.coeffs[1:]):
            raise CodeError("enumerator has no nonzero term beyond u=0")

    @property
    def length(self) -> int:
        return len(self.coeffs) - 1

    @property
    def min_dist(self) -> int:
        return next(u for u in range(1, len(self.coeffs)) if self.coeffs[u])

    @property
    def max_weight(self) -> int:
        return max(u for u, c in enumerate(self.coeffs) if c)

    @property
    def total(self) -> int:
        return sum(self.coeffs)

    def support(self) -> list[tuple[int, int]]:
        return [(u, c) for u, c in enumerate(self.coeffs) if c]

    def __str__(self) -> str:
        terms = []
        for u, c in self.support():
            if u == 0:
                terms.append(str(c))
            else:
                coef = "" if c == 1 else str(c)
                terms.append(f"{coef}z^{u}" if u > 1 else f"{coef}z")
        return " + ".join(terms)


@dataclass(frozen=True)
class IOWeightEnumerator:
    """Bivariate enumerator B(x, y) = sum_{u,v} coeffs[u][v] x^u y^v."""

    coeffs: tuple[tuple[int, ...], ...]
    kind: EnumeratorKind = EnumeratorKind.WEIGHT

    def __post_init__(self) -> None:
        if len(self.coeffs) < 2 or len(self.coeffs[0]) < 2:
            raise CodeError("IO enumerator needs k >= 1 and q >= 1")
        width = len(self.coeffs[0])
        if any(len(row) != width for row in self.coeffs):
            raise CodeError("ragged IO enumerator")
        if any((not isinstance(c, int)) or c < 0 for row in self.coeffs for c in row):
            raise CodeError("coefficients must be nonnegative integers")
        if self.coeffs[0][0] != 1:
            raise CodeError("B_{0,0} must be 1")
        if any(self.coeffs[0][1:]):
            raise CodeError("B_{0,v} must vanish for v > 0")
        if any(self.coeffs[u][0] for u in range(1, len(self.coeffs))):
            raise CodeError("B_{u,0} must vanish for u > 0")

    @property
    def in_length(self) -> int:
        return len(self.coeffs) - 1

    @property
    def out_length(self) -> int:
        return len(self.coeffs[0]) - 1

    @property
    def min_dist(self) -> int:
        return min(v for row in self.coeffs[1:] for v, c in enumerate(row) if c)

    @property
    def total(self) -> int:
        return sum(sum(row) for row in self.coeffs)

    def output_marginal(self) -> tuple[int, ...]:
        """Coefficients of B(1, y)."""
        return tuple(sum(row[v] for row in self.coeffs) for v in range(self.out_length + 1))

    def support(self) -> list[tuple[int, int, int]]:
        return [(u, v, c) for u, row in enumerate(self.coeffs) for v, c in enumerate(row) if c]

    def is_repetition(self) -> bool:
        """True iff B(x, y) = 1 + x y^q."""
        return self.in_length == 1 and self.support() == [(0, 0, 1), (1, self.out_length, 1)]


# -- exhaustive enumeration ---------------------------------------------------


def _span_arrays(g: BinaryMatrix) -> tuple[np.ndarray, np.ndarray]:
    """All 2^k codewords (as bitsets) and their input weights."""
    words = np.zeros(1, dtype=np.uint32)
    in_wt = np.zeros(1, dtype=np.int64)
    for r in g.rows:
        words = np.concatenate([words, words ^ np.uint32(r)])
        in_wt = np.concatenate([in_wt, in_wt + 1])
    return words, in_wt


def _popcount(a: np.ndarray) -> np.ndarray:
    return np.bitwise_count(a).astype(np.int64)


def _check_min_distance(coeffs: Sequence[int], what: str) -> None:
    r = next(u for u in range(1, len(coeffs)) if coeffs[u])
    if r < 2:
        raise CodeError(f"{what} has minimum distance {r} < 2")


def weight_enumerator(g: BinaryMatrix) -> WeightEnumerator:
    """A_u = number of codewords of Hamming weight u."""
    words, _ = _span_arrays(g)
    counts = np.bincount(_popcount(words), minlength=g.n_cols + 1)
    coeffs = tuple(int(c) for c in counts)
    _check_min_distance(coeffs, "code")
    return WeightEnumerator(coeffs, EnumeratorKind.WEIGHT)


def io_weight_enumerator(g: BinaryMatrix) -> IOWeightEnumerator:
    """B_{u,v} = number of weight-u inputs whose codeword has weight v."""
    words, in_wt = _span_arrays(g)
    q = g.n_cols
    flat = np.bincount(in_wt * (q + 1) + _popcount(words), minlength=(g.n_rows + 1) * (q + 1))
    grid = flat.reshape(g.n_rows + 1, q + 1)
    coeffs = tuple(tuple(int(c) for c in row) for row in grid)
    _check_min_distance([sum(row[v] for row in coeffs) for v in range(q + 1)], "code")
    return IOWeightEnumerator(coeffs, EnumeratorKind.WEIGHT)


def bd_ssef(e: WeightEnumerator) -> WeightEnumerator:
    """Bounded-distance stopping sets: every erasure set of size >= r."""
    s, r = e.length, e.min_dist
    coeffs = [1] + [comb(s, u) if u >= r else 0 for u in range(1, s + 1)]
    return WeightEnumerator(tuple(coeffs), EnumeratorKind.STOPPING_BD)


def dual_codewords(g: BinaryMatrix) -> list[int]:
    """All words h (bitsets over columns) with G h^T = 0."""
    q = g.n_cols
    cols = [g.column(j) for j in range(q)]
    # Gaussian elimination on the k x q system; free columns parametrize the kernel
    basis: list[int] = []
    pivots: dict[int, tuple[int, int]] = {}  # row-bit -> (reduced column, combination)
    for j, c in enumerate(cols):
        combo = 1 << j
        while c:
            top = c.bit_length() - 1
            if top in pivots:
                pc, pcombo = pivots[top]
                c ^= pc
                combo ^= pcombo
            else:
                pivots[top] = (c, combo)
                break
        if c == 0:
            basis.append(combo)
    words = [0]
    for b in basis:
        words += [w ^ b for w in words]
    return words


def _stopping_mask(n_bits: int, checks: Sequence[int]) -> np.ndarray:
    """Boolean mask over all 2^n_bits erasure sets: no check meets the set in exactly one bit."""
    work = (1 << n_bits) * max(1, len(checks))
    if work > MAX_STOPPING_WORK:
        raise DimensionTooLarge(f"stopping-set enumeration needs {work} operations")
    subsets = np.arange(1 << n_bits, dtype=np.uint64)
    ok = np.ones(subsets.shape, dtype=bool)
    for h in checks:
        if h:
            ok &= _popcount(subsets & np.uint64(h)) != 1
    return ok


def map_ssef(g: BinaryMatrix) -> WeightEnumerator:
    """MAP stopping sets: erased columns all outside the span of the others.

    Column j lies in the span of the columns in S iff some dual codeword h has
    h_j = 1 and support inside S + {j}; so an erasure set V is stopping iff no
    dual codeword meets V in exactly one position.
    """
    q = g.n_cols
    ok = _stopping_mask(q, dual_codewords(g))
    sizes = _popcount(np.arange(1 << q, dtype=np.uint64))
    coeffs = tuple(int(c) for c in np.bincount(sizes[ok], minlength=q + 1))
    return WeightEnumerator(coeffs, EnumeratorKind.STOPPING_MAP)


def io_map_ssef(g: BinaryMatrix) -> IOWeightEnumerator:
    """Input-output MAP stopping sets of an encoder.

    Works on the extended matrix [I_k | G]: an erasure pair (U, V) of info and
    code positions is stopping iff no erased column of [I_k | G] lies in the
    span of the non-erased ones.  The dual of [I_k | G] is {(G h, h)}.
    """
    k, q = g.n_rows, g.n_cols
    checks = []
    for h in range(1 << q):
        syn = 0
        for i, r in enumerate(g.rows):
            if (r & h).bit_count() & 1:
                syn |= 1 << i
        checks.append(syn | (h << k))
    ok = _stopping_mask(k + q, checks)
    subsets = np.arange(1 << (k + q), dtype=np.uint64)
    u = _popcount(subsets & np.uint64((1 << k) - 1))
    v = _popcount(subsets >> np.uint64(k))
    flat = np.bincount((u * (q + 1) + v)[ok], minlength=(k + 1) * (q + 1))
    grid = flat.reshape(k + 1, q + 1)
    return IOWeightEnumerator(tuple(tuple(int(c) for c in row) for row in grid), EnumeratorKind.STOPPING_MAP)


def has_all_ones_codeword(g: BinaryMatrix) -> bool:
    return _in_span((1 << g.n_cols) - 1, g.rows)


def is_symmetric(e: WeightEnumerator) -> bool:
    """A_{ubar - u} == A_u for all u <= ubar."""
    top = e.max_weight
    return all(e.coeffs[top - u] == e.coeffs[u] for u in range(top + 1))


def average_weight_is_half_length(e: WeightEnumerator) -> bool:
    """Dual distance > 1 test from a WEF: mean codeword weight equals s/2."""
    return 2 * sum(u * c for u, c in enumerate(e.coeffs)) == e.length * e.total


def dimension_from_total(total: int) -> int:
    if total <= 0 or total & (total - 1):
        raise CodeError(f"codeword count {total} is not a power of two")
    return total.bit_length() - 1


__all__ = [
    "BinaryMatrix",
    "CodeError",
    "DimensionTooLarge",
    "EnumeratorKind",
    "IOWeightEnumerator",
    "WeightEnumerator",
    "average_weight_is_half_length",
    "bd_ssef",
    "dimension_from_total",
    "dual_codewords",
    "has_all_ones_codeword",
    "hamming_7_4",
    "io_map_ssef",
    "io_weight_enumerator",
    "is_symmetric",
    "map_ssef",
    "repetition",
    "spc_antisystematic",
    "spc_cyclic",
    "spc_systematic",
    "weight_enumerator",
]
