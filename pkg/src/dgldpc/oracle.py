"""Exact finite-length ensemble-average enumerators.

For a finite instance with n VNs, m CNs and E edges, the expected number of
weight-w codewords over the uniform edge permutation is

    E[A_w] = sum_v N_c(v) * [x^w y^v] prod_t B_t(x, y)^{n_t} / C(E, v),

where N_c(v) = [z^v] prod_t A_t(z)^{m_t} counts check-valid edge assignments
of edge weight v.  Everything is exact: big-integer coefficients and
Fraction results.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

from . import polyint
from .ensemble import Ensemble, _frac, admissible_n_step
from .gf2codes import EnumeratorKind

MAX_EDGES = 512
MAX_EXHAUSTIVE_EDGES = 8


class OracleError(ValueError):
    pass


class InadmissibleN(OracleError):
    def __init__(self, n: int, step: int):
        super().__init__(f"n={n} is not a multiple of the minimal admissible n={step}")
        self.n = n
        self.step = step


@dataclass(frozen=True)
class FiniteInstance:
    n: int
    m: int
    E: int
    vn_counts: tuple[int, ...]
    cn_counts: tuple[int, ...]


def finite_instance(e: Ensemble, n: int) -> FiniteInstance:
    step = admissible_n_step(e)
    if n <= 0 or n % step:
        raise InadmissibleN(n, step)
    lam = [_frac(t.lam) for t in e.vn_types]
    rho = [_frac(t.rho) for t in e.cn_types]
    il = sum((l / t.q for l, t in zip(lam, e.vn_types)), Fraction(0))
    edges = n / il
    vn = [n * l / t.q / il for l, t in zip(lam, e.vn_types)]
    cn = [edges * r / t.s for r, t in zip(rho, e.cn_types)]
    if any(x.denominator != 1 for x in vn + cn + [edges]):
        raise InadmissibleN(n, step)
    inst = FiniteInstance(n, int(sum(cn)), int(edges), tuple(int(x) for x in vn), tuple(int(x) for x in cn))
    _check_instance(e, inst)
    return inst


def _check_instance(e: Ensemble, inst: FiniteInstance) -> None:
    if len(inst.vn_counts) != len(e.vn_types) or len(inst.cn_counts) != len(e.cn_types):
        raise OracleError("type counts do not match the ensemble")
    if any(c < 0 for c in inst.vn_counts + inst.cn_counts):
        raise OracleError("negative node count")
    vn_edges = sum(c * t.q for c, t in zip(inst.vn_counts, e.vn_types))
    cn_edges = sum(c * t.s for c, t in zip(inst.cn_counts, e.cn_types))
    if not vn_edges == cn_edges == inst.E:
        raise OracleError(f"edge counts disagree: VN side {vn_edges}, CN side {cn_edges}, E={inst.E}")
    if inst.n != sum(inst.vn_counts) or inst.m != sum(inst.cn_counts):
        raise OracleError("n or m disagrees with the per-type counts")
    if inst.E > MAX_EDGES:
        raise OracleError(f"E={inst.E} exceeds the oracle size bound {MAX_EDGES}")


class ExactEnumerator:
    """All E[A_w] of one instance, sharing the two big polynomial products."""

    def __init__(self, e: Ensemble, inst: FiniteInstance):
        _check_instance(e, inst)
        self.e = e
        self.inst = inst
        self.stride = inst.E + 1

    @cached_property
    def check_counts(self) -> list[int]:
        """N_c(v) for v = 0..E."""
        acc = [1]
        for a, cnt in zip(self.e.cn_enums, self.inst.cn_counts):
            acc = polyint.mul(acc, polyint.power(list(a.coeffs), cnt))
        return acc + [0] * (self.stride - len(acc))

    @cached_property
    def vn_product(self) -> list[int]:
        acc = [1]
        for b, cnt in zip(self.e.vn_enums, self.inst.vn_counts):
            flat = polyint.flatten2d(b.coeffs, self.stride)
            acc = polyint.mul(acc, polyint.power(flat, cnt))
        return acc

    @property
    def max_weight(self) -> int:
        return sum(b.in_length * c for b, c in zip(self.e.vn_enums, self.inst.vn_counts))

    def expected(self, w: int) -> Fraction:
        E = self.inst.E
        total = Fraction(0)
        nc = self.check_counts
        for v in range(E + 1):
            if nc[v]:
                b = polyint.coeff2d(self.vn_product, self.stride, w, v)
                if b:
                    total += Fraction(nc[v] * b, math.comb(E, v))
        return total

    def profile(self) -> list[Fraction]:
        return [self.expected(w) for w in range(self.max_weight + 1)]

    def total_mass(self) -> Fraction:
        """Sum over w of E[A_w], from the output-only marginals B_t(1, y)."""
        acc = [1]
        for b, cnt in zip(self.e.vn_enums, self.inst.vn_counts):
            acc = polyint.mul(acc, polyint.power(list(b.output_marginal()), cnt))
        E = self.inst.E
        nc = self.check_counts
        return sum(
            (Fraction(nc[v] * acc[v], math.comb(E, v)) for v in range(min(E + 1, len(acc))) if nc[v] and acc[v]),
            Fraction(0),
        )


def exact_expected_enumerator(e: Ensemble, inst: FiniteInstance, w: int) -> Fraction:
    ex = ExactEnumerator(e, inst)
    if not 0 <= w <= ex.max_weight:
        raise OracleError(f"weight {w} outside [0, {ex.max_weight}]")
    return ex.expected(w)


@dataclass(frozen=True)
class GrowthSample:
    n: int
    w: int
    exponent: float | None  # None when every weight near alpha*n has zero expectation
    expected: Fraction


def _log_fraction(x: Fraction) -> float:
    return math.log(x.numerator) - math.log(x.denominator)


def nearest_admissible_weight(ex: ExactEnumerator, target: float) -> int | None:
    """Nearest w with E[A_w] > 0; ties go to the smaller weight."""
    top = ex.max_weight
    order = sorted(range(top + 1), key=lambda w: (abs(w - target), w))
    for w in order:
        if ex.expected(w) > 0:
            return w
    return None


def empirical_growth(e: Ensemble, ns: Iterable[int | FiniteInstance], alpha: float) -> list[GrowthSample]:
    """(1/n) log E[A_w] with w the nearest admissible weight to alpha * n."""
    out = []
    for item in ns:
        inst = item if isinstance(item, FiniteInstance) else finite_instance(e, item)
        ex = ExactEnumerator(e, inst)
        w = nearest_admissible_weight(ex, alpha * inst.n)
        if w is None:
            out.append(GrowthSample(inst.n, -1, None, Fraction(0)))
            continue
        val = ex.expected(w)
        out.append(GrowthSample(inst.n, w, _log_fraction(val) / inst.n, val))
    return out


# -- exhaustive cross-check ---------------------------------------------------


def _codewords(g) -> list[int]:
    words = [0]
    for r in g.rows:
        words += [x ^ r for x in words]
    return words


def exhaustive_expected_enumerator(e: Ensemble, inst: FiniteInstance) -> list[Fraction]:
    """Average weight profile over all E! edge permutations (tiny instances only).

    Every node type must carry a generator matrix; only the weight kind is meaningful.
    """
    _check_instance(e, inst)
    if e.kind is not EnumeratorKind.WEIGHT:
        raise OracleError("exhaustive oracle counts codewords only")
    if inst.E > MAX_EXHAUSTIVE_EDGES:
        raise OracleError(f"E={inst.E} too large for exhaustive permutation enumeration")
    if any(t.matrix is None for t in e.vn_types + e.cn_types):
        raise OracleError("exhaustive oracle needs generator matrices for every type")

    # VN nodes: (generator rows, socket offset); info weight is the input weight
    vn_nodes = []
    sock = 0
    for t, cnt in zip(e.vn_types, inst.vn_counts):
        for _ in range(cnt):
            vn_nodes.append((t.matrix, sock))
            sock += t.q
    cn_nodes = []
    sock = 0
    for t, cnt in zip(e.cn_types, inst.cn_counts):
        for _ in range(cnt):
            cn_nodes.append((frozenset(_codewords(t.matrix)), sock, t.s))
            sock += t.s

    # all global VN-side assignments: (edge bit vector, information weight)
    assignments = [(0, 0)]
    for g, off in vn_nodes:
        local = []
        for mask in range(1 << g.n_rows):
            word = 0
            for i, r in enumerate(g.rows):
                if mask >> i & 1:
                    word ^= r
            local.append((word << off, mask.bit_count()))
        assignments = [(a ^ x, wa + wx) for a, wa in assignments for x, wx in local]

    E = inst.E
    max_w = sum(t.k * c for t, c in zip(e.vn_types, inst.vn_counts))
    counts = [0] * (max_w + 1)
    n_perm = 0
    for perm in itertools.permutations(range(E)):
        n_perm += 1
        for edges, wt in assignments:
            # VN socket i is wired to CN socket perm[i]
            cn_bits = 0
            for i in range(E):
                if edges >> i & 1:
                    cn_bits |= 1 << perm[i]
            if all(((cn_bits >> off) & ((1 << s) - 1)) in code for code, off, s in cn_nodes):
                counts[wt] += 1
    return [Fraction(c, n_perm) for c in counts]


__all__ = [
    "ExactEnumerator",
    "FiniteInstance",
    "GrowthSample",
    "InadmissibleN",
    "OracleError",
    "empirical_growth",
    "exact_expected_enumerator",
    "exhaustive_expected_enumerator",
    "finite_instance",
    "nearest_admissible_weight",
]
