"""Irregular D-GLDPC ensembles: node types, edge fractions and derived scalars."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from math import lcm
from typing import Sequence

from .gf2codes import (
    BinaryMatrix,
    CodeError,
    EnumeratorKind,
    IOWeightEnumerator,
    WeightEnumerator,
    average_weight_is_half_length,
    bd_ssef,
    dimension_from_total,
    io_map_ssef,
    io_weight_enumerator,
    is_symmetric,
    map_ssef,
    repetition,
    weight_enumerator,
)

SUM_TOL = 1e-12


class EnsembleError(ValueError):
    pass


def _frac(x: float) -> Fraction:
    """Shortest decimal reading of a float as an exact rational."""
    return Fraction(repr(float(x)))


# -- node types ---------------------------------------------------------------


@dataclass(frozen=True)
class CNTypeSpec:
    """A check-node type: local code enumerators plus its edge fraction rho."""

    rho: float
    wef: WeightEnumerator
    ssef_map: WeightEnumerator | None = None
    matrix: BinaryMatrix | None = None
    name: str = ""

    def __post_init__(self) -> None:
        if not 0 < self.rho <= 1:
            raise EnsembleError(f"rho must lie in (0, 1], got {self.rho}")
        if self.wef.min_dist < 2:
            raise EnsembleError(f"CN type {self.name!r} has minimum distance < 2")
        if self.ssef_map is not None and self.ssef_map.length != self.wef.length:
            raise EnsembleError("MAP-SSEF length differs from WEF length")

    @classmethod
    def from_matrix(cls, g: BinaryMatrix, rho: float, name: str = "") -> "CNTypeSpec":
        return cls(rho, weight_enumerator(g), map_ssef(g), g, name)

    @classmethod
    def from_enumerators(
        cls,
        rho: float,
        wef: WeightEnumerator | Sequence[int],
        ssef_map: WeightEnumerator | Sequence[int] | None = None,
        matrix: BinaryMatrix | None = None,
        name: str = "",
    ) -> "CNTypeSpec":
        """Explicit enumerators; when a matrix is also given they must agree with it."""
        if not isinstance(wef, WeightEnumerator):
            wef = WeightEnumerator(tuple(int(c) for c in wef))
        if ssef_map is not None and not isinstance(ssef_map, WeightEnumerator):
            ssef_map = WeightEnumerator(tuple(int(c) for c in ssef_map), EnumeratorKind.STOPPING_MAP)
        if matrix is not None:
            if weight_enumerator(matrix).coeffs != wef.coeffs:
                raise EnsembleError(f"CN type {name!r}: WEF disagrees with generator matrix")
            derived = map_ssef(matrix)
            if ssef_map is not None and derived.coeffs != ssef_map.coeffs:
                raise EnsembleError(f"CN type {name!r}: MAP-SSEF disagrees with generator matrix")
            ssef_map = derived
        return cls(rho, wef, ssef_map, matrix, name)

    @property
    def s(self) -> int:
        return self.wef.length

    @property
    def h(self) -> int:
        return dimension_from_total(self.wef.total)

    @property
    def r(self) -> int:
        return self.wef.min_dist

    @property
    def rate(self) -> float:
        return self.h / self.s

    def enumerator(self, kind: EnumeratorKind) -> WeightEnumerator:
        if kind is EnumeratorKind.WEIGHT:
            return self.wef
        if kind is EnumeratorKind.STOPPING_BD:
            return bd_ssef(self.wef)
        if self.ssef_map is None:
            raise EnsembleError(f"CN type {self.name!r}: MAP-SSEF unavailable (no matrix or explicit coefficients)")
        return self.ssef_map


@dataclass(frozen=True)
class VNTypeSpec:
    """A variable-node type: IO enumerators of its encoder plus its edge fraction lambda."""

    lam: float
    iowef: IOWeightEnumerator
    io_ssef: IOWeightEnumerator | None = None
    matrix: BinaryMatrix | None = None
    name: str = ""

    def __post_init__(self) -> None:
        if not 0 < self.lam <= 1:
            raise EnsembleError(f"lambda must lie in (0, 1], got {self.lam}")
        if self.iowef.min_dist < 2:
            raise EnsembleError(f"VN type {self.name!r} has minimum distance < 2")

    @classmethod
    def from_matrix(cls, g: BinaryMatrix, lam: float, name: str = "") -> "VNTypeSpec":
        return cls(lam, io_weight_enumerator(g), io_map_ssef(g), g, name)

    @classmethod
    def from_enumerators(
        cls,
        lam: float,
        iowef: IOWeightEnumerator | Sequence[Sequence[int]],
        io_ssef: IOWeightEnumerator | Sequence[Sequence[int]] | None = None,
        matrix: BinaryMatrix | None = None,
        name: str = "",
    ) -> "VNTypeSpec":
        if not isinstance(iowef, IOWeightEnumerator):
            iowef = IOWeightEnumerator(tuple(tuple(int(c) for c in row) for row in iowef))
        if io_ssef is not None and not isinstance(io_ssef, IOWeightEnumerator):
            io_ssef = IOWeightEnumerator(
                tuple(tuple(int(c) for c in row) for row in io_ssef), EnumeratorKind.STOPPING_MAP
            )
        if matrix is not None:
            if io_weight_enumerator(matrix).coeffs != iowef.coeffs:
                raise EnsembleError(f"VN type {name!r}: IO-WEF disagrees with generator matrix")
            derived = io_map_ssef(matrix)
            if io_ssef is not None and derived.coeffs != io_ssef.coeffs:
                raise EnsembleError(f"VN type {name!r}: IO-SSEF disagrees with generator matrix")
            io_ssef = derived
        elif io_ssef is None and iowef.is_repetition():
            # a repetition encoder's stopping sets are the all-or-nothing erasures
            io_ssef = replace(iowef, kind=EnumeratorKind.STOPPING_MAP)
        return cls(lam, iowef, io_ssef, matrix, name)

    @property
    def q(self) -> int:
        return self.iowef.out_length

    @property
    def k(self) -> int:
        return self.iowef.in_length

    @property
    def p(self) -> int:
        return self.iowef.min_dist

    @property
    def rate(self) -> float:
        return self.k / self.q

    def enumerator(self, kind: EnumeratorKind) -> IOWeightEnumerator:
        if kind is EnumeratorKind.WEIGHT:
            return self.iowef
        if self.io_ssef is None:
            raise EnsembleError(f"VN type {self.name!r}: IO-SSEF unavailable (no matrix or explicit coefficients)")
        return self.io_ssef


def repetition_vn(q: int, lam: float = 1.0, name: str = "") -> VNTypeSpec:
    coeffs = [[0] * (q + 1) for _ in range(2)]
    coeffs[0][0] = 1
    coeffs[1][q] = 1
    return VNTypeSpec.from_enumerators(lam, coeffs, matrix=repetition(q), name=name or f"rep-{q}")


# -- ensemble -----------------------------------------------------------------


@dataclass(frozen=True)
class Ensemble:
    """Immutable ensemble with the enumerators of one kind attached.

    Derived scalars follow the usual edge-perspective conventions: int_lambda =
    sum lambda_t / q_t, gamma_t / delta_t are node fractions, and m_bar is the
    largest fraction of edges that CN codewords can carry.
    """

    vn_types: tuple[VNTypeSpec, ...]
    cn_types: tuple[CNTypeSpec, ...]
    kind: EnumeratorKind
    vn_enums: tuple[IOWeightEnumerator, ...]
    cn_enums: tuple[WeightEnumerator, ...]
    int_lambda: float
    int_rho: float
    delta: tuple[float, ...]
    gamma: tuple[float, ...]
    rate: float
    k_s: float
    m_bar: float
    m_bar_exact: Fraction
    label: str = field(default="", compare=False)

    @property
    def lambdas(self) -> tuple[float, ...]:
        return tuple(t.lam for t in self.vn_types)

    @property
    def rhos(self) -> tuple[float, ...]:
        return tuple(t.rho for t in self.cn_types)

    @property
    def edges_per_vn(self) -> float:
        return 1.0 / self.int_lambda

    @property
    def cns_per_vn(self) -> float:
        return self.int_rho / self.int_lambda

    def is_check_hybrid(self) -> bool:
        """All VNs are repetition codes of one common length."""
        return all(e.is_repetition() for e in self.vn_enums) and len({e.out_length for e in self.vn_enums}) == 1

    def with_kind(self, kind: EnumeratorKind | str) -> "Ensemble":
        return build_ensemble(self.vn_types, self.cn_types, kind, label=self.label)

    def minimal_admissible_n(self) -> int:
        """Smallest n for which every n delta_t and m gamma_t is an integer."""
        return admissible_n_step(self)


def _check_sum(values: Sequence[float], what: str) -> None:
    if not values:
        raise EnsembleError(f"no {what} types")
    total = sum(values)
    if abs(total - 1.0) > SUM_TOL:
        raise EnsembleError(f"{what} fractions sum to {total!r}, not 1")


def build_ensemble(
    vns: Sequence[VNTypeSpec],
    cns: Sequence[CNTypeSpec],
    kind: EnumeratorKind | str = EnumeratorKind.WEIGHT,
    label: str = "",
) -> Ensemble:
    kind = EnumeratorKind.parse(kind)
    vns, cns = tuple(vns), tuple(cns)
    _check_sum([t.lam for t in vns], "lambda")
    _check_sum([t.rho for t in cns], "rho")
    vn_enums, cn_enums = [], []
    for i, t in enumerate(vns):
        try:
            vn_enums.append(t.enumerator(kind))
        except (EnsembleError, CodeError) as exc:
            raise EnsembleError(f"VN type {i}: {exc}") from exc
    for i, t in enumerate(cns):
        try:
            cn_enums.append(t.enumerator(kind))
        except (EnsembleError, CodeError) as exc:
            raise EnsembleError(f"CN type {i}: {exc}") from exc

    int_lambda = sum(t.lam / t.q for t in vns)
    int_rho = sum(t.rho / t.s for t in cns)
    delta = tuple(t.lam / (t.q * int_lambda) for t in vns)
    gamma = tuple(t.rho / (t.s * int_rho) for t in cns)
    rate = 1.0 - sum(t.rho * (1.0 - t.rate) for t in cns) / sum(t.lam * t.rate for t in vns)
    if not 0.0 < rate < 1.0:
        raise EnsembleError(f"design rate {rate} outside (0, 1)")
    k_s = sum(t.lam * t.k / t.q for t in vns) / int_lambda
    m_bar = sum(t.rho * e.max_weight / t.s for t, e in zip(cns, cn_enums))
    m_exact = sum((_frac(t.rho) * Fraction(e.max_weight, t.s) for t, e in zip(cns, cn_enums)), Fraction(0))
    return Ensemble(
        vns, cns, kind, tuple(vn_enums), tuple(cn_enums),
        int_lambda, int_rho, delta, gamma, rate, k_s, m_bar, m_exact, label,
    )


def block_length_ratio(e: Ensemble) -> float:
    return e.k_s


def rho_from_node_fractions(gammas: Sequence[float], lengths: Sequence[int]) -> list[float]:
    """Convert CN (or VN) node fractions to edge fractions."""
    weights = [g * s for g, s in zip(gammas, lengths)]
    total = sum(weights)
    return [w / total for w in weights]


def admissible_n_step(e: Ensemble) -> int:
    """Minimal n such that n delta_t and m gamma_t are integers (fractions read as decimals)."""
    lam = [_frac(t.lam) for t in e.vn_types]
    rho = [_frac(t.rho) for t in e.cn_types]
    il = sum((l / t.q for l, t in zip(lam, e.vn_types)), Fraction(0))
    ir = sum((r / t.s for r, t in zip(rho, e.cn_types)), Fraction(0))
    # counts per n: VN type t -> delta_t, CN type t -> (rho_t / s_t) / il
    per_n = [l / t.q / il for l, t in zip(lam, e.vn_types)]
    per_n += [r / t.s / il for r, t in zip(rho, e.cn_types)]
    per_n.append(1 / il)  # edges
    step = 1
    for f in per_n:
        step = lcm(step, f.denominator)
    return step


# -- standing assumptions -----------------------------------------------------


@dataclass(frozen=True)
class AssumptionReport:
    violations: tuple[str, ...]
    min_distance_two_cn: tuple[int, ...]
    min_distance_two_vn: tuple[int, ...]
    dual_distance_ok: bool
    all_cn_symmetric: bool
    parity_rows_per_vn: float

    @property
    def ok(self) -> bool:
        return not self.violations

    @property
    def stationary_test_applicable(self) -> bool:
        return self.dual_distance_ok


def validate_assumptions(e: Ensemble) -> AssumptionReport:
    """Report-only check of the ensemble's standing assumptions."""
    violations = []
    for i, t in enumerate(e.cn_types):
        if t.r < 2:
            violations.append(f"CN type {i}: r_t = {t.r} < 2")
    for i, t in enumerate(e.vn_types):
        if t.p < 2:
            violations.append(f"VN type {i}: p_t = {t.p} < 2")
    cn_dual = all(average_weight_is_half_length(t.wef) for t in e.cn_types)
    vn_dual = all(
        average_weight_is_half_length(WeightEnumerator(t.iowef.output_marginal())) for t in e.vn_types
    )
    parity = e.cns_per_vn * sum(g * (t.s - t.h) for g, t in zip(e.gamma, e.cn_types))
    return AssumptionReport(
        tuple(violations),
        tuple(i for i, t in enumerate(e.cn_types) if t.r == 2),
        tuple(i for i, t in enumerate(e.vn_types) if t.p == 2),
        cn_dual and vn_dual,
        all(is_symmetric(t.wef) for t in e.cn_types),
        parity,
    )


__all__ = [
    "AssumptionReport",
    "CNTypeSpec",
    "Ensemble",
    "EnsembleError",
    "VNTypeSpec",
    "admissible_n_step",
    "block_length_ratio",
    "build_ensemble",
    "repetition_vn",
    "rho_from_node_fractions",
    "validate_assumptions",
]
