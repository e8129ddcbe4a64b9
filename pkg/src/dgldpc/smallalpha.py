"""Growth classification and the small-alpha expansion of the spectral shape."""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.optimize import brentq

from .ensemble import Ensemble
from .gf2codes import EnumeratorKind

BOUNDARY_TOL = 1e-12
TIE_TOL = 1e-12
SHORTCUT_TOL = 1e-12


class ExpansionUnavailable(ValueError):
    """Raised when T = 0, so the alpha log alpha term vanishes."""


@dataclass(frozen=True)
class GrowthClass:
    label: str  # "good" | "bad" | "boundary"
    C: float
    V: float
    extension: bool = False

    @property
    def cv(self) -> float:
        return self.C * self.V


def _c_param(e: Ensemble, r: int) -> float:
    return float(r) * sum(
        t.rho * a.coeffs[r] / t.s for t, a in zip(e.cn_types, e.cn_enums) if a.min_dist == r
    )


def _v_param(e: Ensemble) -> float:
    return 2.0 * sum(
        t.lam * b.output_marginal()[2] / t.q for t, b in zip(e.vn_types, e.vn_enums) if b.min_dist == 2
    )


def classify_growth(e: Ensemble) -> GrowthClass:
    C = _c_param(e, 2)
    V = _v_param(e)
    ext = e.kind is not EnumeratorKind.WEIGHT
    if C == 0 or V == 0:
        return GrowthClass("good", C, V, ext)
    cv = C * V
    if abs(cv - 1.0) < BOUNDARY_TOL:
        label = "boundary"
    else:
        label = "good" if cv < 1 else "bad"
    return GrowthClass(label, C, V, ext)


@dataclass(frozen=True)
class SmallAlphaData:
    r: int
    p: int
    psi: float
    C: float
    V: float
    T: float
    Y_v: tuple[int, ...]
    P_t: dict[int, tuple[tuple[int, int], ...]]
    Q1_coeffs: tuple[float, ...]  # index = power of x
    Q2_coeffs: tuple[float, ...]
    q1_inv_1: float | None
    int_lambda: float
    shortcut: str | None  # "gldpc" | "variable-regular" | "regular-ldpc" | None
    shortcut_params: dict
    extension: bool = False

    @property
    def t_zero(self) -> bool:
        return self.T == 0


def _poly(coeffs, x: float) -> float:
    return sum(c * x**i for i, c in enumerate(coeffs))


def small_alpha_data(e: Ensemble) -> SmallAlphaData:
    r = min(a.min_dist for a in e.cn_enums)
    p = min(b.min_dist for b in e.vn_enums)
    psi = r / (r - 1)
    C = _c_param(e, r)
    V = _v_param(e)

    ratios = []
    for idx, b in enumerate(e.vn_enums):
        for i, j, c in b.support():
            if (i, j) != (0, 0):
                ratios.append(((j - psi) / i, idx, i, j, c))
    T = min(x[0] for x in ratios)
    if abs(T) < TIE_TOL:
        T = 0.0
    hits = [x for x in ratios if abs(x[0] - T) <= TIE_TOL]
    P_t: dict[int, list[tuple[int, int]]] = {}
    for _, idx, i, j, _ in hits:
        P_t.setdefault(idx, []).append((i, j))
    deg = max(x[2] for x in hits)
    q1 = [0.0] * (deg + 1)
    q2 = [0.0] * (deg + 1)
    il = e.int_lambda
    for _, idx, i, j, c in hits:
        t = e.vn_types[idx]
        base = (t.lam / t.q) * c * C ** (j / r) * (il / math.e) ** (i * T / psi)
        q1[i] += j * base
        q2[i] += i * base
    inv = None
    if T > 0:
        hi = 1.0
        while _poly(q1, hi) < 1.0:
            hi *= 2.0
        inv = brentq(lambda x: _poly(q1, x) - 1.0, 0.0, hi, xtol=1e-300, rtol=1e-15)

    shortcut, params = _shortcut(e, r, p, C)
    return SmallAlphaData(
        r, p, psi, C, V, T, tuple(sorted(P_t)), {k: tuple(v) for k, v in P_t.items()},
        tuple(q1), tuple(q2), inv, il, shortcut, params, e.kind is not EnumeratorKind.WEIGHT,
    )


def _shortcut(e: Ensemble, r: int, p: int, C: float) -> tuple[str | None, dict]:
    if not all(b.is_repetition() for b in e.vn_enums):
        return None, {}
    lam_p = sum(t.lam for t, b in zip(e.vn_types, e.vn_enums) if b.out_length == p)
    params = {"lambda_p": lam_p, "p": p, "r": r, "C": C, "int_lambda": e.int_lambda}
    degrees = {b.out_length for b in e.vn_enums}
    if len(degrees) > 1:
        return "gldpc", params
    single_spc = (
        len(e.cn_enums) == 1
        and e.kind is EnumeratorKind.WEIGHT
        and e.cn_enums[0].coeffs == _spc_wef(e.cn_enums[0].length)
    )
    if single_spc:
        params["d_c"] = e.cn_enums[0].length
        params["d_v"] = p
        return "regular-ldpc", params
    return "variable-regular", params


def _spc_wef(s: int) -> tuple[int, ...]:
    return tuple(math.comb(s, u) if u % 2 == 0 else 0 for u in range(s + 1))


def small_alpha_growth(d: SmallAlphaData, alpha: float) -> float:
    """Two-term expansion of G near alpha = 0 (o(alpha) dropped)."""
    if d.T <= 0 or d.q1_inv_1 is None:
        raise ExpansionUnavailable("T = 0: the alpha log alpha coefficient vanishes")
    k = d.T / d.psi
    x = d.q1_inv_1
    return k * alpha * math.log(alpha) + alpha * (math.log(1.0 / x) + k * math.log(1.0 / _poly(d.Q2_coeffs, x)))


def alpha_star_general(d: SmallAlphaData) -> float:
    if d.T <= 0 or d.q1_inv_1 is None:
        raise ExpansionUnavailable("T = 0: alpha* approximation unavailable")
    x = d.q1_inv_1
    return x ** (d.psi / d.T) * _poly(d.Q2_coeffs, x)


def alpha_star_gldpc(lambda_p: float, C: float, p: int, r: int, int_lambda: float) -> float:
    n = p * r - p - r
    return lambda_p ** (-r / n) * C ** (-p / n) * math.e / (p * int_lambda)


def alpha_star_variable_regular(C: float, p: int, r: int) -> float:
    return C ** (-p / (p * r - p - r)) * math.e


def alpha_star_regular_ldpc(d_v: int, d_c: int) -> float:
    return math.e / (d_c - 1) ** (1.0 / (1.0 - 2.0 / d_v))


@dataclass(frozen=True)
class AlphaStarApprox:
    general: float
    shortcut: str | None
    shortcut_value: float | None

    @property
    def value(self) -> float:
        return self.general


def alpha_star_approx(d: SmallAlphaData) -> AlphaStarApprox:
    """General approximation plus the matching closed-form shortcut, cross-checked."""
    general = alpha_star_general(d)
    sp = d.shortcut_params
    value = None
    if d.shortcut == "gldpc":
        value = alpha_star_gldpc(sp["lambda_p"], sp["C"], sp["p"], sp["r"], sp["int_lambda"])
    elif d.shortcut == "variable-regular":
        value = alpha_star_variable_regular(sp["C"], sp["p"], sp["r"])
    elif d.shortcut == "regular-ldpc":
        value = alpha_star_regular_ldpc(sp["d_v"], sp["d_c"])
    if value is not None and abs(value - general) > SHORTCUT_TOL * max(1.0, abs(general)):
        raise AssertionError(f"{d.shortcut} shortcut {value!r} disagrees with general form {general!r}")
    return AlphaStarApprox(general, d.shortcut, value)


__all__ = [
    "AlphaStarApprox",
    "ExpansionUnavailable",
    "GrowthClass",
    "SmallAlphaData",
    "alpha_star_approx",
    "alpha_star_general",
    "alpha_star_gldpc",
    "alpha_star_regular_ldpc",
    "alpha_star_variable_regular",
    "classify_growth",
    "small_alpha_data",
    "small_alpha_growth",
]
