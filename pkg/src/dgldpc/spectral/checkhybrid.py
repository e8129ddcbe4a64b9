"""Closed forms for check-hybrid ensembles (all VNs repetition codes of one length)."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import brentq

from ..ensemble import Ensemble
from ..gf2codes import WeightEnumerator, is_symmetric
from .solver import DomainError, SpectralCurve, SpectralError

F_TOL = 1e-13


class NotCheckHybrid(SpectralError, ValueError):
    pass


def binary_entropy(x: float) -> float:
    """h(x) in nats, with h(0) = h(1) = 0."""
    if x <= 0.0 or x >= 1.0:
        return 0.0
    return -x * math.log(x) - (1.0 - x) * math.log1p(-x)


class _Mixture:
    """Weighted CN enumerators: sum_t c_t log A_t(e^t) and its derivatives in log z."""

    def __init__(self, weights: Sequence[float], enums: Sequence[WeightEnumerator]):
        self.terms = []
        for c, a in zip(weights, enums):
            sup = a.support()
            u = np.array([s[0] for s in sup], dtype=float)
            lc = np.log(np.array([s[1] for s in sup], dtype=float))
            self.terms.append((c, u, lc))
        self.top = sum(c * a.max_weight for c, a in zip(weights, enums))

    def stats(self, t: float) -> tuple[float, float, float]:
        """(sum c log A, sum c E[u], sum c Var[u]) under the z = e^t tilt."""
        lg = mean = var = 0.0
        for c, u, lc in self.terms:
            l = lc + u * t
            m = l.max()
            p = np.exp(l - m)
            zsum = p.sum()
            p /= zsum
            eu = p @ u
            lg += c * (m + math.log(zsum))
            mean += c * eu
            var += c * (p @ ((u - eu) ** 2))
        return lg, mean, var

    def value(self, z: float) -> float:
        if z == 0:
            return 0.0
        return self.stats(math.log(z))[1]

    def inverse_log(self, alpha: float) -> float:
        if not 0.0 < alpha < self.top:
            raise DomainError(f"alpha={alpha!r} must lie in (0, {self.top!r})")

        def g(t: float) -> float:
            return self.stats(t)[1] - alpha

        lo, hi = -1.0, 1.0
        while g(lo) > 0:
            lo *= 2.0
            if lo < -1e4:
                raise DomainError("alpha too close to 0")
        while g(hi) < 0:
            hi *= 2.0
            if hi > 1e4:
                raise DomainError("alpha too close to the upper end of the range")
        t = brentq(g, lo, hi, xtol=1e-15, rtol=1e-15)
        for _ in range(20):
            _, mean, var = self.stats(t)
            err = mean - alpha
            if abs(err) < F_TOL or var == 0:
                break
            t -= err / var
        return t


def _require_check_hybrid(e: Ensemble) -> int:
    if not e.is_check_hybrid():
        raise NotCheckHybrid("ensemble is not check-hybrid (all VNs repetition of one length)")
    return e.vn_enums[0].out_length


def _mixture(e: Ensemble) -> _Mixture:
    return _Mixture([t.rho / t.s for t in e.cn_types], e.cn_enums)


def f_eval(e: Ensemble, z: float) -> float:
    """f(z) = sum_t (rho_t / s_t) z A_t'(z) / A_t(z)."""
    _require_check_hybrid(e)
    if z < 0:
        raise DomainError("z must be nonnegative")
    return _mixture(e).value(z)


def f_inverse(e: Ensemble, alpha: float) -> float:
    _require_check_hybrid(e)
    if alpha == 0:
        return 0.0
    if alpha >= e.m_bar:
        raise DomainError(f"alpha={alpha!r} is at or above M-bar={e.m_bar!r}")
    return math.exp(_mixture(e).inverse_log(alpha))


def checkhybrid_growth_rate(e: Ensemble, alpha: float) -> float:
    q = _require_check_hybrid(e)
    mix = _mixture(e)
    t = mix.inverse_log(alpha)
    lg = mix.stats(t)[0]
    return (1 - q) * binary_entropy(alpha) - q * alpha * t + q * lg


def tanner_growth_rate(q: int, cn: WeightEnumerator | Sequence[int], alpha: float) -> float:
    """Single CN type of length s, all VNs repetition-q."""
    if not isinstance(cn, WeightEnumerator):
        cn = WeightEnumerator(tuple(int(c) for c in cn))
    s = cn.length
    mix = _Mixture([1.0 / s], [cn])
    if not 0.0 < alpha < cn.max_weight / s:
        raise DomainError(f"alpha={alpha!r} outside (0, {cn.max_weight}/{s})")
    t = mix.inverse_log(alpha)
    lg = mix.stats(t)[0]
    return (1 - q) * binary_entropy(alpha) - q * alpha * t + q * lg


@dataclass(frozen=True)
class CardanoRoot:
    z: float
    x: float
    discriminant: float


def cardano_f_inverse_36(alpha: float) -> float:
    return cardano_details_36(alpha).z


def cardano_details_36(alpha: float) -> CardanoRoot:
    """f^{-1} for the (3,6) ensemble via the trigonometric cubic formula in x = z^2."""
    if not 0.0 < alpha < 1.0:
        raise DomainError("alpha must lie in (0, 1)")
    a, b, c, d = alpha - 1.0, 15 * alpha - 10.0, 15 * alpha - 5.0, alpha
    rho = (3 * a * c - b * b) / (9 * a * a)
    mu = (9 * a * b * c - 27 * a * a * d - 2 * b**3) / (54 * a**3)
    disc = rho**3 + mu * mu
    if disc >= 0:
        raise SpectralError(f"cubic discriminant {disc!r} is not negative at alpha={alpha!r}")
    # atan2 keeps theta in (0, pi) when mu < 0, i.e. the principal root branch
    theta = math.atan2(math.sqrt(-disc), mu)
    x = 2 * math.sqrt(-rho) * math.cos(theta / 3) - b / (3 * a)
    if x <= 0:
        raise SpectralError(f"Cardano root x={x!r} is not positive")
    return CardanoRoot(math.sqrt(x), x, disc)


@dataclass(frozen=True)
class SymmetryReport:
    all_cn_symmetric: bool
    max_deviation: float
    m_bar: float
    pairs_checked: int

    @property
    def consistent(self) -> bool:
        return (not self.all_cn_symmetric) or self.max_deviation < 1e-9


def symmetry_report(c: SpectralCurve, e: Ensemble) -> SymmetryReport:
    """Compare G(M - alpha) with G(alpha) over the curve's grid via the closed form."""
    _require_check_hybrid(e)
    sym = all(is_symmetric(a) for a in e.cn_enums)
    dev = 0.0
    n = 0
    for p in c.points:
        mirror = e.m_bar - p.alpha
        if 0.0 < mirror < e.m_bar:
            dev = max(dev, abs(checkhybrid_growth_rate(e, mirror) - p.G))
            n += 1
    rep = SymmetryReport(sym, dev, e.m_bar, n)
    if not rep.consistent:
        raise AssertionError(f"symmetric CN WEFs but deviation {dev!r}")
    return rep


__all__ = [
    "CardanoRoot",
    "NotCheckHybrid",
    "SymmetryReport",
    "binary_entropy",
    "cardano_details_36",
    "cardano_f_inverse_36",
    "checkhybrid_growth_rate",
    "f_eval",
    "f_inverse",
    "symmetry_report",
    "tanner_growth_rate",
]
