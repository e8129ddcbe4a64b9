"""General spectral-shape solver.

The four-equation system is reduced to three unknowns (u, v, w) = (log x0,
log y0, log z0) by eliminating beta.  With a = alpha * int_lambda and
b = beta * int_lambda = sigmoid(v + w), the remaining equations are the
gradient of

    L(u, v, w) = Phi_v(u, v) + Phi_c(w) - a u - log(1 + e^{v + w}),

where Phi_v = sum_t (lambda_t / q_t) log B_t(e^u, e^v) and Phi_c = sum_t
(rho_t / s_t) log A_t(e^w).  At the solution G = L / int_lambda and
dG/dalpha = -u.  The Hessian of L is symmetric and nonsingular for any
ensemble with positive variances, so Newton with a tangent predictor is used
for continuation in alpha.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import brentq

from ..ensemble import Ensemble
from ..gf2codes import EnumeratorKind

DEFAULT_TOL = 1e-11
ENDPOINT_GAP = 1e-9
MAX_NEWTON = 60
MIN_STEP = 1e-8


class SpectralError(RuntimeError):
    pass


class DomainError(SpectralError, ValueError):
    pass


class ConvergenceError(SpectralError):
    def __init__(self, message: str, alpha: float, last: np.ndarray | None = None):
        super().__init__(f"{message} (alpha={alpha!r})")
        self.alpha = alpha
        self.last = last


class InconclusiveGrowth(SpectralError):
    pass


@dataclass(frozen=True)
class SpectralPoint:
    alpha: float
    G: float
    x0: float
    y0: float
    z0: float
    beta: float
    residual: float
    log_coords: tuple[float, float, float] = (0.0, 0.0, 0.0)

    @property
    def slope(self) -> float:
        return -self.log_coords[0]


@dataclass(frozen=True)
class SpectralCurve:
    kind: EnumeratorKind
    points: tuple[SpectralPoint, ...]
    alpha_star: float | None
    stationary_alphas: tuple[float, ...]
    peak: tuple[float, float] | None
    alpha_max: float
    peak_is_global: bool | None = None

    @property
    def alphas(self) -> np.ndarray:
        return np.array([p.alpha for p in self.points])

    @property
    def values(self) -> np.ndarray:
        return np.array([p.G for p in self.points])


# -- tilted statistics --------------------------------------------------------


def _logsumexp(l: np.ndarray) -> tuple[float, np.ndarray]:
    m = l.max()
    p = np.exp(l - m)
    z = p.sum()
    return m + math.log(z), p / z


class _System:
    """Precomputed supports of all enumerators of one ensemble."""

    def __init__(self, e: Ensemble):
        self.e = e
        self.il = e.int_lambda
        self.vn = []
        for t, enum in zip(e.vn_types, e.vn_enums):
            sup = enum.support()
            i = np.array([s[0] for s in sup], dtype=float)
            j = np.array([s[1] for s in sup], dtype=float)
            lc = np.log(np.array([s[2] for s in sup], dtype=float))
            self.vn.append((t.lam / t.q, i, j, lc))
        self.cn = []
        for t, enum in zip(e.cn_types, e.cn_enums):
            sup = enum.support()
            u = np.array([s[0] for s in sup], dtype=float)
            lc = np.log(np.array([s[1] for s in sup], dtype=float))
            self.cn.append((t.rho / t.s, u, lc))

    def vn_stats(self, u: float, v: float):
        phi = gi = gj = hii = hij = hjj = 0.0
        for wt, i, j, lc in self.vn:
            lz, p = _logsumexp(lc + i * u + j * v)
            ei, ej = p @ i, p @ j
            di, dj = i - ei, j - ej
            phi += wt * lz
            gi += wt * ei
            gj += wt * ej
            hii += wt * (p @ (di * di))
            hij += wt * (p @ (di * dj))
            hjj += wt * (p @ (dj * dj))
        return phi, gi, gj, hii, hij, hjj

    def cn_stats(self, w: float):
        phi = gu = huu = 0.0
        for wt, u, lc in self.cn:
            lz, p = _logsumexp(lc + u * w)
            eu = p @ u
            du = u - eu
            phi += wt * lz
            gu += wt * eu
            huu += wt * (p @ (du * du))
        return phi, gu, huu

    def evaluate(self, X: np.ndarray, a: float, need_hessian: bool = True):
        u, v, w = X
        phv, gi, gj, hii, hij, hjj = self.vn_stats(u, v)
        phc, gu, huu = self.cn_stats(w)
        t = v + w
        b = _sigmoid(t)
        F = np.array([gi - a, gj - b, gu - b])
        L = phv + phc - a * u - _softplus(t)
        if not need_hessian:
            return F, L, b, None
        s = b * (1.0 - b)
        H = np.array([[hii, hij, 0.0], [hij, hjj - s, -s], [0.0, -s, huu - s]])
        return F, L, b, H


def _sigmoid(t: float) -> float:
    if t >= 0:
        return 1.0 / (1.0 + math.exp(-t))
    et = math.exp(t)
    return et / (1.0 + et)


def _softplus(t: float) -> float:
    return t + math.log1p(math.exp(-t)) if t > 0 else math.log1p(math.exp(t))


def _relative_residual(F: np.ndarray, a: float, b: float) -> float:
    if not (a > 0 and b > 0) or not np.all(np.isfinite(F)):
        return math.inf  # b underflowed or the iterate left the representable range
    return float(max(abs(F[0]) / a, abs(F[1]) / b, abs(F[2]) / b))


# -- Newton / continuation ----------------------------------------------------


def _newton(sys: _System, X: np.ndarray, a: float, tol: float):
    """Damped Newton on the gradient system; returns (X, F, L, b, H) or None."""
    F, L, b, H = sys.evaluate(X, a)
    merit = F @ F
    for _ in range(MAX_NEWTON):
        res = _relative_residual(F, a, b)
        if res < tol:
            # one extra step sharpens G to the last few ulps
            try:
                dX = np.linalg.solve(H, -F)
            except np.linalg.LinAlgError:
                return X, F, L, b, H
            Xn = X + dX
            Fn, Ln, bn, Hn = sys.evaluate(Xn, a)
            if np.all(np.isfinite(Fn)) and Fn @ Fn <= merit:
                return Xn, Fn, Ln, bn, Hn
            return X, F, L, b, H
        try:
            dX = np.linalg.solve(H, -F)
        except np.linalg.LinAlgError:
            return None
        if not np.all(np.isfinite(dX)):
            return None
        step = 1.0
        while step > 1e-10:
            Xn = X + step * dX
            Fn, Ln, bn, Hn = sys.evaluate(Xn, a)
            mn = Fn @ Fn
            if np.isfinite(mn) and mn <= (1.0 - 1e-4 * step) * merit:
                break
            step *= 0.5
        else:
            return None
        X, F, L, b, H, merit = Xn, Fn, Ln, bn, Hn, mn
    return None


def _make_point(sys: _System, alpha: float, X: np.ndarray, F, L, b) -> SpectralPoint:
    u, v, w = (float(c) for c in X)
    a = alpha * sys.il
    return SpectralPoint(
        alpha=float(alpha),
        G=float(L / sys.il),
        x0=math.exp(u),
        y0=math.exp(v),
        z0=math.exp(w),
        beta=b / sys.il,
        residual=_relative_residual(F, a, b),
        log_coords=(u, v, w),
    )


class _Tracker:
    """Continuation state for one ensemble."""

    def __init__(self, e: Ensemble, tol: float = DEFAULT_TOL):
        self.sys = _System(e)
        self.e = e
        self.tol = tol
        self.alpha_max = alpha_max(e)
        self.seed = self._seed()

    # seeds ------------------------------------------------------------------
    def _seed(self) -> SpectralPoint:
        sys = self.sys
        if self.e.kind is EnumeratorKind.WEIGHT:
            a0 = 0.5 * self.e.k_s * sys.il
            X = np.zeros(3)
            F, L, b, _ = sys.evaluate(X, a0, need_hessian=False)
            if _relative_residual(F, a0, b) < 1e-14:
                return _make_point(sys, a0 / sys.il, X, F, L, b)
        for w in (0.0, -1.0, 1.0, -2.0, 2.0, -4.0, 4.0, -8.0, 8.0):
            pt = self._wscan_seed(w)
            if pt is not None:
                return pt
        raise ConvergenceError("no continuation seed found", float("nan"))

    def _wscan_seed(self, w: float) -> SpectralPoint | None:
        sys = self.sys
        _, b, _ = sys.cn_stats(w)
        if not 0.0 < b < 1.0:
            return None
        v = math.log(b / (1.0 - b)) - w

        def g(u: float) -> float:
            return sys.vn_stats(u, v)[2] - b

        lo, hi = -1.0, 1.0
        while g(lo) > 0 and lo > -200:
            lo *= 2
        while g(hi) < 0 and hi < 200:
            hi *= 2
        if not (g(lo) <= 0 <= g(hi)):
            return None
        u = brentq(g, lo, hi, xtol=1e-15, rtol=1e-15)
        a = sys.vn_stats(u, v)[1]
        alpha = a / sys.il
        if not ENDPOINT_GAP < alpha < self.alpha_max - ENDPOINT_GAP:
            return None
        X = np.array([u, v, w])
        out = _newton(sys, X, a, self.tol)
        if out is None:
            return None
        X, F, L, b2, _ = out
        return _make_point(sys, alpha, X, F, L, b2)

    # tracking ---------------------------------------------------------------
    def check_domain(self, alpha: float) -> None:
        if not ENDPOINT_GAP <= alpha <= self.alpha_max - ENDPOINT_GAP:
            raise DomainError(f"alpha={alpha!r} outside (0, {self.alpha_max!r}) or within {ENDPOINT_GAP} of an endpoint")

    def track(self, start: SpectralPoint, alpha: float) -> SpectralPoint:
        """March from a solved point to alpha with tangent predictor + Newton."""
        self.check_domain(alpha)
        sys = self.sys
        il = sys.il
        cur_alpha = start.alpha
        X = np.array(start.log_coords)
        out = _newton(sys, X, cur_alpha * il, self.tol)
        if out is None:
            raise ConvergenceError("start point does not converge", cur_alpha, X)
        X, F, L, b, H = out
        if cur_alpha == alpha:
            return _make_point(sys, alpha, X, F, L, b)
        h = alpha - cur_alpha
        while True:
            remaining = alpha - cur_alpha
            if abs(h) >= abs(remaining):
                h = remaining
            target = cur_alpha + h
            try:
                tangent = np.linalg.solve(H, np.array([il, 0.0, 0.0]))
            except np.linalg.LinAlgError:
                tangent = np.zeros(3)
            guess = X + h * tangent
            out = _newton(sys, guess, target * il, self.tol)
            if out is None:
                h *= 0.5
                if abs(h) < MIN_STEP:
                    raise ConvergenceError("continuation step underflow", target, X)
                continue
            X, F, L, b, H = out
            cur_alpha = target
            if cur_alpha == alpha:
                return _make_point(sys, alpha, X, F, L, b)
            h *= 2.0


# -- domain -------------------------------------------------------------------


def alpha_max(e: Ensemble) -> float:
    """Supremum of alpha for which the system has a solution.

    Maximise a = sum_t (lambda_t / q_t) E_t[i] over mixtures of VN support
    points subject to the edge weight sum_t (lambda_t / q_t) E_t[j] <= M-bar;
    solved exactly through the one-dimensional dual over breakpoints.
    """
    supports = []
    for t, enum in zip(e.vn_types, e.vn_enums):
        supports.append((t.lam / t.q, [(i, j) for i, j, _ in enum.support()]))
    mus = {0.0}
    for _, pts in supports:
        for i1, j1 in pts:
            for i2, j2 in pts:
                if j1 != j2:
                    mu = (i1 - i2) / (j1 - j2)
                    if mu > 0:
                        mus.add(mu)

    def dual(mu: float) -> float:
        return sum(wt * max(i - mu * j for i, j in pts) for wt, pts in supports) + mu * e.m_bar

    return min(dual(mu) for mu in mus) / e.int_lambda


def default_grid(e: Ensemble, points: int = 100) -> np.ndarray:
    am = alpha_max(e)
    return np.linspace(0.005 * am, 0.995 * am, points)


# -- public operations --------------------------------------------------------


def solve_point(e: Ensemble, alpha: float, tol: float = DEFAULT_TOL) -> SpectralPoint:
    tr = _Tracker(e, tol)
    tr.check_domain(alpha)
    return tr.track(tr.seed, alpha)


def growth_derivative(p: SpectralPoint) -> float:
    return -math.log(p.x0)


def _march(tr: _Tracker, alphas: Sequence[float]) -> list[SpectralPoint]:
    """Solve on sorted alphas, marching outward from the seed in both directions."""
    seed = tr.seed
    alphas = sorted(alphas)
    below = [a for a in alphas if a < seed.alpha]
    above = [a for a in alphas if a >= seed.alpha]
    out_below = []
    cur = seed
    for a in reversed(below):
        cur = tr.track(cur, a)
        out_below.append(cur)
    out_above = []
    cur = seed
    for a in above:
        cur = tr.track(cur, a)
        out_above.append(cur)
    return list(reversed(out_below)) + out_above


def _nearest(points: Sequence[SpectralPoint], alpha: float) -> SpectralPoint:
    return min(points, key=lambda p: abs(p.alpha - alpha))


def _refine_stationary(tr: _Tracker, lo: SpectralPoint, hi: SpectralPoint) -> float:
    def slope(a: float) -> float:
        return tr.track(_nearest((lo, hi), a), a).log_coords[0]

    return brentq(slope, lo.alpha, hi.alpha, xtol=1e-14)


def _stationary(tr: _Tracker, pts: Sequence[SpectralPoint]) -> list[float]:
    found = []
    if tr.e.kind is EnumeratorKind.WEIGHT and tr.seed.log_coords == (0.0, 0.0, 0.0):
        found.append(tr.seed.alpha)
    for p, q in zip(pts, pts[1:]):
        su, sq = p.log_coords[0], q.log_coords[0]
        if su == 0.0 or (su < 0) != (sq < 0):
            a = p.alpha if su == 0.0 else _refine_stationary(tr, p, q)
            if all(abs(a - f) > 1e-9 for f in found):
                found.append(a)
    return sorted(found)


def growth_curve(
    e: Ensemble,
    grid: int | Iterable[float] = 100,
    tol: float = DEFAULT_TOL,
    with_alpha_star: bool = True,
) -> SpectralCurve:
    tr = _Tracker(e, tol)
    alphas = default_grid(e, grid) if isinstance(grid, int) else np.asarray(sorted(grid), dtype=float)
    for a in alphas:
        tr.check_domain(float(a))
    pts = _march(tr, [float(a) for a in alphas])
    stat = _stationary(tr, pts)
    peak = None
    if stat:
        cands = [tr.track(_nearest(pts, a) if pts else tr.seed, a) for a in stat]
        best = max(cands, key=lambda p: p.G)
        peak = (best.alpha, best.G)
    global_ok = None
    if peak is not None and pts:
        global_ok = peak[1] >= max(p.G for p in pts) - 1e-12
    a_star = _critical_exponent(tr) if with_alpha_star else None
    return SpectralCurve(e.kind, tuple(pts), a_star, tuple(stat), peak, tr.alpha_max, global_ok)


# -- critical exponent --------------------------------------------------------


def _critical_exponent(tr: _Tracker) -> float:
    from ..smallalpha import classify_growth  # local import: smallalpha depends on ensemble only

    verdict = classify_growth(tr.e)
    if verdict.label == "bad":
        return 0.0
    if verdict.label == "boundary":
        raise InconclusiveGrowth(f"C*V = {verdict.cv!r} is within 1e-12 of 1; growth behaviour undecided")
    return _first_root(tr)


def _first_root(tr: _Tracker) -> float:
    """Smallest alpha with G(alpha) = 0, bracketed by a downward geometric scan."""
    seed = tr.seed
    cur = seed
    # make sure we start from a point with G >= 0
    if cur.G < 0:
        for a in np.linspace(seed.alpha, 0.995 * tr.alpha_max, 60)[1:]:
            cur = tr.track(cur, float(a))
            if cur.G >= 0:
                break
        else:
            raise SpectralError("G < 0 on the whole scanned domain")
    hi = cur
    lo = None
    a = hi.alpha
    while a > 2 * ENDPOINT_GAP:
        a *= 0.8
        p = tr.track(hi, a)
        if p.G < 0:
            lo = p
            break
        hi = p
    if lo is None:
        raise SpectralError("no sign change of G found above the lower domain endpoint")
    return _refine_root(tr, lo, hi)


def _refine_root(tr: _Tracker, lo: SpectralPoint, hi: SpectralPoint) -> float:
    """Newton in alpha with G' = -log x0, safeguarded by bisection, to |G| < 1e-12."""
    p = lo if abs(lo.G) < abs(hi.G) else hi
    for _ in range(200):
        if abs(p.G) < 1e-12:
            return p.alpha
        slope = -p.log_coords[0]
        a_new = p.alpha - p.G / slope if slope != 0 else None
        if a_new is None or not lo.alpha < a_new < hi.alpha:
            a_new = 0.5 * (lo.alpha + hi.alpha)
        p = tr.track(p, a_new)
        if p.G < 0:
            lo = p
        else:
            hi = p
        if hi.alpha - lo.alpha < 1e-15 * hi.alpha:
            return p.alpha
    raise ConvergenceError("root refinement did not converge", p.alpha)


def critical_exponent(e: Ensemble, kind: EnumeratorKind | str | None = None, tol: float = DEFAULT_TOL) -> float:
    if kind is not None and EnumeratorKind.parse(kind) is not e.kind:
        e = e.with_kind(kind)
    return _critical_exponent(_Tracker(e, tol))


def h_curve(c: SpectralCurve, k_s: float) -> list[tuple[float, float]]:
    """Per-code-bit normalisation: (omega, H) = (alpha / K_s, G / K_s)."""
    return [(p.alpha / k_s, p.G / k_s) for p in c.points]


__all__ = [
    "ConvergenceError",
    "DEFAULT_TOL",
    "DomainError",
    "InconclusiveGrowth",
    "SpectralCurve",
    "SpectralError",
    "SpectralPoint",
    "alpha_max",
    "critical_exponent",
    "default_grid",
    "growth_curve",
    "growth_derivative",
    "h_curve",
    "solve_point",
]
