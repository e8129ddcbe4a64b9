"""Command-line front end: ``dgldpc {curve,alpha-star,enumerate,oracle}``.

Exit codes: 0 success, 2 bad input (JSON, schema, inadmissible n), 3 solver failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
import time
from pathlib import Path
from typing import Any, Sequence

import jsonschema

from .ensemble import Ensemble
from .gf2codes import (
    BinaryMatrix,
    CodeError,
    EnumeratorKind,
    bd_ssef,
    io_map_ssef,
    io_weight_enumerator,
    map_ssef,
    weight_enumerator,
)
from .oracle import InadmissibleN, OracleError, empirical_growth
from .smallalpha import ExpansionUnavailable, alpha_star_approx, classify_growth, small_alpha_data
from .spectral import (
    DEFAULT_TOL,
    DomainError,
    SpectralError,
    critical_exponent,
    growth_curve,
    solve_point,
    symmetry_report,
)
from .specfile import CODE_SCHEMA, SpecError, code_matrix, load_ensemble

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_SOLVER = 3

CSV_HEADER = "alpha,G,x0,y0,z0,beta,residual"
KINDS = [k.value for k in EnumeratorKind]


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _tolerance() -> float:
    raw = os.environ.get("SPECTRAL_TOL")
    if raw is None:
        return DEFAULT_TOL
    try:
        tol = float(raw)
    except ValueError as exc:
        raise CliError(f"SPECTRAL_TOL={raw!r} is not a number", EXIT_INPUT) from exc
    if not tol > 0:
        raise CliError("SPECTRAL_TOL must be positive", EXIT_INPUT)
    return tol


def _g(x: float) -> str:
    return "%.17g" % x


def format_curve_csv(points) -> str:
    lines = [CSV_HEADER]
    for p in sorted(points, key=lambda p: p.alpha):
        lines.append(",".join(_g(v) for v in (p.alpha, p.G, p.x0, p.y0, p.z0, p.beta, p.residual)))
    return "\n".join(lines) + "\n"


def _write_atomic(path: str, text: str) -> None:
    target = Path(path)
    fd, tmp = tempfile.mkstemp(dir=target.parent or ".", prefix=".dgldpc-", suffix=".tmp")
    with os.fdopen(fd, "w", newline="\n") as fh:
        fh.write(text)
    os.replace(tmp, target)


def _emit(obj: Any) -> None:
    sys.stdout.write(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _classification(e: Ensemble) -> dict[str, Any]:
    c = classify_growth(e)
    return {"label": c.label, "C": c.C, "V": c.V, "CV": c.cv, "extension": c.extension}


# -- commands -----------------------------------------------------------------


def cmd_curve(args: argparse.Namespace) -> int:
    tol = _tolerance()
    e = load_ensemble(args.spec, args.kind)
    grid: Any = args.points
    if args.grid:
        grid = [float(x) for x in args.grid.split(",") if x.strip()]
    start = time.perf_counter()
    curve = growth_curve(e, grid, tol=tol)
    summary: dict[str, Any] = {
        "label": e.label,
        "kind": e.kind.value,
        "points": len(curve.points),
        "alpha_max": curve.alpha_max,
        "alpha_star": curve.alpha_star,
        "stationary_alphas": list(curve.stationary_alphas),
        "peak": None if curve.peak is None else {"alpha": curve.peak[0], "G": curve.peak[1]},
        "peak_is_global_on_grid": curve.peak_is_global,
        "classification": _classification(e),
    }
    if e.is_check_hybrid():
        rep = symmetry_report(curve, e)
        summary["symmetry"] = {
            "all_cn_symmetric": rep.all_cn_symmetric,
            "max_deviation": rep.max_deviation,
            "m_bar": rep.m_bar,
        }
    summary["runtime_s"] = time.perf_counter() - start
    text = format_curve_csv(curve.points)
    if args.out:
        _write_atomic(args.out, text)
        summary["csv"] = args.out
    else:
        sys.stdout.write(text)
        return EXIT_OK
    _emit(summary)
    return EXIT_OK


def cmd_alpha_star(args: argparse.Namespace) -> int:
    tol = _tolerance()
    e = load_ensemble(args.spec, args.kind)
    cls = _classification(e)
    exact = critical_exponent(e, tol=tol)
    report: dict[str, Any] = {"label": e.label, "kind": e.kind.value, "exact": exact, "classification": cls["label"], "CV": cls["CV"], "C": cls["C"], "V": cls["V"]}
    if args.approx:
        try:
            d = small_alpha_data(e)
            ap = alpha_star_approx(d)
            report["approx"] = ap.general
            report["approx_shortcut"] = ap.shortcut
            report["approx_shortcut_value"] = ap.shortcut_value
            report["relative_error"] = (ap.general - exact) / exact if exact else None
            report["T"] = d.T
        except ExpansionUnavailable as exc:
            report["approx"] = None
            report["approx_error"] = str(exc)
    _emit(report)
    return EXIT_OK


def _enumerators_of(g: BinaryMatrix) -> dict[str, Any]:
    wef = weight_enumerator(g)
    out: dict[str, Any] = {
        "length": g.n_cols,
        "dimension": g.n_rows,
        "wef": list(wef.coeffs),
        "wef_text": str(wef),
        "ssef_bd": list(bd_ssef(wef).coeffs),
        "ssef_map": list(map_ssef(g).coeffs),
        "iowef": [list(r) for r in io_weight_enumerator(g).coeffs],
    }
    out["ssef_bd_text"] = str(bd_ssef(wef))
    out["ssef_map_text"] = str(map_ssef(g))
    try:
        out["io_ssef_map"] = [list(r) for r in io_map_ssef(g).coeffs]
    except CodeError as exc:
        out["io_ssef_map"] = None
        out["io_ssef_error"] = str(exc)
    return out


def cmd_enumerate(args: argparse.Namespace) -> int:
    if args.code:
        try:
            code = json.loads(args.code)
        except json.JSONDecodeError as exc:
            raise SpecError(f"malformed --code JSON: {exc}") from exc
        try:
            jsonschema.validate(code, CODE_SCHEMA)
        except jsonschema.ValidationError as exc:
            raise SpecError(f"schema error in --code: {exc.message}") from exc
        g = code_matrix(code)
        if g is None:
            raise SpecError("--code needs a matrix-backed kind (not 'wef')")
        try:
            _emit(_enumerators_of(g))
        except CodeError as exc:
            raise SpecError(str(exc)) from exc
        return EXIT_OK
    if not args.spec:
        raise SpecError("give a spec path or --code")
    e = load_ensemble(args.spec)
    out: dict[str, Any] = {"label": e.label, "variable_nodes": [], "check_nodes": []}
    for t in e.vn_types:
        item: dict[str, Any] = {"name": t.name, "lambda": t.lam, "length": t.q, "dimension": t.k}
        item["iowef"] = [list(r) for r in t.iowef.coeffs]
        item["io_ssef_map"] = None if t.io_ssef is None else [list(r) for r in t.io_ssef.coeffs]
        out["variable_nodes"].append(item)
    for t in e.cn_types:
        item = {"name": t.name, "rho": t.rho, "length": t.s, "dimension": t.h}
        item["wef"] = list(t.wef.coeffs)
        item["ssef_bd"] = list(bd_ssef(t.wef).coeffs)
        item["ssef_map"] = None if t.ssef_map is None else list(t.ssef_map.coeffs)
        out["check_nodes"].append(item)
    _emit(out)
    return EXIT_OK


def cmd_oracle(args: argparse.Namespace) -> int:
    tol = _tolerance()
    e = load_ensemble(args.spec, args.kind)
    ns = [int(x) for x in args.n.split(",") if x.strip()]
    try:
        samples = empirical_growth(e, ns, args.alpha)
    except InadmissibleN as exc:
        raise CliError(f"{exc}; use multiples of {exc.step}", EXIT_INPUT) from exc
    except OracleError as exc:
        raise CliError(str(exc), EXIT_INPUT) from exc
    limit = None
    if args.alpha > 0:
        limit = solve_point(e, args.alpha, tol=tol).G
    rows = []
    for s in samples:
        row = {"n": s.n, "w": s.w, "exponent": s.exponent}
        if limit is not None and s.exponent is not None:
            row["abs_error"] = abs(s.exponent - limit)
        rows.append(row)
    _emit({"label": e.label, "alpha": args.alpha, "G_limit": limit, "rows": rows})
    return EXIT_OK


# -- entry point --------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dgldpc", description="Spectral shapes of irregular D-GLDPC ensembles.")
    sub = ap.add_subparsers(dest="command", required=True)

    c = sub.add_parser("curve", help="solve G(alpha) on a grid and write CSV")
    c.add_argument("spec")
    c.add_argument("--kind", choices=KINDS, default="weight")
    g = c.add_mutually_exclusive_group()
    g.add_argument("--points", type=int, default=100)
    g.add_argument("--grid", help="comma-separated alpha values")
    c.add_argument("--out", help="CSV path (summary JSON then goes to stdout)")
    c.set_defaults(func=cmd_curve)

    a = sub.add_parser("alpha-star", help="critical exponent ratio")
    a.add_argument("spec")
    a.add_argument("--kind", choices=KINDS, default="weight")
    a.add_argument("--approx", action="store_true", help="also report small-alpha approximations")
    a.set_defaults(func=cmd_alpha_star)

    en = sub.add_parser("enumerate", help="print all enumerators of each node type")
    en.add_argument("spec", nargs="?")
    en.add_argument("--code", help='inline code JSON, e.g. \'{"kind": "repetition", "length": 5}\'')
    en.set_defaults(func=cmd_enumerate)

    o = sub.add_parser("oracle", help="exact finite-n exponents")
    o.add_argument("spec")
    o.add_argument("--n", required=True, help="comma-separated VN counts")
    o.add_argument("--alpha", type=float, required=True)
    o.add_argument("--kind", choices=KINDS, default="weight")
    o.set_defaults(func=cmd_oracle)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (SpecError, CodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except SpectralError as exc:
        alpha = getattr(exc, "alpha", None)
        extra = "" if alpha is None or (isinstance(alpha, float) and math.isnan(alpha)) else f" [alpha={alpha!r}]"
        print(f"solver failure: {exc}{extra}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
