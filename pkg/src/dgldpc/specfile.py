"""JSON ensemble specification files."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

import jsonschema

from .ensemble import SUM_TOL, CNTypeSpec, Ensemble, EnsembleError, VNTypeSpec, build_ensemble
from .gf2codes import (
    BinaryMatrix,
    CodeError,
    EnumeratorKind,
    IOWeightEnumerator,
    WeightEnumerator,
    dimension_from_total,
    io_weight_enumerator,
    repetition,
    spc_antisystematic,
    spc_cyclic,
    spc_systematic,
    weight_enumerator,
)

FRACTION_TOL = 1e-9

_INT_LIST = {"type": "array", "items": {"type": "integer", "minimum": 0}, "minItems": 2}
_INT_GRID = {"type": "array", "items": _INT_LIST, "minItems": 2}

CODE_SCHEMA: dict[str, Any] = {
    "type": "object",
    "required": ["kind"],
    "additionalProperties": False,
    "properties": {
        "kind": {"enum": ["repetition", "spc_cyclic", "spc_systematic", "spc_antisystematic", "generator", "wef"]},
        "length": {"type": "integer", "minimum": 2, "maximum": 24},
        "dimension": {"type": "integer", "minimum": 1, "maximum": 24},
        "rows": {"type": "array", "items": {"type": "string", "pattern": "^[01]+$"}, "minItems": 1},
        "coeffs": {"oneOf": [_INT_LIST, _INT_GRID]},
        "ssef_map": {"oneOf": [_INT_LIST, _INT_GRID]},
    },
    "allOf": [
        {
            "if": {"properties": {"kind": {"const": "generator"}}},
            "then": {"required": ["rows"], "not": {"required": ["coeffs"]}},
        },
        {
            "if": {"properties": {"kind": {"const": "wef"}}},
            "then": {"required": ["coeffs"], "not": {"required": ["rows"]}},
        },
        {
            "if": {"properties": {"kind": {"enum": ["repetition", "spc_cyclic", "spc_systematic", "spc_antisystematic"]}}},
            "then": {"required": ["length"], "not": {"anyOf": [{"required": ["rows"]}, {"required": ["coeffs"]}]}},
        },
    ],
}


def _node_schema(frac_key: str) -> dict[str, Any]:
    return {
        "type": "object",
        "required": [frac_key, "code"],
        "additionalProperties": False,
        "properties": {
            "name": {"type": "string"},
            frac_key: {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
            "code": CODE_SCHEMA,
        },
    }


SPEC_SCHEMA: dict[str, Any] = {
    "type": "object",
    "required": ["variable_nodes", "check_nodes"],
    "additionalProperties": False,
    "properties": {
        "metadata": {"type": "object", "properties": {"label": {"type": "string"}}},
        "variable_nodes": {"type": "array", "items": _node_schema("lambda"), "minItems": 1},
        "check_nodes": {"type": "array", "items": _node_schema("rho"), "minItems": 1},
    },
}


class SpecError(ValueError):
    """Any problem with a spec document: JSON syntax, schema, or code content."""


def code_matrix(code: dict[str, Any]) -> BinaryMatrix | None:
    kind = code["kind"]
    try:
        if kind == "repetition":
            return repetition(code["length"])
        if kind == "spc_cyclic":
            return spc_cyclic(code["length"])
        if kind == "spc_systematic":
            return spc_systematic(code["length"])
        if kind == "spc_antisystematic":
            return spc_antisystematic(code["length"])
        if kind == "generator":
            g = BinaryMatrix.from_strings(code["rows"])
            _check_shape(code, g.n_cols, g.n_rows)
            return g
    except CodeError as exc:
        raise SpecError(str(exc)) from exc
    return None


def _check_shape(code: dict[str, Any], length: int, dim: int) -> None:
    if "length" in code and code["length"] != length:
        raise SpecError(f"declared length {code['length']} but code has length {length}")
    if "dimension" in code and code["dimension"] != dim:
        raise SpecError(f"declared dimension {code['dimension']} but code has dimension {dim}")


def _is_grid(coeffs: Any) -> bool:
    return bool(coeffs) and isinstance(coeffs[0], list)


def build_cn(node: dict[str, Any]) -> CNTypeSpec:
    code, name = node["code"], node.get("name", "")
    try:
        g = code_matrix(code)
        if g is not None:
            return CNTypeSpec.from_enumerators(node["rho"], weight_enumerator(g), code.get("ssef_map"), matrix=g, name=name)
        coeffs = code["coeffs"]
        if _is_grid(coeffs):
            raise SpecError(f"CN {name!r}: coeffs must be a flat WEF list")
        wef = WeightEnumerator(tuple(coeffs))
        _check_shape(code, wef.length, dimension_from_total(wef.total))
        return CNTypeSpec.from_enumerators(node["rho"], wef, code.get("ssef_map"), name=name)
    except (CodeError, EnsembleError) as exc:
        raise SpecError(f"CN {name!r}: {exc}") from exc


def build_vn(node: dict[str, Any]) -> VNTypeSpec:
    code, name = node["code"], node.get("name", "")
    try:
        g = code_matrix(code)
        if g is not None:
            return VNTypeSpec.from_enumerators(node["lambda"], io_weight_enumerator(g), code.get("ssef_map"), matrix=g, name=name)
        coeffs = code["coeffs"]
        if not _is_grid(coeffs):
            raise SpecError(f"VN {name!r}: coeffs must be a 2-D IO-WEF array")
        io = IOWeightEnumerator(tuple(tuple(r) for r in coeffs))
        _check_shape(code, io.out_length, io.in_length)
        return VNTypeSpec.from_enumerators(node["lambda"], io, code.get("ssef_map"), name=name)
    except (CodeError, EnsembleError) as exc:
        raise SpecError(f"VN {name!r}: {exc}") from exc


def _normalised(values: list[float], what: str) -> list[float]:
    total = sum(values)
    if abs(total - 1.0) > FRACTION_TOL:
        raise SpecError(f"{what} fractions sum to {total!r}, not 1 (tolerance {FRACTION_TOL})")
    if abs(total - 1.0) <= SUM_TOL:
        return list(values)
    return [v / total for v in values]


def validate_document(doc: Any) -> None:
    try:
        jsonschema.validate(doc, SPEC_SCHEMA)
    except jsonschema.ValidationError as exc:
        path = "/".join(str(p) for p in exc.absolute_path)
        raise SpecError(f"schema error at '{path}': {exc.message}") from exc


def ensemble_from_document(doc: Any, kind: EnumeratorKind | str = EnumeratorKind.WEIGHT) -> Ensemble:
    validate_document(doc)
    lams = _normalised([n["lambda"] for n in doc["variable_nodes"]], "lambda")
    rhos = _normalised([n["rho"] for n in doc["check_nodes"]], "rho")
    vns = [build_vn({**n, "lambda": l}) for n, l in zip(doc["variable_nodes"], lams)]
    cns = [build_cn({**n, "rho": r}) for n, r in zip(doc["check_nodes"], rhos)]
    label = doc.get("metadata", {}).get("label", "")
    try:
        return build_ensemble(vns, cns, kind, label=label)
    except (EnsembleError, CodeError) as exc:
        raise SpecError(str(exc)) from exc


def load_document(path: str | Path) -> Any:
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise SpecError(f"malformed JSON in {path}: {exc}") from exc
    except OSError as exc:
        raise SpecError(f"cannot read {path}: {exc}") from exc


def load_ensemble(path: str | Path, kind: EnumeratorKind | str = EnumeratorKind.WEIGHT) -> Ensemble:
    return ensemble_from_document(load_document(path), kind)


def ensemble_to_document(e: Ensemble) -> dict[str, Any]:
    """Explicit-coefficient form of an ensemble (round-trips through ensemble_from_document)."""

    def cn(t: CNTypeSpec) -> dict[str, Any]:
        code: dict[str, Any] = {"kind": "wef", "coeffs": list(t.wef.coeffs)}
        if t.ssef_map is not None:
            code["ssef_map"] = list(t.ssef_map.coeffs)
        return {"name": t.name, "rho": t.rho, "code": code}

    def vn(t: VNTypeSpec) -> dict[str, Any]:
        code: dict[str, Any] = {"kind": "wef", "coeffs": [list(r) for r in t.iowef.coeffs]}
        if t.io_ssef is not None:
            code["ssef_map"] = [list(r) for r in t.io_ssef.coeffs]
        return {"name": t.name, "lambda": t.lam, "code": code}

    return {
        "metadata": {"label": e.label},
        "variable_nodes": [vn(t) for t in e.vn_types],
        "check_nodes": [cn(t) for t in e.cn_types],
    }


__all__ = [
    "CODE_SCHEMA",
    "SPEC_SCHEMA",
    "SpecError",
    "build_cn",
    "build_vn",
    "code_matrix",
    "ensemble_from_document",
    "ensemble_to_document",
    "load_document",
    "load_ensemble",
    "validate_document",
]
