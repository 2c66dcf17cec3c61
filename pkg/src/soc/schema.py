"""JSON schemas for inputs and emitted reports (draft 2020-12)."""
from __future__ import annotations

import jsonschema

from .errors import ParseError

SCHEMA_VERSION = 1

COMPLEX = {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}
NUMBER_OR_COMPLEX = {"anyOf": [{"type": "number"}, COMPLEX]}

MATRIX = {
    "type": "object",
    "required": ["rows", "cols", "entries"],
    "properties": {
        "rows": {"type": "integer", "minimum": 1},
        "cols": {"type": "integer", "minimum": 1},
        "entries": {"type": "array", "items": NUMBER_OR_COMPLEX},
    },
}

COMBINATION = {
    "anyOf": [
        {"type": "string"},
        {"type": "array", "items": {
            "type": "object", "required": ["label"],
            "properties": {"label": {"type": "string"}, "coeff": NUMBER_OR_COMPLEX}}},
    ]
}

OPERAD = {
    "type": "object",
    "required": ["colors", "spaces"],
    "properties": {
        "colors": {"type": "array", "items": {"type": "string"}, "minItems": 1},
        "spaces": {"type": "array", "items": {
            "type": "object", "required": ["inputs", "output", "basis"],
            "properties": {
                "inputs": {"type": "array", "items": {"type": "string"}},
                "output": {"type": "string"},
                "basis": {"type": "array", "items": {"type": "string"}},
            }}},
        "composition": {"type": "array", "items": {
            "type": "object", "required": ["outer", "inner", "result"],
            "properties": {
                "outer": {"type": "string"},
                "inner": {"type": "array", "items": {"type": "string"}},
                "result": COMBINATION,
            }}},
        "units": {"type": "object", "additionalProperties": COMBINATION},
        "symmetric_actions": {"type": "array", "items": {
            "type": "object", "required": ["inputs", "output", "perm", "matrix"],
            "properties": {"perm": {"type": "array", "items": {"type": "integer"}}, "matrix": MATRIX}}},
        "name": {"type": "string"},
    },
}

ALGEBRA = {
    "type": "object",
    "required": ["operad_ref", "components"],
    "properties": {
        "operad_ref": {"anyOf": [{"type": "string"}, OPERAD]},
        "components": {"type": "object", "additionalProperties": {"type": "integer", "minimum": 0}},
        "structure": {"type": "object", "additionalProperties": MATRIX},
        "distinguished": {"type": "object", "additionalProperties": MATRIX},
        "loop_polynomial": {"type": "array", "items": NUMBER_OR_COMPLEX},
        "name": {"type": "string"},
    },
}

DIGRAPH = {
    "type": "object",
    "required": ["vertices"],
    "properties": {
        "vertices": {"type": "array", "items": {"type": ["string", "integer"]}},
        "edges": {"type": "array", "items": {
            "type": "object", "required": ["from", "to"],
            "properties": {
                "from": {"type": ["string", "integer"]},
                "to": {"type": ["string", "integer"]},
                "weight": NUMBER_OR_COMPLEX,
                "label": {"type": "string"},
            }}},
        "pair_weights": {"type": "array", "items": {
            "type": "object", "required": ["edges", "weight"],
            "properties": {"edges": {"type": "array", "items": {"type": "string"},
                                     "minItems": 2, "maxItems": 2},
                           "weight": NUMBER_OR_COMPLEX}}},
    },
}

SPECTRUM_SET = {
    "type": "object",
    "required": ["values", "tolerance"],
    "properties": {"values": {"type": "array", "items": COMPLEX},
                   "tolerance": {"type": "number", "exclusiveMinimum": 0}},
}

DECOMPOSITION = {
    "type": "object",
    "required": ["local", "cross", "totals"],
    "properties": {
        "local": {"type": "object", "additionalProperties": {"type": "integer"}},
        "cross": {"type": "array", "items": {
            "type": "object",
            "required": ["op", "output_color", "image_dim", "provenance"],
            "properties": {"op": {"type": "string"}, "output_color": {"type": "string"},
                           "image_dim": {"type": "integer"},
                           "provenance": {"type": "array", "items": {"type": "string"}}}}},
        "totals": {"type": "object", "required": ["local", "cross", "total"],
                   "additionalProperties": {"type": "integer"}},
    },
}

ANALYTIC = {
    "type": "object",
    "required": ["per_color", "interaction", "provenance", "loops", "union"],
    "properties": {
        "per_color": {"type": "object", "additionalProperties": SPECTRUM_SET},
        "interaction": SPECTRUM_SET,
        "union": SPECTRUM_SET,
        "provenance": {"type": "array", "items": {
            "type": "object", "required": ["value", "loop"],
            "properties": {"value": COMPLEX, "loop": {"type": "integer"}}}},
        "loops": {"type": "array", "items": {
            "type": "object", "required": ["start", "ops", "spectrum"],
            "properties": {"ops": {"type": "array", "items": {"type": "string"}},
                           "spectrum": SPECTRUM_SET}}},
    },
}

SPECTRUM_OBJECT = {
    "type": "object",
    "required": ["total_dimension", "hochschild_dimension", "decomposition"],
    "properties": {"total_dimension": {"type": "integer"},
                   "hochschild_dimension": {"type": "integer"},
                   "decomposition": DECOMPOSITION},
}

CHECK = {
    "type": "object",
    "required": ["check", "pass", "dimensions", "max_deviation", "details"],
    "properties": {"check": {"type": "string"}, "pass": {"type": "boolean"},
                   "dimensions": {"type": "object"},
                   "max_deviation": {"type": ["number", "null"]},
                   "details": {"type": "array", "items": {"type": "string"}}},
}

VALIDATION = {
    "type": "object",
    "required": ["valid", "violations"],
    "properties": {"valid": {"type": "boolean"},
                   "violations": {"type": "array", "items": {
                       "type": "object", "required": ["kind", "where", "discrepancy"]}}},
}

RESULT_SCHEMAS = {
    "spectrum": SPECTRUM_OBJECT,
    "decompose": DECOMPOSITION,
    "analytic": ANALYTIC,
    "naive": {"type": "object", "additionalProperties": SPECTRUM_SET},
    "validate": VALIDATION,
    "basechange": {"type": "object", "required": ["checks"],
                   "properties": {"checks": {"type": "array", "items": CHECK}}},
    "network": {"type": "object", "required": ["spectrum"],
                "properties": {"spectrum": SPECTRUM_OBJECT, "analytic": ANALYTIC}},
    "nogo-demo": {"type": "object", "required": ["naive", "totals", "naive_equal", "totals_differ"]},
}

ERROR = {
    "type": "object",
    "required": ["error"],
    "properties": {"error": {
        "type": "object", "required": ["kind", "message"],
        "properties": {"kind": {"type": "string"}, "message": {"type": "string"},
                       "line": {"type": ["integer", "null"]}, "column": {"type": ["integer", "null"]}}},
        "violations": {"anyOf": [{"type": "null"}, VALIDATION]}},
}

REPORT = {
    "type": "object",
    "required": ["schema_version", "command", "ok", "result"],
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "command": {"type": "string"},
        "ok": {"type": "boolean"},
        "result": {"type": "object"},
    },
}

INPUT_SCHEMAS = {"operad": OPERAD, "algebra": ALGEBRA, "digraph": DIGRAPH}


def check(instance, schema, what: str = "input") -> None:
    """Raise ParseError with the failing JSON path when ``instance`` does not fit."""
    v = jsonschema.Draft202012Validator(schema)
    err = jsonschema.exceptions.best_match(v.iter_errors(instance))
    if err is not None:
        path = "/".join(str(p) for p in err.absolute_path) or "<root>"
        raise ParseError(f"{what} does not match schema at {path}: {err.message}")


def check_report(report: dict) -> None:
    check(report, REPORT, "report")
    if not report["ok"] and "error" in report["result"]:
        check(report["result"], ERROR, "error report")
        return
    sub = RESULT_SCHEMAS.get(report["command"])
    if sub is not None:
        check(report["result"], sub, "report result")
