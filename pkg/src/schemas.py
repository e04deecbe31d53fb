import math
from typing import Any, Dict

from jsonschema import validate, ValidationError

from src.exceptions import InvalidConfigError

NUMBER_LIST = {"type": "array", "items": {"type": "number"}}

OPERATOR_SCHEMA = {
    "type": "object",
    "required": ["kind"],
    "additionalProperties": False,
    "properties": {
        "kind": {"type": "string", "enum": ["spectral", "green", "fd", "scalar"]},
        "n": {"type": "integer", "minimum": 1},
        "n_points": {"type": "integer", "minimum": 1},
        "lambda": {"type": "number"},
        "rho0": {"type": "number", "exclusiveMinimum": 0},
        "phi": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": math.pi / 2},
        "rho1": {"type": "number", "minimum": 0},
        "M": {"type": "number", "minimum": 1},
    },
}

NONLOCAL_SCHEMA = {
    "type": "object",
    "required": ["alphas", "times"],
    "additionalProperties": False,
    "properties": {
        "alphas": NUMBER_LIST,
        "times": {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0}},
        "horizon": {"type": "number", "exclusiveMinimum": 0},
    },
}

INITIAL_SCHEMA = {
    "type": "object",
    "required": ["kind"],
    "additionalProperties": False,
    "properties": {
        "kind": {"type": "string", "enum": ["mode", "xlogx", "vector", "constant"]},
        "scale": {"type": "number"},
        "values": NUMBER_LIST,
    },
}

SOURCE_SCHEMA = {
    "type": "object",
    "required": ["kind"],
    "additionalProperties": False,
    "properties": {
        "kind": {"type": "string", "enum": ["none", "example3", "exp_decay"]},
        "scale": {"type": "number"},
        "delta": {"type": "number", "exclusiveMinimum": 0},
    },
}

STUDY_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "N_list": {"type": "array", "minItems": 1, "items": {"type": "integer", "minimum": 1}},
        "x": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
        "t": {"type": "number", "minimum": 0},
        "mode": {"type": "string", "enum": ["uniform", "fixed-t", "inverse-sqrt"]},
        "c1": {"type": "number", "exclusiveMinimum": 0},
        "alpha": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
        "output_path": {"type": "string"},
        "format": {"type": "string", "enum": ["csv", "jsonl"]},
    },
}

CLI_CONFIG_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "example": {"enum": [1, 2, 3, "custom"]},
        "operator": OPERATOR_SCHEMA,
        "nonlocal": NONLOCAL_SCHEMA,
        "initial": INITIAL_SCHEMA,
        "source": SOURCE_SCHEMA,
        "study": STUDY_SCHEMA,
    },
}


def validate_cli_config(obj: Dict[str, Any]) -> None:
    try:
        validate(instance=obj, schema=CLI_CONFIG_SCHEMA)
    except ValidationError as e:
        path = "/".join(str(p) for p in e.absolute_path) or "<root>"
        raise InvalidConfigError(f"Config validation error at {path}: {e.message}")
    example = obj.get("example", "custom")
    if example == "custom" and "operator" not in obj:
        raise InvalidConfigError("Config validation error: a custom config needs an 'operator' section")
