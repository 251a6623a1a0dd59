"""Chain files: JSON documents describing a target and its kernel.

A chain file is a JSON object with keys:

    states   optional list of state-name strings
    pi       probability vector (required)
    P        row-major transition matrix (optional; some commands only
             need the target)
    product  optional list of component sizes factorizing the state space

Numeric entries may be JSON numbers or strings holding exact rationals
("1/6", "0.25"), which are parsed exactly before conversion to float, so
matrices can be transcribed verbatim from rational displays.  Emitted
documents serialize floats with 17 significant digits, which re-parse to
bit-identical values.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .chains import TargetDistribution, TransitionMatrix, new_distribution
from .composition import ProductSpec
from .errors import ChainFileError


@dataclass(frozen=True)
class ChainFile:
    """Parsed and validated contents of a chain file."""

    pi: TargetDistribution
    matrix: Optional[TransitionMatrix]
    product: Optional[ProductSpec]
    states: Optional[tuple]


def _rational(value, where: str) -> Fraction:
    try:
        if isinstance(value, bool):
            raise TypeError("boolean is not a number")
        if isinstance(value, (int, float)):
            return Fraction(value)
        if isinstance(value, str):
            return Fraction(value)
    except (ValueError, ZeroDivisionError, TypeError) as exc:
        raise ChainFileError(f"{where}: cannot parse {value!r} as a number: {exc}")
    raise ChainFileError(f"{where}: cannot parse {value!r} as a number")


def parse_chain_document(doc, where: str = "chain file") -> ChainFile:
    """Validate a loaded JSON object as a chain file.

    Structural errors (wrong types, missing keys, ragged rows) raise
    ChainFileError; violations of distribution or matrix invariants raise
    the corresponding library errors, with the offending entry named.
    """
    if not isinstance(doc, dict):
        raise ChainFileError(f"{where}: top level must be an object")
    unknown = set(doc) - {"states", "pi", "P", "product"}
    if unknown:
        raise ChainFileError(f"{where}: unknown keys {sorted(unknown)}")
    if "pi" not in doc:
        raise ChainFileError(f"{where}: missing required key 'pi'")
    raw_pi = doc["pi"]
    if not isinstance(raw_pi, list) or not raw_pi:
        raise ChainFileError(f"{where}: 'pi' must be a non-empty list")
    weights = [_rational(v, f"pi[{i}]") for i, v in enumerate(raw_pi)]

    states = None
    if doc.get("states") is not None:
        states = doc["states"]
        if not isinstance(states, list) or not all(isinstance(s, str) for s in states):
            raise ChainFileError(f"{where}: 'states' must be a list of strings")
        if len(states) != len(weights):
            raise ChainFileError(
                f"{where}: {len(states)} states but {len(weights)} probabilities"
            )
        states = tuple(states)

    pi = new_distribution(weights, normalize=False, labels=states)

    matrix = None
    if doc.get("P") is not None:
        raw = doc["P"]
        n = pi.n
        if not isinstance(raw, list) or len(raw) != n:
            raise ChainFileError(f"{where}: 'P' must be a list of {n} rows")
        rows = []
        for i, row in enumerate(raw):
            if not isinstance(row, list) or len(row) != n:
                raise ChainFileError(f"{where}: P row {i} must have {n} entries")
            rows.append([float(_rational(v, f"P[{i}][{j}]")) for j, v in enumerate(row)])
        matrix = TransitionMatrix(np.array(rows))

    product = None
    if doc.get("product") is not None:
        sizes = doc["product"]
        if not isinstance(sizes, list) or not all(
            isinstance(s, int) and not isinstance(s, bool) for s in sizes
        ):
            raise ChainFileError(f"{where}: 'product' must be a list of integers")
        product = ProductSpec(tuple(sizes))
        if product.n != pi.n:
            raise ChainFileError(
                f"{where}: product space has {product.n} states but pi has {pi.n}"
            )

    return ChainFile(pi=pi, matrix=matrix, product=product, states=states)


def load_chain_file(path: str) -> ChainFile:
    """Read and validate a chain file from disk."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ChainFileError(f"{path}: {exc}")
    except json.JSONDecodeError as exc:
        raise ChainFileError(f"{path}: invalid JSON: {exc}")
    return parse_chain_document(doc, where=path)


def parse_vector(text: str, where: str = "--f") -> np.ndarray:
    """Parse a function-of-state flag: inline 'a,b,c' or '@file' with a JSON list."""
    if text.startswith("@"):
        path = text[1:]
        try:
            with open(path, "r", encoding="utf-8") as fh:
                doc = json.load(fh)
        except OSError as exc:
            raise ChainFileError(f"{path}: {exc}")
        except json.JSONDecodeError as exc:
            raise ChainFileError(f"{path}: invalid JSON: {exc}")
        if not isinstance(doc, list):
            raise ChainFileError(f"{path}: expected a JSON list of numbers")
        items = doc
    else:
        items = [s.strip() for s in text.split(",")]
    return np.array([float(_rational(v, f"{where}[{i}]")) for i, v in enumerate(items)])


def parse_matrix_file(path: str) -> np.ndarray:
    """Load a square matrix (JSON list of rows, rational strings allowed)."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ChainFileError(f"{path}: {exc}")
    except json.JSONDecodeError as exc:
        raise ChainFileError(f"{path}: invalid JSON: {exc}")
    if not isinstance(doc, list) or not all(isinstance(r, list) for r in doc):
        raise ChainFileError(f"{path}: expected a JSON list of rows")
    n = len(doc)
    rows = []
    for i, row in enumerate(doc):
        if len(row) != n:
            raise ChainFileError(f"{path}: row {i} has {len(row)} entries, expected {n}")
        rows.append([float(_rational(v, f"row {i} col {j}")) for j, v in enumerate(row)])
    return np.array(rows)


def _write_json(obj, out: list):
    if obj is None:
        out.append("null")
    elif obj is True:
        out.append("true")
    elif obj is False:
        out.append("false")
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, float):
        if math.isnan(obj):
            out.append("NaN")
        elif math.isinf(obj):
            out.append("Infinity" if obj > 0 else "-Infinity")
        else:
            out.append(format(obj, ".17g"))
    elif isinstance(obj, dict):
        out.append("{")
        for i, (k, v) in enumerate(obj.items()):
            if i:
                out.append(", ")
            out.append(json.dumps(str(k)))
            out.append(": ")
            _write_json(v, out)
        out.append("}")
    elif isinstance(obj, (list, tuple)):
        out.append("[")
        for i, v in enumerate(obj):
            if i:
                out.append(", ")
            _write_json(v, out)
        out.append("]")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps_document(obj) -> str:
    """Serialize a report or chain document with 17-significant-digit floats.

    Every float emitted by this function re-parses to the identical value.
    """
    out: list = []
    _write_json(obj, out)
    return "".join(out)


def jsonable(value):
    """Recursively convert numpy scalars/arrays to plain Python values."""
    if isinstance(value, np.ndarray):
        return [jsonable(v) for v in value.tolist()]
    if isinstance(value, (np.floating,)):
        return float(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.bool_,)):
        return bool(value)
    if isinstance(value, dict):
        return {k: jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    return value
