"""Reading and writing algebra elements and numerical-range CSV files.

An algebra file is JSON with ``shape`` (list of block sizes) and ``blocks``
(per block, row-major nested lists of ``[re, im]`` pairs). A bare square
matrix is accepted as ``{"matrix": [[[re, im], ...], ...]}`` and read as a
one-block element. Floats are written with ``repr``, which round-trips
exactly.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .cstar import AlgebraElement, AlgebraShape
from .errors import NonSquare, ParseError, ShapeMismatch


def _pair(v) -> complex:
    if isinstance(v, (int, float)) and not isinstance(v, bool):
        v = [v, 0.0]
    if not (isinstance(v, (list, tuple)) and len(v) == 2):
        raise ParseError(f"expected an [re, im] pair, got {v!r}")
    re, im = v
    for t in (re, im):
        if isinstance(t, bool) or not isinstance(t, (int, float)) or not math.isfinite(t):
            raise ParseError(f"non-finite or non-numeric entry {t!r}")
    return complex(float(re), float(im))


def _parse_block(rows, n: int, k: int) -> np.ndarray:
    if not isinstance(rows, list) or len(rows) != n:
        raise ShapeMismatch(f"block {k} must have {n} rows")
    out = np.empty((n, n), dtype=complex)
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != n:
            raise ShapeMismatch(f"block {k} row {i} must have {n} entries")
        for j, v in enumerate(row):
            out[i, j] = _pair(v)
    return out


def element_from_dict(doc) -> AlgebraElement:
    if not isinstance(doc, dict):
        raise ParseError("top level must be an object")
    if "matrix" in doc and "blocks" not in doc:
        rows = doc["matrix"]
        if not isinstance(rows, list) or not rows:
            raise ParseError("matrix must be a non-empty list of rows")
        if any(not isinstance(r, list) or len(r) != len(rows) for r in rows):
            raise NonSquare("matrix is not square")
        return AlgebraElement(AlgebraShape((len(rows),)), [_parse_block(rows, len(rows), 0)])
    try:
        sizes = tuple(doc["shape"])
        blocks = doc["blocks"]
    except (KeyError, TypeError) as exc:
        raise ParseError("expected fields 'shape' and 'blocks'") from exc
    if not sizes or any(isinstance(n, bool) or not isinstance(n, int) or n < 1 for n in sizes):
        raise ParseError("shape must be a non-empty list of positive integers")
    if not isinstance(blocks, list) or len(blocks) != len(sizes):
        raise ShapeMismatch(f"expected {len(sizes)} blocks")
    return AlgebraElement(AlgebraShape(sizes), [_parse_block(b, n, k) for k, (b, n) in enumerate(zip(blocks, sizes))])


def element_to_dict(A: AlgebraElement) -> dict:
    return {
        "shape": list(A.shape),
        "blocks": [[[[float(z.real), float(z.imag)] for z in row] for row in b] for b in A.blocks],
    }


def loads(text: str) -> AlgebraElement:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc
    return element_from_dict(doc)


def dumps(A: AlgebraElement) -> str:
    return json.dumps(element_to_dict(A), allow_nan=False) + "\n"


def read_element(path) -> AlgebraElement:
    return loads(Path(path).read_text(encoding="utf-8"))


def write_element(path, A: AlgebraElement) -> None:
    Path(path).write_text(dumps(A), encoding="utf-8")


def boundary_csv(thetas, points) -> str:
    """``theta,re,im`` rows with 17 significant digits, newline-terminated."""
    lines = [f"{t:.17g},{p.real:.17g},{p.imag:.17g}" for t, p in zip(thetas, points)]
    return "\n".join(lines) + "\n"
