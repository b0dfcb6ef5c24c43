"""JSON file formats.

A complex matrix is a row-major array of ``[re, im]`` pairs, either nested
by rows (``[[[re, im], ...], ...]``) or flat (``[[re, im], ...]``, the
shape then comes from the surrounding ``dim``). Vectors are flat pair lists.

* channel: ``{"dim": d, "kraus": [matrix, ...]}`` or ``{"dim": d, "choi": matrix}``
* basis: ``{"dim": d, "kind": "custom", "ops": [matrix, ...]}``
* super-operation: ``{"dim": d, "elements": [matrix, ...]}`` with ``d^2 x d^2`` elements
* bipartite channel: a channel object plus ``"dims": [dA, dB]``
* scenario: ``{"protocol": name, "params": {...}}``
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Optional, Union

import numpy as np

from .bases import KINDS, BasisSet
from .bipartite import BipartiteChannel
from .channels import Channel, from_choi
from .errors import DimensionError, ParseError
from .superops import SuperOp


def _num(x) -> float:
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise ParseError(f"expected a number, got {x!r}")
    return float(x)


def _pair(p) -> complex:
    if not isinstance(p, (list, tuple)) or len(p) != 2:
        raise ParseError(f"expected an [re, im] pair, got {p!r}")
    return complex(_num(p[0]), _num(p[1]))


def encode_matrix(m) -> list:
    m = np.asarray(m, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def encode_vector(v) -> list:
    return [[float(z.real), float(z.imag)] for z in np.asarray(v, dtype=complex).reshape(-1)]


def decode_vector(obj) -> np.ndarray:
    if not isinstance(obj, list) or not obj:
        raise ParseError("a vector must be a nonempty list of [re, im] pairs")
    return np.array([_pair(p) for p in obj], dtype=complex)


def decode_matrix(obj, dim: Optional[int] = None) -> np.ndarray:
    """Nested rows of pairs, or a flat row-major pair list of a square ``dim x dim`` matrix."""
    if not isinstance(obj, list) or not obj:
        raise ParseError("a matrix must be a nonempty list")
    first = obj[0]
    nested = isinstance(first, list) and first and isinstance(first[0], list)
    if nested:
        rows = [[_pair(p) for p in row] if isinstance(row, list) else None for row in obj]
        if any(r is None for r in rows) or len({len(r) for r in rows}) != 1:
            raise ParseError("matrix rows must all be lists of equal length")
        return np.array(rows, dtype=complex)
    flat = np.array([_pair(p) for p in obj], dtype=complex)
    n = dim if dim is not None else int(round(np.sqrt(flat.size)))
    if n * n != flat.size:
        raise DimensionError(f"flat matrix of {flat.size} entries is not {n}x{n}")
    return flat.reshape(n, n)


def loads(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from None


def read_json(path: Union[str, Path]) -> tuple[Any, bytes]:
    """Parsed document and the raw bytes (for digests)."""
    raw = Path(path).read_bytes()
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise ParseError(f"not UTF-8: {exc}") from None
    return loads(text), raw


def _field(doc: dict, key: str, where: str):
    if not isinstance(doc, dict):
        raise ParseError(f"{where}: expected a JSON object")
    if key not in doc:
        raise ParseError(f"{where}: missing field {key!r}")
    return doc[key]


def _dim(doc: dict, where: str) -> int:
    d = _field(doc, "dim", where)
    if isinstance(d, bool) or not isinstance(d, int) or d < 1:
        raise ParseError(f"{where}: 'dim' must be a positive integer")
    return d


def _matrices(items, dim: int, key: str, where: str) -> np.ndarray:
    if not isinstance(items, list) or not items:
        raise ParseError(f"{where}: {key!r} must be a nonempty list of matrices")
    mats = [decode_matrix(m, dim) for m in items]
    for m in mats:
        if m.shape != (dim, dim):
            raise DimensionError(f"{where}: {key!r} entry has shape {m.shape}, expected {dim}x{dim}")
    return np.stack(mats)


def channel_from_json(doc) -> Channel:
    d = _dim(doc, "channel")
    if "kraus" in doc:
        return Channel(_matrices(doc["kraus"], d, "kraus", "channel"))
    if "choi" in doc:
        return from_choi(choi_from_json(doc))
    raise ParseError("channel: need 'kraus' or 'choi'")


def choi_from_json(doc) -> np.ndarray:
    d = _dim(doc, "choi")
    c = decode_matrix(_field(doc, "choi", "choi"), d * d)
    if c.shape != (d * d, d * d):
        raise DimensionError(f"choi: matrix has shape {c.shape}, expected {d * d}x{d * d}")
    return c


def channel_to_json(ch: Channel) -> dict:
    return {"dim": ch.dim, "kraus": [encode_matrix(k) for k in ch.kraus]}


def choi_to_json(c) -> dict:
    c = np.asarray(c, dtype=complex)
    return {"dim": int(round(np.sqrt(c.shape[0]))), "choi": encode_matrix(c)}


def basis_from_json(doc) -> BasisSet:
    d = _dim(doc, "basis")
    kind = doc.get("kind", "custom") if isinstance(doc, dict) else "custom"
    if kind not in KINDS:
        raise ParseError(f"basis: unknown kind {kind!r}")
    ops = _matrices(_field(doc, "ops", "basis"), d, "ops", "basis")
    if len(ops) != d * d:
        raise DimensionError(f"basis: need {d * d} operators, got {len(ops)}")
    return BasisSet(d, ops, kind)


def basis_to_json(b: BasisSet) -> dict:
    return {"dim": b.dim, "kind": b.kind, "ops": [encode_matrix(f) for f in b.ops]}


def superop_from_json(doc) -> SuperOp:
    d = _dim(doc, "superop")
    return SuperOp(_matrices(_field(doc, "elements", "superop"), d * d, "elements", "superop"))


def superop_to_json(s: SuperOp) -> dict:
    return {"dim": s.dim, "elements": [encode_matrix(e) for e in s.elements]}


def bipartite_from_json(doc) -> BipartiteChannel:
    dims = _field(doc, "dims", "bipartite")
    if not (isinstance(dims, list) and len(dims) == 2 and all(isinstance(x, int) and not isinstance(x, bool) for x in dims)):
        raise ParseError("bipartite: 'dims' must be [dA, dB]")
    ch = channel_from_json(doc)
    return BipartiteChannel(ch.kraus, tuple(dims))


def bipartite_to_json(ch: BipartiteChannel) -> dict:
    out = channel_to_json(ch)
    out["dims"] = list(ch.dims)
    return out


def scenario_from_json(doc) -> tuple[str, dict]:
    name = _field(doc, "protocol", "scenario")
    params = doc.get("params", {})
    if not isinstance(name, str) or not isinstance(params, dict):
        raise ParseError("scenario: 'protocol' must be a string and 'params' an object")
    return name, params


def dump(doc: dict, path: Union[str, Path]) -> None:
    Path(path).write_text(json.dumps(doc) + "\n")
