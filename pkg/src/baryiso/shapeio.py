"""JSON shape files.

A file is ``{"dim": N, "body": BODY}``.  Body types and their fields::

    {"type": "ball", "center": [...], "radius": r}
    {"type": "box", "min": [...], "max": [...]}
    {"type": "polygon", "vertices": [[x, y], ...]}
    {"type": "voxel", "origin": [...], "h": h, "dims": [...], "runs": [[start, length], ...]}
    {"type": "union", "parts": [BODY, ...], "disjoint": bool}
    {"type": "cap", "ball": BALL, "axis": k, "offset": t, "sign": 1 | -1}
    {"type": "region", "rings": [[[x, y], ...], ...]}
    {"type": "empty"}

Voxel occupancy is run-length encoded over the row-major cell order: each
run gives the start index and length of a block of occupied cells.
Unknown fields anywhere are rejected.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .shapes import AxisBox, Ball, BallCap, Body, Empty, Polygon2D, Region2D, ShapeError, Union, VoxelGrid


class ShapeFileError(ShapeError):
    """Malformed shape file; ``offset`` is the byte offset of a syntax error, if any."""

    def __init__(self, message: str, offset: int | None = None):
        super().__init__(message if offset is None else f"{message} (byte offset {offset})")
        self.offset = offset


FIELDS = {
    "ball": {"center", "radius"},
    "box": {"min", "max"},
    "cap": {"ball", "axis", "offset", "sign"},
    "polygon": {"vertices"},
    "region": {"rings"},
    "voxel": {"origin", "h", "dims", "runs"},
    "union": {"parts", "disjoint"},
    "empty": set(),
}
OPTIONAL = {"union": {"disjoint"}}


def _runs(flat: np.ndarray) -> list[list[int]]:
    padded = np.concatenate([[False], flat, [False]]).astype(np.int8)
    edges = np.flatnonzero(np.diff(padded))
    return [[int(a), int(b - a)] for a, b in zip(edges[::2], edges[1::2])]


def to_dict(s: Body) -> dict:
    return {"dim": int(s.dim), "body": body_dict(s)}


def body_dict(s: Body) -> dict:
    if isinstance(s, Ball):
        return {"type": "ball", "center": [float(x) for x in s.center], "radius": float(s.radius)}
    if isinstance(s, AxisBox):
        return {"type": "box", "min": [float(x) for x in s.lo], "max": [float(x) for x in s.hi]}
    if isinstance(s, BallCap):
        return {"type": "cap", "ball": body_dict(s.ball), "axis": int(s.axis), "offset": float(s.offset),
                "sign": int(s.sign)}
    if isinstance(s, Polygon2D):
        return {"type": "polygon", "vertices": np.asarray(s.vertices, float).tolist()}
    if isinstance(s, Region2D):
        return {"type": "region", "rings": [np.asarray(r, float).tolist() for r in s.rings]}
    if isinstance(s, VoxelGrid):
        return {"type": "voxel", "origin": [float(x) for x in s.origin], "h": float(s.h),
                "dims": [int(d) for d in s.dims], "runs": _runs(np.asarray(s.occupancy).ravel())}
    if isinstance(s, Union):
        return {"type": "union", "parts": [body_dict(p) for p in s.parts], "disjoint": bool(s.disjoint)}
    if isinstance(s, Empty):
        return {"type": "empty"}
    raise TypeError(f"cannot serialize {type(s).__name__}")


def _fail(path: str, msg: str) -> ShapeFileError:
    return ShapeFileError(f"{path}: {msg}")


def _vec(d: dict, key: str, path: str) -> np.ndarray:
    try:
        v = np.asarray(d[key], dtype=float)
    except (TypeError, ValueError):
        raise _fail(f"{path}.{key}", "expected a list of numbers") from None
    if v.ndim != 1 or not np.all(np.isfinite(v)):
        raise _fail(f"{path}.{key}", "expected a list of finite numbers")
    return v


def _num(d: dict, key: str, path: str, kind=float):
    v = d[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)) or (kind is int and not isinstance(v, int)):
        raise _fail(f"{path}.{key}", f"expected {'an integer' if kind is int else 'a number'}")
    return kind(v)


def _points(raw, path: str) -> np.ndarray:
    try:
        v = np.asarray(raw, dtype=float)
    except (TypeError, ValueError):
        raise _fail(path, "expected a list of [x, y] pairs") from None
    if v.ndim != 2 or v.shape[1] != 2 or not np.all(np.isfinite(v)):
        raise _fail(path, "expected a list of [x, y] pairs")
    return v


def from_dict(doc) -> Body:
    if not isinstance(doc, dict):
        raise _fail("$", "expected an object")
    extra = set(doc) - {"dim", "body"}
    if extra:
        raise _fail("$", f"unknown field(s) {sorted(extra)}")
    for key in ("dim", "body"):
        if key not in doc:
            raise _fail("$", f"missing field {key!r}")
    dim = doc["dim"]
    if isinstance(dim, bool) or not isinstance(dim, int) or dim < 2:
        raise _fail("$.dim", "expected an integer >= 2")
    s = body_from_dict(doc["body"], dim, "$.body")
    if s.dim != dim:
        raise _fail("$.body", f"body has dimension {s.dim}, file declares {dim}")
    return s


def body_from_dict(d, dim: int, path: str) -> Body:
    if not isinstance(d, dict):
        raise _fail(path, "expected an object")
    kind = d.get("type")
    if kind not in FIELDS:
        raise _fail(f"{path}.type", f"unknown shape type {kind!r}")
    allowed = FIELDS[kind]
    extra = set(d) - allowed - {"type"}
    if extra:
        raise _fail(path, f"unknown field(s) {sorted(extra)} for type {kind!r}")
    missing = allowed - OPTIONAL.get(kind, set()) - set(d)
    if missing:
        raise _fail(path, f"missing field(s) {sorted(missing)} for type {kind!r}")
    try:
        if kind == "ball":
            return Ball(_vec(d, "center", path), _num(d, "radius", path))
        if kind == "box":
            return AxisBox(_vec(d, "min", path), _vec(d, "max", path))
        if kind == "cap":
            ball = body_from_dict(d["ball"], dim, f"{path}.ball")
            if not isinstance(ball, Ball):
                raise _fail(f"{path}.ball", "expected a ball")
            return BallCap(ball, _num(d, "axis", path, int), _num(d, "offset", path), _num(d, "sign", path, int))
        if kind == "polygon":
            return Polygon2D(_points(d["vertices"], f"{path}.vertices"))
        if kind == "region":
            if not isinstance(d["rings"], list):
                raise _fail(f"{path}.rings", "expected a list of rings")
            return Region2D(tuple(_points(r, f"{path}.rings[{i}]") for i, r in enumerate(d["rings"])))
        if kind == "voxel":
            dims = d["dims"]
            if not isinstance(dims, list) or not all(isinstance(x, int) and x > 0 for x in dims):
                raise _fail(f"{path}.dims", "expected positive integers")
            runs = d["runs"]
            ok = isinstance(runs, list) and all(
                isinstance(r, list) and len(r) == 2 and all(isinstance(x, int) and not isinstance(x, bool) and x >= 0 for x in r)
                for r in runs
            )
            if not ok:
                raise _fail(f"{path}.runs", "expected a list of [start, length] pairs of non-negative integers")
            total = int(np.prod(dims))
            flat = np.zeros(total, dtype=bool)
            for i, (a, k) in enumerate(runs):
                if a + k > total:
                    raise _fail(f"{path}.runs[{i}]", f"run {a}+{k} exceeds {total} cells")
                flat[a : a + k] = True
            return VoxelGrid(tuple(_vec(d, "origin", path)), _num(d, "h", path), flat.reshape(dims))
        if kind == "union":
            if not isinstance(d["parts"], list):
                raise _fail(f"{path}.parts", "expected a list")
            parts = tuple(body_from_dict(p, dim, f"{path}.parts[{i}]") for i, p in enumerate(d["parts"]))
            disjoint = d.get("disjoint", False)
            if not isinstance(disjoint, bool):
                raise _fail(f"{path}.disjoint", "expected true or false")
            return Union(parts, disjoint=disjoint)
        return Empty(dim)
    except ShapeFileError:
        raise
    except (ShapeError, ValueError, TypeError) as exc:
        raise _fail(path, str(exc)) from None


def loads(text: str | bytes) -> Body:
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ShapeFileError("invalid UTF-8", exc.start) from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        offset = len(text[: exc.pos].encode("utf-8"))
        raise ShapeFileError(f"JSON syntax error: {exc.msg}", offset) from None
    return from_dict(data)


def dumps(s: Body) -> str:
    return json.dumps(to_dict(s), sort_keys=True) + "\n"


def load(path: str | Path) -> Body:
    return loads(Path(path).read_bytes())


def save(s: Body, path: str | Path) -> None:
    Path(path).write_text(dumps(s))
