"""Shape representations in R^N and their structural transformations.

Bodies are immutable.  Every body knows its dimension, bounding box and
point membership, and can be reflected, translated, dilated and clipped by
an axis-aligned halfspace.  Axes are 0-based throughout the Python API.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import balls, geom2d

DEFAULT_CELL_BUDGET = 20_000_000


class ShapeError(ValueError):
    pass


class DegenerateShapeError(ShapeError):
    pass


class AlignmentError(ShapeError):
    pass


class RepresentationError(ShapeError):
    """The requested operation has no exact result in the representation."""


class ResourceError(RuntimeError):
    pass


@dataclass(frozen=True)
class Hyperplane:
    """The coordinate hyperplane {x[axis] = offset}."""

    axis: int
    offset: float = 0.0

    def check(self, dim: int) -> None:
        if not 0 <= self.axis < dim:
            raise ShapeError(f"axis {self.axis} out of range for dimension {dim}")

    def mirror(self, x: np.ndarray) -> np.ndarray:
        y = np.array(x, dtype=float, copy=True)
        y[..., self.axis] = 2 * self.offset - y[..., self.axis]
        return y


def _sign(sign) -> int:
    if sign in (1, "+"):
        return 1
    if sign in (-1, "-"):
        return -1
    raise ShapeError(f"sign must be '+' or '-', got {sign!r}")


def _vec(x, dim: int | None = None) -> tuple[float, ...]:
    t = tuple(float(v) for v in np.asarray(x, dtype=float).ravel())
    if dim is not None and len(t) != dim:
        raise ShapeError(f"expected a point of dimension {dim}, got {len(t)}")
    return t


class Body:
    """Common interface of all shape bodies."""

    dim: int

    def bbox(self) -> tuple[np.ndarray, np.ndarray]:
        raise NotImplementedError

    def contains(self, points: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def reflect(self, plane: Hyperplane) -> "Body":
        raise NotImplementedError

    def translate(self, v) -> "Body":
        raise NotImplementedError

    def scale(self, t: float) -> "Body":
        raise NotImplementedError

    def clip(self, plane: Hyperplane, sign) -> "Body":
        raise NotImplementedError

    @property
    def is_empty(self) -> bool:
        return False


Shape = Body


@dataclass(frozen=True)
class Empty(Body):
    dim: int

    def bbox(self):
        z = np.zeros(self.dim)
        return z, z

    def contains(self, points):
        return np.zeros(len(np.atleast_2d(points)), dtype=bool)

    def reflect(self, plane):
        plane.check(self.dim)
        return self

    def translate(self, v):
        return self

    def scale(self, t):
        return self

    def clip(self, plane, sign):
        plane.check(self.dim)
        return self

    @property
    def is_empty(self) -> bool:
        return True


@dataclass(frozen=True)
class Ball(Body):
    center: tuple[float, ...]
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", _vec(self.center))
        if len(self.center) < 2:
            raise ShapeError("dimension must be at least 2")
        if not self.radius > 0:
            raise ShapeError(f"radius must be positive, got {self.radius}")

    @property
    def dim(self) -> int:
        return len(self.center)

    @property
    def c(self) -> np.ndarray:
        return np.array(self.center)

    def bbox(self):
        return self.c - self.radius, self.c + self.radius

    def contains(self, points):
        pts = np.atleast_2d(points)
        return np.sum((pts - self.c) ** 2, axis=1) < self.radius**2

    def reflect(self, plane):
        plane.check(self.dim)
        return Ball(plane.mirror(self.c), self.radius)

    def translate(self, v):
        return Ball(self.c + np.asarray(v, float), self.radius)

    def scale(self, t):
        return Ball(self.c * t, self.radius * t)

    def clip(self, plane, sign):
        plane.check(self.dim)
        s = _sign(sign)
        d = s * (plane.offset - self.center[plane.axis])
        if d <= -self.radius:
            return self
        if d >= self.radius:
            return Empty(self.dim)
        return BallCap(self, plane.axis, plane.offset, s)


@dataclass(frozen=True)
class BallCap(Body):
    """ball ∩ {sign * (x[axis] - offset) > 0}."""

    ball: Ball
    axis: int
    offset: float
    sign: int

    @property
    def dim(self) -> int:
        return self.ball.dim

    @property
    def height(self) -> float:
        """Signed position of the cutting plane in the ball frame, measured
        along the kept direction (the cap is {y > height})."""
        return self.sign * (self.offset - self.ball.center[self.axis])

    def bbox(self):
        lo, hi = self.ball.bbox()
        if self.sign > 0:
            lo[self.axis] = max(lo[self.axis], self.offset)
        else:
            hi[self.axis] = min(hi[self.axis], self.offset)
        return lo, hi

    def contains(self, points):
        pts = np.atleast_2d(points)
        return self.ball.contains(pts) & (self.sign * (pts[:, self.axis] - self.offset) > 0)

    def reflect(self, plane):
        plane.check(self.dim)
        b = self.ball.reflect(plane)
        if plane.axis == self.axis:
            return BallCap(b, self.axis, 2 * plane.offset - self.offset, -self.sign)
        return BallCap(b, self.axis, self.offset, self.sign)

    def translate(self, v):
        v = np.asarray(v, float)
        return BallCap(self.ball.translate(v), self.axis, self.offset + v[self.axis], self.sign)

    def scale(self, t):
        return BallCap(self.ball.scale(t), self.axis, self.offset * t, self.sign)

    def clip(self, plane, sign):
        plane.check(self.dim)
        s = _sign(sign)
        inner = self.ball.clip(plane, s)
        if inner.is_empty:
            return inner
        if plane.axis == self.axis and s == self.sign:
            if s * (plane.offset - self.offset) >= 0:
                return inner
            return self
        # the other side of the cap, or the cap itself
        lo, hi = self.bbox()
        if s > 0 and lo[plane.axis] >= plane.offset or s < 0 and hi[plane.axis] <= plane.offset:
            return self
        if s > 0 and hi[plane.axis] <= plane.offset or s < 0 and lo[plane.axis] >= plane.offset:
            return Empty(self.dim)
        raise RepresentationError("a ball cut by two distinct hyperplanes is not representable exactly")


@dataclass(frozen=True)
class AxisBox(Body):
    lo: tuple[float, ...]
    hi: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "lo", _vec(self.lo))
        object.__setattr__(self, "hi", _vec(self.hi, len(self.lo)))
        if len(self.lo) < 2:
            raise ShapeError("dimension must be at least 2")
        if any(a >= b for a, b in zip(self.lo, self.hi)):
            raise ShapeError("box corners must be strictly ordered per coordinate")

    @property
    def dim(self) -> int:
        return len(self.lo)

    def bbox(self):
        return np.array(self.lo), np.array(self.hi)

    def contains(self, points):
        pts = np.atleast_2d(points)
        return np.all((pts > np.array(self.lo)) & (pts < np.array(self.hi)), axis=1)

    def reflect(self, plane):
        plane.check(self.dim)
        lo, hi = np.array(self.lo), np.array(self.hi)
        a = plane.axis
        lo[a], hi[a] = 2 * plane.offset - self.hi[a], 2 * plane.offset - self.lo[a]
        return AxisBox(lo, hi)

    def translate(self, v):
        v = np.asarray(v, float)
        return AxisBox(np.array(self.lo) + v, np.array(self.hi) + v)

    def scale(self, t):
        return AxisBox(np.array(self.lo) * t, np.array(self.hi) * t)

    def clip(self, plane, sign):
        plane.check(self.dim)
        s = _sign(sign)
        lo, hi = np.array(self.lo), np.array(self.hi)
        a = plane.axis
        if s > 0:
            lo[a] = max(lo[a], plane.offset)
        else:
            hi[a] = min(hi[a], plane.offset)
        if lo[a] >= hi[a]:
            return Empty(self.dim)
        return AxisBox(lo, hi)

    def ring(self) -> np.ndarray:
        if self.dim != 2:
            raise ShapeError("only planar boxes have a boundary ring")
        (x0, y0), (x1, y1) = self.lo, self.hi
        return np.array([[x0, y0], [x1, y0], [x1, y1], [x0, y1]], dtype=float)


def _frozen_array(a) -> np.ndarray:
    arr = np.array(a, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Polygon2D(Body):
    """Simple planar polygon; stored counter-clockwise."""

    vertices: np.ndarray
    validate: bool = field(default=True, repr=False)

    def __post_init__(self):
        v = np.array(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2 or len(v) < 3:
            raise ShapeError("a polygon needs at least 3 planar vertices")
        if np.all(v[0] == v[-1]):
            v = v[:-1]
        if self.validate and not geom2d.polygon_is_simple(v):
            raise ShapeError("polygon is not simple")
        a = geom2d.signed_area(v)
        if a == 0:
            raise ShapeError("polygon has zero area")
        if a < 0:
            v = v[::-1]
        object.__setattr__(self, "vertices", _frozen_array(v))

    dim = 2

    @property
    def rings(self) -> tuple[np.ndarray, ...]:
        return (self.vertices,)

    def bbox(self):
        return self.vertices.min(axis=0), self.vertices.max(axis=0)

    def contains(self, points):
        return geom2d.winding(self.rings, points) != 0

    def reflect(self, plane):
        plane.check(2)
        return Polygon2D(geom2d.reflect_ring(self.vertices, plane.axis, plane.offset), validate=False)

    def translate(self, v):
        return Polygon2D(self.vertices + np.asarray(v, float), validate=False)

    def scale(self, t):
        return Polygon2D(self.vertices * t, validate=False)

    def clip(self, plane, sign):
        return Region2D(self.rings).clip(plane, sign)


@dataclass(frozen=True, eq=False)
class Region2D(Body):
    """Planar region bounded by oriented rings (interior on the left)."""

    rings: tuple[np.ndarray, ...]

    def __post_init__(self):
        rings = tuple(_frozen_array(r) for r in self.rings)
        for r in rings:
            if r.ndim != 2 or r.shape[1] != 2 or len(r) < 3:
                raise ShapeError("each ring needs at least 3 planar vertices")
        object.__setattr__(self, "rings", rings)

    dim = 2

    def bbox(self):
        pts = np.concatenate(self.rings)
        return pts.min(axis=0), pts.max(axis=0)

    def contains(self, points):
        return geom2d.winding(self.rings, points) != 0

    def reflect(self, plane):
        plane.check(2)
        return Region2D(tuple(geom2d.reflect_ring(r, plane.axis, plane.offset) for r in self.rings))

    def translate(self, v):
        v = np.asarray(v, float)
        return Region2D(tuple(r + v for r in self.rings))

    def scale(self, t):
        return Region2D(tuple(r * t for r in self.rings))

    def clip(self, plane, sign):
        plane.check(2)
        s = _sign(sign)
        out = []
        for r in self.rings:
            c = geom2d.clip_ring(np.array(r), plane.axis, plane.offset, s)
            if c is not None:
                out.append(c)
        if not out or geom2d.chain_area(out) <= 0:
            return Empty(2)
        return Region2D(tuple(out))


@dataclass(frozen=True, eq=False)
class VoxelGrid(Body):
    """Union of closed cubes of side ``h``; cell ``i`` spans
    ``origin + i*h .. origin + (i+1)*h``."""

    origin: tuple[float, ...]
    h: float
    occupancy: np.ndarray

    def __post_init__(self):
        occ = np.array(self.occupancy, dtype=bool)
        object.__setattr__(self, "origin", _vec(self.origin, occ.ndim))
        if not self.h > 0:
            raise ShapeError(f"spacing must be positive, got {self.h}")
        if occ.ndim < 2:
            raise ShapeError("dimension must be at least 2")
        occ.setflags(write=False)
        object.__setattr__(self, "occupancy", occ)

    @property
    def dim(self) -> int:
        return self.occupancy.ndim

    @property
    def dims(self) -> tuple[int, ...]:
        return self.occupancy.shape

    @property
    def count(self) -> int:
        return int(self.occupancy.sum())

    @property
    def is_empty(self) -> bool:
        return self.count == 0

    def centers(self) -> np.ndarray:
        idx = np.argwhere(self.occupancy)
        return np.array(self.origin) + (idx + 0.5) * self.h

    def bbox(self):
        idx = np.argwhere(self.occupancy)
        o = np.array(self.origin)
        if len(idx) == 0:
            return o, o
        return o + idx.min(axis=0) * self.h, o + (idx.max(axis=0) + 1) * self.h

    def contains(self, points):
        pts = np.atleast_2d(points)
        idx = np.floor((pts - np.array(self.origin)) / self.h).astype(int)
        ok = np.all((idx >= 0) & (idx < np.array(self.dims)), axis=1)
        out = np.zeros(len(pts), dtype=bool)
        out[ok] = self.occupancy[tuple(idx[ok].T)]
        return out

    def _lattice_offset(self, axis: int, offset: float) -> float:
        return (offset - self.origin[axis]) / self.h

    def reflect(self, plane):
        plane.check(self.dim)
        k2 = 2 * self._lattice_offset(plane.axis, plane.offset)
        if abs(k2 - round(k2)) > 1e-6:
            raise AlignmentError(
                f"plane x[{plane.axis}]={plane.offset} is not on a cell boundary or centre of the grid"
            )
        a = plane.axis
        o = list(self.origin)
        o[a] = 2 * plane.offset - (self.origin[a] + self.dims[a] * self.h)
        return VoxelGrid(tuple(o), self.h, np.flip(self.occupancy, axis=a))

    def translate(self, v):
        return VoxelGrid(tuple(np.array(self.origin) + np.asarray(v, float)), self.h, self.occupancy)

    def scale(self, t):
        if not t > 0:
            raise ShapeError("dilation factor must be positive")
        return VoxelGrid(tuple(np.array(self.origin) * t), self.h * t, self.occupancy)

    def clip(self, plane, sign):
        """Keep cells whose centre lies strictly on the requested side; exact
        when the plane is a cell boundary."""
        plane.check(self.dim)
        s = _sign(sign)
        a = plane.axis
        c = self.origin[a] + (np.arange(self.dims[a]) + 0.5) * self.h
        keep = s * (c - plane.offset) > 0
        shape = [1] * self.dim
        shape[a] = -1
        return VoxelGrid(self.origin, self.h, self.occupancy & keep.reshape(shape))

    def same_lattice(self, other: "VoxelGrid") -> bool:
        if other.dim != self.dim or abs(other.h - self.h) > 1e-12 * self.h:
            return False
        k = (np.array(other.origin) - np.array(self.origin)) / self.h
        return bool(np.all(np.abs(k - np.round(k)) < 1e-6))

    def combine(self, other: "VoxelGrid", op=np.logical_or) -> "VoxelGrid":
        """Cellwise boolean combination of two grids on the same lattice."""
        if not self.same_lattice(other):
            raise AlignmentError("grids are not on a common lattice")
        o1, o2 = np.array(self.origin), np.array(other.origin)
        lo = np.minimum(o1, o2)
        hi = np.maximum(o1 + np.array(self.dims) * self.h, o2 + np.array(other.dims) * self.h)
        dims = tuple(int(round(x)) for x in (hi - lo) / self.h)
        a = np.zeros(dims, dtype=bool)
        b = np.zeros(dims, dtype=bool)
        s1 = tuple(int(round(x)) for x in (o1 - lo) / self.h)
        s2 = tuple(int(round(x)) for x in (o2 - lo) / self.h)
        a[tuple(slice(s, s + n) for s, n in zip(s1, self.dims))] = self.occupancy
        b[tuple(slice(s, s + n) for s, n in zip(s2, other.dims))] = other.occupancy
        return VoxelGrid(tuple(lo), self.h, op(a, b))

    def cropped(self) -> "VoxelGrid":
        idx = np.argwhere(self.occupancy)
        if len(idx) == 0:
            return self
        lo, hi = idx.min(axis=0), idx.max(axis=0) + 1
        sl = tuple(slice(a, b) for a, b in zip(lo, hi))
        return VoxelGrid(tuple(np.array(self.origin) + lo * self.h), self.h, self.occupancy[sl])


@dataclass(frozen=True)
class Union(Body):
    """Union of parts; ``disjoint`` promises pairwise overlaps of zero volume."""

    parts: tuple[Body, ...]
    disjoint: bool = False

    def __post_init__(self):
        parts = tuple(self.parts)
        if not parts:
            raise ShapeError("a union needs at least one part (use Empty)")
        dims = {p.dim for p in parts}
        if len(dims) != 1:
            raise ShapeError(f"inconsistent part dimensions {sorted(dims)}")
        object.__setattr__(self, "parts", parts)

    @property
    def dim(self) -> int:
        return self.parts[0].dim

    def bbox(self):
        boxes = [p.bbox() for p in self.parts if not p.is_empty]
        if not boxes:
            return np.zeros(self.dim), np.zeros(self.dim)
        return np.min([b[0] for b in boxes], axis=0), np.max([b[1] for b in boxes], axis=0)

    def contains(self, points):
        pts = np.atleast_2d(points)
        out = np.zeros(len(pts), dtype=bool)
        for p in self.parts:
            out |= p.contains(pts)
        return out

    @property
    def is_empty(self) -> bool:
        return all(p.is_empty for p in self.parts)

    def _map(self, f) -> Body:
        parts = [f(p) for p in self.parts]
        parts = [p for p in parts if not p.is_empty]
        if not parts:
            return Empty(self.dim)
        if len(parts) == 1:
            return parts[0]
        return Union(tuple(parts), self.disjoint)

    def reflect(self, plane):
        plane.check(self.dim)
        return self._map(lambda p: p.reflect(plane))

    def translate(self, v):
        return self._map(lambda p: p.translate(v))

    def scale(self, t):
        return self._map(lambda p: p.scale(t))

    def clip(self, plane, sign):
        plane.check(self.dim)
        return self._map(lambda p: p.clip(plane, sign))

    def leaves(self) -> list[Body]:
        out: list[Body] = []
        for p in self.parts:
            out.extend(p.leaves() if isinstance(p, Union) else [p])
        return out


# ---------------------------------------------------------------- operations


def reflect(s: Body, plane: Hyperplane) -> Body:
    return s.reflect(plane)


def clip_halfspace(s: Body, plane: Hyperplane, sign) -> Body:
    return s.clip(plane, sign)


def translate(s: Body, v) -> Body:
    return s.translate(v)


def dilate(s: Body, t: float) -> Body:
    if not t > 0:
        raise ShapeError("dilation factor must be positive")
    return s.scale(t)


@dataclass(frozen=True)
class Normalized:
    shape: Body
    scale: float
    shift: np.ndarray  # applied before scaling: new = (old + shift) * scale


def normalize(s: Body) -> Normalized:
    """Translate the barycenter to the origin and rescale to unit volume.

    Voxel grids are shifted by whole cells after the translation so that the
    coordinate hyperplanes stay on cell boundaries; their barycenter is then
    within ``h/2`` of the origin per axis.
    """
    from .measures import barycenter, volume

    m = volume(s)
    if not m > 0:
        raise DegenerateShapeError("cannot normalize a shape of zero volume")
    bar = barycenter(s)
    t = m ** (-1.0 / s.dim)
    shift = -bar
    if isinstance(s, VoxelGrid):
        h = s.h * t
        o = (np.array(s.origin) + shift) * t
        snapped = np.round(o / h) * h
        shift = snapped / t - np.array(s.origin)
        out = VoxelGrid(tuple(snapped), h, s.occupancy)
    else:
        out = s.translate(shift).scale(t)
    return Normalized(out, t, shift)


def grid_axes(lo: np.ndarray, hi: np.ndarray, h: float) -> tuple[np.ndarray, tuple[int, ...]]:
    origin = np.floor(np.asarray(lo) / h) * h
    dims = tuple(max(1, int(math.ceil((b - o) / h - 1e-9))) for o, b in zip(origin, hi))
    return origin, dims


def rasterize(s: Body, origin: np.ndarray, h: float, dims: Sequence[int]) -> np.ndarray:
    """Cell-centre membership of ``s`` on the grid (origin, h, dims)."""
    axes = [origin[i] + (np.arange(n) + 0.5) * h for i, n in enumerate(dims)]
    if isinstance(s, (Polygon2D, Region2D)):
        return geom2d.rasterize(s.rings, axes[0], axes[1])
    if isinstance(s, AxisBox):
        masks = [(ax > lo) & (ax < hi) for ax, lo, hi in zip(axes, s.lo, s.hi)]
        out = masks[0]
        for m in masks[1:]:
            out = np.multiply.outer(out, m)
        return out.astype(bool)
    if isinstance(s, Union):
        out = np.zeros(tuple(dims), dtype=bool)
        for p in s.parts:
            out |= rasterize(p, origin, h, dims)
        return out
    if isinstance(s, Empty):
        return np.zeros(tuple(dims), dtype=bool)
    out = np.zeros(tuple(dims), dtype=bool)
    rest = np.stack(np.meshgrid(*axes[1:], indexing="ij"), axis=-1).reshape(-1, len(dims) - 1)
    for i, x0 in enumerate(axes[0]):
        pts = np.column_stack([np.full(len(rest), x0), rest])
        out[i] = s.contains(pts).reshape(tuple(dims[1:]))
    return out


def voxelize(s: Body, h: float, cell_budget: int = DEFAULT_CELL_BUDGET) -> VoxelGrid:
    """Cell-centre voxelization: a cell is occupied iff its centre lies in ``s``.

    The volume error is first order in ``h`` (bounded by about
    ``sqrt(N) * h * perimeter``).
    """
    if not h > 0:
        raise ShapeError(f"spacing must be positive, got {h}")
    if s.is_empty:
        return VoxelGrid(tuple([0.0] * s.dim), h, np.zeros((1,) * s.dim, dtype=bool))
    lo, hi = s.bbox()
    origin, dims = grid_axes(lo, hi, h)
    if math.prod(dims) > cell_budget:
        raise ResourceError(f"grid of {math.prod(dims)} cells exceeds the budget of {cell_budget}")
    return VoxelGrid(tuple(origin), h, rasterize(s, origin, h, dims))


def regular_polygon(center, radius: float, n: int = 1024) -> Polygon2D:
    """Polygon inscribed in the disk, vertices at angles 2*pi*k/n."""
    th = 2 * np.pi * np.arange(n) / n
    c = np.asarray(center, float)
    return Polygon2D(np.column_stack([c[0] + radius * np.cos(th), c[1] + radius * np.sin(th)]), validate=False)


def to_region(s: Body, ball_vertices: int = 1024) -> Region2D | Empty:
    """Planar shape as a ring chain.  Disks and caps are replaced by inscribed
    polygons with ``ball_vertices`` vertices; everything else is exact."""
    if s.dim != 2:
        raise ShapeError("only planar shapes convert to rings")
    if isinstance(s, Empty):
        return s
    if isinstance(s, Region2D):
        return s
    if isinstance(s, Polygon2D):
        return Region2D(s.rings)
    if isinstance(s, AxisBox):
        return Region2D((s.ring(),))
    if isinstance(s, Ball):
        return Region2D(regular_polygon(s.center, s.radius, ball_vertices).rings)
    if isinstance(s, BallCap):
        return Region2D(regular_polygon(s.ball.center, s.ball.radius, ball_vertices).rings).clip(
            Hyperplane(s.axis, s.offset), s.sign
        )
    if isinstance(s, Union):
        if not s.disjoint:
            raise RepresentationError("overlapping unions have no exact ring chain")
        rings: list[np.ndarray] = []
        for p in s.parts:
            r = to_region(p, ball_vertices)
            if not r.is_empty:
                rings.extend(r.rings)
        return Region2D(tuple(rings)) if rings else Empty(2)
    raise RepresentationError(f"cannot convert {type(s).__name__} to rings")


def is_polygonal(s: Body) -> bool:
    if isinstance(s, (Polygon2D, Region2D)):
        return True
    if isinstance(s, AxisBox):
        return s.dim == 2
    if isinstance(s, Union):
        return s.disjoint and all(is_polygonal(p) for p in s.parts)
    return False


def ball_for_volume(dim: int, m: float, center=None) -> Ball:
    c = np.zeros(dim) if center is None else np.asarray(center, float)
    return Ball(c, balls.radius_for_volume(dim, m))
