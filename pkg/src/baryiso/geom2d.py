"""Planar region kernels on oriented rings.

A planar region is stored as a list of closed rings (``(k, 2)`` arrays, last
vertex not repeated).  Each ring is oriented so that the interior lies on its
left; holes therefore run clockwise.  Area, moments and disk intersections are
edge-additive boundary integrals, so any collection of rings whose chain sum
is the boundary of the region gives exact values, including the zero-width
bridges produced by Sutherland-Hodgman clipping of non-convex rings.
"""

from __future__ import annotations

from collections import defaultdict
from typing import Iterable, Sequence

import numpy as np

Ring = np.ndarray


def _edges(rings: Sequence[Ring]) -> tuple[np.ndarray, np.ndarray]:
    if not rings:
        z = np.zeros((0, 2))
        return z, z
    p = np.concatenate([r for r in rings])
    q = np.concatenate([np.roll(r, -1, axis=0) for r in rings])
    return p, q


def signed_area(ring: Ring) -> float:
    x, y = ring[:, 0], ring[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def chain_area(rings: Sequence[Ring]) -> float:
    return float(sum(signed_area(r) for r in rings))


def chain_moment(rings: Sequence[Ring]) -> np.ndarray:
    """(integral of x, integral of y) over the region."""
    p, q = _edges(rings)
    if len(p) == 0:
        return np.zeros(2)
    cross = p[:, 0] * q[:, 1] - q[:, 0] * p[:, 1]
    mx = np.sum((p[:, 0] + q[:, 0]) * cross) / 6
    my = np.sum((p[:, 1] + q[:, 1]) * cross) / 6
    return np.array([mx, my])


def _aligned_length(groups: dict) -> float:
    total = 0.0
    for items in groups.values():
        a = np.array([it[0] for it in items])
        b = np.array([it[1] for it in items])
        s = np.array([it[2] for it in items])
        cuts = np.unique(np.concatenate([a, b]))
        net = np.zeros(len(cuts))
        np.add.at(net, np.searchsorted(cuts, a), s)
        np.add.at(net, np.searchsorted(cuts, b), -s)
        cover = np.cumsum(net)[:-1]
        total += float(np.sum(np.abs(cover) * np.diff(cuts)))
    return total


def chain_length(rings: Sequence[Ring]) -> float:
    """Length of the reduced boundary of the region.

    Axis-aligned edges lying on a common line are merged with their
    orientation, so pieces glued along a coordinate line (a clipped set and
    its mirror image, touching boxes, clipping bridges) do not count their
    shared interface.
    """
    p, q = _edges(rings)
    if len(p) == 0:
        return 0.0
    d = q - p
    vert = (d[:, 0] == 0) & (d[:, 1] != 0)
    horiz = (d[:, 1] == 0) & (d[:, 0] != 0)
    other = ~(vert | horiz)
    total = float(np.sum(np.hypot(d[other, 0], d[other, 1])))
    vg: dict = defaultdict(list)
    for x, y0, y1 in zip(p[vert, 0], p[vert, 1], q[vert, 1]):
        vg[float(x)].append((min(y0, y1), max(y0, y1), 1.0 if y1 > y0 else -1.0))
    hg: dict = defaultdict(list)
    for y, x0, x1 in zip(p[horiz, 1], p[horiz, 0], q[horiz, 0]):
        hg[float(y)].append((min(x0, x1), max(x0, x1), 1.0 if x1 > x0 else -1.0))
    return total + _aligned_length(vg) + _aligned_length(hg)


def clip_ring(ring: Ring, axis: int, offset: float, sign: int) -> Ring | None:
    """Sutherland-Hodgman clip of one ring to {sign * (x_axis - offset) >= 0}.

    Crossing points are placed exactly on the line.  Returns ``None`` when
    nothing of positive area survives.
    """
    s = sign * (ring[:, axis] - offset)
    n = len(ring)
    out: list[np.ndarray] = []
    for i in range(n):
        j = (i + 1) % n
        p, q = ring[i], ring[j]
        sp, sq = s[i], s[j]
        if sp >= 0:
            out.append(p)
        if (sp > 0 and sq < 0) or (sp < 0 and sq > 0):
            t = sp / (sp - sq)
            x = p + t * (q - p)
            x[axis] = offset
            out.append(x)
    if len(out) < 3:
        return None
    res = np.array(out, dtype=float)
    if signed_area(res) == 0.0:
        return None
    return res


def disk_intersection_areas(rings: Sequence[Ring], centers: np.ndarray, r: float) -> np.ndarray:
    """Exact area of region ∩ disk(c, r) for each row ``c`` of ``centers``.

    Sum over edges of the signed area of triangle(c, p, q) ∩ disk: each edge
    is split at its circle crossings; pieces inside contribute a triangle,
    pieces outside a circular sector.
    """
    centers = np.atleast_2d(np.asarray(centers, dtype=float))
    p, q = _edges(rings)
    out = np.zeros(len(centers))
    if len(p) == 0 or r <= 0:
        return out
    keep = np.any(p != q, axis=1)
    p, q = p[keep], q[keep]
    rr = r * r
    chunk = max(1, 200_000 // max(1, len(p)))
    for k0 in range(0, len(centers), chunk):
        c = centers[k0 : k0 + chunk, None, :]
        a = p[None] - c
        b = q[None] - c
        d = b - a
        qa = np.einsum("kij,kij->ki", d, d)
        qb = 2 * np.einsum("kij,kij->ki", a, d)
        qc = np.einsum("kij,kij->ki", a, a) - rr
        disc = qb * qb - 4 * qa * qc
        sq = np.sqrt(np.maximum(disc, 0.0))
        t1 = np.where(disc > 0, (-qb - sq) / (2 * qa), 0.0)
        t2 = np.where(disc > 0, (-qb + sq) / (2 * qa), 0.0)
        t1 = np.clip(t1, 0.0, 1.0)[..., None]
        t2 = np.clip(t2, 0.0, 1.0)[..., None]
        p1 = a + t1 * d
        p2 = a + t2 * d

        def cross(u, v):
            return u[..., 0] * v[..., 1] - u[..., 1] * v[..., 0]

        def angle(u, v):
            return np.arctan2(cross(u, v), np.einsum("kij,kij->ki", u, v))

        # empty outside pieces contribute nothing; skipping them avoids the
        # undefined angle when the centre sits on a vertex
        sector_in = np.where(t1[..., 0] > 0, angle(a, p1), 0.0)
        sector_out = np.where(t2[..., 0] < 1, angle(p2, b), 0.0)
        area = 0.5 * rr * sector_in + 0.5 * cross(p1, p2) + 0.5 * rr * sector_out
        out[k0 : k0 + chunk] = area.sum(axis=1)
    return out


def disk_intersection_area(rings: Sequence[Ring], center, r: float) -> float:
    return float(disk_intersection_areas(rings, np.asarray(center, float)[None], r)[0])


def winding(rings: Sequence[Ring], points: np.ndarray) -> np.ndarray:
    """Winding number of the boundary chain around each point."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    p, q = _edges(rings)
    w = np.zeros(len(pts), dtype=int)
    if len(p) == 0:
        return w
    chunk = max(1, 2_000_000 // max(1, len(p)))
    for k0 in range(0, len(pts), chunk):
        x = pts[k0 : k0 + chunk, 0][:, None]
        y = pts[k0 : k0 + chunk, 1][:, None]
        side = (q[None, :, 0] - p[None, :, 0]) * (y - p[None, :, 1]) - (x - p[None, :, 0]) * (
            q[None, :, 1] - p[None, :, 1]
        )
        up = (p[None, :, 1] <= y) & (q[None, :, 1] > y) & (side > 0)
        down = (p[None, :, 1] > y) & (q[None, :, 1] <= y) & (side < 0)
        w[k0 : k0 + chunk] = up.sum(axis=1) - down.sum(axis=1)
    return w


def rasterize(rings: Sequence[Ring], xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Boolean mask ``[ix, iy]`` of grid points (xs[ix], ys[iy]) inside the region
    (nonzero winding), by scanlines."""
    p, q = _edges(rings)
    mask = np.zeros((len(xs), len(ys)), dtype=bool)
    if len(p) == 0:
        return mask
    y0 = p[:, 1]
    y1 = q[:, 1]
    for j, y in enumerate(ys):
        up = (y0 <= y) & (y1 > y)
        down = (y0 > y) & (y1 <= y)
        sel = up | down
        if not sel.any():
            continue
        pp, qq = p[sel], q[sel]
        xc = pp[:, 0] + (y - pp[:, 1]) * (qq[:, 0] - pp[:, 0]) / (qq[:, 1] - pp[:, 1])
        dirs = np.where(up[sel], 1, -1)
        order = np.argsort(xc)
        xc = xc[order]
        suffix = np.concatenate([np.cumsum(dirs[order][::-1])[::-1], [0]])
        # crossings strictly to the right of each x
        idx = np.searchsorted(xc, xs, side="right")
        mask[:, j] = suffix[idx] != 0
    return mask


def reflect_ring(ring: Ring, axis: int, offset: float) -> Ring:
    out = ring.copy()
    out[:, axis] = 2 * offset - out[:, axis]
    return out[::-1].copy()


def polygon_is_simple(vertices: np.ndarray) -> bool:
    from shapely.geometry import LinearRing

    if len(vertices) < 3:
        return False
    return bool(LinearRing(vertices).is_simple)


def to_shapely(rings: Iterable[Ring]):
    """Best-effort shapely geometry of a ring chain (counter-clockwise rings
    filled, clockwise rings subtracted)."""
    from shapely import make_valid
    from shapely.geometry import Polygon
    from shapely.ops import unary_union

    pos, neg = [], []
    for r in rings:
        poly = make_valid(Polygon(r))
        (pos if signed_area(r) > 0 else neg).append(poly)
    geom = unary_union(pos) if pos else Polygon()
    if neg:
        geom = geom.difference(unary_union(neg))
    return geom
