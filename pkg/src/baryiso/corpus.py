"""Seeded shape families for batch verification."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import balls
from .shapes import AxisBox, Ball, Body, Polygon2D, ShapeError, Union, VoxelGrid

FAMILIES = (
    "perturbed_ball",
    "two_ball",
    "dependance",
    "dumbbell",
    "random_polygon",
    "k_symmetric_random",
    "egg",
)


def item_seed(corpus_seed: int, index: int) -> int:
    """Per-item seed derived from (corpus seed, index); independent of run order."""
    return int(np.random.SeedSequence([corpus_seed, index]).generate_state(1, dtype=np.uint64)[0])


# ---------------------------------------------------------------- families


def gen_two_ball(n: int, r: float, d: float) -> Union:
    """Unit ball at the origin plus a ball of radius r centred at (d, 0, ..., 0)."""
    if not 0 < r < 1:
        raise ShapeError(f"small radius must lie in (0, 1), got {r}")
    if d <= 1 + r:
        raise ShapeError(f"balls overlap: d = {d} <= 1 + r = {1 + r}")
    far = np.zeros(n)
    far[0] = d
    return Union((Ball(np.zeros(n), 1.0), Ball(far, r)), disjoint=True)


def gen_dependance_family(n: int, eps: float) -> Union:
    """Ball of volume 1 - eps at the origin plus a ball of volume eps at (3/eps, 0, ..., 0)."""
    if not 0 < eps <= 0.1:
        raise ShapeError(f"eps must lie in (0, 0.1], got {eps}")
    far = np.zeros(n)
    far[0] = 3 / eps
    return Union(
        (Ball(np.zeros(n), balls.radius_for_volume(n, 1 - eps)), Ball(far, balls.radius_for_volume(n, eps))),
        disjoint=True,
    )


def dependance_closed_form(n: int, eps: float) -> dict:
    """Deficit, barycentric asymmetry and diameter of the family, in closed form."""
    r_big = balls.radius_for_volume(n, 1 - eps)
    r_small = balls.radius_for_volume(n, eps)
    r_bar = balls.radius_for_volume(n, 1.0)
    # barycenter sits at 3; the barycentric ball misses both parts when
    # 3 >= r_bar + r_big and 3/eps - 3 >= r_bar + r_small
    disjoint = 3 >= r_bar + r_big and 3 / eps - 3 >= r_bar + r_small
    return {
        "delta": (1 - eps) ** ((n - 1) / n) + eps ** ((n - 1) / n) - 1,
        "lambda0": 2.0 if disjoint else math.nan,
        "diameter": 3 / eps + r_big + r_small,
    }


def _trig_radius(theta: np.ndarray, rng: np.random.Generator, modes: int, amplitude: float, step: int = 1):
    ks = np.arange(2, modes + 1)
    if step > 1:
        ks = ks[ks % step == 0]
    a = rng.standard_normal(len(ks)) / ks
    b = rng.standard_normal(len(ks)) / ks
    u = np.zeros_like(theta)
    for k, ak, bk in zip(ks, a, b):
        u += ak * np.cos(k * theta) + bk * np.sin(k * theta)
    peak = np.abs(u).max()
    return u * (amplitude / peak) if peak > 0 else u


def gen_perturbed_ball(
    n: int, amplitude: float, modes: int, seed: int, vertices: int = 256, voxels_per_diameter: int = 96
) -> Body:
    """Radial graph r = R (1 + u) over the unit sphere, u a random low-mode
    trigonometric sum scaled to max |u| = amplitude.  Polygon in the plane,
    voxel grid in space; amplitude 0 gives the analytic ball."""
    if not 0 <= amplitude < 0.3:
        raise ShapeError(f"amplitude must lie in [0, 0.3), got {amplitude}")
    if modes < 2:
        raise ShapeError("need at least mode 2")
    R = balls.radius_for_volume(n, 1.0)
    if amplitude == 0:
        return Ball(np.zeros(n), R)
    rng = np.random.default_rng(seed)
    if n == 2:
        th = 2 * np.pi * np.arange(vertices) / vertices
        r = R * (1 + _trig_radius(th, rng, modes, amplitude))
        return Polygon2D(np.column_stack([r * np.cos(th), r * np.sin(th)]), validate=False)
    k = 2 * modes
    dirs = rng.standard_normal((k, n))
    dirs /= np.linalg.norm(dirs, axis=1)[:, None]
    freq = rng.integers(2, modes + 1, size=k)
    phase = rng.uniform(0, 2 * np.pi, size=k)
    coef = rng.standard_normal(k) / freq

    def u(w: np.ndarray) -> np.ndarray:
        return np.cos((w @ dirs.T) * freq + phase) @ coef

    probe = rng.standard_normal((20000, n))
    probe /= np.linalg.norm(probe, axis=1)[:, None]
    scale = amplitude / np.abs(u(probe)).max()
    h = 2 * R * (1 + amplitude) / voxels_per_diameter
    m = int(math.ceil(R * (1 + amplitude) / h)) + 1
    ax = (np.arange(-m, m) + 0.5) * h
    occ = np.zeros((2 * m,) * n, dtype=bool)
    rest = np.stack(np.meshgrid(*([ax] * (n - 1)), indexing="ij"), axis=-1).reshape(-1, n - 1)
    for i, x0 in enumerate(ax):
        pts = np.column_stack([np.full(len(rest), x0), rest])
        rad = np.linalg.norm(pts, axis=1)
        w = pts / rad[:, None]
        occ[i] = (rad < R * (1 + scale * u(w))).reshape((2 * m,) * (n - 1))
    return VoxelGrid(tuple([-m * h] * n), h, occ)


def random_polygon(seed: int, vertices: int = 24, spread: float = 0.3) -> Polygon2D:
    """Star-shaped polygon: sorted random angles, radii uniform in [1 - spread, 1 + spread]."""
    rng = np.random.default_rng(seed)
    th = np.sort(rng.uniform(0, 2 * np.pi, size=vertices))
    r = rng.uniform(1 - spread, 1 + spread, size=vertices)
    return Polygon2D(np.column_stack([r * np.cos(th), r * np.sin(th)]))


def k_symmetric_random(seed: int, k: int = 2, amplitude: float = 0.25, modes: int = 8, vertices: int = 256) -> Polygon2D:
    """Planar radial graph symmetric about the first k coordinate axes' hyperplanes.

    k = 2 keeps only cos(2j theta) terms (symmetric about both axes); k = 1
    is symmetric about {x_1 = 0} only; k = 0 is unconstrained.
    """
    if k not in (0, 1, 2):
        raise ShapeError(f"planar shapes are at most 2-symmetric, got k={k}")
    rng = np.random.default_rng(seed)
    th = 2 * np.pi * np.arange(vertices) / vertices
    js = np.arange(1, modes + 1)
    a = rng.standard_normal(modes) / js
    b = rng.standard_normal(modes) / js if k == 0 else np.zeros(modes)
    step = 2 if k == 2 else 1
    u = np.zeros_like(th)
    for j, aj, bj in zip(js, a, b):
        if step * j > 2 * modes:
            break
        u += aj * np.cos(step * j * th) + bj * np.sin(step * j * th)
    u *= amplitude / np.abs(u).max()
    r = 1 + u
    pts = np.column_stack([r * np.cos(th), r * np.sin(th)])
    if k >= 1:
        # exact mirror pairs: vertex i and vertex -i
        half = vertices // 2
        pts[half + 1 :] = pts[1:half][::-1] * np.array([1, -1])
        pts[0, 1] = 0.0
        pts[half, 1] = 0.0
    if k == 2:
        q = vertices // 4
        pts[half - q + 1 : half] = pts[1:q][::-1] * np.array([-1, 1])
        pts[half + 1 :] = pts[1:half][::-1] * np.array([1, -1])
        pts[q, 0] = 0.0
        pts[3 * q, 0] = 0.0
    elif k == 1:
        # quarter turn: mirror symmetry about {x_2 = 0} becomes symmetry about {x_1 = 0}
        pts = np.column_stack([-pts[:, 1], pts[:, 0]])
    return Polygon2D(pts, validate=False)


def dumbbell(n: int = 3, r_small: float = 0.3, d: float = 6.0, neck: float = 0.02) -> Union:
    """Unit ball, small ball at distance d, and a thin box connector overlapping both."""
    if n < 3:
        raise ShapeError("the thin-connector construction needs N >= 3")
    far = np.zeros(n)
    far[0] = d
    lo = np.full(n, -neck)
    hi = np.full(n, neck)
    lo[0], hi[0] = 0.0, d
    return Union((Ball(np.zeros(n), 1.0), Ball(far, r_small), AxisBox(lo, hi)))


def _bezier(p0, p1, p2, p3, k: int) -> np.ndarray:
    t = np.linspace(0, 1, k, endpoint=False)[:, None]
    return (1 - t) ** 3 * p0 + 3 * (1 - t) ** 2 * t * p1 + 3 * (1 - t) * t**2 * p2 + t**3 * p3


def tilted_egg(samples_per_segment: int = 64) -> Polygon2D:
    """Lopsided egg: a closed cubic Bezier outline, bulging to the upper right
    with a tail to the left."""
    ctrl = [
        ((0, -2), (2.5, -1.5), (3, -0.5), (3, 0)),
        ((3, 0), (3, 2), (2, 5), (0, 2)),
        ((0, 2), (-1, 0.5), (-2, -0.2), (-3, -0.5)),
        ((-3, -0.5), (-4, -0.8), (-3, -2), (-2.5, -2.2)),
        ((-2.5, -2.2), (-2, -2.4), (-1, -2.2), (0, -2)),
    ]
    pts = np.concatenate([_bezier(*map(np.array, seg), samples_per_segment) for seg in ctrl])
    return Polygon2D(pts)


# ---------------------------------------------------------------- corpus items


@dataclass(frozen=True)
class CorpusItem:
    id: str
    family: str
    params: dict
    seed: int
    shape: Body = field(repr=False, compare=False)

    def to_dict(self) -> dict:
        return {"id": self.id, "family": self.family, "params": dict(self.params), "seed": self.seed}


def make_item(family: str, index: int, corpus_seed: int, n: int = 2, **params) -> CorpusItem:
    """Item ``index`` of a family; the same arguments always give the same shape."""
    seed = item_seed(corpus_seed, index)
    rng = np.random.default_rng(seed)
    p: dict
    if family == "perturbed_ball":
        p = {"n": n, "amplitude": params.get("amplitude", 0.1), "modes": params.get("modes", 6)}
        shape = gen_perturbed_ball(n, p["amplitude"], p["modes"], seed)
    elif family == "two_ball":
        r = params.get("r", float(np.round(rng.uniform(0.05, 0.5), 6)))
        d = params.get("d", float(np.round(rng.uniform(1.5 + r, 300.0), 6)))
        p = {"n": n, "r": r, "d": d}
        shape = gen_two_ball(n, r, d)
    elif family == "dependance":
        eps = params.get("eps", float(10 ** np.round(rng.uniform(-4, -1), 6)))
        p = {"n": n, "eps": eps}
        shape = gen_dependance_family(n, eps)
    elif family == "dumbbell":
        p = {"n": max(n, 3), "r_small": params.get("r_small", 0.3), "d": params.get("d", 6.0),
             "neck": params.get("neck", 0.02)}
        shape = dumbbell(p["n"], p["r_small"], p["d"], p["neck"])
    elif family == "random_polygon":
        p = {"n": 2, "vertices": params.get("vertices", 24), "spread": params.get("spread", 0.3)}
        shape = random_polygon(seed, p["vertices"], p["spread"])
    elif family == "k_symmetric_random":
        p = {"n": 2, "k": params.get("k", 2), "amplitude": params.get("amplitude", 0.25)}
        shape = k_symmetric_random(seed, p["k"], p["amplitude"])
    elif family == "egg":
        p = {"n": 2}
        shape = tilted_egg()
    else:
        raise ValueError(f"unknown family {family!r}; choose from {', '.join(FAMILIES)}")
    return CorpusItem(f"{family}-{corpus_seed}-{index:04d}", family, p, seed, shape)


def build_corpus(family: str, count: int, corpus_seed: int, n: int = 2, **params) -> list[CorpusItem]:
    return [make_item(family, i, corpus_seed, n, **params) for i in range(count)]
