"""Isoperimetric deficit, barycentric asymmetry and Fraenkel asymmetry."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product

import numpy as np
from scipy.optimize import minimize

from . import balls
from .measures import (
    DEFAULT_QUADRATURE,
    QuadratureOptions,
    _perimeter,
    ball_intersection_is_exact,
    ball_intersections,
    barycenter,
    components,
    symmetry_defect,
    volume,
)
from .shapes import Ball, Body, DegenerateShapeError, ShapeError


class PreconditionError(ShapeError):
    pass


def _mass(s: Body, q: QuadratureOptions) -> float:
    m = volume(s, q)
    if not m > 0:
        raise DegenerateShapeError("asymmetries need a shape of positive volume")
    return m


# ---------------------------------------------------------------- deficit


def deficit_with_error(s: Body, q: QuadratureOptions = DEFAULT_QUADRATURE) -> tuple[float, float]:
    if isinstance(s, Ball):
        return 0.0, 0.0
    m = _mass(s, q)
    p, _, perr = _perimeter(s, q)
    pb = balls.perimeter_for_volume(s.dim, m)
    return (p - pb) / pb, perr / pb


def deficit(s: Body, q: QuadratureOptions = DEFAULT_QUADRATURE) -> float:
    """(P(E) - P(B(m))) / P(B(m)) for m = |E|."""
    return deficit_with_error(s, q)[0]


# ------------------------------------------------------ barycentric asymmetry


def _objective(s: Body, m: float, r: float, centers: np.ndarray, q: QuadratureOptions) -> np.ndarray:
    inter = ball_intersections(s, centers, r, q)
    return np.clip(2 * (m - inter) / m, 0.0, 2.0)


def _quadrature_error(s: Body, r: float, m: float) -> float:
    """Cell-centre counting error of |E ∩ B| on a grid, relative to the mass."""
    if ball_intersection_is_exact(s):
        return 0.0
    h = getattr(s, "h", None)
    if h is None:
        return 0.0
    return 2 * math.sqrt(s.dim) * h * balls.surface(s.dim, r) / m


def barycentric_asymmetry(s: Body, q: QuadratureOptions = DEFAULT_QUADRATURE) -> float:
    """|E Δ (bar(E) + B(m))| / |E|."""
    if isinstance(s, Ball):
        return 0.0
    m = _mass(s, q)
    r = balls.radius_for_volume(s.dim, m)
    return float(_objective(s, m, r, barycenter(s, q)[None], q)[0])


# ------------------------------------------------------- Fraenkel asymmetry


@dataclass(frozen=True)
class FraenkelOptions:
    """Multi-start search: a coarse grid of ``grid**N`` centres over the
    bounding box, then Nelder-Mead from the ``starts`` best grid points, the
    barycenter and the component barycenters.  ``budget`` caps the number of
    objective evaluations spent in the descent stage."""

    grid: int = 17
    starts: int = 3
    budget: int = 2000
    xatol: float = 1e-7
    fatol: float = 1e-10
    axis: int = 0


@dataclass(frozen=True)
class FraenkelResult:
    value: float
    center: tuple[float, ...]
    epsilon_f: float
    evaluations: int
    budget_exhausted: bool


def epsilon_f(center, m: float, axis: int = 0) -> float:
    """| |B ∩ {x_axis > 0}| / m - 1/2 | for the ball of mass m at ``center``."""
    c = np.asarray(center, float)
    r = balls.radius_for_volume(len(c), m)
    return abs(balls.cap_volume(len(c), r, -c[axis]) / m - 0.5)


def fraenkel_asymmetry(
    s: Body, opts: FraenkelOptions = FraenkelOptions(), q: QuadratureOptions = DEFAULT_QUADRATURE
) -> FraenkelResult:
    m = _mass(s, q)
    n = s.dim
    if isinstance(s, Ball):
        return FraenkelResult(0.0, s.center, epsilon_f(s.c, m, opts.axis), 0, False)
    r = balls.radius_for_volume(n, m)
    lo, hi = s.bbox()
    axes = [np.linspace(a, b, opts.grid) for a, b in zip(lo, hi)]
    grid = np.array(list(product(*axes)))
    gvals = _objective(s, m, r, grid, q)
    evals = len(grid)

    # stable sort: ties keep grid order
    best_idx = np.argsort(gvals, kind="stable")[: opts.starts]
    starts = [grid[i] for i in best_idx]
    starts.append(barycenter(s, q))
    starts.extend(barycenter(c, q) for c in components(s) if volume(c, q) > 0)

    candidates: list[tuple[float, int, np.ndarray]] = [(float(gvals[best_idx[0]]), -1, grid[best_idx[0]])]
    step = np.maximum((hi - lo) / max(opts.grid - 1, 1), 1e-3 * r)
    remaining = opts.budget
    exhausted = False
    for k, x0 in enumerate(starts):
        if remaining <= 0:
            exhausted = True
            break
        share = max(n + 2, remaining // (len(starts) - k))
        used = 0

        def f(x):
            nonlocal used
            used += 1
            return float(_objective(s, m, r, np.asarray(x)[None], q)[0])

        simplex = np.vstack([x0, x0 + np.diag(step)])
        res = minimize(
            f,
            x0,
            method="Nelder-Mead",
            options={
                "initial_simplex": simplex,
                "maxfev": share,
                "xatol": opts.xatol,
                "fatol": opts.fatol,
            },
        )
        remaining -= used
        evals += used
        # status 1: stopped by maxfev before converging
        exhausted = exhausted or res.status == 1
        candidates.append((float(res.fun), k, np.asarray(res.x)))
    # lexicographic tie-break on (value, candidate index)
    value, _, center = min(candidates, key=lambda t: (t[0], t[1]))
    return FraenkelResult(value, tuple(float(x) for x in center), epsilon_f(center, m, opts.axis), evals, exhausted)


# ---------------------------------------------------------------- reports


@dataclass(frozen=True)
class AsymmetryReport:
    deficit: float
    barycentric: float
    fraenkel: float
    fraenkel_center: tuple[float, ...]
    epsilon_f: float
    optimizer_evals: int
    budget_exhausted: bool
    tolerances: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "deficit": self.deficit,
            "barycentric": self.barycentric,
            "fraenkel": self.fraenkel,
            "fraenkel_center": list(self.fraenkel_center),
            "epsilon_f": self.epsilon_f,
            "optimizer_evals": self.optimizer_evals,
            "budget_exhausted": self.budget_exhausted,
            "tolerances": dict(self.tolerances),
        }


def asymmetry_report(
    s: Body, opts: FraenkelOptions = FraenkelOptions(), q: QuadratureOptions = DEFAULT_QUADRATURE
) -> AsymmetryReport:
    d, derr = deficit_with_error(s, q)
    lam0 = barycentric_asymmetry(s, q)
    fr = fraenkel_asymmetry(s, opts, q)
    m = volume(s, q)
    qerr = _quadrature_error(s, balls.radius_for_volume(s.dim, m), m)
    return AsymmetryReport(
        deficit=d,
        barycentric=lam0,
        fraenkel=fr.value,
        fraenkel_center=fr.center,
        epsilon_f=fr.epsilon_f,
        optimizer_evals=fr.evaluations,
        budget_exhausted=fr.budget_exhausted,
        tolerances={"deficit": derr, "barycentric": qerr, "fraenkel": qerr},
    )


@dataclass(frozen=True)
class SandwichResult:
    lower_ok: bool
    upper_ok: bool
    lower_slack: float  # lambda0 - lambda
    upper_slack: float  # 2^N lambda - lambda0
    fraenkel: float
    barycentric: float


def sandwich_check(
    s: Body,
    opts: FraenkelOptions = FraenkelOptions(),
    q: QuadratureOptions = DEFAULT_QUADRATURE,
    optimizer_slack: float = 0.01,
    symmetry_tol: float = 1e-9,
) -> SandwichResult:
    """lambda <= lambda0 <= 2^N lambda for a set symmetric about every
    coordinate hyperplane."""
    n = s.dim
    defect = symmetry_defect(s, range(n), q)
    if defect > symmetry_tol:
        raise PreconditionError(f"shape is not {n}-symmetric (defect {defect:.3g} > {symmetry_tol:g})")
    lam0 = barycentric_asymmetry(s, q)
    lam = fraenkel_asymmetry(s, opts, q).value
    lower = lam0 - lam
    upper = 2**n * lam - lam0
    return SandwichResult(lower >= -optimizer_slack, upper >= -optimizer_slack, lower, upper, lam, lam0)
