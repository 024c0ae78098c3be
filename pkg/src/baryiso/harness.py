"""Batch verification of the inequality suite over seeded shape corpora."""

from __future__ import annotations

import csv
import io
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Iterable, Iterator, Sequence

import numpy as np
from scipy import integrate

from . import balls
from .asymmetry import (
    FraenkelOptions,
    PreconditionError,
    _quadrature_error,
    barycentric_asymmetry,
    deficit_with_error,
    fraenkel_asymmetry,
)
from .checks import FAIL, Check, na, tolerance_for
from .constants import ISODIAMETRIC, ConstantsTable, bch_constant, main_constant, omega
from .corpus import CorpusItem, dependance_closed_form, gen_dependance_family, make_item
from .measures import (
    DEFAULT_QUADRATURE,
    QuadratureOptions,
    _grid,
    _needs_grid,
    _perimeter,
    diameter,
    is_connected,
    symmetry_defect,
    volume,
)
from .shapes import AxisBox, Ball, Body, Polygon2D, ShapeError, VoxelGrid, normalize
from .symmetrization import SymmetrizationOptions, _sqrt_err, symmetrize_full

SUITES = ("main", "section2", "sandwich", "bch", "convex")


@dataclass(frozen=True)
class HarnessConfig:
    cf: float = 1.0
    floor: str = ISODIAMETRIC
    quadrature: QuadratureOptions = DEFAULT_QUADRATURE
    fraenkel: FraenkelOptions = FraenkelOptions()
    tolerance: float = 0.0  # extra absolute slack on top of each check's own tolerance
    optimizer_slack: float = 0.01

    def to_dict(self) -> dict:
        return {
            "cf": self.cf,
            "floor": self.floor,
            "quadrature_h": self.quadrature.h,
            "fraenkel_budget": self.fraenkel.budget,
            "fraenkel_grid": self.fraenkel.grid,
            "tolerance": self.tolerance,
            "optimizer_slack": self.optimizer_slack,
        }


@dataclass
class VerificationReport:
    item_id: str
    suite: str
    checks: list[Check]
    config: dict
    item: dict = field(default_factory=dict)
    measured: dict = field(default_factory=dict)
    timing: float | None = None
    error: str | None = None

    @property
    def passed(self) -> bool:
        return self.error is None and not any(c.blocking_failure for c in self.checks)

    @property
    def failures(self) -> list[str]:
        return [c.name for c in self.checks if c.blocking_failure]

    def to_dict(self, timing: bool = True) -> dict:
        d = {
            "item_id": self.item_id,
            "suite": self.suite,
            "item": self.item,
            "passed": self.passed,
            "checks": [c.to_dict() for c in self.checks],
            "config": self.config,
            "measured": self.measured,
        }
        if self.error is not None:
            d["error"] = self.error
        if timing and self.timing is not None:
            d["timing"] = self.timing
        return d


# ---------------------------------------------------------------- helpers


def _as_item(x: CorpusItem | Body) -> CorpusItem:
    if isinstance(x, CorpusItem):
        return x
    return CorpusItem("shape", "input", {"n": x.dim}, 0, x)


def prepared(s: Body, q: QuadratureOptions = DEFAULT_QUADRATURE) -> Body:
    """Unit volume, barycenter at the origin; overlapping unions are gridded first."""
    if _needs_grid(s):
        s = _grid(s, q)
    return normalize(s).shape


def _loosen(checks: Iterable[Check], tol: float) -> list[Check]:
    return [replace(c, tolerance=max(c.tolerance, tol)) if tol > 0 else c for c in checks]


def _lambda0_with_error(s: Body, q: QuadratureOptions) -> tuple[float, float]:
    m = volume(s, q)
    r = balls.radius_for_volume(s.dim, m)
    err = _quadrature_error(s, r, m)
    if isinstance(s, VoxelGrid):
        # snapped barycenter sits within half a cell diagonal of the true one
        err += balls.surface(s.dim, r) * 0.5 * math.sqrt(s.dim) * s.h / m
    return barycentric_asymmetry(s, q), err


def _main_bound(name: str, anchor: str, lam0, lerr, delta, derr, c0) -> Check:
    err = lerr + c0 * _sqrt_err(delta, derr)
    return Check(name, anchor, lam0, c0 * math.sqrt(max(delta, 0.0)), tolerance_for(err))


# ---------------------------------------------------------------- suites


def verify_main_theorem(item, config: HarnessConfig = HarnessConfig()) -> VerificationReport:
    """lambda0 <= C0(N, D) sqrt(delta) with D the item's own normalized diameter."""
    it = _as_item(item)
    q = config.quadrature
    s = prepared(it.shape, q)
    n = s.dim
    delta, derr = deficit_with_error(s, q)
    lam0, lerr = _lambda0_with_error(s, q)
    d_item = diameter(s)
    table = ConstantsTable.build(n, d_item, config.cf, config.floor)
    c0 = main_constant(n, d_item, config.cf, config.floor)
    checks = [_main_bound("main_bound", "lambda0 <= C0(N, D) sqrt(delta)", lam0, lerr, delta, derr, c0)]
    ratio = lam0 / math.sqrt(delta) if delta > 0 else math.nan
    if delta > 0:
        checks.append(
            Check("ratio_vs_constant", "lambda0 / sqrt(delta) against C0(N, D)", ratio, c0, informational=True)
        )
    else:
        checks.append(na("ratio_vs_constant", "lambda0 / sqrt(delta) against C0(N, D)", "delta <= 0", True))
    return VerificationReport(
        it.id,
        "main",
        _loosen(checks, config.tolerance),
        table.to_dict(),
        it.to_dict(),
        {"delta": delta, "lambda0": lam0, "D": d_item, "D_clamped": table.d, "c0": c0, "ratio": ratio,
         "errors": {"delta": derr, "lambda0": lerr}},
    )


# per-step checks that must hold; everything else in a step is reported as-is
SECTION2_CORE = (
    "eps_sqrt_deficit",
    "eta_prime_sandwich",
    "lambda0_split",
    "deficit_split",
    "trilem_first",
    "trilem_second",
)


def verify_section2_suite(item, config: HarnessConfig = HarnessConfig()) -> VerificationReport:
    """Run the full symmetrization and collect every per-step check."""
    it = _as_item(item)
    s = it.shape
    n = s.dim
    opts = SymmetrizationOptions(fraenkel=config.fraenkel, quadrature=config.quadrature)
    s0 = prepared(s, config.quadrature)
    table = ConstantsTable.build(n, diameter(s0), config.cf, config.floor)
    trace = symmetrize_full(s0, table, opts)
    checks: list[Check] = []
    branches, atlo = [], []
    for st in trace.steps:
        branches.append(st.branch)
        checks.extend(replace(c, name=f"axis{st.axis}.{c.name}") for c in st.checks)
        orient = {}
        for key in ("atlo_printed", "atlo_derived"):
            c = st.check(key)
            orient[key] = c.status
        atlo.append(orient)
    checks.append(
        Check("final_symmetry_defect", "result symmetric about every coordinate hyperplane",
              trace.final_defect, 0.0, tolerance_for(0.0) if not isinstance(trace.final, VoxelGrid) else 1e-6)
    )
    return VerificationReport(
        it.id,
        "section2",
        _loosen(checks, config.tolerance),
        table.to_dict(),
        it.to_dict(),
        {"branches": branches, "atlo_orientation": atlo, "final_symmetry_defect": trace.final_defect},
    )


def verify_sandwich(item, config: HarnessConfig = HarnessConfig()) -> VerificationReport:
    """lambda <= lambda0 always; lambda0 <= 2^N lambda when the set is N-symmetric."""
    it = _as_item(item)
    q = config.quadrature
    s = prepared(it.shape, q)
    n = s.dim
    lam0 = barycentric_asymmetry(s, q)
    fr = fraenkel_asymmetry(s, config.fraenkel, q)
    sym = symmetry_defect(s, range(n), q) <= 1e-9
    tol = config.optimizer_slack
    checks = [Check("sandwich_lower", "lambda <= lambda0", fr.value, lam0, tol)]
    if sym:
        checks.append(Check("sandwich_upper", "lambda0 <= 2^N lambda for N-symmetric sets", lam0, 2**n * fr.value, tol))
    else:
        checks.append(na("sandwich_upper", "lambda0 <= 2^N lambda for N-symmetric sets", "not N-symmetric"))
    return VerificationReport(
        it.id, "sandwich", _loosen(checks, config.tolerance), {"cf": config.cf}, it.to_dict(),
        {"lambda": fr.value, "lambda0": lam0, "n_symmetric": sym, "optimizer_evals": fr.evaluations,
         "budget_exhausted": fr.budget_exhausted},
    )


def verify_bch(item, config: HarnessConfig = HarnessConfig()) -> VerificationReport:
    """Planar connected sets: case split on whether diam exceeds 2 sqrt(pi)."""
    it = _as_item(item)
    q = config.quadrature
    if it.shape.dim != 2:
        raise PreconditionError("the connected-set bound is planar")
    if not is_connected(it.shape, q):
        raise PreconditionError("shape is not connected")
    s = prepared(it.shape, q)
    delta, derr = deficit_with_error(s, q)
    lam0, lerr = _lambda0_with_error(s, q)
    p, _, perr = _perimeter(s, q)
    d = diameter(s)
    threshold = 2 * math.sqrt(math.pi)
    checks = [Check("perimeter_vs_diameter", "P(E) >= 2 diam(E) for connected sets", 2 * d, p, tolerance_for(perr))]
    large = d > threshold
    if large:
        checks.append(Check("large_diameter_deficit", "diam > 2 sqrt(pi) implies delta >= 1", 1.0, delta, tolerance_for(derr)))
        checks.append(_main_bound("large_diameter_bound", "lambda0 <= 2 sqrt(delta)", lam0, lerr, delta, derr, 2.0))
    else:
        c0 = main_constant(2, threshold, config.cf, config.floor)
        checks.append(_main_bound("small_diameter_bound", "lambda0 <= C0(2, 2 sqrt(pi)) sqrt(delta)",
                                  lam0, lerr, delta, derr, c0))
    cb = bch_constant(config.cf)
    checks.append(_main_bound("connected_constant", "lambda0 <= max{2, C0(2, 2 sqrt(pi))} sqrt(delta)",
                              lam0, lerr, delta, derr, cb))
    return VerificationReport(
        it.id, "bch", _loosen(checks, config.tolerance), {"cf": config.cf, "bch": cb}, it.to_dict(),
        {"delta": delta, "lambda0": lam0, "diameter": d, "perimeter": p,
         "branch": "large_diameter" if large else "small_diameter"},
    )


def _convex_sections(s: Body):
    """(t_lo, t_hi, section measure along axis 0) for certified convex bodies."""
    n = s.dim
    if isinstance(s, Ball):
        c, r = s.center[0], s.radius
        return c - r, c + r, lambda t: omega(n - 1) * max(r * r - (t - c) ** 2, 0.0) ** ((n - 1) / 2), [c]
    if isinstance(s, AxisBox):
        area = float(np.prod(np.array(s.hi[1:]) - np.array(s.lo[1:])))
        return s.lo[0], s.hi[0], lambda t: area, []
    if isinstance(s, Polygon2D) and n == 2:
        from shapely.geometry import LineString, Polygon

        poly = Polygon(s.vertices)
        if abs(poly.convex_hull.area - poly.area) > 1e-12 * poly.area:
            raise PreconditionError("polygon is not convex")
        lo, hi = s.bbox()

        def length(t):
            return LineString([(t, lo[1] - 1), (t, hi[1] + 1)]).intersection(poly).length

        return lo[0], hi[0], length, sorted(float(v[0]) for v in s.vertices)
    raise PreconditionError(f"convexity of {type(s).__name__} cannot be certified")


def verify_convex_section_bound(s: Body, config: HarnessConfig = HarnessConfig()) -> VerificationReport:
    """P(E) >= integral over t of the isoperimetric perimeter of the section E_t."""
    it = _as_item(s)
    body = it.shape
    n = body.dim
    a, b, section, breaks = _convex_sections(body)
    k = (n - 1) * omega(n - 1) ** (1 / (n - 1))
    expo = (n - 2) / (n - 1)

    def integrand(t):
        area = section(t)
        if area <= 0:
            return 0.0
        return k * area**expo

    if n == 2:
        total = k * (b - a)  # exponent 0: the integrand is constant where sections are nonempty
        qerr = 0.0
    else:
        pts = [x for x in breaks if a < x < b]
        total, qerr = integrate.quad(integrand, a, b, points=pts or None, limit=200, epsabs=1e-13, epsrel=1e-12)
    p, _, perr = _perimeter(body, config.quadrature)
    checks = [Check("convex_section_bound", "P(E) >= integral of section perimeters", total, p,
                    tolerance_for(perr + qerr))]
    return VerificationReport(it.id, "convex", _loosen(checks, config.tolerance), {}, it.to_dict(),
                              {"integral": total, "perimeter": p})


SUITE_FUNCS = {
    "main": verify_main_theorem,
    "section2": verify_section2_suite,
    "sandwich": verify_sandwich,
    "bch": verify_bch,
    "convex": verify_convex_section_bound,
}


# ---------------------------------------------------------------- D-sweep


@dataclass(frozen=True)
class SweepRow:
    eps: float
    D: float
    lambda0: float
    delta: float
    ratio: float
    delta_closed: float

    def to_dict(self) -> dict:
        return {"eps": self.eps, "D": self.D, "lambda0": self.lambda0, "delta": self.delta,
                "ratio": self.ratio, "delta_closed_form": self.delta_closed}


@dataclass(frozen=True)
class SweepResult:
    n: int
    rows: list[SweepRow]
    slope: float
    intercept: float

    @property
    def expected_slope(self) -> float:
        return (self.n - 1) / (2 * self.n)

    def to_dict(self) -> dict:
        return {"n": self.n, "rows": [r.to_dict() for r in self.rows], "slope": self.slope,
                "intercept": self.intercept, "expected_slope": self.expected_slope}


def d_sweep(n: int, eps_grid: Sequence[float], q: QuadratureOptions = DEFAULT_QUADRATURE) -> SweepResult:
    """Measure the two-mass family over ``eps_grid`` and fit log(lambda0/sqrt(delta)) against log D."""
    eps_grid = [float(e) for e in eps_grid]
    if len(eps_grid) < 3:
        raise ValueError("the slope fit needs at least 3 points")
    rows = []
    for eps in eps_grid:
        s = normalize(gen_dependance_family(n, eps)).shape
        delta, _ = deficit_with_error(s, q)
        lam0 = barycentric_asymmetry(s, q)
        d = diameter(s)
        rows.append(SweepRow(eps, d, lam0, delta, lam0 / math.sqrt(delta), dependance_closed_form(n, eps)["delta"]))
    x = np.log([r.D for r in rows])
    y = np.log([r.ratio for r in rows])
    slope, intercept = np.polyfit(x, y, 1)
    return SweepResult(n, rows, float(slope), float(intercept))


def parse_eps_grid(text: str) -> np.ndarray:
    """``start:stop:log|lin:count``, e.g. ``1e-1:1e-4:log:8``."""
    parts = text.split(":")
    if len(parts) != 4 or parts[2] not in ("log", "lin"):
        raise ValueError(f"expected start:stop:log|lin:count, got {text!r}")
    a, b, k = float(parts[0]), float(parts[1]), int(parts[3])
    if k < 1:
        raise ValueError("count must be positive")
    return np.geomspace(a, b, k) if parts[2] == "log" else np.linspace(a, b, k)


# ---------------------------------------------------------------- batch runner


@dataclass(frozen=True)
class Job:
    suite: str
    config: HarnessConfig
    family: str | None = None
    index: int = 0
    seed: int = 0
    n: int = 2
    params: tuple = ()
    item: CorpusItem | None = None

    def materialize(self) -> CorpusItem:
        if self.item is not None:
            return self.item
        return make_item(self.family, self.index, self.seed, self.n, **dict(self.params))


def run_job(job: Job) -> VerificationReport:
    t0 = time.perf_counter()
    item_id = job.item.id if job.item is not None else f"{job.family}-{job.seed}-{job.index:04d}"
    try:
        item = job.materialize()
        rep = SUITE_FUNCS[job.suite](item, job.config)
    except (ShapeError, ValueError) as exc:
        meta = {"family": job.family, "index": job.index, "seed": job.seed}
        rep = VerificationReport(item_id, job.suite, [], job.config.to_dict(), meta, {},
                                 error=f"{type(exc).__name__}: {exc}")
    rep.timing = time.perf_counter() - t0
    return rep


def family_jobs(suite: str, family: str, count: int, seed: int, n: int, config: HarnessConfig, **params) -> list[Job]:
    p = tuple(sorted(params.items()))
    return [Job(suite, config, family, i, seed, n, p) for i in range(count)]


def run_batch(jobs: Sequence[Job], workers: int = 1) -> Iterator[VerificationReport]:
    """Reports in job order, whatever the worker count."""
    if workers <= 1:
        for j in jobs:
            yield run_job(j)
        return
    with ProcessPoolExecutor(max_workers=workers) as pool:
        try:
            yield from pool.map(run_job, jobs, chunksize=1)
        except BaseException:
            pool.shutdown(wait=False, cancel_futures=True)
            raise


# ---------------------------------------------------------------- output


def clean(x):
    """JSON-safe copy: numpy scalars to Python, non-finite floats to strings."""
    if isinstance(x, dict):
        return {str(k): clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [clean(v) for v in x]
    if isinstance(x, np.ndarray):
        return [clean(v) for v in x.tolist()]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else str(x)
    return x


def summarize_reports(reports: Sequence[VerificationReport]) -> dict:
    failed = [r for r in reports if not r.passed]
    names: dict[str, int] = {}
    for r in failed:
        for nme in r.failures:
            names[nme] = names.get(nme, 0) + 1
    out = {"items": len(reports), "passed": len(reports) - len(failed), "failed": len(failed),
           "errors": sum(r.error is not None for r in reports), "failing_checks": names}
    branches: dict[str, int] = {}
    atlo: dict[str, int] = {}
    for r in reports:
        for b in r.measured.get("branches", []):
            branches[b] = branches.get(b, 0) + 1
        for o in r.measured.get("atlo_orientation", []):
            for key, status in o.items():
                tag = f"{key}:{status}"
                atlo[tag] = atlo.get(tag, 0) + 1
    if branches:
        out["branch_frequency"] = branches
    if atlo:
        out["atlo_orientation"] = atlo
    return out


def report_document(reports: Sequence[VerificationReport], run: dict, timestamp: str | None = None,
                    partial: bool = False) -> dict:
    doc = {
        "run": run,
        "summary": summarize_reports(reports),
        "reports": [r.to_dict(timing=timestamp is not None) for r in reports],
        "partial": partial,
    }
    if timestamp is not None:
        doc["timestamp"] = timestamp
    return clean(doc)


def dumps(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, indent=2, allow_nan=False) + "\n"


CSV_FIELDS = ("item_id", "check", "anchor", "lhs", "rhs", "slack", "pass")


def reports_csv(reports: Sequence[VerificationReport]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_FIELDS)
    for r in reports:
        if r.error is not None:
            w.writerow([r.item_id, "error", r.error, "", "", "", FAIL])
        for c in r.checks:
            w.writerow([r.item_id, c.name, c.anchor, repr(float(c.lhs)), repr(float(c.rhs)),
                        repr(float(c.slack)), c.status])
    return buf.getvalue()
