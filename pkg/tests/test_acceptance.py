"""Acceptance criteria, one test each.

Every test records a one-line PASS/FAIL verdict, printed at the end of the
pytest run (see conftest.py) or directly when run as a script::

    python tests/test_acceptance.py
"""

import math
import subprocess
import sys
import time

import numpy as np
import pytest
import shapely

from baryiso.asymmetry import FraenkelOptions, barycentric_asymmetry, deficit, fraenkel_asymmetry
from baryiso.constants import c0_closed_form, c1, c2, c3, constant_chain, diameter_floor, fuglede_diameter
from baryiso.corpus import build_corpus, gen_two_ball
from baryiso.harness import (
    HarnessConfig,
    d_sweep,
    parse_eps_grid,
    verify_bch,
    verify_main_theorem,
    verify_sandwich,
    verify_section2_suite,
)
from baryiso.shapes import Ball, normalize, voxelize

RESULTS: dict[int, tuple[str, bool, str]] = {}
CONFIG = HarnessConfig(cf=1.0)


def verdict(num: int, title: str, ok: bool, detail: str) -> None:
    RESULTS[num] = (title, ok, detail)
    assert ok, f"criterion {num} ({title}): {detail}"


def summary_lines() -> list[str]:
    return [f"criterion {k:2d} {'PASS' if ok else 'FAIL'}  {title}: {detail}"
            for k, (title, ok, detail) in sorted(RESULTS.items())]


def test_criterion_01_ball_nullity():
    t0 = time.perf_counter()
    worst_exact = 0.0
    for n in (2, 3):
        b = Ball(np.zeros(n), 1 / math.sqrt(math.pi) if n == 2 else 0.62)
        vals = (deficit(b), barycentric_asymmetry(b), fraenkel_asymmetry(b).value)
        worst_exact = max(worst_exact, *map(abs, vals))
    g = normalize(voxelize(Ball((0.0, 0.0), 1 / math.sqrt(math.pi)), 0.01)).shape
    grid_vals = (deficit(g), barycentric_asymmetry(g), fraenkel_asymmetry(g, FraenkelOptions(grid=9)).value)
    elapsed = time.perf_counter() - t0
    ok = worst_exact == 0.0 and max(map(abs, grid_vals)) <= 5e-3 and elapsed < 10
    verdict(1, "ball nullity", ok,
            f"analytic max {worst_exact:g}; voxel h=0.01 (delta, lambda0, lambda) = "
            f"({grid_vals[0]:.2e}, {grid_vals[1]:.2e}, {grid_vals[2]:.2e}); {elapsed:.1f}s")


def test_criterion_02_two_ball_counterexample():
    s = gen_two_ball(2, 0.1, 200)
    lam0 = barycentric_asymmetry(s)
    delta = deficit(s)
    expected = (2.2 - 2 * math.sqrt(1.01)) / (2 * math.sqrt(1.01))
    delta_ok = abs(delta - expected) <= 1e-12
    lam0_ok = lam0 == 2.0
    # at d = 200 the barycentric ball still reaches the unit ball; see the decisions ledger
    verdict(2, "two-ball counterexample", delta_ok and lam0_ok,
            f"delta error {abs(delta - expected):.1e} ({'ok' if delta_ok else 'bad'}); "
            f"lambda0 = {lam0:.10f} (target exactly 2; d=400 gives {barycentric_asymmetry(gen_two_ball(2, 0.1, 400))})")


def test_criterion_03_sandwich():
    sym = build_corpus("k_symmetric_random", 50, 3)
    sym_reps = [verify_sandwich(it, CONFIG) for it in sym]
    sym_ok = all(r.passed and r.measured["n_symmetric"] for r in sym_reps)
    others = (build_corpus("perturbed_ball", 10, 3) + build_corpus("two_ball", 10, 3)
              + build_corpus("random_polygon", 10, 3) + build_corpus("dependance", 5, 3)
              + build_corpus("egg", 1, 3) + build_corpus("perturbed_ball", 3, 3, n=3))
    low = [verify_sandwich(it, CONFIG).checks[0] for it in others]
    low_ok = all(c.holds for c in low)
    worst_upper = min(r.checks[1].slack for r in sym_reps)
    verdict(3, "sandwich lemma", sym_ok and low_ok,
            f"50 symmetric shapes {'ok' if sym_ok else 'FAIL'} (min upper slack {worst_upper:.3g}); "
            f"lower bound on {sum(c.holds for c in low)}/{len(low)} other corpus items")


def test_criterion_04_section2_suite():
    t0 = time.perf_counter()
    reps = [verify_section2_suite(it, CONFIG) for it in build_corpus("perturbed_ball", 100, 7)]
    elapsed = time.perf_counter() - t0
    core = ("eps_sqrt_deficit", "eta_prime_sandwich", "lambda0_split", "deficit_split", "trilem_first", "trilem_second")
    bad = [f"{r.item_id}:{c.name}" for r in reps for c in r.checks
           if c.name.split(".", 1)[-1] in core and c.applicable and not c.holds]
    failed = [r.item_id for r in reps if not r.passed]
    steps = [o for r in reps for o in r.measured["atlo_orientation"]]
    reported = all(set(o) == {"atlo_printed", "atlo_derived"} for o in steps)
    derived = sum(o["atlo_derived"] == "pass" for o in steps)
    printed = sum(o["atlo_printed"] == "pass" for o in steps)
    ok = not bad and not failed and reported and elapsed < 300
    verdict(4, "section-2 slack suite", ok,
            f"{100 - len(failed)}/100 items pass, core failures {len(bad)}; "
            f"atlo derived orientation {derived}/{len(steps)} steps, printed {printed}/{len(steps)}; {elapsed:.0f}s")


SPEC_CONSTANTS = {
    "C1(2,1)": (lambda: c1(2, 1.0), 2.014576),
    "C2(2,1)": (lambda: c2(2, 1.0), 2.868743),
    "C3(2,1)": (lambda: c3(2, 1.0), 6.059841),
    "D(2)": (lambda: fuglede_diameter(2), 3.544908),
    "D(3)": (lambda: fuglede_diameter(3), 7.442),
}


def test_criterion_05_constants():
    # independent evaluation of the planar constants
    sq = math.sqrt(math.pi)
    k1 = 2 / sq + sq / 2
    k2 = math.sqrt(2**-1.5 / math.pi + 2 * k1**2)
    k3 = max(2 * k1, 2 * k2 + 4 / (7 * sq), 1 / (2 * sq))
    hand_ok = (abs(c1(2, 1.0) / k1 - 1) < 1e-14 and abs(c2(2, 1.0) / k2 - 1) < 1e-14
               and abs(c3(2, 1.0) / k3 - 1) < 1e-14 and abs(fuglede_diameter(2) / (2 * sq) - 1) < 1e-14)
    rel = {k: abs(f() / v - 1) for k, (f, v) in SPEC_CONSTANTS.items()}
    quoted_ok = max(rel.values()) < 1e-3
    chain_err = 0.0
    for n in (2, 3, 4, 5):
        for d in (1.0, 10.0, 100.0):
            d = max(d, diameter_floor(n))
            chain_err = max(chain_err, abs(constant_chain(n, d, 1.0)[-1] / c0_closed_form(n, d, 1.0) - 1))
    ok = hand_ok and quoted_ok and chain_err <= 1e-12
    verdict(5, "constants", ok,
            f"hand evaluation {'agrees' if hand_ok else 'DISAGREES'}; quoted values within rel "
            f"{max(rel.values()):.1e}; recursion vs closed form max rel {chain_err:.1e}")


def test_criterion_06_main_theorem():
    items = (build_corpus("perturbed_ball", 20, 6) + build_corpus("two_ball", 20, 6)
             + build_corpus("random_polygon", 20, 6) + build_corpus("dependance", 10, 6)
             + build_corpus("perturbed_ball", 5, 6, n=3) + build_corpus("two_ball", 10, 6, n=3))
    reps = [verify_main_theorem(it, CONFIG) for it in items]
    failed = [r.item_id for r in reps if not r.passed]
    worst = max(r.measured["ratio"] / r.measured["c0"] for r in reps if r.measured["delta"] > 0)
    verdict(6, "main theorem", not failed,
            f"{len(reps) - len(failed)}/{len(reps)} items (N=2,3); max lambda0/(C0 sqrt(delta)) = {worst:.2e}")


def test_criterion_07_d_sweep():
    t0 = time.perf_counter()
    res = {n: d_sweep(n, parse_eps_grid("1e-1:1e-4:log:8")) for n in (2, 3)}
    elapsed = time.perf_counter() - t0
    ok = all(abs(r.slope - r.expected_slope) <= 0.05 for r in res.values()) and elapsed < 5
    verdict(7, "diameter sweep", ok,
            ", ".join(f"N={n} slope {r.slope:.4f} (expected {r.expected_slope:.4f})" for n, r in res.items())
            + f"; {elapsed:.2f}s")


def test_criterion_08_bch():
    reps = [verify_bch(it, CONFIG) for it in build_corpus("random_polygon", 20, 8)]
    connbdd = all(r.checks[0].name == "perimeter_vs_diameter" and r.checks[0].holds for r in reps)
    ok = all(r.passed for r in reps) and connbdd
    branches = sorted({r.measured["branch"] for r in reps})
    verdict(8, "planar connected case split", ok,
            f"{sum(r.passed for r in reps)}/20 polygons pass; P >= 2 diam on all: {connbdd}; branches {branches}")


def _exhaustive_fraenkel(poly, h: float = 0.02) -> float:
    """Minimum over a lattice of centres, areas from shapely (independent of the package kernels)."""
    shape = shapely.Polygon(poly.vertices)
    m = shape.area
    r = math.sqrt(m / math.pi)
    x0, y0, x1, y1 = shape.bounds
    xs, ys = np.arange(x0, x1 + h / 2, h), np.arange(y0, y1 + h / 2, h)
    X, Y = np.meshgrid(xs, ys)
    disks = shapely.buffer(shapely.points(X.ravel(), Y.ravel()), r, quad_segs=128)
    inter = shapely.area(shapely.intersection(disks, shape))
    return float(2 * (m - inter.max()) / m)


def test_criterion_09_fraenkel_oracle():
    t0 = time.perf_counter()
    diffs = []
    for it in build_corpus("random_polygon", 10, 9):
        p = normalize(it.shape).shape
        diffs.append(abs(fraenkel_asymmetry(p).value - _exhaustive_fraenkel(p)))
    elapsed = time.perf_counter() - t0
    ok = max(diffs) <= 0.01 and elapsed < 120
    verdict(9, "Fraenkel optimizer vs exhaustive grid", ok,
            f"max |heuristic - grid| = {max(diffs):.2e} over 10 polygons; {elapsed:.1f}s")


def test_criterion_10_determinism():
    base = [sys.executable, "-m", "baryiso", "verify", "--family", "perturbed_ball", "--count", "100",
            "--seed", "7", "--cf", "1", "--no-timestamp"]
    one = subprocess.run(base + ["--workers", "1"], capture_output=True, check=False)
    eight = subprocess.run(base + ["--workers", "8"], capture_output=True, check=False)
    ok = one.returncode == 0 and eight.returncode == 0 and one.stdout == eight.stdout
    verdict(10, "determinism across worker counts", ok,
            f"exit codes {one.returncode}/{eight.returncode}; {len(one.stdout)} bytes, identical: {one.stdout == eight.stdout}")


if __name__ == "__main__":
    for name, fn in sorted((k, v) for k, v in globals().items() if k.startswith("test_criterion_")):
        try:
            fn()
        except AssertionError:
            pass
    print("\n".join(summary_lines()))
    sys.exit(0 if all(ok for _, ok, _ in RESULTS.values()) else 1)
