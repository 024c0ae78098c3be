import csv
import io
import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from baryiso.asymmetry import PreconditionError, barycentric_asymmetry, deficit
from baryiso.checks import Check
from baryiso.corpus import (
    dependance_closed_form,
    gen_dependance_family,
    gen_perturbed_ball,
    gen_two_ball,
    item_seed,
    make_item,
)
from baryiso.harness import (
    CSV_FIELDS,
    HarnessConfig,
    Job,
    d_sweep,
    dumps,
    family_jobs,
    parse_eps_grid,
    report_document,
    reports_csv,
    run_batch,
    verify_bch,
    verify_convex_section_bound,
    verify_main_theorem,
    verify_sandwich,
    verify_section2_suite,
)
from baryiso.measures import diameter
from baryiso.shapes import AxisBox, Ball, Polygon2D
import oracles

R1 = 1 / math.sqrt(math.pi)


# ---------------------------------------------------------------- corpus


def test_item_seed_is_order_independent():
    assert item_seed(7, 3) == item_seed(7, 3)
    assert item_seed(7, 3) != item_seed(7, 4)
    assert item_seed(7, 3) != item_seed(8, 3)


@pytest.mark.parametrize("family", ["perturbed_ball", "two_ball", "random_polygon", "k_symmetric_random"])
def test_regeneration_is_bitwise_identical(family):
    a = make_item(family, 5, 11)
    b = make_item(family, 5, 11)
    assert a.id == b.id and a.params == b.params
    assert np.array_equal(np.asarray(a.shape.vertices if hasattr(a.shape, "vertices") else a.shape.parts[1].center),
                          np.asarray(b.shape.vertices if hasattr(b.shape, "vertices") else b.shape.parts[1].center))


def test_unknown_family():
    with pytest.raises(ValueError):
        make_item("teapot", 0, 0)


def test_two_ball_preconditions():
    with pytest.raises(Exception):
        gen_two_ball(2, 0.1, 1.05)
    with pytest.raises(Exception):
        gen_two_ball(2, 1.5, 10.0)


def test_two_ball_deficit_closed_form():
    s = gen_two_ball(2, 0.1, 200)
    expected = (2.2 - 2 * math.sqrt(1.01)) / (2 * math.sqrt(1.01))
    assert deficit(s) == pytest.approx(expected, abs=1e-12)
    assert expected == pytest.approx(0.0945409, abs=1e-7)


def test_two_ball_lambda0_far_apart():
    # the barycentric ball clears the unit ball only once d exceeds about 202.5
    assert barycentric_asymmetry(gen_two_ball(2, 0.1, 400)) == 2.0
    near = barycentric_asymmetry(gen_two_ball(2, 0.1, 200))
    assert 1.99 < near < 2.0


def test_two_ball_close_barycentric_ball_overlaps():
    assert barycentric_asymmetry(gen_two_ball(2, 0.1, 5)) < 2.0


def test_dependance_family_closed_forms():
    cf = dependance_closed_form(2, 0.01)
    assert cf["delta"] == pytest.approx(math.sqrt(0.99) + 0.1 - 1, rel=1e-14)
    assert cf["delta"] == pytest.approx(0.094987, abs=1e-6)
    assert cf["lambda0"] == 2.0
    s = gen_dependance_family(2, 0.01)
    assert deficit(s) == pytest.approx(cf["delta"], abs=1e-12)
    assert barycentric_asymmetry(s) == 2.0
    assert diameter(s) == pytest.approx(cf["diameter"], rel=1e-14)
    assert dependance_closed_form(3, 0.001)["delta"] == pytest.approx(0.009333, abs=1e-6)


def test_perturbed_ball_zero_amplitude_is_a_ball():
    s = gen_perturbed_ball(2, 0.0, 6, 1)
    assert deficit(s) == pytest.approx(0.0, abs=1e-12)


def test_perturbed_ball_measured():
    s = gen_perturbed_ball(2, 0.1, 6, 1)
    assert deficit(s) > 0
    assert barycentric_asymmetry(s) > 0
    assert barycentric_asymmetry(s) == barycentric_asymmetry(gen_perturbed_ball(2, 0.1, 6, 1))


# ---------------------------------------------------------------- suites


def test_main_theorem_on_ball():
    rep = verify_main_theorem(Ball((0.0, 0.0), 1.0))
    assert rep.passed
    assert rep.measured["lambda0"] == 0.0


def test_main_theorem_on_square_clamps_diameter():
    rep = verify_main_theorem(AxisBox((0, 0), (1, 1)))
    assert rep.passed
    assert rep.measured["D"] == pytest.approx(math.sqrt(2))
    assert rep.measured["D_clamped"] == pytest.approx(math.sqrt(2))
    assert rep.measured["lambda0"] == pytest.approx(oracles.disk_square_symdiff(), abs=1e-9)


def test_main_theorem_on_two_ball():
    rep = verify_main_theorem(gen_two_ball(2, 0.1, 200))
    assert rep.passed
    assert rep.measured["D"] == pytest.approx(201.1 / math.sqrt(1.01 * math.pi), rel=1e-9)


def test_section2_on_ball_and_egg():
    assert verify_section2_suite(Ball((0.0, 0.0), 1.0)).passed
    rep = verify_section2_suite(make_item("egg", 0, 0))
    assert rep.passed
    assert len(rep.measured["branches"]) == 2


def test_section2_two_ball_branch_reported():
    rep = verify_section2_suite(gen_two_ball(2, 0.1, 200))
    assert rep.passed
    assert rep.measured["branches"][0] in ("epsnotbad", "main")


def test_sandwich_suite():
    rep = verify_sandwich(make_item("k_symmetric_random", 0, 3))
    assert rep.passed
    assert rep.measured["n_symmetric"]
    rep = verify_sandwich(make_item("random_polygon", 0, 3))
    assert rep.passed
    assert rep.checks[1].status == "n/a"


def test_bch_small_diameter_disk():
    rep = verify_bch(Ball((0.0, 0.0), R1))
    assert rep.passed and rep.measured["branch"] == "small_diameter"


def test_bch_long_strip():
    rep = verify_bch(AxisBox((0, 0), (10, 0.1)))
    assert rep.passed and rep.measured["branch"] == "large_diameter"
    assert rep.measured["delta"] >= 4.64
    assert rep.measured["perimeter"] >= 2 * rep.measured["diameter"]


def test_bch_rejects_disconnected():
    with pytest.raises(PreconditionError):
        verify_bch(gen_two_ball(2, 0.1, 200))


def test_convex_bound_box_and_ball():
    rep = verify_convex_section_bound(AxisBox((0, 0), (3, 1)))
    assert rep.passed and rep.measured["integral"] == pytest.approx(6.0)
    rep = verify_convex_section_bound(Ball((0.0, 0.0, 0.0), 1.0))
    assert rep.passed
    assert rep.measured["integral"] == pytest.approx(math.pi**2, rel=1e-9)
    assert rep.measured["perimeter"] - rep.measured["integral"] > 0


def test_convex_bound_rejects_nonconvex():
    with pytest.raises(PreconditionError):
        verify_convex_section_bound(Polygon2D([(0, 0), (2, 0), (2, 2), (1, 0.5), (0, 2)]))


# ---------------------------------------------------------------- sweep


def test_eps_grid_parser():
    g = parse_eps_grid("1e-1:1e-4:log:8")
    assert len(g) == 8 and g[0] == pytest.approx(0.1) and g[-1] == pytest.approx(1e-4)
    with pytest.raises(ValueError):
        parse_eps_grid("1:2:cubic:3")


def test_d_sweep_needs_three_points():
    with pytest.raises(ValueError):
        d_sweep(2, [0.01])


@pytest.mark.parametrize("n", [2, 3])
def test_d_sweep_slope(n):
    res = d_sweep(n, parse_eps_grid("1e-1:1e-4:log:8"))
    assert abs(res.slope - (n - 1) / (2 * n)) <= 0.05
    for row in res.rows:
        assert row.delta == pytest.approx(row.delta_closed, abs=1e-12)


# ---------------------------------------------------------------- batch and output


def test_batch_order_and_csv():
    jobs = family_jobs("main", "random_polygon", 3, 5, 2, HarnessConfig())
    reps = list(run_batch(jobs, workers=1))
    assert [r.item_id for r in reps] == [f"random_polygon-5-{i:04d}" for i in range(3)]
    rows = list(csv.reader(io.StringIO(reports_csv(reps))))
    assert tuple(rows[0]) == CSV_FIELDS
    assert all(len(r) == len(CSV_FIELDS) for r in rows)


def test_bad_item_becomes_error_report():
    reps = list(run_batch([Job("bch", HarnessConfig(), "two_ball", 0, 1, 2)]))
    assert reps[0].error is not None and not reps[0].passed


def test_report_document_round_trip():
    reps = list(run_batch(family_jobs("main", "perturbed_ball", 2, 1, 2, HarnessConfig())))
    text = dumps(report_document(reps, {"suite": "main"}))
    doc = json.loads(text)
    assert doc["summary"]["items"] == 2
    assert dumps(doc) == text


def test_loosen_tolerance():
    rep = verify_main_theorem(Ball((0.0, 0.0), 1.0), HarnessConfig(tolerance=0.5))
    assert all(c.tolerance >= 0.5 for c in rep.checks)


@given(st.floats(-1, 1), st.floats(-1, 1), st.floats(0, 0.1))
def test_check_pass_iff_slack_within_tolerance(lhs, rhs, tol):
    c = Check("x", "x", lhs, rhs, tol)
    assert c.holds == (rhs - lhs >= -tol)
