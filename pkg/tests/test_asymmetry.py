import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from baryiso.asymmetry import (
    FraenkelOptions,
    PreconditionError,
    asymmetry_report,
    barycentric_asymmetry,
    deficit,
    epsilon_f,
    fraenkel_asymmetry,
    sandwich_check,
)
from baryiso.corpus import gen_two_ball, random_polygon
from baryiso.shapes import AxisBox, Ball, Polygon2D, voxelize
import oracles

R1 = 1 / math.sqrt(math.pi)
UNIT_SQUARE = AxisBox((-0.5, -0.5), (0.5, 0.5))
PLUS = Polygon2D([(-1.5, -0.5), (-0.5, -0.5), (-0.5, -1.5), (0.5, -1.5), (0.5, -0.5), (1.5, -0.5),
                  (1.5, 0.5), (0.5, 0.5), (0.5, 1.5), (-0.5, 1.5), (-0.5, 0.5), (-1.5, 0.5)])


def test_square_deficit():
    assert deficit(UNIT_SQUARE) == pytest.approx(2 / math.sqrt(math.pi) - 1, abs=1e-12)


@pytest.mark.parametrize("n", [2, 3, 5])
def test_ball_is_a_zero(n):
    b = Ball(np.full(n, 0.3), 1.2)
    assert deficit(b) == pytest.approx(0.0, abs=1e-12)
    assert barycentric_asymmetry(b) == pytest.approx(0.0, abs=1e-12)
    assert fraenkel_asymmetry(b).value == 0.0


def test_square_barycentric_asymmetry():
    assert barycentric_asymmetry(UNIT_SQUARE) == pytest.approx(oracles.disk_square_symdiff(), abs=1e-9)


def test_square_fraenkel_centred():
    res = fraenkel_asymmetry(UNIT_SQUARE)
    assert res.value == pytest.approx(oracles.disk_square_symdiff(), abs=1e-6)
    assert np.allclose(res.center, 0.0, atol=1e-4)


def test_two_ball_fraenkel_swallows_big_ball():
    # the optimal ball of mass pi(1 + r^2) sits on the unit ball and contains it
    s = gen_two_ball(2, 0.1, 200)
    expected = 2 * 0.01 / 1.01
    assert fraenkel_asymmetry(s).value == pytest.approx(expected, abs=1e-6)


def test_epsilon_f_symmetric_centre():
    assert epsilon_f((0.0, 0.0), 1.0) == pytest.approx(0.0, abs=1e-15)
    assert epsilon_f((5.0, 0.0), 1.0) == pytest.approx(0.5)


def test_report_fields():
    r = asymmetry_report(UNIT_SQUARE)
    assert r.fraenkel <= r.barycentric + 1e-9
    assert set(r.to_dict()["tolerances"]) == {"deficit", "barycentric", "fraenkel"}


@pytest.mark.parametrize("shape", [UNIT_SQUARE, PLUS], ids=["square", "plus"])
def test_sandwich_on_symmetric_shapes(shape):
    res = sandwich_check(shape)
    assert res.lower_ok and res.upper_ok
    assert res.fraenkel <= res.barycentric + 1e-9 <= 4 * res.fraenkel + 1e-6


def test_sandwich_needs_symmetry():
    with pytest.raises(PreconditionError):
        sandwich_check(AxisBox((0, 0), (1, 2)))


@settings(max_examples=15)
@given(st.integers(0, 10_000))
def test_fraenkel_below_barycentric(seed):
    p = random_polygon(seed)
    lam = fraenkel_asymmetry(p, FraenkelOptions(grid=9)).value
    assert lam <= barycentric_asymmetry(p) + 1e-9


@settings(max_examples=15)
@given(st.integers(0, 10_000), st.floats(0.3, 4), st.floats(-5, 5), st.floats(-5, 5))
def test_scale_and_translation_invariance(seed, t, x, y):
    p = random_polygon(seed)
    q = p.scale(t).translate((x, y))
    assert deficit(q) == pytest.approx(deficit(p), rel=1e-9, abs=1e-12)
    assert barycentric_asymmetry(q) == pytest.approx(barycentric_asymmetry(p), rel=1e-8, abs=1e-10)


def test_barycentric_asymmetry_converges_on_grids():
    coarse = barycentric_asymmetry(voxelize(UNIT_SQUARE, 0.02))
    fine = barycentric_asymmetry(voxelize(UNIT_SQUARE, 0.005))
    assert abs(coarse - fine) < 0.002
    assert fine == pytest.approx(oracles.disk_square_symdiff(), abs=0.002)


def test_budget_exhaustion_flag():
    res = fraenkel_asymmetry(random_polygon(1), FraenkelOptions(grid=5, budget=10))
    assert res.budget_exhausted
