import json
import math

import numpy as np
import pytest

from baryiso import shapeio
from baryiso.corpus import gen_perturbed_ball, gen_two_ball, random_polygon
from baryiso.measures import symdiff_volume, volume
from baryiso.shapes import AxisBox, Ball, Empty, Hyperplane, clip_halfspace, to_region, voxelize
from baryiso.shapeio import ShapeFileError

SHAPES = {
    "ball": Ball((0.5, -1.0, 2.0), 0.75),
    "box": AxisBox((0, 0), (2, 1)),
    "polygon": random_polygon(3),
    "union": gen_two_ball(2, 0.1, 200),
    "cap": clip_halfspace(Ball((0.0, 0.0), 1.0), Hyperplane(1, 0.2), -1),
    "voxel": voxelize(Ball((0.0, 0.0, 0.0), 1.0), 0.1),
    "region": to_region(random_polygon(9)),
    "empty": Empty(3),
    "perturbed3": gen_perturbed_ball(3, 0.1, 4, 2, voxels_per_diameter=24),
}


@pytest.mark.parametrize("name", sorted(SHAPES))
def test_round_trip(name):
    s = SHAPES[name]
    back = shapeio.loads(shapeio.dumps(s))
    assert type(back) is type(s)
    assert back.dim == s.dim
    assert shapeio.dumps(back) == shapeio.dumps(s)
    if not isinstance(s, Empty):
        assert volume(back) == volume(s)


def test_ball_file_layout():
    doc = json.loads(shapeio.dumps(Ball((0.0, 0.0), 1.0)))
    assert doc == {"dim": 2, "body": {"type": "ball", "center": [0.0, 0.0], "radius": 1.0}}


def test_voxel_runs_cover_occupancy():
    g = voxelize(Ball((0.0, 0.0), 1.0), 0.05)
    runs = shapeio.to_dict(g)["body"]["runs"]
    assert sum(k for _, k in runs) == g.count
    assert symdiff_volume(g, shapeio.from_dict(shapeio.to_dict(g))) == 0.0


def test_file_round_trip(tmp_path):
    p = tmp_path / "s.json"
    shapeio.save(SHAPES["polygon"], p)
    assert np.array_equal(shapeio.load(p).vertices, SHAPES["polygon"].vertices)


@pytest.mark.parametrize(
    "doc, where",
    [
        ({"dim": 2, "body": {"type": "ball", "center": [0, 0], "radius": 1, "color": "red"}}, "$.body"),
        ({"dim": 2, "body": {"type": "ball", "center": [0, 0]}}, "$.body"),
        ({"dim": 2, "body": {"type": "blob"}}, "$.body.type"),
        ({"dim": 2, "body": {"type": "box", "min": [0, 0], "max": [1, 1]}, "extra": 1}, "$"),
        ({"dim": 3, "body": {"type": "ball", "center": [0, 0], "radius": 1}}, "$.body"),
        ({"dim": 2, "body": {"type": "union", "parts": [{"type": "ball", "center": [0, 0], "radius": "x"}]}},
         "$.body.parts[0].radius"),
        ({"dim": 1, "body": {"type": "empty"}}, "$.dim"),
    ],
)
def test_rejections_name_the_path(doc, where):
    with pytest.raises(ShapeFileError) as exc:
        shapeio.from_dict(doc)
    assert str(exc.value).startswith(where)


def test_syntax_error_reports_byte_offset():
    text = '{"dim": 2, "body": {"type": "ball", "center": [0, 0], "radius": 1,}}'
    with pytest.raises(ShapeFileError) as exc:
        shapeio.loads(text)
    assert exc.value.offset == text.index(",}") + 1
    assert "byte offset" in str(exc.value)


def test_byte_offset_counts_utf8_bytes():
    text = '{"dim": 2, "noteé": 1 x}'
    with pytest.raises(ShapeFileError) as exc:
        shapeio.loads(text.encode("utf-8"))
    assert exc.value.offset == text.encode("utf-8").index(b"x")


def test_invalid_geometry_is_a_file_error():
    with pytest.raises(ShapeFileError):
        shapeio.from_dict({"dim": 2, "body": {"type": "ball", "center": [0, 0], "radius": -1}})
    with pytest.raises(ShapeFileError):
        shapeio.from_dict({"dim": 2, "body": {"type": "box", "min": [0, 0], "max": [math.inf, 1]}})
