import json
import math
import subprocess
import sys

import pytest

from baryiso import shapeio
from baryiso.cli import EXIT_FAIL, EXIT_OK, EXIT_USAGE, main
from baryiso.corpus import gen_two_ball
from baryiso.shapes import AxisBox, Ball


@pytest.fixture
def ball_file(tmp_path):
    p = tmp_path / "ball.json"
    shapeio.save(Ball((0.0, 0.0), 1.0), p)
    return str(p)


@pytest.fixture
def square_file(tmp_path):
    p = tmp_path / "square.json"
    shapeio.save(AxisBox((0, 0), (1, 1)), p)
    return str(p)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_measure_ball(capsys, ball_file):
    code, out, _ = run(capsys, "measure", ball_file, "--no-timestamp")
    assert code == EXIT_OK
    s = json.loads(out)["shapes"][0]
    assert s["summary"]["volume"] == pytest.approx(math.pi)
    assert s["summary"]["perimeter"] == pytest.approx(2 * math.pi)
    assert s["summary"]["diameter"] == 2.0
    assert s["normalized"]["volume"] == pytest.approx(1.0)


def test_measure_raw_omits_normalized(capsys, ball_file):
    code, out, _ = run(capsys, "measure", ball_file, "--raw", "--no-timestamp")
    assert code == EXIT_OK and "normalized" not in json.loads(out)["shapes"][0]


def test_measure_csv(capsys, ball_file):
    code, out, _ = run(capsys, "measure", ball_file, "--format", "csv", "--no-timestamp")
    assert code == EXIT_OK
    assert out.splitlines()[0] == "path,quantity,value"


def test_asymmetry_square(capsys, square_file):
    code, out, _ = run(capsys, "asymmetry", square_file, "--no-timestamp")
    rep = json.loads(out)["shapes"][0]["report"]
    assert code == EXIT_OK
    assert rep["barycentric"] == pytest.approx(0.1810919376, abs=1e-9)
    assert rep["deficit"] == pytest.approx(2 / math.sqrt(math.pi) - 1)


def test_constants_requires_cf(capsys):
    code, _, err = run(capsys, "constants")
    assert code == EXIT_USAGE and "--cf" in err


def test_constants_table(capsys):
    code, out, _ = run(capsys, "constants", "--cf", "1", "--d", "4", "--no-timestamp")
    assert code == EXIT_OK
    assert json.loads(out)["c0"] == pytest.approx(7050.756, abs=1e-3)


def test_symmetrize_writes_final_shape(capsys, tmp_path, square_file):
    final = tmp_path / "final.json"
    code, out, _ = run(capsys, "symmetrize", square_file, "--cf", "1", "--final", str(final), "--no-timestamp")
    assert code == EXIT_OK
    assert json.loads(out)["passed"]
    assert shapeio.load(final).dim == 2


def test_malformed_file_exit_one(capsys, tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{"dim": 2, "body": [}')
    code, _, err = run(capsys, "measure", str(p))
    assert code == EXIT_USAGE and "byte offset 20" in err


def test_missing_file_exit_one(capsys, tmp_path):
    code, _, _ = run(capsys, "measure", str(tmp_path / "nope.json"))
    assert code == EXIT_USAGE


def test_bad_flag_exit_one(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["verify", "--bogus"])
    assert exc.value.code == EXIT_USAGE


def test_verify_needs_seed_with_family(capsys):
    code, _, err = run(capsys, "verify", "--family", "random_polygon", "--cf", "1")
    assert code == EXIT_USAGE and "--seed" in err


def test_verify_family_passes(capsys):
    code, out, _ = run(capsys, "verify", "--family", "perturbed_ball", "--count", "3", "--seed", "7", "--cf", "1",
                       "--no-timestamp")
    doc = json.loads(out)
    assert code == EXIT_OK
    assert doc["summary"] == {"items": 3, "passed": 3, "failed": 0, "errors": 0, "failing_checks": {}}
    assert doc["partial"] is False


def test_verify_failure_exit_two(capsys, tmp_path):
    p = tmp_path / "two.json"
    shapeio.save(gen_two_ball(2, 0.1, 200), p)
    # not connected: the planar connected-set suite rejects it and the run fails
    code, out, _ = run(capsys, "verify", str(p), "--suite", "bch", "--cf", "1", "--no-timestamp")
    assert code == EXIT_FAIL
    assert "error" in json.loads(out)["reports"][0]


def test_sweep(capsys):
    code, out, _ = run(capsys, "sweep", "--n", "2", "--eps", "1e-1:1e-4:log:8", "--no-timestamp")
    doc = json.loads(out)
    assert code == EXIT_OK
    assert abs(doc["slope"] - 0.25) <= 0.05


def test_sweep_rejects_short_grid(capsys):
    code, _, _ = run(capsys, "sweep", "--eps", "1e-1:1e-2:log:2")
    assert code == EXIT_USAGE


def test_output_is_byte_stable_across_workers(capsys):
    argv = ["verify", "--family", "random_polygon", "--count", "6", "--seed", "3", "--cf", "1",
            "--suite", "section2", "--no-timestamp"]
    _, one, _ = run(capsys, *argv, "--workers", "1")
    _, many, _ = run(capsys, *argv, "--workers", "4")
    assert one == many


def test_module_entry_point(ball_file):
    res = subprocess.run([sys.executable, "-m", "baryiso", "measure", ball_file, "--no-timestamp"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0
    assert json.loads(res.stdout)["command"] == "measure"
