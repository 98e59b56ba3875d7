import subprocess
import sys

import pytest

from bodycontact.cli import main
from bodycontact.experiments import scene_path
from bodycontact.runlog import read_log

BOX = str(scene_path("surface-search-box"))

BLOCKED = """\
schema_version: 1
name: blocked
bodies:
  - {name: a, shape: box, size: [1, 1, 1]}
  - {name: b, shape: box, size: [1, 1, 1], pose: {position: [1.5, 0, 0]}}
tasks:
  - name: touch
    kind: pn
    side1: {body: a, optimize: true}
    side2: {point: [0, 0, 2], normal: [0, 0, -1]}
collisions:
  - {bodies: [a, b], margin: 1.0}
"""


def test_solve_converges(capsys):
    assert main(["solve", BOX]) == 0
    assert "converged" in capsys.readouterr().out


def test_solve_max_iterations():
    assert main(["solve", BOX, "--max-iters", "2"]) == 2


def test_solve_infeasible_qp(tmp_path):
    p = tmp_path / "blocked.yaml"
    p.write_text(BLOCKED)
    assert main(["solve", str(p)]) == 3


@pytest.mark.parametrize("argv", [
    ["solve", "/no/such/scene.yaml"],
    ["solve", BOX, "--mode", "sideways"],
    ["solve", BOX, "--max-iters", "0"],
    ["solve", BOX, "--tol-pos", "-1"],
    ["frobnicate"],
    [],
    ["experiment", "nope"],
])
def test_input_errors_exit_4(argv, capsys):
    try:
        code = main(argv)
    except SystemExit as exc:
        code = exc.code
    assert code == 4
    assert capsys.readouterr().err


def test_bad_scene_exit_4(tmp_path, capsys):
    p = tmp_path / "bad.yaml"
    p.write_text(BLOCKED.replace("kind: pn", "kind: push"))
    assert main(["validate", str(p)]) == 4
    assert "line 8" in capsys.readouterr().err


def test_solve_writes_log(tmp_path):
    out = tmp_path / "run.jsonl"
    assert main(["solve", BOX, "--log", str(out), "--format", "jsonl", "--mode", "baseline"]) == 0
    log = read_log(out)
    assert log.mode == "baseline" and log.status == "converged"


def test_validate(capsys):
    assert main(["validate", str(scene_path("multi-posture"))]) == 0
    assert "ok" in capsys.readouterr().out


def test_experiment_writes_outputs(tmp_path):
    assert main(["experiment", "surface-search-tetra", "--out", str(tmp_path)]) == 0
    assert (tmp_path / "surface-search-tetra.tsv").is_file()
    assert (tmp_path / "surface-search-tetra-summary.tsv").is_file()


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "bodycontact", "solve", BOX, "--max-iters", "3"],
                       capture_output=True, text=True)
    assert r.returncode == 2
    assert "max-iterations" in r.stdout
