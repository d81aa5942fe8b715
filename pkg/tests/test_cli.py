import json

import pytest

from morsecube import cli
from morsecube.cli import EXIT_FAILED, EXIT_OK, EXIT_USAGE

SYMMETRIC_BITS = "0b111000101100001101000111"


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_info(capsys):
    code, out, _ = run(capsys, "info", "--polytope", "p4")
    assert code == EXIT_OK and "ideal_vertices: 5" in out and "orbifold_euler: 1/16" in out


def test_invariants_row(capsys):
    code, out, _ = run(capsys, "invariants", "--polytope", "p4")
    assert code == EXIT_OK
    assert out.splitlines()[0] == "p4  euler 2  betti 1 5 10 4 0  cusps 5"


def test_invariants_json(capsys):
    code, out, _ = run(capsys, "invariants", "--polytope", "cell24", "--json")
    data = json.loads(out)
    assert code == EXIT_OK and data["betti"] == [1, 21, 51, 23, 0] and data["cusps"] == 24


def test_check_state(capsys):
    code, out, _ = run(capsys, "check-state", "--polytope", "cell24", "--bits", SYMMETRIC_BITS,
                       "--scale", "1/2", "--periods")
    assert code == EXIT_OK
    assert "status perfect" in out and "critical points 8" in out and "(integral)" in out


def test_check_state_refuted(capsys):
    code, out, _ = run(capsys, "check-state", "--polytope", "cell24", "--bits", "0b" + "1" * 24)
    assert code == EXIT_FAILED and "status refuted" in out


def test_state_file(capsys, tmp_path):
    path = tmp_path / "w.state"
    path.write_text("\n".join(f"{f} {1 if f % 2 == 0 else -1}" for f in range(10)) + "\n")
    code, out, _ = run(capsys, "check-state", "--polytope", "p4", "--state", str(path))
    assert "status" in out and code in (EXIT_OK, EXIT_FAILED)


def test_census_and_fiber_from_census(capsys, tmp_path):
    census = tmp_path / "cube.txt"
    code, _, _ = run(capsys, "census", "--polytope", "cube3", "--filter", "fibration",
                     "--output", str(census))
    assert code == EXIT_OK
    outcomes = "|".join(["pp"] * 8)
    assert census.read_text().splitlines() == [f"0x01 24 fibration 0 {outcomes}",
                                               f"0x05 24 fibration 0 {outcomes}",
                                               f"0x15 8 fibration 0 {outcomes}"]
    code, out, _ = run(capsys, "fiber", "--polytope", "cube3", "--from-census", str(census))
    assert code == EXIT_USAGE


def test_partial_census_warns(capsys):
    code, out, err = run(capsys, "census", "--polytope", "cell24", "--budget", "4096")
    assert code == EXIT_OK and "partial" in err and out.strip() == ""


def test_fiber_export(capsys, tmp_path):
    code, out, _ = run(capsys, "fiber", "--polytope", "cell24", "--bits", SYMMETRIC_BITS,
                       "--scale", "1/2", "--level", "1/2", "--output-dir", str(tmp_path))
    assert code == EXIT_OK
    assert "tets 192" in out and "H1 Z^28" in out
    assert (tmp_path / "fiber_state_level1-2.tri").exists()


def test_holonomy(capsys):
    code, out, _ = run(capsys, "holonomy")
    lines = out.splitlines()
    assert code == EXIT_OK and len(lines) == 3 and all(ln.startswith("PASS") for ln in lines)


@pytest.mark.parametrize("argv", [
    ["check-state", "--polytope", "p4"],
    ["check-state", "--polytope", "no-such-polytope", "--bits", "0b1"],
    ["check-state", "--polytope", "p4", "--bits", "0b" + "1" * 11],
    ["fiber", "--polytope", "p4", "--bits", "0b1010101010"],
])
def test_usage_errors(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == EXIT_USAGE and "error" in err


def test_argparse_errors():
    with pytest.raises(SystemExit) as exc:
        cli.main(["bogus"])
    assert exc.value.code == EXIT_USAGE


def test_data_env_override(capsys, monkeypatch, tmp_path):
    monkeypatch.setenv("MORSECUBE_DATA", str(tmp_path))
    code, _, err = run(capsys, "info", "--polytope", "p4")
    assert code == EXIT_USAGE and str(tmp_path) in err
