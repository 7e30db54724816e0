import json

import numpy as np
import pytest

from relloc import cli
from relloc.io import read_record, read_table



def test_simulate1d_writes_outputs(tmp_path, capsys):
    assert cli.main(["simulate1d", "--seed", "3", "--grid", "256", "--photons", "40", "--out-dir", str(tmp_path)]) == 0
    pos = read_table(tmp_path / "position_density.csv")
    mom = read_table(tmp_path / "momentum_density.csv")
    ev = read_table(tmp_path / "events.csv")
    assert pos.shape == (256, 2) and mom.shape == (1025, 2) and ev.shape == (40, 4)
    assert pos[:, 1].sum() * (pos[1, 0] - pos[0, 0]) == pytest.approx(1.0, abs=1e-9)
    header = (tmp_path / "position_density.csv").read_text().splitlines()[1]
    assert "x [lambda]" in header and "P [1/lambda]" in header
    rec = read_record(tmp_path / "run_record.json")
    assert rec["command"] == "simulate1d" and rec["config"]["seed"] == 3
    assert "seed 3" in capsys.readouterr().out


def test_seed_recorded_when_omitted(tmp_path):
    assert cli.main(["simulate1d", "--grid", "64", "--photons", "5", "--out-dir", str(tmp_path)]) == 0
    assert isinstance(read_record(tmp_path / "run_record.json")["config"]["seed"], int)


def test_replay_is_byte_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert cli.main(["simulate1d", "--seed", "8", "--grid", "128", "--photons", "20", "--source", "blackbody:3000",
                     "--out-dir", str(a)]) == 0
    assert cli.main(["replay", str(a / "run_record.json"), "--out-dir", str(b)]) == 0
    for name in ("position_density.csv", "momentum_density.csv", "events.csv", "run_record.json"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_simulate3d(tmp_path):
    assert cli.main(["simulate3d", "--seed", "1", "--grid", "10", "--photons", "10", "--samples", "500",
                     "--out-dir", str(tmp_path)]) == 0
    assert read_table(tmp_path / "points.csv").shape == (500, 3)
    marg = read_table(tmp_path / "marginals.csv")
    assert marg.shape == (10, 4)
    dx = marg[1, 0] - marg[0, 0]
    np.testing.assert_allclose(marg[:, 1:].sum(axis=0) * dx, 1.0, atol=1e-9)


def test_discriminate(tmp_path, capsys):
    assert cli.main(["discriminate", "--seed", "2", "--grid", "128", "--photons", "30", "--runs", "3",
                     "--experiments", "2", "--dp", "0,0.5", "--p-bins", "257", "--out-dir", str(tmp_path)]) == 0
    post = read_table(tmp_path / "posterior.csv")
    assert post.shape == (4, 3)
    np.testing.assert_array_equal(post[0, 1:], 0.5)
    assert "dp=0.5" in capsys.readouterr().out


def test_tof_prints_resolution(capsys):
    assert cli.main(["tof"]) == 0
    assert "28.666 um" in capsys.readouterr().out


def test_env_out_dir(tmp_path, monkeypatch):
    monkeypatch.setenv("RELLOC_OUT_DIR", str(tmp_path / "env"))
    assert cli.main(["simulate1d", "--seed", "0", "--grid", "32", "--photons", "2"]) == 0
    assert (tmp_path / "env" / "run_record.json").exists()


@pytest.mark.parametrize("argv", [
    ["simulate1d", "--d", "-1"],
    ["simulate1d", "--grid", "1"],
    ["simulate1d", "--source", "laser:3"],
    ["discriminate", "--dp", "0,-1"],
    ["tof", "--mass", "0"],
    ["nonsense"],
])
def test_invalid_arguments_exit_1(argv, tmp_path, capsys):
    with pytest.raises(SystemExit) as exc:
        code = cli.main(argv + ["--out-dir", str(tmp_path)] if argv[0] != "nonsense" else argv)
        raise SystemExit(code)
    assert exc.value.code == 1
    assert "error" in capsys.readouterr().err


def test_bad_record_schema(tmp_path):
    path = tmp_path / "r.json"
    path.write_text(json.dumps({"schema": "other"}))
    with pytest.raises(ValueError):
        cli.replay(path)
