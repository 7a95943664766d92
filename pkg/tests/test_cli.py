import json

import pytest

from bectc.exceptions import ConvergenceError
from bectc.main import EXIT_COMPUTATION, EXIT_OK, EXIT_USAGE, main
from bectc.services import sweeps


def _fields(text):
    return dict(line.split(": ", 1) for line in text.strip().splitlines())


def test_validity_invalid_isotropic(capsys):
    assert main(["validity", "--shape", "isotropic", "--n", "100"]) == EXIT_OK
    out = capsys.readouterr().out
    fields = _fields(out)
    assert fields["verdict"] == "INVALID"
    assert float(fields["n_min"]) == pytest.approx(9616.46, abs=0.01)


def test_validity_disk_is_valid(capsys):
    assert main(["validity", "--shape", "Disk", "--s", "2", "--n", "1e5"]) == EXIT_OK
    assert _fields(capsys.readouterr().out)["verdict"] == "VALID"


def test_validity_margin_at_boundary(capsys):
    n_atoms = 20.0 ** 3 * 1.2020569031595942
    assert main(["validity", "--n", repr(n_atoms), "--threshold", "20", "--format", "json"]) == EXIT_OK
    report = json.loads(capsys.readouterr().out)
    assert report["margin"] == pytest.approx(1.0, rel=1e-12)
    assert report["shape"] == "isotropic"


def test_solve_prints_gas_state(capsys):
    assert main(["solve", "--n", "1000", "--t", "5"]) == EXIT_OK
    fields = _fields(capsys.readouterr().out)
    assert 0.0 < float(fields["z"]) < 1.0
    assert float(fields["f0"]) > 0.5
    assert float(fields["n_atoms"]) == 1000.0


def test_solve_json(capsys):
    assert main(["solve", "--shape", "cigar", "--s", "4", "--n", "1e4", "--t", "30", "--format", "json"]) == EXIT_OK
    state = json.loads(capsys.readouterr().out)
    assert state["trap"]["spacings"] == [4.0, 4.0, 1.0]
    assert state["residual"] <= 1e-10


def test_solve_needs_temperature(capsys):
    assert main(["solve", "--n", "1000"]) == EXIT_USAGE
    assert "invalid options" in capsys.readouterr().err


def test_shape_mismatch_is_usage_error(tmp_path, capsys):
    target = tmp_path / "state.txt"
    code = main(["solve", "--shape", "isotropic", "--s", "2", "--t", "1", "--out", str(target)])
    assert code == EXIT_USAGE
    assert not target.exists()
    assert "isotropic" in capsys.readouterr().err


def test_fig1_unsafe_gate(capsys):
    assert main(["fig1", "--n-min", "1e3", "--n-max", "2e3", "--points", "2"]) == EXIT_USAGE
    assert "--unsafe" in capsys.readouterr().err

    assert main(["fig1", "--n-min", "1e3", "--n-max", "2e3", "--points", "2", "--unsafe"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "# unsafe=true" in out.splitlines()


def test_fig1_csv_to_file_is_deterministic(tmp_path):
    first, second = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ["fig1", "--n-min", "1e4", "--n-max", "2e4", "--points", "2"]
    assert main(args + ["--out", str(first)]) == EXIT_OK
    assert main(args + ["--out", str(second)]) == EXIT_OK
    assert first.read_bytes() == second.read_bytes()

    lines = first.read_text(encoding="utf-8").splitlines()
    comments = [line for line in lines if line.startswith("#")]
    assert comments == sorted(comments)
    header = lines[len(comments)]
    assert header.startswith("log10_N[1],tc0_over_tc0[1],")
    assert len(lines) == len(comments) + 3


def test_config_file_and_flag_precedence(tmp_path, capsys):
    config = tmp_path / "run.conf"
    config.write_text("n_min = 1e4\nn-max = 2e4\npoints = 3\nformat = json\nunrelated = 1\n", encoding="utf-8")
    assert main(["fig1", "--config", str(config), "--points", "2"]) == EXIT_OK
    document = json.loads(capsys.readouterr().out)
    assert len(document["rows"]) == 2
    assert document["metadata"]["n_max"] == 2e4


def test_missing_config_file(tmp_path, capsys):
    assert main(["fig1", "--config", str(tmp_path / "none.conf")]) == EXIT_USAGE
    assert "config file not found" in capsys.readouterr().err


def test_fig2_with_overlay(tmp_path, capsys):
    overlay = tmp_path / "reference.csv"
    overlay.write_text("t_over_tc0[1],f0_generalized[1]\n0.2,0.99\n1.3,0.0\n", encoding="utf-8")
    args = ["fig2", "--n", "1e3", "--t-points", "10", "--overlay", str(overlay), "--format", "json"]
    assert main(args) == EXIT_OK
    document = json.loads(capsys.readouterr().out)
    assert document["columns"][-1]["name"] == "overlay_f0_generalized"
    assert document["rows"][0][-1] == 0.99
    assert document["rows"][1][-1] is None
    assert document["rows"][-1][-1] == 0.0


def test_anisoscan_rejects_isotropic(capsys):
    assert main(["anisoscan", "--shape", "isotropic"]) == EXIT_USAGE


def test_computation_failure_writes_nothing(tmp_path, monkeypatch, capsys):
    def broken(n_atoms, t_over_tc0):
        raise ConvergenceError("iteration budget exhausted")

    monkeypatch.setattr(sweeps, "fig2_point", broken)
    target = tmp_path / "fig2.csv"
    assert main(["fig2", "--n", "1e4", "--t-points", "10", "--out", str(target)]) == EXIT_COMPUTATION
    assert not target.exists()
    err = capsys.readouterr().err
    assert "grid point 0" in err


def test_unknown_log_level(capsys):
    assert main(["validity", "--log-level", "chatty"]) == EXIT_USAGE


def test_argparse_errors_exit_with_usage_status():
    with pytest.raises(SystemExit) as info:
        main(["fig1", "--points", "many"])
    assert info.value.code == 2
