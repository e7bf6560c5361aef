import json
import math
import subprocess
import sys

import pytest

from qeshydro import verify_state
from qeshydro.cli import main, solution_from_json


def run_main(args, capsys):
    code = main(args)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestSolve:
    def test_level_two_json(self, capsys):
        code, out, _ = run_main(
            ["solve", "--omega-l", "1", "--k", "1", "--m", "0", "--level", "2",
             "--format", "json"], capsys)
        assert code == 0
        payload = json.loads(out)
        zs = [s["z"] for s in payload["states"]]
        root = math.sqrt(3) / 2
        assert zs[0] == pytest.approx(1 - root, rel=1e-12)
        assert zs[1] == pytest.approx(1 + root, rel=1e-12)
        assert all(s["energy"] == pytest.approx(1.5) for s in payload["states"])
        assert any("cross-validation passed" in d for d in payload["diagnostics"])

    def test_level_zero_is_domain_error(self, capsys):
        code, _, err = run_main(
            ["solve", "--omega-l", "1", "--k", "1", "--m", "0", "--level", "0"],
            capsys)
        assert code == 3
        assert "ground state" in err

    def test_zero_omega_is_usage_error(self, capsys):
        code, _, err = run_main(
            ["solve", "--omega-l", "0", "--k", "1", "--m", "0", "--level", "1"],
            capsys)
        assert code == 2

    def test_level_and_j_conflict(self, capsys):
        code, _, err = run_main(
            ["solve", "--omega-l", "1", "--k", "1", "--m", "0", "--level", "1",
             "--j", "0"], capsys)
        assert code == 2

    def test_j_flag(self, capsys):
        code, out, _ = run_main(
            ["solve", "--omega-l", "1", "--k", "1", "--m", "0", "--j", "0.5"],
            capsys)
        assert code == 0
        assert len(json.loads(out)["states"]) == 2

    def test_csv_has_header(self, capsys):
        code, out, _ = run_main(
            ["solve", "--omega-l", "1", "--k", "1", "--m", "0", "--level", "1",
             "--format", "csv"], capsys)
        assert code == 0
        header = out.splitlines()[0]
        assert header.startswith("omega_l,k,m,level,j,root_index,z,energy")


class TestScan:
    def test_three_by_three_level_one(self, capsys):
        code, out, _ = run_main(
            ["scan", "--omega-l-list", "0.5,1,2", "--k-list", "0,1,2",
             "--m", "0", "--level", "1"], capsys)
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0].split(",")[:5] == ["omega_l", "k", "m", "level",
                                           "root_index"]
        rows = [line.split(",") for line in lines[1:]]
        assert len(rows) == 9
        for row in rows:
            omega, k = float(row[0]), float(row[1])
            z = float(row[5])
            assert z == pytest.approx(0.5 * k / omega, abs=1e-14)

    def test_zero_slope_symmetric_pair(self, capsys):
        code, out, _ = run_main(
            ["scan", "--omega-l-list", "1,2", "--k-list", "0", "--m", "0",
             "--level", "2"], capsys)
        assert code == 0
        rows = [line.split(",") for line in out.strip().splitlines()[1:]]
        by_omega = {}
        for row in rows:
            by_omega.setdefault(float(row[0]), []).append(float(row[5]))
        for omega, zs in by_omega.items():
            expected = math.sqrt(omega / 2)
            assert zs[0] == pytest.approx(-expected, rel=1e-12)
            assert zs[1] == pytest.approx(expected, rel=1e-12)

    def test_empty_grid_rejected(self, capsys):
        code, _, err = run_main(
            ["scan", "--omega-l-list", "", "--k-list", "1", "--m", "0",
             "--level", "1"], capsys)
        assert code == 2

    def test_negative_m_list_equals_form(self, capsys):
        code, out, _ = run_main(
            ["scan", "--omega-l-list", "1", "--k-list", "1", "--m-list=-2,-1",
             "--level", "1"], capsys)
        assert code == 0
        rows = [line.split(",") for line in out.strip().splitlines()[1:]]
        assert [int(r[2]) for r in rows] == [-2, -1]

    def test_deterministic_row_order(self, capsys):
        args = ["scan", "--omega-l-list", "2,1", "--k-list", "1,0", "--m", "0",
                "--level", "1"]
        _, first, _ = run_main(args, capsys)
        _, second, _ = run_main(args, capsys)
        assert first == second
        rows = [line.split(",") for line in first.strip().splitlines()[1:]]
        keys = [(float(r[0]), float(r[1])) for r in rows]
        assert keys == sorted(keys)


class TestMapSextic:
    def test_level_one_coefficients(self, capsys):
        code, out, _ = run_main(
            ["map-sextic", "--omega-l", "1", "--k", "1", "--m", "0",
             "--level", "1"], capsys)
        assert code == 0
        state = json.loads(out)["states"][0]
        assert state["eigenvalue"] == pytest.approx(2.0)
        coeffs = state["coefficients"]
        assert coeffs["centrifugal"] == pytest.approx(-0.125)
        assert coeffs["rho2"] == pytest.approx(-2.0)
        assert coeffs["rho4"] == pytest.approx(4.0)
        assert coeffs["rho6"] == pytest.approx(2.0)
        assert state["sextic_residual"] < 1e-5

    def test_zero_slope_quartic_vanishes(self, capsys):
        code, out, _ = run_main(
            ["map-sextic", "--omega-l", "1", "--k", "0", "--m", "0",
             "--level", "1"], capsys)
        assert json.loads(out)["states"][0]["coefficients"]["rho4"] == 0.0

    def test_sample_rows(self, capsys):
        code, out, _ = run_main(
            ["map-sextic", "--omega-l", "1", "--k", "1", "--m", "0",
             "--level", "1", "--sample-points", "100"], capsys)
        samples = json.loads(out)["states"][0]["samples"]
        assert len(samples) == 100
        assert all(len(pair) == 2 for pair in samples)

    def test_csv_sample_table_appended(self, capsys):
        code, out, _ = run_main(
            ["map-sextic", "--omega-l", "1", "--k", "1", "--m", "0",
             "--level", "1", "--format", "csv", "--sample-points", "10"],
            capsys)
        assert code == 0
        tables = out.split("\n\n")
        assert len(tables) == 2
        sample_lines = tables[1].strip().splitlines()
        assert sample_lines[0] == "root_index,rho,zeta"
        assert len(sample_lines) == 11


class TestVerifyCommand:
    def test_passes_at_unit_couplings(self, capsys):
        code, out, _ = run_main(
            ["verify", "--omega-l", "1", "--k", "1", "--m", "0", "--level", "2"],
            capsys)
        assert code == 0
        payload = json.loads(out)
        assert payload["passed"] is True
        assert payload["cross_validation"]["passed"] is True


class TestExport:
    def test_default_sample_count(self, capsys):
        code, out, _ = run_main(
            ["export", "--omega-l", "1", "--k", "1", "--m", "0", "--level", "1"],
            capsys)
        assert code == 0
        samples = json.loads(out)["states"][0]["samples"]
        assert len(samples) == 100

    def test_csv_long_format(self, capsys):
        code, out, _ = run_main(
            ["export", "--omega-l", "1", "--k", "1", "--m", "0", "--level", "1",
             "--format", "csv", "--sample-points", "7"], capsys)
        lines = out.strip().splitlines()
        assert lines[0] == "root_index,r,radial_value"
        assert len(lines) == 8


class TestDeterminismAndRoundTrip:
    def test_byte_identical_output(self, tmp_path):
        paths = [tmp_path / "a.json", tmp_path / "b.json"]
        for path in paths:
            code = main(["solve", "--omega-l", "1", "--k", "1", "--m", "0",
                         "--level", "3", "--out", str(path)])
            assert code == 0
        assert paths[0].read_bytes() == paths[1].read_bytes()

    def test_round_trip_reverifies(self, tmp_path):
        out = tmp_path / "states.json"
        assert main(["solve", "--omega-l", "1", "--k", "1", "--m", "0",
                     "--level", "2", "--out", str(out)]) == 0
        payload = json.loads(out.read_text())
        _, states = solution_from_json(out.read_text())
        assert states
        for entry, state in zip(payload["states"], states):
            report = verify_state(state)
            assert report.passed
            assert report.max_residual == entry["verification"]["max_residual"]
            assert report.norm_error == entry["verification"]["norm_error"]


class TestConfigFile:
    def test_config_supplies_parameters(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text(
            "# solve configuration\n"
            "omega_l = 1\n"
            "k = 1\n"
            "m = 0\n"
            "level = 2\n"
        )
        code, out, _ = run_main(["solve", "--config", str(cfg)], capsys)
        assert code == 0
        assert len(json.loads(out)["states"]) == 2

    def test_flags_override_config(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("omega_l = 1\nk = 1\nm = 0\nlevel = 2\n")
        code, out, _ = run_main(
            ["solve", "--config", str(cfg), "--level", "1"], capsys)
        assert code == 0
        assert len(json.loads(out)["states"]) == 1

    def test_unknown_key_rejected(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("wibble = 3\n")
        code, _, err = run_main(["solve", "--config", str(cfg)], capsys)
        assert code == 2

    def test_scan_lists_from_config(self, tmp_path, capsys):
        cfg = tmp_path / "scan.cfg"
        cfg.write_text(
            "omega_l_list = 1,2\n"
            "k_list = 0,1\n"
            "m = 0\n"
            "level_list = 1\n"
        )
        code, out, _ = run_main(["scan", "--config", str(cfg)], capsys)
        assert code == 0
        assert len(out.strip().splitlines()) == 5  # header + 4 rows


class TestSubprocessEntry:
    def test_module_invocation(self):
        proc = subprocess.run(
            [sys.executable, "-m", "qeshydro", "solve", "--omega-l", "1",
             "--k", "1", "--m", "0", "--level", "1"],
            capture_output=True, text=True)
        assert proc.returncode == 0
        assert json.loads(proc.stdout)["states"][0]["z"] == pytest.approx(0.5)
