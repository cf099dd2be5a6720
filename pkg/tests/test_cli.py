import csv
import json
import math

import numpy as np
import pytest

from shocklayer.cli import main, parse_angle, parse_gas

PI = math.pi


def read_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


class TestAngleParsing:
    @pytest.mark.parametrize(
        "text,expected",
        [
            ("pi", PI),
            ("pi/6", PI / 6),
            ("2pi/9", 2 * PI / 9),
            ("-pi/36", -PI / 36),
            ("0.5", 0.5),
            ("0", 0.0),
            ("1.5pi", 1.5 * PI),
        ],
    )
    def test_accepted_forms(self, text, expected):
        assert parse_angle(text) == pytest.approx(expected, rel=1e-15)

    def test_rejects_garbage(self):
        with pytest.raises(ValueError):
            parse_angle("six")
        with pytest.raises(ValueError):
            parse_angle("pi/")

    def test_gas_forms(self):
        assert parse_gas("hypersonic").p0 == 0.0
        assert parse_gas("chaplygin:3").p0 == pytest.approx(-1.0 / 9.0)
        with pytest.raises(ValueError):
            parse_gas("ideal")


class TestSolveCommand:
    def test_valid_case_outputs(self, tmp_path):
        out = tmp_path / "run"
        code = main(
            ["solve", "--theta0", "pi/6", "--alpha0", "pi/36", "--N", "5",
             "--grid", "512", "--out", str(out)]
        )
        assert code == 0
        header, rows = read_csv(out / "fields.csv")
        assert header == ["phi", "f", "fdot", "h", "y", "ut", "w", "w_rho", "Wc", "valid"]
        assert len(rows) == 512
        summary = json.loads((out / "summary.json").read_text())
        assert summary["schema_version"] == 1
        assert summary["metrics"]["quasi_l1"] < 1e-6
        assert summary["validity"]["valid"] is True
        header, rows = read_csv(out / "coefficients.csv")
        assert header == ["n", "b_n"] and len(rows) == 6
        assert (out / "residual.csv").exists()

    def test_seventeen_digit_round_trip(self, tmp_path):
        out = tmp_path / "run"
        main(["solve", "--theta0", "pi/6", "--alpha0", "pi/36", "--N", "5",
              "--grid", "256", "--out", str(out)])
        _, rows = read_csv(out / "coefficients.csv")
        from conftest import solve_case

        _, coeffs, _ = solve_case(PI / 6, PI / 36, 5)
        for row, b in zip(rows, coeffs.b):
            assert float(row[1]) == b  # %.17g survives the round trip

    def test_chaplygin_closed_form_summary(self, tmp_path):
        out = tmp_path / "run"
        code = main(
            ["solve", "--theta0", "pi/6", "--alpha0", "0", "--gas", "chaplygin:3",
             "--grid", "128", "--out", str(out)]
        )
        assert code == 0
        summary = json.loads((out / "summary.json").read_text())
        assert summary["validity"]["closed_form_branch"] is True
        assert summary["metrics"]["wc_const"] == pytest.approx(0.25 - 1.0 / 9.0, rel=1e-14)
        assert summary["metrics"]["chaplygin_min_mach"] == pytest.approx(2.0, rel=1e-14)

    def test_breakdown_exits_two(self, tmp_path):
        out = tmp_path / "run"
        code = main(
            ["solve", "--theta0", "pi/6", "--alpha0", "pi/6", "--N", "5",
             "--grid", "256", "--out", str(out)]
        )
        assert code == 2
        summary = json.loads((out / "summary.json").read_text())
        assert summary["validity"]["valid"] is False
        assert not summary["validity"]["wc_positive"]

    def test_manifest_round_trip(self, tmp_path):
        first = tmp_path / "first"
        again = tmp_path / "again"
        main(["solve", "--theta0", "pi/6", "--alpha0", "pi/24", "--N", "6",
              "--grid", "256", "--out", str(first)])
        code = main(["solve", "--from-manifest", str(first / "summary.json"),
                     "--out", str(again)])
        assert code == 0
        for name in ("fields.csv", "coefficients.csv", "residual.csv"):
            assert (first / name).read_bytes() == (again / name).read_bytes()

    def test_usage_errors_exit_64(self, tmp_path):
        assert main(["solve", "--theta0", "pi/6", "--out", str(tmp_path)]) == 64
        assert main(["solve", "--theta0", "banana", "--alpha0", "0",
                     "--out", str(tmp_path)]) == 64

    def test_env_var_default_out(self, tmp_path, monkeypatch):
        monkeypatch.setenv("SHOCKLAYER_OUT", str(tmp_path / "envout"))
        code = main(["solve", "--theta0", "pi/6", "--alpha0", "0", "--grid", "64"])
        assert code == 0
        assert (tmp_path / "envout" / "summary.json").exists()


class TestSweepCommand:
    def test_case_grid_and_index(self, tmp_path):
        out = tmp_path / "sweep"
        code = main(
            ["sweep", "--theta0", "pi/6", "--alpha0", "pi/36,pi/24", "--N", "5,6",
             "--grid", "128", "--out", str(out)]
        )
        assert code == 0
        index = json.loads((out / "index.json").read_text())
        assert len(index["cases"]) == 4
        for case in index["cases"]:
            case_dir = out / case["dir"].split("/")[-1]
            assert (case_dir / "summary.json").exists()
            assert (case_dir / "fields.csv").exists()

    def test_empty_list_is_usage_error(self, tmp_path):
        assert main(["sweep", "--theta0", "", "--alpha0", "pi/36",
                     "--out", str(tmp_path)]) == 64

    def test_parallel_jobs_match_serial(self, tmp_path):
        serial = tmp_path / "serial"
        parallel = tmp_path / "parallel"
        args = ["sweep", "--theta0", "pi/6", "--alpha0", "pi/36,pi/18", "--N", "5",
                "--grid", "128"]
        assert main(args + ["--out", str(serial)]) == 0
        assert main(args + ["--out", str(parallel), "--jobs", "2"]) == 0
        for case in json.loads((serial / "index.json").read_text())["cases"]:
            name = case["dir"].split("/")[-1]
            assert (serial / name / "fields.csv").read_bytes() == (
                parallel / name / "fields.csv"
            ).read_bytes()


class TestTrajectoryCommand:
    def test_inline_solve_and_monotone_radius(self, tmp_path):
        out = tmp_path / "traj"
        code = main(
            ["trajectory", "--theta0", "pi/6", "--alpha0", "pi/36", "--N", "6",
             "--grid", "512", "--phi0", "-0.999pi", "--r0", "10", "--out", str(out)]
        )
        assert code == 0
        header, rows = read_csv(out / "trajectory.csv")
        assert header == ["phi", "r", "x1", "x2", "x3"]
        r = np.array([float(row[1]) for row in rows])
        phi = np.array([float(row[0]) for row in rows])
        assert phi[0] == pytest.approx(-0.999 * PI)
        assert np.all(np.diff(r) > 0)
        x1 = np.array([float(row[2]) for row in rows])
        assert np.allclose(x1, r * math.cos(PI / 6), rtol=1e-12)

    def test_solve_dir_reuse(self, tmp_path):
        solved = tmp_path / "solved"
        main(["solve", "--theta0", "pi/6", "--alpha0", "pi/36", "--N", "6",
              "--grid", "512", "--out", str(solved)])
        out = tmp_path / "traj"
        code = main(
            ["trajectory", "--solve-dir", str(solved), "--phi0", "-pi/2",
             "--r0", "10", "--out", str(out)]
        )
        assert code == 0
        assert (out / "trajectory.csv").exists()

    def test_nonpositive_radius_usage_error(self, tmp_path):
        assert main(
            ["trajectory", "--theta0", "pi/6", "--alpha0", "pi/36",
             "--phi0", "-pi/2", "--r0", "0", "--out", str(tmp_path)]
        ) == 64


class TestValidateCommand:
    def test_oracle_study(self, tmp_path, capsys):
        code = main(["validate", "oracle", "--out", str(tmp_path / "oracle.json")])
        assert code == 0
        report = json.loads((tmp_path / "oracle.json").read_text())
        assert report["passed"] is True
        assert report["cases"][0]["max_discrepancy"] <= 1e-12

    def test_chaplygin_study(self, capsys):
        assert main(["validate", "chaplygin", "--theta0", "pi/6", "--mach", "3"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["passed"] is True

    def test_unknown_study_usage_error(self):
        assert main(["validate", "nonsense"]) == 64

    def test_wc_extrema_study(self, tmp_path):
        code = main(
            ["validate", "wc-extrema", "--theta0", "pi/6",
             "--alpha0-list", "pi/36,pi/18", "--N", "6",
             "--out", str(tmp_path / "wc.json")]
        )
        assert code == 0
