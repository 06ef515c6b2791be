import csv
import io
import json

import numpy as np
import pytest

from pdmsusy import cli
from pdmsusy.exprparse import parse_expression
from pdmsusy.errors import SchemaError


def run_cli(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr().out
    return code, out


def write_config(tmp_path, payload, name="config.json"):
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return str(path)


def standard_config(**overrides):
    cfg = {
        "schema": 1,
        "seed": 42,
        "system": {"type": "typeA", "case": "I", "N": 2,
                   "b": [0, -2, 0], "R": 0},
        "mass": {"profile": "constant"},
        "window": {"qmin": 0.5, "qmax": 1.5, "samples": 3},
    }
    cfg.update(overrides)
    return cfg


class TestExpressionParser:
    def test_arithmetic(self):
        f = parse_expression("2*q^2 + 1/(1+q)", "q")
        assert abs(f(1.0) - 2.5) < 1e-14

    def test_functions_and_unary(self):
        f = parse_expression("-exp(2*q) + sqrt(q)", "q")
        assert abs(f(1.0) - (-np.exp(2) + 1)) < 1e-14

    def test_double_star_power(self):
        f = parse_expression("z**3 - z", "z")
        assert abs(f(2.0) - 6.0) < 1e-14

    def test_imaginary_unit(self):
        f = parse_expression("i*q", "q")
        assert abs(f(2.0) - 2j) < 1e-15

    def test_rejects_unknown_names(self):
        with pytest.raises(SchemaError):
            parse_expression("frob(q)", "q")
        with pytest.raises(SchemaError):
            parse_expression("z + q", "q")
        with pytest.raises(SchemaError):
            parse_expression("q +", "q")


class TestSchemaValidation:
    def test_unknown_key_rejected(self, tmp_path, capsys):
        cfg = standard_config()
        cfg["system"]["bogus"] = 1
        code, out = run_cli(capsys, "build", "--config",
                            write_config(tmp_path, cfg))
        assert code == 2
        assert json.loads(out)["error"]["type"] == "SchemaError"

    def test_wrong_schema_version(self, tmp_path, capsys):
        cfg = standard_config(schema=2)
        code, out = run_cli(capsys, "build", "--config",
                            write_config(tmp_path, cfg))
        assert code == 2

    def test_missing_mass_block(self, tmp_path, capsys):
        cfg = standard_config()
        del cfg["mass"]
        code, _ = run_cli(capsys, "build", "--config",
                          write_config(tmp_path, cfg))
        assert code == 2

    def test_case_singularity_is_build_error(self, tmp_path, capsys):
        cfg = standard_config()
        cfg["system"].update({"case": "II", "b": [0, 1, 0.5]})
        cfg["window"] = {"qmin": -0.5, "qmax": 0.5, "samples": 5}
        code, out = run_cli(capsys, "build", "--config",
                            write_config(tmp_path, cfg))
        assert code == 3
        assert json.loads(out)["error"]["type"] == "CaseSingularity"


class TestBuildSummary:
    def test_solvable_flag(self, tmp_path, capsys):
        code, out = run_cli(capsys, "build", "--config",
                            write_config(tmp_path, standard_config()))
        assert code == 0
        doc = json.loads(out)
        assert doc["is_solvable"] is True
        assert doc["N"] == 2
        assert doc["case"] == "I"

    def test_case_v_never_solvable(self, tmp_path, capsys):
        cfg = standard_config()
        cfg["system"] = {"type": "typeA", "case": "V", "N": 2,
                         "b": [0, 0, 0.5], "R": 0, "g2": 4.0, "g3": 1.0}
        del cfg["window"]
        code, out = run_cli(capsys, "build", "--config",
                            write_config(tmp_path, cfg))
        assert code == 0
        assert json.loads(out)["is_solvable"] is False


class TestTables:
    def test_potential_row_value(self, tmp_path, capsys):
        code, out = run_cli(capsys, "potential", "--format", "csv",
                            "--config",
                            write_config(tmp_path, standard_config()))
        assert code == 0
        rows = list(csv.DictReader(io.StringIO(out)))
        assert [r["q"] for r in rows] == ["0.5", "1.0", "1.5"]
        mid = rows[1]
        assert abs(float(mid["U_minus_re"])) < 1e-12
        assert abs(float(mid["U_minus_im"])) < 1e-15
        assert abs(float(mid["U_plus_re"]) - 4.0) < 1e-12

    def test_pdm_lift_between_tables(self, tmp_path, capsys):
        const_cfg = standard_config()
        _, out_const = run_cli(capsys, "potential", "--config",
                               write_config(tmp_path, const_cfg, "c1.json"))
        exp_cfg = standard_config()
        exp_cfg["mass"] = {"profile": "exp_scale", "params": {"alpha": 1.0}}
        qa, qb = np.log(0.5), np.log(1.5)
        exp_cfg["window"] = {"qmin": qa, "qmax": qb, "samples": 3}
        _, out_exp = run_cli(capsys, "potential", "--config",
                             write_config(tmp_path, exp_cfg, "c2.json"))
        rows_exp = json.loads(out_exp)
        for row in rows_exp:
            q = row["q"][0]
            u = np.exp(q)
            m = np.exp(2 * q)
            corr = 4 * m / (8 * m ** 2) - 7 * (2 * m) ** 2 / (32 * m ** 3)
            want = (2 * u * u - 2) + corr
            assert abs(row["U_minus"][0] - want) < 1e-9

    def test_sector_normalized_at_anchor(self, tmp_path, capsys):
        code, out = run_cli(capsys, "sector", "--config",
                            write_config(tmp_path, standard_config()))
        assert code == 0
        rows = json.loads(out)
        anchor_row = rows[1]  # midpoint of a 3-sample window
        assert abs(anchor_row["phi_minus_0"][0] - 1.0) < 1e-12
        assert abs(anchor_row["phi_minus_0"][1]) < 1e-15


class TestReports:
    def test_spectrum(self, tmp_path, capsys):
        cfg = standard_config()
        cfg["window"] = {"qmin": 0.3, "qmax": 1.5, "samples": 9}
        code, out = run_cli(capsys, "spectrum", "--config",
                            write_config(tmp_path, cfg))
        assert code == 0
        doc = json.loads(out)
        eigs = [e[0] for e in doc["minus"]["eigenvalues"]]
        assert abs(eigs[0] + 1.0) < 1e-8 and abs(eigs[1] - 1.0) < 1e-8

    def test_verify_green_and_compare_mass(self, tmp_path, capsys):
        cfg = standard_config()
        cfg["window"] = {"qmin": 0.3, "qmax": 1.5, "samples": 9}
        code, out = run_cli(capsys, "verify", "--compare-mass", "exp_scale",
                            "--config", write_config(tmp_path, cfg))
        assert code == 0
        doc = json.loads(out)
        assert doc["passed"] is True
        assert doc["mass_independence"] < 1e-7

    def test_verify_failure_exit_code(self, tmp_path, capsys):
        cfg = standard_config()
        cfg["tolerances"] = {"intertwining": 1e-30}
        code, out = run_cli(capsys, "verify", "--config",
                            write_config(tmp_path, cfg))
        assert code == 4
        assert "intertwining" in json.loads(out)["failures"]

    def test_oracle_compare(self, tmp_path, capsys):
        cfg = standard_config()
        cfg["window"] = {"qmin": -1.5, "qmax": 1.5, "samples": 9}
        code, out = run_cli(capsys, "oracle-compare", "--grid-size", "3000",
                            "--config", write_config(tmp_path, cfg))
        assert code == 0
        doc = json.loads(out)
        assert all(m["matched"] for m in doc["matches"])

    def test_oracle_compare_rejects_complex(self, tmp_path, capsys):
        cfg = standard_config()
        cfg["system"]["b"] = [0, [0, -2], 0]
        code, out = run_cli(capsys, "oracle-compare", "--config",
                            write_config(tmp_path, cfg))
        assert code == 3
        assert json.loads(out)["error"]["type"] == "NotHermitianInput"


class TestDeterminism:
    def test_verify_byte_identical(self, tmp_path, capsys):
        cfg = write_config(tmp_path, standard_config())
        out_a = tmp_path / "a.json"
        out_b = tmp_path / "b.json"
        assert cli.main(["verify", "--config", cfg, "--out",
                         str(out_a)]) == 0
        assert cli.main(["verify", "--config", cfg, "--out",
                         str(out_b)]) == 0
        assert out_a.read_bytes() == out_b.read_bytes()


class TestGenericAndCustom:
    def test_generic_system_config(self, tmp_path, capsys):
        cfg = {
            "schema": 1,
            "system": {"type": "generic", "N": 2,
                       "A": "0.5", "B": "-2*z", "C": "1",
                       "basis": ["1", "z"], "z_anchor": 0.9},
            "mass": {"profile": "constant"},
            "window": {"qmin": 0.3, "qmax": 1.5, "samples": 5},
        }
        code, out = run_cli(capsys, "verify", "--config",
                            write_config(tmp_path, cfg))
        assert code == 0
        assert json.loads(out)["passed"] is True

    def test_custom_mass_expression(self, tmp_path, capsys):
        cfg = standard_config()
        cfg["mass"] = {"profile": "custom", "expr": "exp(2*q)",
                       "params": {"anchor": 0.0}}
        cfg["window"] = {"qmin": -1.2, "qmax": 0.4, "samples": 5}
        code, out = run_cli(capsys, "verify", "--config",
                            write_config(tmp_path, cfg))
        assert code == 0
        assert json.loads(out)["passed"] is True
