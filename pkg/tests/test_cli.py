import csv
import json

import numpy as np
import pytest

from opertail.cli import main


def write_config(tmp_path, cfg, name="config.json"):
    path = tmp_path / name
    path.write_text(json.dumps(cfg))
    return str(path)


TESTBED = {"a": [1.0, 1.0], "g": {"type": "inverted_dirichlet", "theta": 3.0}}


def read_rows(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


class TestEval:
    def test_tail_density_points(self, tmp_path, capsys):
        cfg = {"distribution": TESTBED,
               "task": {"evaluator": "liouville_copula_tail_density",
                        "points": [[1.0, 1.0], [1.0, 2.0]]}}
        rc = main(["eval", "--config", write_config(tmp_path, cfg),
                   "--out", str(tmp_path)])
        assert rc == 0
        rows = read_rows(tmp_path / "eval.csv")
        assert float(rows[0]["value"]) == pytest.approx(0.25, rel=1e-12)
        assert float(rows[1]["value"]) == pytest.approx(2.0 * 1.5 ** -3 * 0.25,
                                                        rel=1e-12)
        # 17 significant digits are preserved in the file
        assert rows[0]["value"] == "0.25"
        assert "liouville_copula_tail_density" not in rows[0]  # header columns
        assert rows[0]["normalization"]

    def test_exponent_function(self, tmp_path):
        cfg = {"distribution": TESTBED,
               "task": {"evaluator": "exponent_function",
                        "points": [[1.0, 1.0]]}}
        rc = main(["eval", "--config", write_config(tmp_path, cfg),
                   "--out", str(tmp_path)])
        assert rc == 0
        rows = read_rows(tmp_path / "eval.csv")
        assert float(rows[0]["value"]) == pytest.approx(1.5, abs=1e-6)

    def test_grid_expansion_with_jobs(self, tmp_path):
        cfg = {"distribution": TESTBED,
               "task": {"evaluator": "joint_density",
                        "grid": {"start": 0.5, "stop": 2.0, "num": 3}}}
        rc = main(["eval", "--config", write_config(tmp_path, cfg),
                   "--out", str(tmp_path), "--jobs", "4"])
        assert rc == 0
        rows = read_rows(tmp_path / "eval.csv")
        assert len(rows) == 9
        for row in rows:
            x, y = float(row["w1"]), float(row["w2"])
            assert float(row["value"]) == pytest.approx(
                2.0 * (1 + x + y) ** -3.0, rel=1e-12)

    def test_unknown_evaluator_exit_2(self, tmp_path, capsys):
        cfg = {"distribution": TESTBED, "task": {"evaluator": "mystery",
                                                 "points": [[1.0, 1.0]]}}
        rc = main(["eval", "--config", write_config(tmp_path, cfg),
                   "--out", str(tmp_path)])
        assert rc == 2
        assert "mystery" in capsys.readouterr().err


class TestConfigErrors:
    def test_malformed_json_exit_2(self, tmp_path, capsys):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        rc = main(["eval", "--config", str(path), "--out", str(tmp_path)])
        assert rc == 2
        assert "JSON" in capsys.readouterr().err

    def test_missing_file_exit_2(self, tmp_path, capsys):
        rc = main(["eval", "--config", str(tmp_path / "absent.json"),
                   "--out", str(tmp_path)])
        assert rc == 2

    def test_missing_field_named(self, tmp_path, capsys):
        rc = main(["eval", "--config", write_config(tmp_path, {"task": {}}),
                   "--out", str(tmp_path)])
        assert rc == 2
        assert "'distribution'" in capsys.readouterr().err

    def test_integrability_violation_exit_2(self, tmp_path, capsys):
        cfg = {"distribution": {"a": [1.0, 1.0],
                                "g": {"type": "inverted_dirichlet",
                                      "theta": 1.5}},
               "task": {"evaluator": "joint_density", "points": [[1.0, 1.0]]}}
        rc = main(["eval", "--config", write_config(tmp_path, cfg),
                   "--out", str(tmp_path)])
        assert rc == 2
        assert "integrability violated" in capsys.readouterr().err

    def test_divergent_integral_exit_3(self, tmp_path, capsys):
        # a rapidly varying driver cannot produce the operator limit
        cfg = {"distribution": {"a": [1.0, 1.0], "g": {"type": "rapid"}},
               "task": {"evaluator": "limiting_density",
                        "points": [[1.0, 1.0]]}}
        rc = main(["eval", "--config", write_config(tmp_path, cfg),
                   "--out", str(tmp_path)])
        assert rc == 3
        assert "not operator-regularly varying" in capsys.readouterr().err


class TestSample:
    def test_deterministic_output(self, tmp_path):
        cfg = {"distribution": TESTBED, "seed": 42, "task": {"n": 200}}
        path = write_config(tmp_path, cfg)
        main(["sample", "--config", path, "--out", str(tmp_path / "a")])
        main(["sample", "--config", path, "--out", str(tmp_path / "b")])
        a = (tmp_path / "a" / "samples.csv").read_bytes()
        b = (tmp_path / "b" / "samples.csv").read_bytes()
        assert a == b
        header = a.decode().splitlines()
        assert header[0].startswith("# seed=42")
        assert header[1] == "x1,x2"
        assert len(header) == 202

    def test_seed_flag_overrides(self, tmp_path):
        cfg = {"distribution": TESTBED, "seed": 1, "task": {"n": 100}}
        path = write_config(tmp_path, cfg)
        main(["sample", "--config", path, "--out", str(tmp_path / "a"),
              "--seed", "2"])
        main(["sample", "--config", path, "--out", str(tmp_path / "b")])
        assert (tmp_path / "a" / "samples.csv").read_bytes() != \
            (tmp_path / "b" / "samples.csv").read_bytes()

    def test_missing_seed_exit_2(self, tmp_path, capsys):
        cfg = {"distribution": TESTBED, "task": {"n": 10}}
        rc = main(["sample", "--config", write_config(tmp_path, cfg),
                   "--out", str(tmp_path)])
        assert rc == 2
        assert "seed" in capsys.readouterr().err

    def test_sample_median(self, tmp_path):
        cfg = {"distribution": TESTBED, "seed": 3, "task": {"n": 50000}}
        main(["sample", "--config", write_config(tmp_path, cfg),
              "--out", str(tmp_path)])
        x = np.loadtxt(tmp_path / "samples.csv", delimiter=",", skiprows=2)
        np.testing.assert_allclose(np.median(x, axis=0), [1.0, 1.0], atol=0.05)


class TestVerify:
    def test_passing_suite(self, tmp_path, capsys):
        cfg = {"task": {"suite": "quasihom"}}
        rc = main(["verify", "--config", write_config(tmp_path, cfg),
                   "--out", str(tmp_path)])
        assert rc == 0
        report = json.loads((tmp_path / "report.json").read_text())
        assert report["passed"] is True
        assert all(c["passed"] for c in report["checks"])
        out = capsys.readouterr().out
        assert "[PASS]" in out and "[FAIL]" not in out

    def test_suite_with_params(self, tmp_path):
        cfg = {"task": {"suite": "orthant-mc",
                        "params": {"n": 100000, "t": 50.0}}}
        rc = main(["verify", "--config", write_config(tmp_path, cfg),
                   "--out", str(tmp_path), "--seed", "19"])
        assert rc == 0

    def test_unknown_suite_exit_2(self, tmp_path, capsys):
        cfg = {"task": {"suite": "nonexistent"}}
        rc = main(["verify", "--config", write_config(tmp_path, cfg),
                   "--out", str(tmp_path)])
        assert rc == 2
        assert "unknown suite" in capsys.readouterr().err
