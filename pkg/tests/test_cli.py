import json
import math
import os

import numpy as np
import pytest

from wpduality import cli, discrimination as disc

GOLDEN = os.path.join(os.path.dirname(__file__), "golden")


def read_csv(path):
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        rows = [line.strip().split(",") for line in fh if line.strip()]
    return header, rows


def write_instance(path, priors, gram_re, gram_im=None, budget=None):
    payload = {"priors": priors, "gram_re": gram_re}
    if gram_im is not None:
        payload["gram_im"] = gram_im
    if budget is not None:
        payload["error_budget"] = budget
    with open(path, "w") as fh:
        json.dump(payload, fh)


class TestFigure1:
    def test_curves_match_closed_form(self, tmp_path):
        out = tmp_path / "f1.csv"
        rc = cli.main(["figure1", "--grid", "41", "--out", str(out)])
        assert rc == 0
        header, rows = read_csv(out)
        assert header == ["n_paths", "overlap", "D", "C"]
        assert len(rows) == 4 * 41
        # values round-trip through 12 significant digits in the file
        for n_s, c_s, d_s, coh_s in rows:
            n, c, d, coh = int(n_s), float(c_s), float(d_s), float(coh_s)
            assert d == pytest.approx(1.0 - c, abs=1e-11)
            expected = disc.symmetric_coherence(disc.SymmetricConfig(n, c)) / math.log2(n)
            assert coh == pytest.approx(expected, abs=1e-11)
            assert d + coh <= 1.0 + 1e-10

    def test_endpoints(self, tmp_path):
        out = tmp_path / "f1.csv"
        cli.main(["figure1", "--grid", "3", "--n-paths", "2", "--out", str(out)])
        _, rows = read_csv(out)
        assert rows[0] == ["2", "0", "1", "0"]   # c=0: D=1, C=0
        assert rows[-1] == ["2", "1", "0", "1"]  # c=1: D=0, C=1

    def test_json_format(self, tmp_path):
        out = tmp_path / "f1.json"
        cli.main(["figure1", "--grid", "3", "--n-paths", "2", "--format", "json",
                  "--out", str(out)])
        payload = json.loads(out.read_text())
        assert payload["schema_version"] == 1
        assert len(payload["rows"]) == 3
        assert set(payload["rows"][0]) == {"n_paths", "overlap", "D", "C"}

    def test_matches_golden(self, tmp_path):
        out = tmp_path / "f1.csv"
        cli.main(["figure1", "--grid", "5", "--n-paths", "2,4", "--out", str(out)])
        assert out.read_bytes() == open(
            os.path.join(GOLDEN, "figure1_small.csv"), "rb").read()


class TestFigure3:
    def test_endpoints_and_curve(self, tmp_path):
        out = tmp_path / "f3.csv"
        rc = cli.main(["figure3", "--grid", "21", "--n-paths", "4,256", "--out", str(out)])
        assert rc == 0
        header, rows = read_csv(out)
        assert header == ["n_paths", "p", "D", "C"]
        first = [float(v) for v in rows[0][1:]]
        last = [float(v) for v in rows[20][1:]]
        assert first == pytest.approx([0.25, 0.0, 1.0], abs=1e-12)  # p=1/N
        assert last == pytest.approx([1.0, 1.0, 0.0], abs=1e-12)    # p=1
        # N=256 curve hugs the duality boundary from below
        big = [(float(p), float(d), float(c)) for n, p, d, c in rows if n == "256"]
        for _, d, c in big:
            assert -1e-12 <= (1.0 - d) - c <= 0.02


class TestFigure2:
    def test_samples_satisfy_bound(self, tmp_path):
        out = tmp_path / "f2.csv"
        rc = cli.main([
            "figure2", "--ensemble", "3", "--n-paths", "2", "--grid", "5",
            "--error-budget", "0.05,0.2", "--seed", "5", "--out", str(out),
        ])
        assert rc == 0
        header, rows = read_csv(out)
        samples = [r for r in rows if r[0] == "sample"]
        bounds = [r for r in rows if r[0] == "bound"]
        assert len(samples) == 3 * 2
        assert len(bounds) == 2 * 5
        for row in samples:
            record = dict(zip(header, row))
            assert record["status"] == "optimal"
            assert float(record["bound_lhs"]) >= float(record["C"]) - 1e-8

    def test_deterministic_bytes(self, tmp_path):
        args = ["figure2", "--ensemble", "2", "--n-paths", "2", "--grid", "3",
                "--error-budget", "0.1", "--seed", "31"]
        out_a, out_b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert cli.main(args + ["--out", str(out_a)]) == 0
        assert cli.main(args + ["--out", str(out_b)]) == 0
        assert out_a.read_bytes() == out_b.read_bytes()


class TestSolve:
    def test_identity_instance(self, tmp_path):
        inst = tmp_path / "inst.json"
        write_instance(inst, [0.25] * 4, np.eye(4).tolist())
        out = tmp_path / "report.json"
        rc = cli.main(["solve", str(inst), "--out", str(out)])
        assert rc == 0
        report = json.loads(out.read_text())
        assert report["satisfied_all"] is True
        assert report["discrimination"]["p_failure"] == pytest.approx(0.0, abs=1e-6)
        assert report["coherence"]["normalized"] == pytest.approx(0.0, abs=1e-9)
        assert report["solver"]["status"] == "optimal"
        assert {r["relation"] for r in report["duality"]} == {
            "usd-eq1", "error-margin-eq31", "error-margin-duality-eq32",
            "simplified-eq33",
        }

    def test_symmetric_instance_with_budget(self, tmp_path):
        n, c = 3, 0.4
        gram = ((1 - c) * np.eye(n) + c * np.ones((n, n))).tolist()
        inst = tmp_path / "inst.json"
        write_instance(inst, [1 / 3] * 3, gram, budget=0.05)
        out = tmp_path / "report.json"
        rc = cli.main(["solve", str(inst), "--out", str(out)])
        assert rc == 0
        report = json.loads(out.read_text())
        expected = c - 2 * math.sqrt((1 - c) * 0.05 / 2) - 3 * 0.05 / 2
        assert report["discrimination"]["p_failure"] == pytest.approx(expected, abs=1e-5)

    def test_complex_instance(self, tmp_path):
        gram_re = [[1.0, 0.3], [0.3, 1.0]]
        gram_im = [[0.0, 0.4], [-0.4, 0.0]]
        inst = tmp_path / "inst.json"
        write_instance(inst, [0.5, 0.5], gram_re, gram_im)
        rc = cli.main(["solve", str(inst), "--out", str(tmp_path / "r.json")])
        assert rc == 0

    def test_non_psd_instance_exit_code(self, tmp_path):
        inst = tmp_path / "inst.json"
        write_instance(inst, [0.5, 0.5], [[1.0, 1.001], [1.001, 1.0]])
        assert cli.main(["solve", str(inst), "--out", str(tmp_path / "r.json")]) == 2

    def test_missing_field_exit_code(self, tmp_path):
        inst = tmp_path / "inst.json"
        inst.write_text(json.dumps({"priors": [0.5, 0.5]}))
        assert cli.main(["solve", str(inst), "--out", str(tmp_path / "r.json")]) == 2

    def test_malformed_json_exit_code(self, tmp_path):
        inst = tmp_path / "inst.json"
        inst.write_text("{not json")
        assert cli.main(["solve", str(inst), "--out", str(tmp_path / "r.json")]) == 2

    def test_missing_file_exit_code(self, tmp_path):
        assert cli.main(["solve", str(tmp_path / "nope.json"),
                         "--out", str(tmp_path / "r.json")]) == 2


class TestScan:
    def test_zero_violations_and_exit_code(self, tmp_path):
        out = tmp_path / "scan.json"
        rc = cli.main(["scan", "--ensemble", "3", "--n-paths", "3", "--seed", "17",
                       "--error-budget", "0,0.1", "--out", str(out)])
        assert rc == 0
        summary = json.loads(out.read_text())
        assert summary["violations_total"] == 0
        assert summary["solver"]["statuses"] == {"optimal": 6}
        assert set(summary["relations"]) == {
            "usd-eq1", "error-margin-eq31", "error-margin-duality-eq32",
            "simplified-eq33",
        }
        for entry in summary["relations"].values():
            assert entry["violations"] == 0
            assert entry["min_slack"] >= -1e-8

    def test_deterministic_summary(self, tmp_path):
        args = ["scan", "--ensemble", "2", "--n-paths", "2", "--seed", "5",
                "--error-budget", "0,0.05"]
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        assert cli.main(args + ["--out", str(a)]) == 0
        assert cli.main(args + ["--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_matches_golden_summary(self, tmp_path):
        out = tmp_path / "scan.json"
        rc = cli.main(["scan", "--ensemble", "4", "--n-paths", "2,3", "--seed", "99",
                       "--error-budget", "0,0.1", "--out", str(out)])
        assert rc == 0
        produced = json.loads(out.read_text())
        golden = json.loads(open(os.path.join(GOLDEN, "scan_seed99.json")).read())
        assert set(produced) == set(golden)
        assert produced["relations"].keys() == golden["relations"].keys()
        for name, entry in golden["relations"].items():
            assert produced["relations"][name]["checks"] == entry["checks"]
            assert produced["relations"][name]["violations"] == entry["violations"]
            assert produced["relations"][name]["min_slack"] == pytest.approx(
                entry["min_slack"], abs=1e-9)

    def test_min_coherence_filter(self, tmp_path):
        out = tmp_path / "scan.json"
        rc = cli.main(["scan", "--ensemble", "2", "--n-paths", "2", "--seed", "3",
                       "--error-budget", "0", "--min-coherence", "0.3",
                       "--out", str(out)])
        assert rc == 0
        summary = json.loads(out.read_text())
        assert summary["min_coherence"] == 0.3
        assert summary["total_checks"] > 0

    def test_bad_flag_value_exit_code(self, tmp_path):
        assert cli.main(["scan", "--ensemble", "1", "--n-paths", "x",
                         "--out", str(tmp_path / "s.json")]) == 2


class TestLogging:
    def test_env_var_controls_level(self, tmp_path, monkeypatch, capsys):
        monkeypatch.setenv("DUALITY_LOG", "debug")
        import logging
        logging.getLogger().handlers.clear()
        out = tmp_path / "f1.csv"
        assert cli.main(["figure1", "--grid", "3", "--n-paths", "2",
                         "--out", str(out)]) == 0
        assert logging.getLogger().level == logging.DEBUG
        logging.getLogger().handlers.clear()
        monkeypatch.setenv("DUALITY_LOG", "warning")
        assert cli.main(["figure1", "--grid", "3", "--n-paths", "2",
                         "--out", str(out)]) == 0
        assert logging.getLogger().level == logging.WARNING
