import json

import numpy as np
import pytest

from dmajor.cli import main


def write(tmp_path, name, obj):
    path = tmp_path / name
    path.write_text(json.dumps(obj))
    return str(path)


@pytest.fixture
def capture(capsys):
    def run(argv):
        code = main(argv)
        out = capsys.readouterr()
        return code, out.out, out.err
    return run


class TestCheck:
    def test_two_cycle_both_directions(self, tmp_path, capture):
        x = write(tmp_path, "x.json", [1, 0, 0])
        y = write(tmp_path, "y.json", [0, 2 / 3, 1 / 3])
        d = write(tmp_path, "d.json", [3, 2, 1])
        code, out, _ = capture(["check", x, y, "--d", d])
        assert code == 0
        assert json.loads(out)["verdict"] is True
        code, out, _ = capture(["check", y, x, "--d", d])
        assert code == 0

    def test_incomparable_midpoint(self, tmp_path, capture):
        mid = write(tmp_path, "mid.json", [0.325, 0.225, 0.45])
        for gen in ([0.4, 0.2, 0.4], [0.25, 0.5, 0.25]):
            g = write(tmp_path, "g.json", gen)
            code, out, _ = capture(["check", mid, g])
            assert code == 1
            assert json.loads(out)["verdict"] is False

    def test_malformed_input(self, tmp_path, capture):
        bad = tmp_path / "bad.json"
        bad.write_text("not json")
        ok = write(tmp_path, "ok.json", [0.5, 0.5])
        code, _, err = capture(["check", str(bad), ok])
        assert code == 2
        assert "error" in err

    def test_method_flag(self, tmp_path, capture):
        x = write(tmp_path, "x.json", [1, 0, 0])
        y = write(tmp_path, "y.json", [0, 2 / 3, 1 / 3])
        d = write(tmp_path, "d.json", [3, 2, 1])
        for method in ("norm", "positive_part", "curve"):
            code, _, _ = capture(["check", x, y, "--d", d, "--method", method])
            assert code == 0

    def test_certificate_satisfies_invariants(self, tmp_path, capture):
        x = write(tmp_path, "x.json", [1, 0, 0])
        y = write(tmp_path, "y.json", [0, 2 / 3, 1 / 3])
        d = write(tmp_path, "d.json", [3, 2, 1])
        code, out, _ = capture(["check", x, y, "--d", d, "--certificate"])
        assert code == 0
        cert = np.array(json.loads(out)["data"]["certificate"])
        assert cert.min() >= -1e-12
        assert np.allclose(cert.sum(axis=0), 1.0, atol=1e-8)
        assert np.allclose(cert @ np.array([3, 2, 1]), [3, 2, 1], atol=1e-8)
        assert np.allclose(cert @ np.array([0, 2 / 3, 1 / 3]), [1, 0, 0], atol=1e-8)


class TestPolytope:
    def test_vertex_csv_sorted(self, tmp_path, capture):
        y = write(tmp_path, "y.json", [4, -2, 2])
        d = write(tmp_path, "d.json", [4, 2, 1])
        code, out, _ = capture(["--format", "csv", "polytope", y, "--d", d])
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "x0,x1,x2"
        assert lines[1:] == sorted(lines[1:])
        points = {tuple(float(v) for v in line.split(",")) for line in lines[1:]}
        assert (5.0, 0.0, -1.0) in points
        assert len(points) == 6

    def test_global_flags_after_subcommand(self, tmp_path, capture):
        y = write(tmp_path, "y.json", [4, -2, 2])
        d = write(tmp_path, "d.json", [4, 2, 1])
        code, out, _ = capture(["polytope", y, "--d", d, "--format", "csv"])
        assert code == 0
        assert out.splitlines()[0] == "x0,x1,x2"

    def test_json_contains_b(self, tmp_path, capture):
        y = write(tmp_path, "y.json", [4, -2, 2])
        d = write(tmp_path, "d.json", [4, 2, 1])
        code, out, _ = capture(["polytope", y, "--d", d])
        data = json.loads(out)["data"]
        assert data["b"] == [5, 3, 2, 5, 6, 4, 4, -4]


class TestCurve:
    def test_elbows(self, tmp_path, capture):
        y = write(tmp_path, "y.json", [1, 2])
        d = write(tmp_path, "d.json", [2, 1])
        code, out, _ = capture(["curve", y, "--d", d])
        data = json.loads(out)["data"]
        assert data["elbows_c"] == [0, 1, 3]
        assert data["elbows_f"] == [0, 2, 3]

    def test_csv_format(self, tmp_path, capture):
        y = write(tmp_path, "y.json", [1, 2])
        d = write(tmp_path, "d.json", [2, 1])
        code, out, _ = capture(["--format", "csv", "curve", y, "--d", d])
        assert out.splitlines() == ["c,f", "0.0,0.0", "1.0,2.0", "3.0,3.0"]


class TestBath:
    def test_gibbs(self, tmp_path, capture):
        e = write(tmp_path, "e.json", [0.0, 0.25, 4.25])
        code, out, _ = capture(["bath", "--gibbs", e, "--temperature", "1.0"])
        assert code == 0
        data = json.loads(out)["data"]
        assert np.allclose(data["d"], [0.5577, 0.4343, 0.0080], atol=5e-5)
        b0 = np.array(data["b0"])
        assert np.allclose(b0 @ np.array(data["d"]), 0.0, atol=1e-12)

    def test_thermal_from_file(self, tmp_path, capture):
        d = write(tmp_path, "d.json", [0.9, 0.1])
        code, out, _ = capture(["bath", "--thermal", d])
        data = json.loads(out)["data"]
        assert np.isclose(data["a"][0], np.sqrt(0.9))
        assert np.isclose(data["b"][0], np.sqrt(0.1))

    def test_zero_temperature(self, capture):
        code, out, _ = capture(["bath", "--zero-temp", "3"])
        b0 = np.array(json.loads(out)["data"]["b0"])
        assert np.allclose(b0, [[0, -2, 0], [0, 2, -2], [0, 0, 2]], atol=1e-12)

    def test_equidistant(self, capture):
        code, out, _ = capture(["bath", "--equidistant", "0.5", "3"])
        data = json.loads(out)["data"]
        assert np.allclose(data["d"], [4 / 7, 2 / 7, 1 / 7])

    def test_missing_mode(self, capture):
        code, _, err = capture(["bath"])
        assert code == 2


class TestSimulateSynthesize:
    def test_synthesize_two_level(self, tmp_path, capture):
        target = write(tmp_path, "t.json", [0.75, 0.25])
        code, out, _ = capture(["synthesize", "--zero-temp", "2", "--target", target])
        assert code == 0
        sched = json.loads(out)["data"]
        assert len(sched["segments"]) == 1
        assert sched["segments"][0]["perm"] == [1, 0]
        assert abs(sched["segments"][0]["duration"] - np.log(4)) <= 1e-9

    def test_simulate_trajectory_header(self, tmp_path, capture):
        x0 = write(tmp_path, "x0.json", [0.5, 0.5])
        sched = write(tmp_path, "s.json",
                      {"segments": [{"perm": [1, 0], "duration": 0.5}]})
        code, out, _ = capture(["simulate", "--zero-temp", "2", "--x0", x0,
                                "--schedule", sched, "--dt", "0.25"])
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "t,x0,x1"
        last = [float(v) for v in lines[-1].split(",")]
        assert np.isclose(last[0], 0.5)
        assert np.isclose(last[1] + last[2], 1.0)

    def test_simulate_with_explicit_rate_matrix(self, tmp_path, capture):
        b0 = write(tmp_path, "b0.json", [[0.0, -2.0, 0.0], [0.0, 2.0, -2.0],
                                         [0.0, 0.0, 2.0]])
        x0 = write(tmp_path, "x0.json", [0.0, 0.0, 1.0])
        sched = write(tmp_path, "s.json", {"segments": [{"perm": [0, 1, 2],
                                                          "duration": 40.0}]})
        code, out, _ = capture(["simulate", "--b0", b0, "--x0", x0,
                                "--schedule", sched, "--dt", "20.0"])
        assert code == 0
        last = [float(v) for v in out.strip().splitlines()[-1].split(",")]
        assert np.allclose(last[1:], [1.0, 0.0, 0.0], atol=1e-8)

    def test_roundtrip_csv_floats(self, tmp_path, capture):
        x0 = write(tmp_path, "x0.json", [1 / 3, 1 / 3, 1 / 3])
        sched = write(tmp_path, "s.json",
                      {"segments": [{"perm": [2, 0, 1], "duration": 0.7}]})
        code, out, _ = capture(["simulate", "--zero-temp", "3", "--x0", x0,
                                "--schedule", sched, "--dt", "0.2"])
        lines = out.strip().splitlines()[1:]
        for line in lines:
            for tok in line.split(","):
                assert repr(float(tok)) == tok  # shortest round-trip formatting


class TestBound:
    def test_equidistant_envelope(self, tmp_path, capture):
        x0 = write(tmp_path, "x0.json", [0.2, 0.3, 0.5])
        code, out, _ = capture(["bound", "--x0", x0, "--alpha", "0.5",
                                "--samples", "20", "--depth", "3"])
        assert code == 0
        data = json.loads(out)["data"]
        assert data["tangential_ok"] is True
        assert data["sampled_violations"] == 0

    def test_non_equidistant_rejected(self, tmp_path, capture):
        x0 = write(tmp_path, "x0.json", [0.2, 0.3, 0.5])
        d = write(tmp_path, "d.json", [0.5577, 0.4343, 0.0080])
        code, _, err = capture(["bound", "--x0", x0, "--d", d])
        assert code == 2


class TestChannel:
    def test_diagonal_pair(self, tmp_path, capture):
        a = write(tmp_path, "a.json", [[0.6, 0.0], [0.0, 0.4]])
        b = write(tmp_path, "b.json", [[1.0, 0.0], [0.0, 0.0]])
        code, out, _ = capture(["channel", "--a", a, "--b", b, "--kraus"])
        assert code == 0
        data = json.loads(out)["data"]
        assert data["cp"] and data["tp"]
        assert data["residual_trace_norm"] <= 1e-8
        assert len(data["kraus"]) <= 4

    def test_complex_entries(self, tmp_path, capture):
        a = write(tmp_path, "a.json",
                  [[[0.5, 0.0], [0.0, -0.1]], [[0.0, 0.1], [0.5, 0.0]]])
        b = write(tmp_path, "b.json",
                  [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.0, 0.0]]])
        code, out, _ = capture(["channel", "--a", a, "--b", b])
        assert code == 0


class TestCnr:
    def test_csv_output_deterministic(self, tmp_path, capture):
        c = write(tmp_path, "c.json", [[1.0, 0.0], [0.0, -1.0]])
        t = write(tmp_path, "t.json", [[0.5, 0.0], [0.0, 0.25]])
        code, out1, _ = capture(["--seed", "7", "cnr", "--c", c, "--t", t,
                                 "--count", "50"])
        assert code == 0
        assert out1.splitlines()[0] == "re,im"
        _, out2, _ = capture(["--seed", "7", "cnr", "--c", c, "--t", t,
                              "--count", "50"])
        assert out1 == out2


class TestReportRoundtrip:
    def test_json_report_reparses(self, tmp_path, capture):
        x = write(tmp_path, "x.json", [0.5, 0.5])
        y = write(tmp_path, "y.json", [0.9, 0.1])
        code, out, _ = capture(["check", x, y])
        report = json.loads(out)
        assert report["command"] == "check"
        assert json.loads(json.dumps(report)) == report

    def test_out_flag_writes_file(self, tmp_path, capture):
        x = write(tmp_path, "x.json", [0.5, 0.5])
        y = write(tmp_path, "y.json", [0.9, 0.1])
        out_file = tmp_path / "report.json"
        code, out, _ = capture(["--out", str(out_file), "check", x, y])
        assert code == 0
        assert out == ""
        assert json.loads(out_file.read_text())["verdict"] is True

    def test_env_tolerance_override(self, tmp_path, capture, monkeypatch):
        monkeypatch.setenv("DMAJOR_TOL", "0.5")
        x = write(tmp_path, "x.json", [0.62, 0.38])
        y = write(tmp_path, "y.json", [0.6, 0.4])
        code, _, _ = capture(["check", x, y])
        assert code == 0  # partial-sum excess forgiven at the loose tolerance
