import json
from pathlib import Path

import pytest

from shelly.cli import main
from shelly.instances import reference_problem
from shelly.io import problem_from_json, problem_to_json

DATA = Path(__file__).resolve().parents[1] / "demos" / "data"
REF = str(DATA / "ref.json")
TRIANGLE = str(DATA / "triangle.txt")


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--no-meta")
    return code, json.loads(out), out


class TestBounds:
    def test_theorem1_value(self, capsys):
        code, data, _ = run_json(capsys, "bounds", "--h", "4", "--eps", "0.1", "--delta", "0.01")
        assert code == 0 and data["n_theorem1"] == 237

    def test_finite_comparison(self, capsys):
        code, data, _ = run_json(capsys, "bounds", "--h", "4", "--eps", "0.2", "--delta", "0.1",
                                 "--card", "10201")
        assert data["n_theorem1"] == 78
        assert data["n_la_finite"] == 58
        assert data["theorem1_looser"] is False  # 4 < ln 10201 ~ 9.23
        assert data["la_finite_smaller"] is True

    def test_lipschitz(self, capsys):
        _, data, _ = run_json(capsys, "bounds", "--h", "2", "--eps", "0.5", "--delta", "0.5",
                              "--lipschitz", "1,1,1,4")
        assert data["n_la_lipschitz"] is not None

    def test_bad_eps(self, capsys):
        code, _, err = run(capsys, "bounds", "--h", "4", "--eps", "2", "--delta", "0.1")
        assert code == 1 and "0 < epsilon <= 1" in err

    def test_missing_flag(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["bounds", "--eps", "0.1"])
        assert exc.value.code == 1

    def test_unknown_flag(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["bounds", "--h", "2", "--eps", "0.1", "--delta", "0.1", "--bogus"])
        assert exc.value.code == 1

    def test_meta_block(self, capsys):
        _, out, _ = run(capsys, "bounds", "--h", "2", "--eps", "0.5", "--delta", "0.5")
        meta = json.loads(out)["meta"]
        assert meta["verb"] == "bounds" and "timestamp" in meta


class TestColor:
    def test_triangle_two(self, capsys):
        code, out, _ = run(capsys, "color", "--graph", TRIANGLE, "--k", "2")
        assert code == 2 and out.strip() == "not 2-colorable"

    def test_triangle_three(self, capsys):
        code, out, _ = run(capsys, "color", "--graph", TRIANGLE, "--k", "3")
        colors = [int(c) for c in out.split()]
        assert code == 0 and sorted(colors) == [0, 1, 2]

    def test_json(self, capsys, tmp_path):
        graph = tmp_path / "path.txt"
        graph.write_text("0 1\n1 2\n")
        code, data, _ = run_json(capsys, "color", "--graph", str(graph), "--k", "2", "--json",
                                 "--vertices", "4")
        assert code == 0 and data["vertices"] == 4 and data["colorable"]
        c = data["coloring"]
        assert c[0] != c[1] and c[1] != c[2]

    def test_bad_edge_list(self, capsys, tmp_path):
        graph = tmp_path / "bad.txt"
        graph.write_text("0 1 2\n")
        code, _, _ = run(capsys, "color", "--graph", str(graph), "--k", "2")
        assert code == 1


class TestWitness:
    def test_doignon(self, capsys):
        code, data, _ = run_json(capsys, "witness", "--doignon")
        assert code == 0 and data["witness"] is True and data["certifies_helly_at_least"] == 4

    def test_from_file(self, capsys, tmp_path):
        # x <= 0 and x >= 1 are disjoint and each nonempty: certifies h(Z) >= 2
        spec = {"domain": {"kind": "integers", "dimension": 1},
                "family": [{"constraints": [{"a": [1.0], "b": 0.0}]},
                           {"constraints": [{"a": [-1.0], "b": -1.0}]}],
                "box": {"lower": [-3], "upper": [3]}}
        path = tmp_path / "w.json"
        path.write_text(json.dumps(spec))
        _, data, _ = run_json(capsys, "witness", "--input", str(path))
        assert data["witness"] is True and data["certifies_helly_at_least"] == 2
        spec["family"][1]["constraints"][0]["b"] = 0.0  # now both contain 0
        path.write_text(json.dumps(spec))
        _, data, _ = run_json(capsys, "witness", "--input", str(path))
        assert data["witness"] is False and data["certifies_helly_at_least"] is None


class TestSolveSub:
    def _write(self, tmp_path, constraints):
        path = tmp_path / "sub.json"
        path.write_text(json.dumps({
            "objective": [1.0, 1.0], "constraints": constraints,
            "K": {"box": {"lower": [-5, -5], "upper": [5, 5]}},
            "domain": {"kind": "integers", "dimension": 2}}))
        return str(path)

    def test_optimal(self, capsys, tmp_path):
        path = self._write(tmp_path, [{"a": [-2.0, -2.0], "b": 3.0}])
        code, data, _ = run_json(capsys, "solve-sub", "--input", path)
        assert code == 0 and data["value"] == -1.0

    def test_infeasible(self, capsys, tmp_path):
        path = self._write(tmp_path, [{"a": [1.0, 0.0], "b": -9.0}])
        code, data, _ = run_json(capsys, "solve-sub", "--input", path)
        assert code == 2 and data["status"] == "infeasible"

    def test_capacity(self, capsys, tmp_path, monkeypatch):
        monkeypatch.setenv("S_SCENARIO_CAPACITY", "10")
        path = self._write(tmp_path, [])
        code, _, err = run(capsys, "solve-sub", "--input", path)
        assert code == 3 and err


class TestSolveAndExperiment:
    def test_solve_is_byte_stable(self, capsys):
        args = ("solve", "--problem", REF, "--engine", "clarkson", "--seed", "5", "--witness")
        code, data, first = run_json(capsys, *args)
        _, _, second = run_json(capsys, *args)
        assert code == 0 and first == second
        assert data["N"] == 78 and len(data["witness"]) <= 3
        assert data["violation"] <= 0.2

    def test_engines_agree(self, capsys):
        _, a, _ = run_json(capsys, "solve", "--problem", REF, "--seed", "2")
        _, b, _ = run_json(capsys, "solve", "--problem", REF, "--seed", "2", "--engine", "clarkson")
        assert a["solution"] == b["solution"]

    def test_default_seed_is_zero(self, capsys):
        _, a, _ = run_json(capsys, "solve", "--problem", REF)
        _, b, _ = run_json(capsys, "solve", "--problem", REF, "--seed", "0")
        assert a == b

    def test_experiment_report_and_csv(self, capsys, tmp_path):
        out = tmp_path / "report.json"
        csv_path = tmp_path / "trials.csv"
        args = ("experiment", "--problem", REF, "--trials", "10", "--seed", "7", "--no-meta")
        assert main([*args, "--out", str(out), "--csv", str(csv_path)]) == 0
        first = out.read_bytes()
        assert main([*args, "--out", str(out)]) == 0
        assert out.read_bytes() == first
        report = json.loads(first)
        assert report["trials"] == 10 and report["empirical_failure_rate"] <= 0.1

        code, printed, _ = run(capsys, "report", "--input", str(out), "--csv")
        assert code == 0 and printed == csv_path.read_text()
        assert printed.splitlines()[0] == "trial,N,status,value,violation,oracle_calls"

        _, again, _ = run_json(capsys, "report", "--input", str(out))
        assert again == report

    def test_missing_problem_file(self, capsys, tmp_path):
        code, _, _ = run(capsys, "solve", "--problem", str(tmp_path / "nope.json"))
        assert code == 1

    def test_infeasible_headline_run(self, capsys, tmp_path):
        data = json.loads(Path(REF).read_text())
        data["K"]["constraints"] = [{"a": [1.0, 0.0], "b": -60.0}]
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(data))
        code, out, _ = run(capsys, "solve", "--problem", str(path), "--no-meta")
        assert code == 2 and json.loads(out)["solution"]["status"] == "infeasible"


def test_reference_file_matches_builder():
    data = json.loads(Path(REF).read_text())
    assert problem_to_json(problem_from_json(data)) == problem_to_json(reference_problem())


def test_module_entry_point():
    import subprocess
    import sys
    proc = subprocess.run([sys.executable, "-m", "shelly", "bounds", "--h", "4", "--eps", "0.2",
                           "--delta", "0.1", "--no-meta"], capture_output=True, text=True)
    assert proc.returncode == 0 and json.loads(proc.stdout)["n_theorem1"] == 78
