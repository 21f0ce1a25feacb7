import json

import numpy as np
import pytest

from tvsampling import (
    GftBasis,
    GraphSpec,
    ParseError,
    bandwidth_profile,
    extract_samples,
    make_plan,
    read_plan,
    sampling_rate_of,
    write_plan,
)
from tvsampling import io
from tvsampling.cli import main
from tvsampling.experiment import synthesize
from tvsampling.graph import Grid

G = Grid(1 / 256, 256)


@pytest.fixture
def plan(rng):
    sig, b = synthesize([64, 40, 8, 0], G, rng)
    return sig, make_plan(b, bandwidth_profile(sig, b))


class TestFiles:
    def test_plan_round_trip(self, tmp_path, plan):
        _, p = plan
        write_plan(tmp_path / "p.json", p)
        back = read_plan(tmp_path / "p.json")
        assert back.chain == p.chain and back.sequence == p.sequence
        assert back.schedule.entries == p.schedule.entries
        np.testing.assert_array_equal(back.basis.vectors, p.basis.vectors)
        assert io.plan_to_json(back) == io.plan_to_json(p)

    def test_plan_rejects_other_json(self, tmp_path):
        (tmp_path / "x.json").write_text('{"format": "other"}')
        with pytest.raises(ParseError):
            read_plan(tmp_path / "x.json")
        (tmp_path / "y.json").write_text("{not json")
        with pytest.raises(ParseError, match="line 1"):
            read_plan(tmp_path / "y.json")

    def test_basis_and_graph_files(self, tmp_path, rng):
        a = rng.standard_normal((3, 3))
        g = GraphSpec(a + a.T)
        io.write_graph(tmp_path / "g.txt", g)
        assert (tmp_path / "g.txt").read_text().startswith("n=3\n")
        np.testing.assert_array_equal(io.read_graph(tmp_path / "g.txt").adjacency, g.adjacency)
        b = GftBasis.from_vectors(np.linalg.qr(a)[0], [3.0, 2.0, 1.0])
        io.write_basis(tmp_path / "b.txt", b)
        back = io.read_basis(tmp_path / "b.txt")
        np.testing.assert_array_equal(back.vectors, b.vectors)
        np.testing.assert_array_equal(back.eigenvalues, b.eigenvalues)

    def test_bad_matrix_file(self, tmp_path):
        (tmp_path / "g.txt").write_text("n=2\n1,0\n0\n")
        with pytest.raises(ParseError, match="line 3"):
            io.read_graph(tmp_path / "g.txt")
        (tmp_path / "h.txt").write_text("1,0\n0,1\n")
        with pytest.raises(ParseError, match="line 1"):
            io.read_graph(tmp_path / "h.txt")

    def test_samples_round_trip(self, tmp_path, plan):
        sig, p = plan
        s = extract_samples(sig, p.schedule)
        io.write_samples_csv(tmp_path / "s.csv", s)
        (back,) = io.read_samples_csv(tmp_path / "s.csv", [p.schedule], G)
        for a, b in zip(s.streams, back.streams):
            np.testing.assert_array_equal(a.values, b.values)
            assert (a.stage, a.vertex, a.stride) == (b.stage, b.vertex, b.stride)

    def test_samples_wrong_instants(self, tmp_path, plan):
        sig, p = plan
        io.write_samples_csv(tmp_path / "s.csv", extract_samples(sig, p.schedule))
        with pytest.raises(ParseError):
            io.read_samples_csv(tmp_path / "s.csv", [p.schedule], Grid(1 / 512, 256))


def cli(*args):
    return main([str(a) for a in args])


class TestCli:
    def test_equal_pipeline(self, tmp_path, capsys):
        d = tmp_path
        assert cli("synth", "--n-samples", 256, "--grid-rate", 256, "--bandwidth", 64, "-o", d / "s.csv") == 0
        assert cli("plan", "--signal", d / "s.csv", "-o", d / "p.json") == 0
        out = capsys.readouterr().out
        assert "space: equal" in out and "total" in out
        assert cli("sample", "--signal", d / "s.csv", "--plan", d / "p.json", "-o", d / "sm.csv") == 0
        assert cli("reconstruct", "--samples", d / "sm.csv", "--plan", d / "p.json", "-o", d / "r.csv",
                   "--truth", d / "s.csv", "--summary", d / "sum.json") == 0
        summary = json.loads((d / "sum.json").read_text())
        assert summary["nrmse"] <= 1e-8 and summary["passed"]
        plan = read_plan(d / "p.json")
        assert summary["total_rate"] == pytest.approx(sampling_rate_of(plan.schedule))
        assert summary["total_rate"] < 0.5 * 4 * 2 * 64
        assert len(summary["stage_residual_norms"][0]) == 3
        assert (d / "r.csv").read_text().startswith("vertex,t,value\n")

    def test_general_pipeline(self, tmp_path):
        d = tmp_path
        assert cli("synth", "--n-samples", 256, "--grid-rate", 256, "--vertex-bw", "50,20,50,50",
                   "-o", d / "g.csv") == 0
        assert cli("plan", "--signal", d / "g.csv", "--edge", "free", "-o", d / "p.json") == 0
        assert json.loads((d / "p.json").read_text())["kind"] == "general"
        assert cli("sample", "--signal", d / "g.csv", "--plan", d / "p.json", "-o", d / "sm.csv") == 0
        assert cli("reconstruct", "--samples", d / "sm.csv", "--plan", d / "p.json", "-o", d / "r.csv",
                   "--truth", d / "g.csv", "--tol", 1e-7, "--summary", d / "sum.json") == 0
        summary = json.loads((d / "sum.json").read_text())
        assert summary["min_rate"] <= 340.0 and summary["nrmse"] <= 1e-7

    def test_supplied_basis(self, tmp_path):
        d = tmp_path
        cli("synth", "--n-samples", 256, "--grid-rate", 256, "--bandwidth", 40, "-o", d / "s.csv",
            "--basis-out", d / "b.txt")
        assert cli("plan", "--signal", d / "s.csv", "--basis", d / "b.txt", "-o", d / "p.json") == 0

    def test_tolerance_failure_exit(self, tmp_path):
        d = tmp_path
        cli("synth", "--n-samples", 256, "--grid-rate", 256, "--bandwidth", 64, "-o", d / "s.csv")
        cli("plan", "--signal", d / "s.csv", "-o", d / "p.json")
        cli("sample", "--signal", d / "s.csv", "--plan", d / "p.json", "-o", d / "sm.csv")
        cli("synth", "--n-samples", 256, "--grid-rate", 256, "--bandwidth", 64, "--seed", 9, "-o", d / "t.csv")
        assert cli("reconstruct", "--samples", d / "sm.csv", "--plan", d / "p.json", "-o", d / "r.csv",
                   "--truth", d / "t.csv") == 1

    def test_bad_input_exit(self, tmp_path, capsys):
        (tmp_path / "bad.csv").write_text("t,v2\n0,1\n")
        assert cli("plan", "--signal", tmp_path / "bad.csv") == 2
        assert "error:" in capsys.readouterr().err

    def test_verify(self, tmp_path):
        assert cli("verify", "--instances", 10, "-o", tmp_path / "rep.txt") == 0
        text = (tmp_path / "rep.txt").read_text()
        assert text.strip().endswith("overall: PASS")
        assert text.count("PASS") == 7

    def test_experiment_with_config(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({
            "n_samples": 256, "grid_rate": 256, "seed": 5,
            "experiment": {"trials": 2, "sweep": [30, 90], "output_dir": str(tmp_path / "out")},
        }))
        assert cli("--config", cfg, "experiment") == 0
        manifest = json.loads((tmp_path / "out" / "manifest.json").read_text())
        assert manifest["config"]["trials"] == 2 and manifest["config"]["seed"] == 5
        assert manifest["passed"]

    def test_flag_overrides_config(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"n_samples": 256, "grid_rate": 256, "trials": 2, "sweep": "30",
                                   "output_dir": str(tmp_path / "out")}))
        assert cli("--config", cfg, "experiment", "--trials", 1) == 0
        manifest = json.loads((tmp_path / "out" / "manifest.json").read_text())
        assert manifest["config"]["trials"] == 1 and manifest["sweep"] == [30.0]
