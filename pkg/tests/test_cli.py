"""Command-line interface: exit codes, output formats, error envelopes."""
import json
import subprocess
import sys

import pytest


def run_cli(*args: str) -> subprocess.CompletedProcess:
    return subprocess.run(
        [sys.executable, "-m", "netspread", *args],
        capture_output=True, text=True, timeout=300,
    )


def stderr_error(proc: subprocess.CompletedProcess) -> dict:
    payload = json.loads(proc.stderr)
    assert "error" in payload and "type" in payload
    return payload


class TestTopLevel:
    def test_no_arguments_prints_usage(self):
        proc = run_cli()
        assert proc.returncode == 2
        assert "usage:" in proc.stderr

    def test_unknown_subcommand_rejected(self):
        proc = run_cli("frobnicate")
        assert proc.returncode == 2


class TestGenerate:
    def test_writes_edge_list_and_reports_counts(self, tmp_path):
        out = tmp_path / "g.edges"
        proc = run_cli("generate", "--family", "powerlaw", "--n", "50",
                       "--m", "2", "--seed", "7", "--output", str(out))
        assert proc.returncode == 0
        assert proc.stdout == f"nodes=50 edges=97 output={out}\n"
        from netspread.graphs import load_edge_list
        g = load_edge_list(out)
        assert g.n == 50 and g.num_edges == 97

    def test_two_invocations_are_identical(self, tmp_path):
        a, b = tmp_path / "a.edges", tmp_path / "b.edges"
        args = ("generate", "--family", "binomial", "--n", "60", "--p", "0.1",
                "--seed", "3")
        pa = run_cli(*args, "--output", str(a))
        pb = run_cli(*args, "--output", str(b))
        assert pa.returncode == pb.returncode == 0
        assert a.read_bytes() == b.read_bytes()

    def test_graph_flag_is_a_validation_error(self, tmp_path):
        proc = run_cli("generate", "--graph", "x.edges",
                       "--output", str(tmp_path / "y.edges"))
        assert proc.returncode == 2
        payload = stderr_error(proc)
        assert payload["type"] == "ValueError"

    def test_bad_family_parameter(self, tmp_path):
        proc = run_cli("generate", "--family", "binomial", "--n", "10",
                       "--p", "1.5", "--output", str(tmp_path / "g.edges"))
        assert proc.returncode == 2
        assert stderr_error(proc)["type"] == "ValueError"


class TestOde:
    def test_endemic_run_writes_csv(self, tmp_path):
        out = tmp_path / "traj.csv"
        proc = run_cli("ode", "--model", "sis", "--beta", "1.0",
                       "--gamma", "0.1", "--i0", "0.01", "--dt", "0.05",
                       "--t-end", "5", "--output", str(out))
        assert proc.returncode == 0
        assert proc.stdout.startswith("model=sis t_end=5 ")
        lines = out.read_text().splitlines()
        assert lines[0] == "t,s,i,r"
        assert len(lines) == 102  # header + 101 sample points

    def test_unknown_model_rejected_by_parser(self, tmp_path):
        proc = run_cli("ode", "--model", "seir", "--beta", "1", "--gamma", "1",
                       "--output", str(tmp_path / "x.csv"))
        assert proc.returncode == 2
        assert "invalid choice" in proc.stderr

    def test_instability_is_a_runtime_error(self, tmp_path):
        proc = run_cli("ode", "--model", "sis", "--beta", "9", "--gamma", "0",
                       "--i0", "0.5", "--dt", "5", "--t-end", "50",
                       "--output", str(tmp_path / "x.csv"))
        assert proc.returncode == 1
        payload = stderr_error(proc)
        assert payload["type"] == "IntegrationInstabilityError"
        assert "blew up" in payload["error"]


class TestMeanfield:
    def test_lattice_run(self, tmp_path):
        out = tmp_path / "mf.csv"
        proc = run_cli("meanfield", "--model", "sis", "--family", "lattice4",
                       "--rows", "8", "--cols", "8", "--beta", "0.4",
                       "--delta", "0.65", "--gamma", "0.3", "--p0", "0.1",
                       "--steps", "2000", "--output", str(out))
        assert proc.returncode == 0
        assert "converged=True" in proc.stdout
        assert "violations=0" in proc.stdout
        lines = out.read_text().splitlines()
        assert lines[0] == "t,mean_p,mean_q,mean_w,dead,carriers"

    def test_negative_coefficient_regime_exits_one(self, tmp_path):
        proc = run_cli("meanfield", "--model", "sis", "--family", "lattice4",
                       "--rows", "3", "--cols", "3", "--beta", "1.0",
                       "--delta", "0.9", "--gamma", "0.0", "--p0", "0.99",
                       "--output", str(tmp_path / "mf.csv"))
        assert proc.returncode == 1
        payload = stderr_error(proc)
        assert payload["type"] == "MeanFieldBoundsError"
        assert "not clamped" in payload["error"]

    def test_allow_flag_downgrades_to_reporting(self, tmp_path):
        out = tmp_path / "mf.csv"
        proc = run_cli("meanfield", "--model", "sis", "--family", "lattice4",
                       "--rows", "3", "--cols", "3", "--beta", "1.0",
                       "--delta", "0.9", "--gamma", "0.0", "--p0", "0.99",
                       "--steps", "20", "--allow-negative-coefficients",
                       "--output", str(out))
        assert proc.returncode == 0
        violations = int(proc.stdout.split("violations=")[1].split()[0])
        assert violations > 0
        assert out.is_file()

    def test_warned_retention_overflow_is_validation(self, tmp_path):
        proc = run_cli("meanfield", "--model", "sirs", "--family", "lattice4",
                       "--rows", "3", "--cols", "3", "--beta", "0.3",
                       "--delta", "0.6", "--gamma", "0.6", "--nu", "1.0",
                       "--chi", "1.0", "--p0", "0.1",
                       "--output", str(tmp_path / "mf.csv"))
        assert proc.returncode == 2
        payload = stderr_error(proc)
        assert payload["type"] == "ParamRegimeError"
        assert "chi + delta" in payload["error"]


class TestMc:
    def test_master_seed_reproduces_bytes(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        args = ("mc", "--family", "binomial", "--n", "50", "--p", "0.1",
                "--seed", "2", "--beta", "0.2", "--delta", "0.2",
                "--gamma", "0.1", "--init", "0.2", "--steps", "30",
                "--runs", "20", "--master-seed", "11")
        pa = run_cli(*args, "--output", str(a))
        pb = run_cli(*args, "--output", str(b))
        assert pa.returncode == pb.returncode == 0
        assert a.read_bytes() == b.read_bytes()
        assert pa.stdout.startswith("runs=20 steps=30 ")
        lines = a.read_text().splitlines()
        assert lines[0] == ("t,frac_noinfo_mean,frac_hasinfo_mean,"
                            "frac_warned_mean,frac_dead_mean,frac_hasinfo_std")
        assert len(lines) == 32

    def test_different_master_seed_changes_output(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        args = ("mc", "--family", "binomial", "--n", "50", "--p", "0.1",
                "--seed", "2", "--beta", "0.2", "--delta", "0.2",
                "--gamma", "0.1", "--init", "0.2", "--steps", "30",
                "--runs", "20")
        run_cli(*args, "--master-seed", "11", "--output", str(a))
        run_cli(*args, "--master-seed", "12", "--output", str(b))
        assert a.read_bytes() != b.read_bytes()


class TestSpectral:
    def test_frozen_subcritical_line(self):
        proc = run_cli("spectral", "--family", "lattice4", "--rows", "25",
                       "--cols", "40", "--beta", "0.4", "--delta", "0.65",
                       "--gamma", "0.3")
        assert proc.returncode == 0
        assert proc.stdout == "s=0.855263157895 fast_extinction=true\n"

    def test_supercritical_line(self):
        proc = run_cli("spectral", "--family", "powerlaw", "--n", "1000",
                       "--m", "2", "--seed", "42", "--beta", "0.4",
                       "--delta", "0.65", "--gamma", "0.3")
        assert proc.returncode == 0
        assert proc.stdout == "s=1.68001194377 fast_extinction=false\n"

    def test_critical_band_line(self):
        proc = run_cli("spectral", "--family", "lattice4", "--rows", "4",
                       "--cols", "4", "--beta", "0.25", "--delta", "0.5",
                       "--gamma", "0.5")
        assert proc.returncode == 0
        assert proc.stdout == "s=1 fast_extinction=critical\n"

    def test_eigenvector_export(self, tmp_path):
        vec = tmp_path / "vec.csv"
        proc = run_cli("spectral", "--family", "lattice4", "--rows", "5",
                       "--cols", "5", "--beta", "0.4", "--delta", "0.65",
                       "--gamma", "0.3", "--eigenvector-csv", str(vec))
        assert proc.returncode == 0
        lines = vec.read_text().splitlines()
        assert lines[0] == "node,value"
        assert len(lines) == 26
        values = [float(line.split(",")[1]) for line in lines[1:]]
        # vertex-transitive graph: dominant eigenvector is uniform
        assert max(values) - min(values) < 1e-8

    def test_missing_edge_list_file(self):
        proc = run_cli("spectral", "--graph", "/nonexistent/g.edges",
                       "--beta", "0.4", "--delta", "0.65", "--gamma", "0.3")
        assert proc.returncode == 2
        assert stderr_error(proc)["type"] == "FileNotFoundError"


class TestIsolate:
    COMMON = ("--beta", "0.4", "--delta", "0.65", "--gamma", "0.3")

    def test_cycle_failure_still_writes_report(self, tmp_path):
        rep = tmp_path / "rep.json"
        proc = run_cli("isolate", "--family", "powerlaw", "--n", "1000",
                       "--m", "2", "--seed", "42", "--strategy", "cycle",
                       *self.COMMON, "--output-graph", str(tmp_path / "a.edges"),
                       "--output-report", str(rep))
        assert proc.returncode == 0
        assert proc.stdout.startswith("strategy=cycle success=false reason=")
        payload = json.loads(rep.read_text())
        assert payload == {
            "strategy": "cycle",
            "success": False,
            "reason": ("stuck at node 538 after visiting 44 of 1000 nodes: "
                       "no unvisited neighbour"),
            "partial_path_length": 44,
        }
        assert not (tmp_path / "a.edges").exists()

    def test_cycle_success_prunes_to_ring(self, tmp_path):
        rep = tmp_path / "rep.json"
        after = tmp_path / "after.edges"
        proc = run_cli("isolate", "--family", "powerlaw", "--n", "12",
                       "--m", "2", "--seed", "0", "--strategy", "cycle",
                       *self.COMMON, "--output-graph", str(after),
                       "--output-report", str(rep))
        assert proc.returncode == 0
        payload = json.loads(rep.read_text())
        assert payload["success"] is True
        assert payload["edges_removed"] == 9
        from netspread.graphs import load_edge_list
        g = load_edge_list(after)
        assert g.num_edges == 12
        assert all(g.degree(i) == 2 for i in range(12))

    def test_lattice_rewiring_crosses_threshold(self, tmp_path):
        rep = tmp_path / "rep.json"
        proc = run_cli("isolate", "--family", "powerlaw", "--n", "100",
                       "--m", "2", "--seed", "4", "--strategy", "lattice",
                       *self.COMMON, "--output-graph", str(tmp_path / "l.edges"),
                       "--output-report", str(rep))
        assert proc.returncode == 0
        assert "threshold_crossed=True" in proc.stdout
        payload = json.loads(rep.read_text())
        assert payload["lambda1_after"] == pytest.approx(4.0, abs=1e-8)
        assert payload["score_before"] == pytest.approx(1.3000922248814233,
                                                        abs=1e-9)
        assert payload["score_after"] == pytest.approx(0.855263157894737,
                                                       abs=1e-9)
        assert payload["threshold_crossed"] is True

    def test_greedy_budget(self, tmp_path):
        rep = tmp_path / "rep.json"
        proc = run_cli("isolate", "--family", "powerlaw", "--n", "100",
                       "--m", "2", "--seed", "4", "--strategy", "greedy",
                       "--k", "5", *self.COMMON,
                       "--output-graph", str(tmp_path / "g.edges"),
                       "--output-report", str(rep))
        assert proc.returncode == 0
        payload = json.loads(rep.read_text())
        assert payload["edges_removed"] == 5
        assert len(payload["lambda1_steps"]) == 6


class TestSweepAndFigures:
    def test_sweep_runs_config_file(self, tmp_path):
        config = {
            "model": "sis_meanfield",
            "params": {"beta": 0.2, "delta": 0.3, "gamma": 0.1, "r": 1.0,
                       "p0": 0.1},
            "run": {"steps": 50},
            "graph": {"family": "binomial", "n": 30, "p": 0.2, "seed": 4},
            "sweep": {"parameter": "beta", "base": 0.2, "increment": 0.1,
                      "count": 2},
            "seed": 5,
        }
        cfg_path = tmp_path / "config.json"
        cfg_path.write_text(json.dumps(config), encoding="utf-8")
        out_dir = tmp_path / "out"
        proc = run_cli("sweep", "--config", str(cfg_path),
                       "--output-dir", str(out_dir))
        assert proc.returncode == 0
        assert proc.stdout.startswith("points=2 errors=0 manifest=")
        assert (out_dir / "manifest.json").is_file()

    def test_sweep_config_error_names_field(self, tmp_path):
        cfg_path = tmp_path / "config.json"
        cfg_path.write_text(json.dumps({"model": "bogus", "params": {}}),
                            encoding="utf-8")
        proc = run_cli("sweep", "--config", str(cfg_path),
                       "--output-dir", str(tmp_path / "out"))
        assert proc.returncode == 2
        payload = stderr_error(proc)
        assert payload["type"] == "ConfigError"
        assert payload["field"] == "model"

    def test_sweep_missing_config_file(self, tmp_path):
        proc = run_cli("sweep", "--config", str(tmp_path / "nope.json"),
                       "--output-dir", str(tmp_path / "out"))
        assert proc.returncode == 2
        assert stderr_error(proc)["type"] == "FileNotFoundError"

    def test_reproduce_figures_end_to_end(self, tmp_path):
        out_dir = tmp_path / "figs"
        proc = run_cli("reproduce-figures", "--output-dir", str(out_dir))
        assert proc.returncode == 0
        lines = proc.stdout.splitlines()
        assert len(lines) == 9
        assert lines[-1] == f"summary={out_dir}/summary.csv"
        assert "sis_powerlaw_death_sweep: points=5 errors=5" in lines
        assert "sis_lattice_death_sweep: points=5 errors=0" in lines
        summary = (out_dir / "summary.csv").read_text().splitlines()
        assert len(summary) == 33
