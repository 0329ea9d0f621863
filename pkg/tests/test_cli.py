"""End-to-end command line checks: artifacts, exit codes, determinism.

Commands run in-process through main(argv); one subprocess smoke covers the
module entry point.  Exit code contract: 0 success, 1 failed search or
verification, 2 usage errors and unreadable inputs.
"""

import json
import subprocess
import sys

import pytest

from diraclab.cli import main
from diraclab.hypercore import read_khg
from diraclab.lab import parse_table
from diraclab.matchpower import find_perfect_matching, read_matching, verify_matching


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


@pytest.fixture
def k12(tmp_path, capsys):
    path = tmp_path / "k12.khg"
    assert run(capsys, "--out", str(path), "gen", "complete", "--n", "12", "--k", "3")[0] == 0
    return str(path)


class TestGen:
    def test_random_is_seed_deterministic(self, tmp_path, capsys):
        a, b, c = (tmp_path / x for x in ("a.khg", "b.khg", "c.khg"))
        for path, seed in [(a, "5"), (b, "5"), (c, "6")]:
            code, _, _ = run(
                capsys, "--seed", seed, "--out", str(path),
                "gen", "random", "--n", "10", "--k", "3", "--p", "0.5",
            )
            assert code == 0
        assert a.read_bytes() == b.read_bytes()
        assert a.read_bytes() != c.read_bytes()

    def test_barriers_and_complete(self, tmp_path, capsys):
        out = tmp_path / "g.khg"
        run(capsys, "--out", str(out), "gen", "space", "--n", "9", "--k", "3", "--d", "1")
        G = read_khg(out)
        assert (G.n, G.k) == (9, 3)
        assert find_perfect_matching(G).status == "none"
        run(capsys, "--out", str(out), "gen", "parity", "--n", "12", "--k", "3", "--d", "1")
        assert find_perfect_matching(read_khg(out)).status == "none"

    def test_stdout_default(self, capsys):
        code, out, _ = run(capsys, "gen", "complete", "--n", "6", "--k", "3")
        assert code == 0
        assert out.splitlines()[0].startswith("khg")

    def test_missing_argument_is_usage_error(self, capsys):
        assert run(capsys, "gen", "random", "--n", "6")[0] == 2

    def test_bad_probability_is_usage_error(self, capsys):
        code, _, err = run(capsys, "gen", "random", "--n", "6", "--k", "3", "--p", "1.5")
        assert code == 2
        assert "error" in err


class TestPm:
    def test_writes_default_sidecar(self, k12, capsys):
        code, out, _ = run(capsys, "pm", "--in", k12)
        assert code == 0
        m = read_matching(k12 + ".matching")
        ok, _ = verify_matching(read_khg(k12), m, require_perfect=True)
        assert ok

    def test_explicit_out(self, k12, tmp_path, capsys):
        target = tmp_path / "m.txt"
        assert run(capsys, "--out", str(target), "pm", "--in", k12)[0] == 0
        assert target.exists()

    def test_pm_free_graph_exits_one(self, tmp_path, capsys):
        barrier = tmp_path / "b.khg"
        run(capsys, "--out", str(barrier), "gen", "space", "--n", "9", "--k", "3")
        code, _, err = run(capsys, "pm", "--in", str(barrier))
        assert code == 1
        assert "no perfect matching" in err

    def test_missing_file_is_usage_error(self, capsys):
        assert run(capsys, "pm", "--in", "/nonexistent/g.khg")[0] == 2


class TestVerify:
    def test_matching_ok_and_corrupted(self, k12, tmp_path, capsys):
        run(capsys, "pm", "--in", k12)
        good = k12 + ".matching"
        assert run(capsys, "verify", "--matching", good, "--in", k12, "--perfect")[0] == 0
        bad = tmp_path / "bad.matching"
        bad.write_text(open(good).read().replace("0 1 2", "0 1 3"))
        code, _, err = run(capsys, "verify", "--matching", str(bad), "--in", k12)
        assert code == 1
        assert "rejected" in err

    def test_partial_matching_needs_perfect_flag(self, k12, tmp_path, capsys):
        run(capsys, "pm", "--in", k12)
        lines = open(k12 + ".matching").read().strip().splitlines()
        partial = tmp_path / "partial.matching"
        partial.write_text("\n".join(lines[:-1]) + "\n")
        assert run(capsys, "verify", "--matching", str(partial), "--in", k12)[0] == 0
        assert run(capsys, "verify", "--matching", str(partial), "--in", k12, "--perfect")[0] == 1

    def test_matching_without_graph_is_usage_error(self, k12, capsys):
        run(capsys, "pm", "--in", k12)
        assert run(capsys, "verify", "--matching", k12 + ".matching")[0] == 2

    def test_absorber_round_trip(self, k12, tmp_path, capsys):
        record = tmp_path / "a.json"
        code, _, _ = run(
            capsys, "--out", str(record),
            "absorber", "find", "--in", k12, "--roots", "0 1 2",
        )
        assert code == 0
        assert run(capsys, "verify", "--absorber", str(record), "--in", k12)[0] == 0
        garbled = tmp_path / "g.json"
        garbled.write_text(record.read_text().replace("[", "{", 1))
        assert run(capsys, "verify", "--absorber", str(garbled))[0] == 1

    def test_exactly_one_artifact_flag(self, k12, capsys):
        assert run(capsys, "verify", "--in", k12)[0] == 2


class TestMdk:
    def test_both_routes_and_witness(self, tmp_path, capsys):
        out = tmp_path / "mdk.csv"
        code, _, _ = run(capsys, "--out", str(out), "mdk", "--n", "4", "--k", "2", "--d", "1")
        assert code == 0
        table = parse_table(out.read_text())
        assert table.columns == ("n", "k", "d", "m", "ratio", "witness_file", "graphs_enumerated", "seconds")
        assert len(table.rows) == 2
        assert all(row[3] == "2" for row in table.rows)
        assert all(row[4] == "2/3" for row in table.rows)
        witness = read_khg(str(out) + ".witness.khg")
        assert find_perfect_matching(witness).status == "none"

    def test_single_route_row(self, capsys):
        code, out, _ = run(capsys, "mdk", "--n", "4", "--k", "2", "--d", "1", "--route", "pruned")
        assert code == 0
        assert len(parse_table(out).rows) == 1

    def test_json_format(self, capsys):
        code, out, _ = run(capsys, "--format", "json", "mdk", "--n", "4", "--k", "2", "--d", "1")
        assert code == 0
        payload = json.loads(out)
        assert payload["rows"][0]["m"] == 2
        assert payload["rows"][0]["ratio"] == "2/3"


class TestTemplateAndAbsorber:
    def test_template_build_verify_cycle(self, tmp_path, capsys):
        base = tmp_path / "t6"
        code, out, _ = run(capsys, "--out", str(base), "template", "build", "--r", "6", "--k", "3")
        assert code == 0
        assert "r=6" in out
        assert run(capsys, "template", "verify", "--in", str(base), "--mode", "exhaustive")[0] == 0
        assert run(capsys, "verify", "--template", str(base))[0] == 0

    def test_template_build_needs_out(self, capsys):
        assert run(capsys, "template", "build", "--r", "6", "--k", "3")[0] == 2

    def test_compact_template_divisibility(self, tmp_path, capsys):
        base = tmp_path / "t"
        good = run(capsys, "--out", str(base), "template", "build", "--r", "6", "--k", "3", "--mode", "compact")
        assert good[0] == 0
        bad = run(capsys, "--out", str(base), "template", "build", "--r", "7", "--k", "3", "--mode", "compact")
        assert bad[0] == 2

    def test_absorber_find_failure_exits_one(self, tmp_path, capsys):
        empty = tmp_path / "empty.khg"
        run(capsys, "--out", str(empty), "gen", "random", "--n", "9", "--k", "3", "--p", "0")
        code, _, err = run(capsys, "absorber", "find", "--in", str(empty), "--roots", "0 1 2")
        assert code == 1
        assert "failed" in err

    def test_absorber_contract_reports_shape(self, capsys):
        code, out, _ = run(capsys, "absorber", "contract", "--K", "4")
        assert code == 0
        assert "girth=" in out and "k_density=" in out


class TestPipeline:
    def test_success_report_and_sidecar(self, k12, tmp_path, capsys):
        report = tmp_path / "rep.json"
        code, _, _ = run(
            capsys, "--out", str(report),
            "pipeline", "run", "--in", k12, "--d", "1", "--gamma", "0.1",
        )
        assert code == 0
        payload = json.loads(report.read_text())
        assert payload["status"] == "success"
        sidecar = str(report) + ".matching"
        ok, _ = verify_matching(read_khg(k12), read_matching(sidecar), require_perfect=True)
        assert ok

    def test_reruns_are_byte_identical(self, k12, tmp_path, capsys):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        for path in (a, b):
            run(capsys, "--out", str(path), "pipeline", "run", "--in", k12, "--d", "1", "--gamma", "0.1")
        assert a.read_bytes() == b.read_bytes()

    def test_barrier_failure_exits_one(self, tmp_path, capsys):
        barrier = tmp_path / "b.khg"
        run(capsys, "--out", str(barrier), "gen", "space", "--n", "9", "--k", "3")
        report = tmp_path / "rep.json"
        code, _, _ = run(
            capsys, "--out", str(report),
            "pipeline", "run", "--in", str(barrier), "--d", "1", "--gamma", "0.1",
        )
        assert code == 1
        payload = json.loads(report.read_text())
        assert payload["status"] == "failure"
        assert not (tmp_path / "rep.json.matching").exists()

    def test_params_file(self, k12, tmp_path, capsys):
        params = tmp_path / "p.cfg"
        params.write_text("rho = 0.5\nQ = 12\n")
        code, out, _ = run(capsys, "pipeline", "run", "--in", k12, "--d", "1", "--gamma", "0.1", "--params", str(params))
        assert code == 0
        assert json.loads(out)["params"]["rho"] == 0.5

    def test_bad_params_key_is_usage_error(self, k12, tmp_path, capsys):
        params = tmp_path / "p.cfg"
        params.write_text("warp = 9\n")
        assert run(capsys, "pipeline", "run", "--in", k12, "--d", "1", "--gamma", "0.1", "--params", str(params))[0] == 2


def write_config(path, **fields):
    lines = [f"{key} = {value}" for key, value in fields.items()]
    path.write_text("\n".join(lines) + "\n")


class TestExperimentCommand:
    def test_resilience_csv_deterministic(self, tmp_path, capsys):
        cfg = tmp_path / "r.cfg"
        write_config(cfg, name="res", n=12, k=3, d=2, p=0.8, gamma=0.15, trials=10, master_seed=0)
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        for path in (a, b):
            code, out, _ = run(capsys, "--out", str(path), "experiment", "resilience", "--config", str(cfg))
            assert code == 0
            assert "pm_frequency" in out
        assert a.read_bytes() == b.read_bytes()
        table = parse_table(a.read_text())
        assert table.name == "res"
        assert len(table.rows) == 11

    def test_configured_out_path(self, tmp_path, capsys):
        target = tmp_path / "via-config.csv"
        cfg = tmp_path / "r.cfg"
        write_config(cfg, name="res", n=9, k=3, d=1, p=0.7, trials=2, out=str(target))
        assert run(capsys, "experiment", "resilience", "--config", str(cfg))[0] == 0
        assert target.exists()

    def test_json_format(self, tmp_path, capsys):
        cfg = tmp_path / "i.cfg"
        write_config(cfg, name="inh", n=10, k=3, d=1, Q=6, host="complete", trials=2)
        code, out, _ = run(capsys, "--format", "json", "experiment", "inheritance", "--config", str(cfg))
        assert code == 0
        payload = json.loads(out)
        assert payload["summary"]["frequency"] == 1.0
        assert len(payload["rows"]) == 210

    def test_load_smoke(self, tmp_path, capsys):
        cfg = tmp_path / "l.cfg"
        write_config(cfg, name="load", n=12, k=3, p=0.5, lam=0.25, trials=5)
        code, out, _ = run(capsys, "experiment", "load", "--config", str(cfg))
        assert code == 0
        assert parse_table(out).columns[2] == "vertex"

    def test_unknown_config_key_is_usage_error(self, tmp_path, capsys):
        cfg = tmp_path / "bad.cfg"
        write_config(cfg, name="x", n=9, k=3, wobble=1)
        assert run(capsys, "experiment", "resilience", "--config", str(cfg))[0] == 2


class TestTopLevel:
    def test_unknown_subcommand(self, capsys):
        assert run(capsys, "conjure")[0] == 2

    def test_no_arguments(self, capsys):
        assert run(capsys)[0] == 2

    def test_threads_validation(self, capsys):
        assert run(capsys, "--threads", "0", "gen", "complete", "--n", "6", "--k", "3")[0] == 2

    def test_threads_do_not_change_output(self, tmp_path, capsys):
        cfg = tmp_path / "r.cfg"
        write_config(cfg, name="res", n=9, k=3, d=1, p=0.7, trials=3)
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        run(capsys, "--threads", "1", "--out", str(a), "experiment", "resilience", "--config", str(cfg))
        run(capsys, "--threads", "4", "--out", str(b), "experiment", "resilience", "--config", str(cfg))
        assert a.read_bytes() == b.read_bytes()

    def test_module_entry_point(self, tmp_path):
        out = tmp_path / "g.khg"
        proc = subprocess.run(
            [sys.executable, "-m", "diraclab.cli", "--out", str(out), "gen", "complete", "--n", "6", "--k", "3"],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0
        assert read_khg(out).edge_count() == 20

    def test_help_exits_zero(self, capsys):
        assert run(capsys, "--help")[0] == 0
