"""Command-line interface behavior via subprocess."""

import json
import subprocess
import sys


def run_cli(*args, **kwargs):
    return subprocess.run([sys.executable, "-m", "margopt.cli", *args],
                          capture_output=True, text=True, **kwargs)


def test_optimize_streams_json_records():
    r = run_cli("optimize", "--model", "bimodal", "--iters", "4", "--seed",
                "7", "--format", "json", "--particles", "10", "--init", "3")
    assert r.returncode == 0
    lines = r.stdout.strip().splitlines()
    assert len(lines) == 4
    for i, line in enumerate(lines, start=1):
        rec = json.loads(line)
        assert rec["m"] == i
        for key in ("theta_star", "u_star", "theta_next", "log_z_next",
                    "wall_ms", "seed"):
            assert key in rec
        assert rec["seed"] == 7


def test_optimize_output_file_append_streamed(tmp_path):
    out = tmp_path / "steps.jsonl"
    r = run_cli("optimize", "--model", "bimodal", "--iters", "3", "--seed",
                "1", "--particles", "10", "--init", "3",
                "--output", str(out))
    assert r.returncode == 0
    lines = out.read_text().strip().splitlines()
    assert len(lines) == 3
    assert all(json.loads(line) for line in lines)


def test_reproducible_output_modulo_timing(tmp_path):
    def stripped():
        r = run_cli("optimize", "--model", "bimodal", "--iters", "4",
                    "--seed", "11", "--particles", "10", "--init", "3")
        recs = [json.loads(line) for line in r.stdout.strip().splitlines()]
        for rec in recs:
            rec.pop("wall_ms", None)
            rec.get("diagnostics", {}).pop("wall_ms", None)
        return json.dumps(recs, sort_keys=True)

    assert stripped() == stripped()


def test_unknown_model_is_usage_error():
    r = run_cli("optimize", "--model", "warp-drive", "--iters", "2")
    assert r.returncode == 2
    assert "registered" in r.stderr


def test_validate_ok_model():
    r = run_cli("validate", "--model", "bimodal", "--seed", "0")
    assert r.returncode == 0
    report = json.loads(r.stdout)
    assert report["ok"] is True


def test_validate_bad_multiplicity():
    r = run_cli("validate", "--model", "bad-multiplicity", "--seed", "0")
    assert r.returncode == 1
    report = json.loads(r.stdout)
    assert report["ok"] is False
    assert report["violations"][0]["rule_id"] == "multiplicity"


def test_optimize_rejects_invalid_model():
    r = run_cli("optimize", "--model", "bad-measure", "--iters", "2")
    assert r.returncode == 1
    assert "model-violation" in r.stderr


def test_compare_writes_csv(tmp_path):
    out = tmp_path / "cmp.csv"
    r = run_cli("compare", "--model", "bimodal", "--methods", "bo,pmmh-lmh",
                "--budget", "8", "--runs", "2", "--particles", "10",
                "--seed", "1", "--output", str(out))
    assert r.returncode == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0].startswith("model,method,run,seed,eval_index")
    assert len(lines) == 1 + 2 * 2 * 8
    methods = {line.split(",")[1] for line in lines[1:]}
    assert methods == {"bo", "pmmh-lmh"}


def test_benchmark_subcommand_runs():
    r = run_cli("benchmark", "--model", "branin", "--iters", "3",
                "--seed", "3", "--init", "3", "--particles", "1")
    assert r.returncode == 0
    assert len(r.stdout.strip().splitlines()) == 3


def test_output_dir_env(tmp_path):
    r = run_cli("optimize", "--model", "bimodal", "--iters", "2", "--seed",
                "5", "--particles", "10", "--init", "3",
                "--output", "rel.jsonl",
                env={"MARGOPT_OUTPUT_DIR": str(tmp_path),
                     "PATH": "/usr/bin:/bin:/usr/local/bin"})
    assert r.returncode == 0
    assert (tmp_path / "rel.jsonl").exists()
