"""End-to-end command-line checks: exit codes, files, determinism."""

import csv
import json
import xml.etree.ElementTree as ET
from pathlib import Path

import pytest

from gbsmc.cli import (
    EXIT_CONFIG,
    EXIT_FAILURE,
    EXIT_OK,
    EXIT_STARVATION,
    main,
)
from gbsmc.graphs import from_edge_list_text


def run(*argv):
    return main([str(a) for a in argv])


# --- gen-graph -------------------------------------------------------------

def test_gen_graph_writes_a_loadable_edge_list(tmp_path, capsys):
    out = tmp_path / "k6.txt"
    assert run("gen-graph", "complete", "--n", 6, "--out", out) == EXIT_OK
    assert capsys.readouterr().out.strip() == "6 15 2.5"
    g = from_edge_list_text(out.read_text())
    assert (g.n, g.m) == (6, 15)


def test_gen_graph_stdout_roundtrip(capsys):
    assert run("gen-graph", "cycle", "--n", 5) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    g = from_edge_list_text("\n".join(lines[:-1]))  # last line is the summary
    assert (g.n, g.m) == (5, 5)


def test_gen_graph_missing_parameter_is_config_error(capsys):
    assert run("gen-graph", "er", "--n", 8) == EXIT_CONFIG
    assert "error:" in capsys.readouterr().err


# --- sample ------------------------------------------------------------------

def test_sample_emits_one_hex_state_per_window(capsys):
    assert run("sample", "--gen", "complete", "--n", 4, "--steps", 5,
               "--samples", 7, "--lambda", 1) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 7
    for i, line in enumerate(lines, start=1):
        step, state = line.split(",")
        assert int(step) == 5 * i
        assert state.startswith("0x")


def test_sample_post_selection_emits_the_requested_size(tmp_path):
    out = tmp_path / "states.txt"
    assert run("sample", "--gen", "complete", "--n", 6, "--steps", 200,
               "--samples", 25, "--post-select-k", 4, "--lambda", 1,
               "--out", out) == EXIT_OK
    rows = out.read_text().splitlines()
    assert len(rows) == 25
    assert all(int(r.split(",")[1], 16).bit_count() == 4 for r in rows)


def test_sample_odd_post_selection_is_rejected(capsys):
    assert run("sample", "--gen", "complete", "--n", 6,
               "--post-select-k", 3) == EXIT_CONFIG
    assert "odd" in capsys.readouterr().err


def test_sample_starvation_has_its_own_exit_code(capsys):
    # A single edge can never reach two matched edges.
    assert run("sample", "--gen", "path", "--n", 2, "--steps", 50,
               "--samples", 3, "--post-select-k", 4) == EXIT_STARVATION


WEIGHTED_SQUARE_TEXT = "4 4 weighted\n0 1 1\n0 3 5/2\n1 2 2\n2 3 3\n"


def test_sample_double_loop_weighted_graph(tmp_path):
    graph_file = tmp_path / "w.txt"
    graph_file.write_text(WEIGHTED_SQUARE_TEXT)
    out = tmp_path / "states.txt"
    assert run("sample", "--graph", graph_file, "--chain", "double-loop",
               "--lambda", "1/2", "--steps", 20, "--samples", 10,
               "--inner", "exact", "--out", out) == EXIT_OK
    assert len(out.read_text().splitlines()) == 10


# --- solve -------------------------------------------------------------------

def _read_trajectory(path):
    with open(path) as fh:
        rows = list(csv.DictReader(fh))
    by_seed = {}
    for row in rows:
        by_seed.setdefault(row["seed"], []).append(
            (int(row["iteration"]), float(row["best_score"])))
    return by_seed


def test_solve_writes_records_and_a_monotone_trajectory(tmp_path, capsys):
    out_dir = tmp_path / "solve"
    assert run("solve", "--gen", "planted-clique", "--n", 14, "--clique", 4,
               "--p", 0.3, "--alg", "rs", "--k", 4, "--iters", 30,
               "--seeds", 2, "--out-dir", out_dir) == EXIT_OK
    printed = capsys.readouterr().out
    assert "trial 0: best=" in printed and "mean_best" in printed
    assert (out_dir / "records.txt").exists()
    by_seed = _read_trajectory(out_dir / "trajectory.csv")
    assert len(by_seed) == 2
    for rows in by_seed.values():
        rows.sort()
        scores = [s for _, s in rows]
        assert len(scores) == 30
        assert all(a <= b for a, b in zip(scores, scores[1:]))


def test_solve_enhanced_chain_sampler(tmp_path, capsys):
    out_dir = tmp_path / "ers"
    assert run("solve", "--gen", "complete", "--n", 10, "--alg", "ers",
               "--sampler", "glauber", "--lambda", "1/4", "--k", 4,
               "--iters", 15, "--mixing-steps", 50,
               "--out-dir", out_dir) == EXIT_OK
    assert "starved=" in capsys.readouterr().out


def test_solve_odd_hafnian_subset_is_config_error(tmp_path, capsys):
    assert run("solve", "--gen", "complete", "--n", 8, "--alg", "rs",
               "--k", 3, "--iters", 5,
               "--out-dir", tmp_path / "x") == EXIT_CONFIG


def test_unknown_algorithm_is_an_argparse_error():
    with pytest.raises(SystemExit):
        run("solve", "--gen", "complete", "--n", 8, "--alg", "tabu",
            "--k", 4)


# --- verify ------------------------------------------------------------------

def test_verify_balance_reports_an_exact_zero(capsys):
    assert run("verify", "balance", "--gen", "complete", "--n", 4,
               "--dynamics", "glauber", "--lambda", "3/2") == EXIT_OK
    out = capsys.readouterr().out
    assert out.startswith("max_violation 0.0 ")
    assert "PASS" in out


def test_verify_balance_weighted_graph_needs_weighted_dynamics(tmp_path,
                                                               capsys):
    graph_file = tmp_path / "w.txt"
    graph_file.write_text(WEIGHTED_SQUARE_TEXT)
    assert run("verify", "balance", "--graph", graph_file,
               "--dynamics", "double-loop", "--lambda", 1) == EXIT_CONFIG
    assert "double-loop-weighted" in capsys.readouterr().err
    assert run("verify", "balance", "--graph", graph_file,
               "--dynamics", "double-loop-weighted", "--lambda", 1) == EXIT_OK


def test_verify_law_passes_with_a_modest_sample_budget(capsys):
    assert run("verify", "law", "--gen", "complete", "--n", 4,
               "--dynamics", "glauber", "--lambda", 1,
               "--samples", 20000, "--seed", 1) == EXIT_OK
    out = capsys.readouterr().out
    assert out.startswith("tv ") and "PASS" in out


def test_verify_law_fails_at_an_impossible_tolerance(capsys):
    assert run("verify", "law", "--gen", "complete", "--n", 6,
               "--dynamics", "glauber", "--lambda", 1, "--samples", 500,
               "--tol", 1e-6, "--seed", 1) == EXIT_FAILURE
    assert "FAIL" in capsys.readouterr().out


def test_verify_law_oracle_guard_exit_code(capsys):
    assert run("verify", "law", "--gen", "complete", "--n", 16,
               "--dynamics", "glauber", "--lambda", 1,
               "--samples", 10) == 5  # oracle guard
    assert "error:" in capsys.readouterr().err


# --- bench / replot ----------------------------------------------------------

def _bench_exit_time(out_dir, trials=40):
    return run("bench", "exit-time", "--squares", 1, "--trials", trials,
               "--lambda", 1, "--out-dir", out_dir)


def test_bench_exit_time_produces_manifest_tables_and_figures(tmp_path,
                                                              capsys):
    out_dir = tmp_path / "exit"
    assert _bench_exit_time(out_dir) == EXIT_OK
    assert "wrote" in capsys.readouterr().out
    manifest = (out_dir / "manifest.txt").read_text()
    assert manifest.startswith("experiment: exit-time\n")
    assert "config_hash: " in manifest and "options:" in manifest
    csvs = list(out_dir.glob("*.csv"))
    svgs = list(out_dir.glob("*.svg"))
    assert csvs and svgs
    for table in csvs:
        head = table.read_text().splitlines()[0]
        assert "," in head  # header row present


def test_bench_reruns_are_byte_identical(tmp_path):
    first, second = tmp_path / "a", tmp_path / "b"
    assert _bench_exit_time(first) == EXIT_OK
    assert _bench_exit_time(second) == EXIT_OK
    names = sorted(p.name for p in first.iterdir()
                   if p.suffix in (".csv", ".svg"))
    assert names
    for name in names:
        assert (first / name).read_bytes() == (second / name).read_bytes()


def test_replot_regenerates_identical_figures(tmp_path, capsys):
    out_dir = tmp_path / "exit"
    assert _bench_exit_time(out_dir) == EXIT_OK
    before = {p.name: p.read_bytes() for p in out_dir.glob("*.svg")}
    capsys.readouterr()
    assert run("replot", "--dir", out_dir) == EXIT_OK
    assert "rewrote" in capsys.readouterr().out
    after = {p.name: p.read_bytes() for p in out_dir.glob("*.svg")}
    assert before == after


def test_bench_figures_are_wellformed_svg(tmp_path):
    out_dir = tmp_path / "exit"
    assert _bench_exit_time(out_dir) == EXIT_OK
    for fig in out_dir.glob("*.svg"):
        root = ET.parse(fig).getroot()
        assert root.tag.endswith("svg")


def test_replot_on_an_empty_directory_fails(tmp_path, capsys):
    assert run("replot", "--dir", tmp_path) == EXIT_FAILURE


def test_bench_spec_file_drives_a_run(tmp_path):
    out_dir = tmp_path / "from-spec"
    spec = {"task": "bench", "name": "exit-time",
            "out_dir": str(out_dir),
            "config": {"squares": 1, "trials": 30, "fugacity": 1}}
    spec_file = tmp_path / "spec.json"
    spec_file.write_text(json.dumps(spec))
    assert run("bench", "--spec", spec_file) == EXIT_OK
    assert (out_dir / "manifest.txt").exists()


def test_bench_spec_rejects_unknown_keys(tmp_path, capsys):
    spec_file = tmp_path / "bad.json"
    spec_file.write_text(json.dumps({"task": "bench", "name": "exit-time",
                                     "squares": 1}))
    assert run("bench", "--spec", spec_file) == EXIT_CONFIG
    assert "error:" in capsys.readouterr().err


def test_bench_needs_a_preset_or_spec(capsys):
    assert run("bench") == EXIT_CONFIG
    assert "preset" in capsys.readouterr().err
