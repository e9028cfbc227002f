"""Command-line front end.

Subcommands
-----------
gen-graph   write a benchmark graph as a canonical edge list
sample      run a matching chain, one output line per sample
solve       run solver trials; persists records plus a trajectory CSV
verify      exactness checks: detailed-balance and stationary-law distance
bench       named experiment presets (or an ExperimentSpec JSON file)
replot      regenerate SVG figures from a run directory's CSVs

Benchmark runs persist CSV tables, SVG figures drawn from those tables, and
a human-readable manifest.  CSVs are byte-deterministic for a given command
line (timing lives only in the manifest), and every row carries the run's
config hash and seed so any row can be reproduced in isolation.

Exit codes: 0 success, 1 failed check or partly-failed run, 2 configuration
error, 3 post-selection starvation, 4 inner-sampler budget exhaustion,
5 exactness guard exceeded.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import os
import statistics
import sys
import time
from collections import Counter
from dataclasses import replace
from fractions import Fraction
from pathlib import Path

from .diagnostics import (LAW_KINDS, DistributionTable, OracleGuardError,
                          check_detailed_balance, exact_stationary,
                          exit_time_experiment, geometric_fit, pm_stationary,
                          tv_distance)
from .double_loop import (DoubleLoopConfig, InnerSamplerError,
                          PostSelectionMiss, RejectionCapError, _drive_double)
from .glauber import ChainConfig, ChainConfigError, _drive_glauber, _drive_jerrum
from .graphs import (EnumerationCapError, Graph, GraphError, GraphSpec,
                     gen_graph, load_edge_list, to_edge_list_text)
from .graphs import _GENERATORS as _GRAPH_GENERATORS
from .pm_chain import PMSampleBudgetError, PMSamplerConfig, PMStateError
from .seeds import child_rng, derive_seed
from .solvers import (SOLVERS, SAParams, SolverConfig, SolverConfigError,
                      solver_for)
from .svg import Series, histogram_plot, line_plot

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG = 2
EXIT_STARVATION = 3
EXIT_INNER_BUDGET = 4
EXIT_ORACLE_GUARD = 5


class CliError(Exception):
    """Error with a dedicated exit code."""

    def __init__(self, message, code=EXIT_CONFIG):
        super().__init__(message)
        self.code = code


# ---------------------------------------------------------------------------
# Small shared helpers
# ---------------------------------------------------------------------------

def _seed_arg(text: str):
    """Seeds may be integers or free-form strings."""
    try:
        return int(text)
    except ValueError:
        return text


def _rational_arg(text: str):
    """Fugacity-like numbers: "3/4" stays an exact Fraction, else float."""
    if "/" in text:
        return Fraction(text)
    return float(text)


def _num(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (int, Fraction)):
        return str(v)
    return str(v)


def _config_hash(payload) -> str:
    blob = json.dumps(payload, sort_keys=True, default=str)
    return hashlib.sha256(blob.encode()).hexdigest()[:12]


def _out_root() -> Path:
    return Path(os.environ.get("GBSMC_OUT_ROOT", "."))


def _resolve_out(path_text: str) -> Path:
    p = Path(path_text)
    return p if p.is_absolute() else _out_root() / p


def _write_csv(path: Path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_num(v) for v in row])


def _read_csv(path: Path):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        return header, list(reader)


def _manifest_lines(value, indent=0):
    pad = "  " * indent
    lines = []
    if isinstance(value, dict):
        for key, item in value.items():
            if isinstance(item, (dict, list)):
                lines.append(f"{pad}{key}:")
                lines.extend(_manifest_lines(item, indent + 1))
            else:
                lines.append(f"{pad}{key}: {_num(item)}")
    elif isinstance(value, list):
        for item in value:
            if isinstance(item, (dict, list)):
                lines.append(f"{pad}-")
                lines.extend(_manifest_lines(item, indent + 1))
            else:
                lines.append(f"{pad}- {_num(item)}")
    else:
        lines.append(f"{pad}{_num(value)}")
    return lines


def _write_manifest(path: Path, tree: dict):
    path.write_text("\n".join(_manifest_lines(tree)) + "\n")


def _even(k: int) -> int:
    return k if k % 2 == 0 else k - 1


def _percentile(sorted_vals, q: float) -> float:
    n = len(sorted_vals)
    if n == 1:
        return float(sorted_vals[0])
    pos = q * (n - 1)
    lo = int(math.floor(pos))
    hi = min(lo + 1, n - 1)
    frac = pos - lo
    return float(sorted_vals[lo]) * (1 - frac) + float(sorted_vals[hi]) * frac


# ---------------------------------------------------------------------------
# Graph sourcing (file or generator flags)
# ---------------------------------------------------------------------------

# cli kind -> (generator kind, ((flag attr, generator kwarg), ...))
_GRAPH_KINDS = {
    "complete": ("complete", (("n", "n"),)),
    "complete-bipartite": ("complete_bipartite", (("m", "m"), ("n", "n"))),
    "path": ("path", (("n", "n"),)),
    "cycle": ("cycle", (("n", "n"),)),
    "er": ("erdos_renyi", (("n", "n"), ("p", "p"))),
    "planted-clique": ("planted_clique",
                       (("n", "n"), ("clique", "clique_size"), ("p", "p"))),
    "decreasing-degree": ("decreasing_degree", (("n", "n"),)),
    "random-bipartite": ("random_bipartite",
                         (("n", "n_per_side"), ("p", "p"))),
    "sparse-bipartite": ("sparse_bipartite",
                         (("n", "n_per_side"), ("edges", "n_edges"))),
    "hard-instance": ("hard_instance", (("squares", "n_squares"),)),
}


def _add_graph_args(p: argparse.ArgumentParser):
    grp = p.add_argument_group("graph source")
    grp.add_argument("--graph", metavar="FILE",
                     help="load an edge-list file instead of generating")
    grp.add_argument("--gen", choices=sorted(_GRAPH_KINDS),
                     help="generator kind")
    grp.add_argument("--n", type=int, help="vertex count (per side for "
                     "bipartite kinds)")
    grp.add_argument("--m", type=int, help="left side size "
                     "(complete-bipartite)")
    grp.add_argument("--p", type=float, help="edge probability")
    grp.add_argument("--clique", type=int, help="planted clique size")
    grp.add_argument("--edges", type=int, help="edge count (sparse-bipartite)")
    grp.add_argument("--squares", type=int, help="square count (hard-instance)")
    grp.add_argument("--graph-seed", type=_seed_arg, default=0,
                     help="seed for randomized generators (default 0)")


def _spec_from_flags(kind: str, args) -> GraphSpec:
    gen_kind, mapping = _GRAPH_KINDS[kind]
    params = {}
    for attr, kwarg in mapping:
        value = getattr(args, attr, None)
        if value is None:
            raise CliError(f"generator {kind!r} needs --{attr}")
        params[kwarg] = value
    return GraphSpec.of(gen_kind, **params)


def _graph_from_args(args):
    """Build the graph plus a description dict for hashing/manifests."""
    if getattr(args, "graph", None):
        g = load_edge_list(args.graph)
        return g, {"source": "file", "path": args.graph,
                   "n": g.n, "m": g.m}
    kind = getattr(args, "gen", None)
    if kind is None:
        raise CliError("give --graph FILE or --gen KIND")
    spec = _spec_from_flags(kind, args)
    g = gen_graph(spec, seed=args.graph_seed)
    desc = {"source": "generator", "kind": spec.kind,
            **spec.as_dict(), "graph_seed": args.graph_seed,
            "n": g.n, "m": g.m}
    return g, desc


# ---------------------------------------------------------------------------
# gen-graph
# ---------------------------------------------------------------------------

def _cmd_gen_graph(args) -> int:
    spec = _spec_from_flags(args.kind, args)
    g = gen_graph(spec, seed=args.graph_seed)
    text = to_edge_list_text(g)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    print(f"{g.n} {g.m} {g.m / g.n:.6g}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# sample
# ---------------------------------------------------------------------------

def _chain_config(opts) -> ChainConfig:
    cfg = ChainConfig(fugacity=opts.get("fugacity"), c=opts.get("c"),
                      lazy=bool(opts.get("lazy", False)))
    if cfg.fugacity is None and cfg.c is None:
        cfg = replace(cfg, fugacity=1.0)
    cfg.resolved_fugacity()  # validate now
    return cfg


def _double_loop_config(chain_cfg: ChainConfig, opts) -> DoubleLoopConfig:
    return DoubleLoopConfig(
        chain=chain_cfg,
        pm=PMSamplerConfig(inner_steps=opts.get("inner_steps"),
                           max_attempts=opts.get("max_attempts")),
        on_inner_failure=opts.get("on_inner_failure", "stay"),
        inner=opts.get("inner", "chain"))


def _do_sample(g: Graph, opts: dict, out) -> int:
    """Windowed sampling: the chain advances ``steps`` moves per sample and
    each window emits one "step,vertex_set_hex" line.  With post-selection
    the emitted state is the window's most recent one of the target size;
    a window without any such state aborts with the starvation exit code
    (lines already written stay on disk)."""
    chain = opts["chain"]
    cc = _chain_config(opts)
    lam = cc.resolved_fugacity()
    target = -1
    k = opts.get("post_select_k")
    if k is not None:
        if k % 2:
            raise CliError(f"post-selection size {k} is odd")
        target = k // 2
    dl_cfg = _double_loop_config(cc, opts) if chain == "double_loop" else None
    rng = child_rng(opts.get("seed", 0), "sample")
    x = cc.make_initial(g)
    memo = {}

    def advance(n_steps, start):
        if chain == "glauber":
            return _drive_glauber(g, x, lam, cc.lazy, n_steps, rng,
                                  target_edges=target, start_step=start)
        if chain == "jerrum":
            return _drive_jerrum(g, x, lam, cc.lazy, n_steps, rng,
                                 target_edges=target, start_step=start)
        snap, step, _ = _drive_double(g, x, lam, dl_cfg, n_steps, rng,
                                      weighted=g.weighted,
                                      target_edges=target, start_step=start,
                                      haf_memo=memo)
        return snap, step

    at = 0
    burn = opts.get("burn_in", 0)
    if burn:
        advance(burn, 0)
        at = burn
    window = opts["steps"]
    for _ in range(opts["samples"]):
        snap, snap_step = advance(window, at)
        at += window
        if target >= 0:
            if snap is None:
                raise CliError(
                    f"no size-{k} state in a {window}-step window",
                    EXIT_STARVATION)
            bits = 0
            for i in snap:
                bits |= g.edge_bits[i]
            out.write(f"{snap_step},0x{bits:x}\n")
        else:
            out.write(f"{at},0x{x.covered:x}\n")
    return EXIT_OK


def _cmd_sample(args) -> int:
    g, _ = _graph_from_args(args)
    opts = {"chain": args.chain.replace("-", "_"), "fugacity": args.fugacity,
            "c": args.c, "lazy": args.lazy, "steps": args.steps,
            "burn_in": args.burn_in, "samples": args.samples,
            "post_select_k": args.post_select_k, "seed": args.seed,
            "inner": args.inner, "inner_steps": args.inner_steps,
            "max_attempts": args.max_attempts,
            "on_inner_failure": args.on_inner_failure}
    if args.out:
        with open(args.out, "w") as fh:
            return _do_sample(g, opts, fh)
    return _do_sample(g, opts, sys.stdout)


# ---------------------------------------------------------------------------
# solve
# ---------------------------------------------------------------------------

_ALG_NAMES = {"rs": "random_search", "ers": "enhanced_random_search",
              "sa": "simulated_annealing",
              "esa": "enhanced_simulated_annealing"}


def _solver_config(opts: dict) -> tuple:
    """(algorithm name, base SolverConfig) from an options dict."""
    alg = _ALG_NAMES.get(opts["alg"], opts["alg"])
    if alg not in SOLVERS:
        raise CliError(f"unknown algorithm {opts['alg']!r}")
    enhanced = alg.startswith("enhanced")
    sampler = opts.get("sampler", "double_loop") if enhanced else "uniform"
    sampler = sampler.replace("-", "_")
    chain = _chain_config(opts) if enhanced else None
    sa = None
    if alg.endswith("simulated_annealing"):
        sa = SAParams(initial_temperature=opts.get("t0", 1.0),
                      gamma=opts.get("gamma", 0.95))
    cfg = SolverConfig(objective=opts.get("objective", "hafnian"),
                       subset_size=opts["k"],
                       iterations=opts.get("iterations", 1000),
                       sampler=sampler, chain=chain, sa=sa,
                       mixing_steps=opts.get("mixing_steps", 1000),
                       retry_bound=opts.get("retry_bound", 3),
                       warm_start=not opts.get("cold_restart", False))
    return alg, cfg


def _solver_cfg_payload(alg: str, cfg: SolverConfig) -> dict:
    payload = {"algorithm": alg, "objective": cfg.objective,
               "subset_size": cfg.subset_size, "iterations": cfg.iterations,
               "sampler": cfg.sampler, "mixing_steps": cfg.mixing_steps,
               "retry_bound": cfg.retry_bound, "warm_start": cfg.warm_start}
    if cfg.chain is not None:
        payload["fugacity"] = str(cfg.chain.resolved_fugacity())
    if cfg.sa is not None:
        payload["initial_temperature"] = cfg.sa.initial_temperature
        payload["gamma"] = cfg.sa.gamma
    return payload


def _record_block(rec, trial_seed, chash) -> str:
    cfg = rec.config
    lines = ["trial:",
             f"  algorithm: {rec.algorithm}",
             f"  config_hash: {chash}",
             f"  seed: {trial_seed}",
             f"  objective: {cfg.objective}",
             f"  subset_size: {cfg.subset_size}",
             f"  iterations: {cfg.iterations}",
             f"  sampler: {cfg.sampler}"]
    if cfg.chain is not None:
        lines.append(f"  fugacity: {cfg.chain.resolved_fugacity()}")
        lines.append(f"  mixing_steps: {cfg.mixing_steps}")
        lines.append(f"  warm_start: {_num(cfg.warm_start)}")
    if cfg.sa is not None:
        lines.append(f"  initial_temperature: {cfg.sa.initial_temperature}")
        lines.append(f"  gamma: {cfg.sa.gamma}")
    best_vertices = rec.best_vertices()
    lines += [f"  best_score: {_num(rec.best_score)}",
              "  best_vertices: " + (" ".join(map(str, best_vertices))
                                     if best_vertices else "-"),
              f"  evaluations: {rec.evaluations}",
              f"  starvation_count: {rec.starvation_count}",
              f"  inner_failure_count: {rec.inner_failures}",
              f"  wall_time_s: {rec.wall_time:.3f}"]
    return "\n".join(lines) + "\n"


def _do_solve(g: Graph, graph_desc: dict, opts: dict, out_dir: Path) -> int:
    alg, base = _solver_config(opts)
    master = opts.get("seed", 0)
    chash = _config_hash({"command": "solve", "graph": graph_desc,
                          "options": _solver_cfg_payload(alg, base),
                          "seed": master})
    out_dir.mkdir(parents=True, exist_ok=True)
    n_seeds = opts.get("seeds", 1)
    records = []
    traj_rows = []
    blocks = []
    for j in range(n_seeds):
        trial_seed = derive_seed(master, f"trial{j}")
        cfg = replace(base, seed=trial_seed)
        rec = SOLVERS[alg](g, cfg)
        records.append(rec)
        blocks.append(_record_block(rec, trial_seed, chash))
        for i, best in enumerate(rec.score_trajectory, start=1):
            traj_rows.append((chash, trial_seed, i, best))
    (out_dir / "records.txt").write_text("\n".join(blocks))
    _write_csv(out_dir / "trajectory.csv",
               ("config_hash", "seed", "iteration", "best_score"), traj_rows)
    for j, rec in enumerate(records):
        print(f"trial {j}: best={_num(rec.best_score)} "
              f"evaluations={rec.evaluations} "
              f"starved={rec.starvation_count}")
    mean_best = sum(float(r.best_score) for r in records) / max(1, n_seeds)
    print(f"mean_best {mean_best!r}")
    print(f"wrote {out_dir}/records.txt and {out_dir}/trajectory.csv")
    return EXIT_OK


def _cmd_solve(args) -> int:
    g, desc = _graph_from_args(args)
    opts = {"alg": args.alg, "objective": args.objective, "k": args.k,
            "iterations": args.iters, "sampler": args.sampler,
            "fugacity": args.fugacity, "c": args.c,
            "mixing_steps": args.mixing_steps,
            "retry_bound": args.retry_bound, "gamma": args.gamma,
            "t0": args.t0, "seeds": args.seeds, "seed": args.seed,
            "cold_restart": args.cold_restart}
    return _do_solve(g, desc, opts, _resolve_out(args.out_dir))


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------

_BALANCE_LAWS = {"glauber": "matching_single", "jerrum": "matching_single",
                 "double_loop": "matching_double",
                 "double_loop_weighted": "matching_double"}


def _do_verify_balance(g: Graph, opts: dict) -> int:
    dynamics = opts["dynamics"].replace("-", "_")
    tol = opts.get("tol", 1e-12)
    if dynamics.startswith("pm"):
        law = pm_stationary(g, weighted=dynamics.endswith("weighted"))
        violation = check_detailed_balance(g, dynamics, law)
    else:
        if dynamics == "double_loop" and g.weighted:
            raise CliError("this graph carries weights; "
                           "use --dynamics double-loop-weighted")
        cc = _chain_config(opts)
        lam = cc.resolved_fugacity()
        law = exact_stationary(g, lam, _BALANCE_LAWS[dynamics])
        violation = check_detailed_balance(g, dynamics, law, lam=lam)
    ok = float(violation) < tol
    print(f"max_violation {float(violation)!r} tol {tol!r} "
          f"{'PASS' if ok else 'FAIL'}")
    return EXIT_OK if ok else EXIT_FAILURE


def _do_verify_law(g: Graph, opts: dict) -> int:
    dynamics = opts["dynamics"].replace("-", "_")
    cc = _chain_config(opts)
    lam = cc.resolved_fugacity()
    law_name = opts.get("law")
    if law_name is None:
        law_name = ("vertexset_double" if dynamics == "double_loop"
                    else "matching_single")
    exact = exact_stationary(g, lam, law_name)
    key_kind = ("vertexset" if law_name.startswith("vertexset")
                else "matching")
    n_samples = opts.get("samples", 100_000)
    thin = opts.get("thin") or max(1, g.m)  # default: one edge sweep apart
    burn = opts.get("burn_in", 1000)
    rng = child_rng(opts.get("seed", 0), "verify")
    x = cc.make_initial(g)
    counts: Counter = Counter()
    total = burn + n_samples * thin
    if dynamics == "glauber":
        _drive_glauber(g, x, lam, cc.lazy, total, rng, collect=counts,
                       key_kind=key_kind, thin=thin, burn_in=burn)
    elif dynamics == "jerrum":
        _drive_jerrum(g, x, lam, cc.lazy, total, rng, collect=counts,
                      key_kind=key_kind, thin=thin, burn_in=burn)
    else:
        dl = _double_loop_config(cc, opts)
        _drive_double(g, x, lam, dl, total, rng, weighted=g.weighted,
                      collect=counts, key_kind=key_kind, thin=thin,
                      burn_in=burn)
    tv = float(tv_distance(DistributionTable.from_counts(counts), exact))
    tol = opts.get("tol", 0.05)
    ok = tv <= tol
    print(f"tv {tv!r} samples {n_samples} law {law_name} tol {tol!r} "
          f"{'PASS' if ok else 'FAIL'}")
    return EXIT_OK if ok else EXIT_FAILURE


def _cmd_verify(args) -> int:
    g, _ = _graph_from_args(args)
    if args.check == "balance":
        opts = {"dynamics": args.dynamics, "fugacity": args.fugacity,
                "c": args.c, "lazy": args.lazy, "tol": args.tol}
        return _do_verify_balance(g, opts)
    opts = {"dynamics": args.dynamics, "fugacity": args.fugacity,
            "c": args.c, "lazy": args.lazy, "law": args.law,
            "samples": args.samples, "thin": args.thin,
            "burn_in": args.burn_in, "tol": args.tol, "seed": args.seed,
            "inner": args.inner, "inner_steps": args.inner_steps,
            "max_attempts": args.max_attempts,
            "on_inner_failure": args.on_inner_failure}
    return _do_verify_law(g, opts)


# ---------------------------------------------------------------------------
# bench: shared machinery
# ---------------------------------------------------------------------------

def _run_trials(g, algs, seeds, master, failures):
    """Run every (label, config) over the seed sweep.

    Returns {label: [TrialRecord...]}; failed trials are recorded and
    skipped so a partial run still produces output."""
    out = {label: [] for label, _ in algs}
    for label, base in algs:
        for j in range(seeds):
            trial_seed = derive_seed(master, f"{label}/s{j}")
            cfg = replace(base, seed=trial_seed)
            try:
                out[label].append((trial_seed, solver_for(cfg)(g, cfg)))
            except (InnerSamplerError, PMSampleBudgetError,
                    RejectionCapError, RuntimeError) as err:
                failures.append({"trial": f"{label}/s{j}", "error": str(err)})
    return out


def _curve_rows(chash, master, results):
    rows = []
    for label, trials in results.items():
        trajs = [rec.score_trajectory for _, rec in trials]
        if not trajs or not trajs[0]:
            continue
        for i in range(len(trajs[0])):
            vals = sorted(float(t[i]) for t in trajs)
            n = len(vals)
            mean = sum(vals) / n
            if n > 1:
                se = statistics.stdev(vals) / math.sqrt(n)
            else:
                se = 0.0
            rows.append((chash, master, label, i + 1, mean,
                         mean - 1.96 * se, mean + 1.96 * se,
                         _percentile(vals, 0.1), _percentile(vals, 0.9)))
    return rows


def _summary_rows(chash, results):
    rows = []
    for label, trials in results.items():
        for trial_seed, rec in trials:
            rows.append((chash, label, trial_seed, rec.best_score,
                         rec.evaluations, rec.starvation_count,
                         rec.inner_failures))
    return rows


_CURVES_HEADER = ("config_hash", "seed", "algorithm", "iteration",
                  "mean_best", "lo_se95", "hi_se95", "lo_pct10", "hi_pct90")
_SUMMARY_HEADER = ("config_hash", "algorithm", "seed", "best_score",
                   "evaluations", "starvation_count", "inner_failure_count")


def _plot_curves_file(csv_path: Path, svg_path: Path):
    header, rows = _read_csv(csv_path)
    alg_col = header.index("algorithm")
    it_col = header.index("iteration")
    mean_col = header.index("mean_best")
    lo_col = header.index("lo_se95")
    hi_col = header.index("hi_se95")
    order = []
    data = {}
    for row in rows:
        label = row[alg_col]
        if label not in data:
            order.append(label)
            data[label] = ([], [], [], [])
        xs, ys, lo, hi = data[label]
        xs.append(float(row[it_col]))
        ys.append(float(row[mean_col]))
        lo.append(float(row[lo_col]))
        hi.append(float(row[hi_col]))
    series = [Series(label, tuple(data[label][0]), tuple(data[label][1]),
                     band=(tuple(data[label][2]), tuple(data[label][3])))
              for label in order]
    svg_path.write_text(line_plot(
        series, title="best score by iteration (mean and 95% band)",
        x_label="iteration", y_label="running best"))


def _plot_advantage_file(csv_path: Path, svg_path: Path):
    header, rows = _read_csv(csv_path)
    k_col = header.index("k")
    ratio_col = header.index("ratio")
    xs, ys = [], []
    for row in rows:
        ratio = float(row[ratio_col])
        if math.isfinite(ratio):
            xs.append(float(row[k_col]))
            ys.append(ratio)
    series = [Series("enhanced / plain", tuple(xs), tuple(ys)),
              Series("break-even", tuple(xs), tuple(1.0 for _ in xs))]
    svg_path.write_text(line_plot(
        series, title="score advantage by subset size",
        x_label="subset size", y_label="best-score ratio"))


def _plot_exit_file(times_csv: Path, summary_csv: Path, svg_path: Path):
    _, time_rows = _read_csv(times_csv)
    times = [int(row[2]) for row in time_rows]
    header, rows = _read_csv(summary_csv)
    p = float(rows[0][header.index("per_step_probability")])
    tmin, tmax = min(times), max(times)
    width = max(1, math.ceil((tmax - tmin + 1) / 24))
    n_bins = math.ceil((tmax - tmin + 1) / width)
    edges = [tmin + j * width for j in range(n_bins + 1)]
    counts = [0] * n_bins
    for t in times:
        counts[min((t - tmin) // width, n_bins - 1)] += 1
    surv = lambda t: (1.0 - p) ** max(0, t)  # P(T > t)
    xs = [e + width / 2 for e in edges[:-1]]
    ys = [len(times) * (surv(edges[j] - 1) - surv(edges[j + 1] - 1))
          for j in range(n_bins)]
    overlay = Series("geometric prediction", tuple(xs), tuple(ys))
    svg_path.write_text(histogram_plot(
        edges, counts, overlay=overlay, title="first-exit times",
        x_label="exit step", y_label="trials"))


def _render_plots(run_dir: Path) -> list:
    """(Re)draw every known figure from the CSVs in a run directory."""
    written = []
    curves = run_dir / "curves.csv"
    if curves.exists():
        _plot_curves_file(curves, run_dir / "curves.svg")
        written.append("curves.svg")
    advantage = run_dir / "advantage.csv"
    if advantage.exists():
        _plot_advantage_file(advantage, run_dir / "advantage.svg")
        written.append("advantage.svg")
    times = run_dir / "exit_times.csv"
    summary = run_dir / "exit_summary.csv"
    if times.exists() and summary.exists():
        _plot_exit_file(times, summary, run_dir / "exit_times.svg")
        written.append("exit_times.svg")
    return written


def _chain_for_bench(opts, g: Graph, k: int,
                     sampler: str = "glauber") -> ChainConfig:
    """Proposal-chain config for a bench preset.

    Without an explicit fugacity the preset aims the chain at the
    post-selection size: for small fugacity the single-loop matching size
    is about fugacity times the edge count, so k/2 edges wants about
    (k/2)/m; the double loop weighs states by fugacity^(2|X|), so it gets
    the square root.  Post-selection conditions on the size anyway — the
    fugacity only has to make that size reachable, not exact."""
    if opts.get("fugacity") is None and opts.get("c") is None:
        frac = (k / 2) / max(1, g.m)
        lam = math.sqrt(frac) if sampler == "double_loop" else frac
        return ChainConfig(fugacity=max(1e-6, lam))
    return _chain_config({"fugacity": opts.get("fugacity"),
                          "c": opts.get("c")})


def _trajectory_bench(name, graph_desc, g, algs, opts, out_dir: Path) -> dict:
    master = opts["seed"]
    chash = _config_hash({"experiment": name, "graph": graph_desc,
                          "options": {k: str(v) for k, v in opts.items()},
                          "algorithms": [a for a, _ in algs]})
    failures = []
    results = _run_trials(g, algs, opts["seeds"], master, failures)
    _write_csv(out_dir / "summary.csv", _SUMMARY_HEADER,
               _summary_rows(chash, results))
    _write_csv(out_dir / "curves.csv", _CURVES_HEADER,
               _curve_rows(chash, master, results))
    outputs = ["summary.csv", "curves.csv"] + _render_plots(out_dir)
    finals = {label: [float(rec.best_score) for _, rec in trials]
              for label, trials in results.items()}
    stats = {label: (sum(v) / len(v) if v else 0.0,
                     sum(1 for b in v if b > 0))
             for label, v in finals.items()}
    return {"config_hash": chash, "outputs": outputs, "failures": failures,
            "resolved": {k: opts[k] for k in
                         ("fugacity_resolved", "fugacity_resolved_double")
                         if k in opts},
            "final_means": {label: s[0] for label, s in stats.items()},
            "positive_counts": {label: s[1] for label, s in stats.items()}}


# ---------------------------------------------------------------------------
# bench presets
# ---------------------------------------------------------------------------

def _rs_family(opts, objective, k, chain_for) -> list:
    base = SolverConfig(objective=objective, subset_size=k,
                        iterations=opts["iterations"], sampler="uniform",
                        mixing_steps=opts["mixing_steps"])
    algs = [("random_search", base)]
    for sampler in ("glauber", "jerrum", "double_loop"):
        algs.append((f"enhanced_rs_{sampler}",
                     replace(base, sampler=sampler, chain=chain_for(sampler))))
    return algs


def _sa_family(opts, objective, k, chain_for) -> list:
    sa = SAParams(initial_temperature=opts.get("t0", 1.0),
                  gamma=opts.get("gamma", 0.95))
    base = SolverConfig(objective=objective, subset_size=k,
                        iterations=opts["iterations"], sampler="uniform",
                        sa=sa, mixing_steps=opts["mixing_steps"])
    algs = [("simulated_annealing", base)]
    for sampler in ("glauber", "jerrum", "double_loop"):
        algs.append((f"enhanced_sa_{sampler}",
                     replace(base, sampler=sampler, chain=chain_for(sampler))))
    return algs


def _resolved_fugacities(opts, g: Graph, k: int) -> dict:
    """Record the fugacities a preset actually ran with, per sampler kind."""
    single = _chain_for_bench(opts, g, k)
    double = _chain_for_bench(opts, g, k, "double_loop")
    return {**opts,
            "fugacity_resolved": float(single.resolved_fugacity()),
            "fugacity_resolved_double": float(double.resolved_fugacity())}


def _bench_planted_clique(opts, out_dir: Path) -> dict:
    scale = opts["scale"]
    clique = max(2, _even(scale // 8))
    spec = GraphSpec.of("planted_clique", n=scale, clique_size=clique, p=0.2)
    g = gen_graph(spec, seed=derive_seed(opts["seed"], "graph"))
    desc = {"kind": spec.kind, **spec.as_dict(), "n": g.n, "m": g.m}
    opts = _resolved_fugacities(opts, g, clique)
    algs = _rs_family(opts, "hafnian", clique,
                      lambda s: _chain_for_bench(opts, g, clique, s))
    return _trajectory_bench("planted-clique", desc, g, algs, opts, out_dir)


def _bench_dense_subgraph(opts, out_dir: Path) -> dict:
    scale = opts["scale"]
    k = max(2, _even(scale * 5 // 16))
    spec = GraphSpec.of("decreasing_degree", n=scale)
    g = gen_graph(spec)
    desc = {"kind": spec.kind, **spec.as_dict(), "n": g.n, "m": g.m}
    opts = _resolved_fugacities(opts, g, k)
    algs = _sa_family(opts, "density", k,
                      lambda s: _chain_for_bench(opts, g, k, s))
    return _trajectory_bench("dense-subgraph", desc, g, algs, opts, out_dir)


def _bench_bipartite_hafnian(opts, out_dir: Path) -> dict:
    scale = opts["scale"]
    k = max(2, _even(scale // 8))
    spec = GraphSpec.of("random_bipartite", n_per_side=scale // 2, p=0.3)
    g = gen_graph(spec, seed=derive_seed(opts["seed"], "graph"))
    desc = {"kind": spec.kind, **spec.as_dict(), "n": g.n, "m": g.m}
    opts = _resolved_fugacities(opts, g, k)
    algs = _sa_family(opts, "hafnian", k,
                      lambda s: _chain_for_bench(opts, g, k, s))
    return _trajectory_bench("bipartite-hafnian", desc, g, algs, opts,
                             out_dir)


def _bench_sparse_bipartite(opts, out_dir: Path) -> dict:
    scale = opts["scale"]
    k = max(2, _even(scale // 8))
    spec = GraphSpec.of("sparse_bipartite", n_per_side=scale // 2,
                        n_edges=10 * scale)
    g = gen_graph(spec, seed=derive_seed(opts["seed"], "graph"))
    desc = {"kind": spec.kind, **spec.as_dict(), "n": g.n, "m": g.m}
    opts = _resolved_fugacities(opts, g, k)
    algs = _rs_family(opts, "hafnian", k,
                      lambda s: _chain_for_bench(opts, g, k, s))
    return _trajectory_bench("sparse-bipartite", desc, g, algs, opts, out_dir)


def _bench_score_advantage(opts, out_dir: Path) -> dict:
    scale = opts["scale"]
    spec = GraphSpec.of("erdos_renyi", n=scale, p=0.4)
    g = gen_graph(spec, seed=derive_seed(opts["seed"], "graph"))
    desc = {"kind": spec.kind, **spec.as_dict(), "n": g.n, "m": g.m}
    master = opts["seed"]
    chash = _config_hash({"experiment": "score-advantage", "graph": desc,
                          "options": {k: str(v) for k, v in opts.items()}})
    plain = SolverConfig(objective="hafnian", subset_size=2,
                         iterations=opts["iterations"], sampler="uniform",
                         mixing_steps=opts["mixing_steps"])
    ks = [k for k in range(opts["k_min"], opts["k_max"] + 1) if k % 2 == 0]
    rows = []
    for k in ks:
        chain = _chain_for_bench(opts, g, k, "double_loop")
        enhanced = replace(plain, sampler="double_loop", chain=chain)
        means = []
        for tag, base in (("plain", plain), ("enhanced", enhanced)):
            total = 0.0
            for j in range(opts["seeds"]):
                cfg = replace(base, subset_size=k,
                              seed=derive_seed(master, f"{tag}/k{k}/t{j}"))
                total += float(solver_for(cfg)(g, cfg).best_score)
            means.append(total / opts["seeds"])
        plain_mean, enhanced_mean = means
        if plain_mean == 0:
            ratio = 1.0 if enhanced_mean == 0 else math.inf
        else:
            ratio = enhanced_mean / plain_mean
        rows.append((chash, master, k, plain_mean, enhanced_mean, ratio,
                     float(chain.resolved_fugacity()), opts["seeds"]))
    _write_csv(out_dir / "advantage.csv",
               ("config_hash", "seed", "k", "plain_mean", "enhanced_mean",
                "ratio", "fugacity", "seeds"), rows)
    outputs = ["advantage.csv"] + _render_plots(out_dir)
    return {"config_hash": chash, "outputs": outputs, "failures": [],
            "ratios": {str(row[2]): row[5] for row in rows}}


def _bench_exit_time(opts, out_dir: Path) -> dict:
    squares = opts["squares"]
    lam = opts.get("fugacity")
    if lam is None:
        lam = 1.0
    trials = opts["trials"]
    master = opts["seed"]
    chash = _config_hash({"experiment": "exit-time", "squares": squares,
                          "fugacity": str(lam), "trials": trials,
                          "seed": master})
    result = exit_time_experiment(squares, lam, trials, seed=master)
    _write_csv(out_dir / "exit_times.csv",
               ("config_hash", "trial", "exit_step"),
               [(chash, i, t) for i, t in enumerate(result.times)])
    fit = None
    if trials >= 20:
        fit = geometric_fit(result.times,
                            float(result.per_step_probability))
    _write_csv(out_dir / "exit_summary.csv",
               ("config_hash", "seed", "n_squares", "fugacity", "trials",
                "mean", "stderr", "ci_lo", "ci_hi", "expected_mean",
                "per_step_probability", "fit_statistic", "fit_dof",
                "fit_passed_1pct"),
               [(chash, master, squares, lam, trials, result.mean,
                 result.stderr, result.ci95[0], result.ci95[1],
                 result.expected_mean, float(result.per_step_probability),
                 fit.statistic if fit else float("nan"),
                 fit.dof if fit else 0,
                 fit.passed if fit else False)])
    outputs = ["exit_times.csv", "exit_summary.csv"] + _render_plots(out_dir)
    print(result.summary())
    return {"config_hash": chash, "outputs": outputs, "failures": [],
            "mean": result.mean, "expected_mean": result.expected_mean}


_PRESETS = {
    "planted-clique": (_bench_planted_clique,
                       {"iterations": 1000, "mixing_steps": 10000}),
    "dense-subgraph": (_bench_dense_subgraph,
                       {"iterations": 1000, "mixing_steps": 1000}),
    "bipartite-hafnian": (_bench_bipartite_hafnian,
                          {"iterations": 1000, "mixing_steps": 1000}),
    "sparse-bipartite": (_bench_sparse_bipartite,
                         {"iterations": 200, "mixing_steps": 1000}),
    "score-advantage": (_bench_score_advantage,
                        {"iterations": 100, "mixing_steps": 1000}),
    "exit-time": (_bench_exit_time, {}),
}

_BENCH_DEFAULTS = {"scale": 64, "seeds": 10, "fugacity": None, "c": None,
                   "trials": 200, "squares": 4, "k_min": 4, "k_max": 12,
                   "seed": 0, "t0": 1.0, "gamma": 0.95}


def _run_preset(name: str, opts: dict, out_dir: Path) -> int:
    runner, preset_defaults = _PRESETS[name]
    merged = {**_BENCH_DEFAULTS, **preset_defaults}
    merged.update({k: v for k, v in opts.items() if v is not None})
    out_dir.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    info = runner(merged, out_dir)
    wall = time.perf_counter() - t0
    options = {k: merged[k] for k in sorted(merged) if merged[k] is not None}
    options.update(info.pop("resolved", {}))
    manifest = {"experiment": name,
                "config_hash": info["config_hash"],
                "seed": merged["seed"],
                "options": options,
                "outputs": info["outputs"],
                "results": {k: v for k, v in info.items()
                            if k not in ("config_hash", "outputs",
                                         "failures")},
                "failures": info["failures"],
                "timing": {"wall_time_s": f"{wall:.3f}"}}
    _write_manifest(out_dir / "manifest.txt", manifest)
    print(f"wrote {out_dir} ({', '.join(info['outputs'])})")
    if info["failures"]:
        print(f"{len(info['failures'])} trial(s) failed; see manifest",
              file=sys.stderr)
        return EXIT_INNER_BUDGET
    return EXIT_OK


# ---------------------------------------------------------------------------
# ExperimentSpec files
# ---------------------------------------------------------------------------

_SPEC_TASKS = ("sample", "solve", "verify", "bench", "exit-time")
_SPEC_TOP_KEYS = {"task", "name", "graph", "seed", "out_dir", "replicates",
                  "config"}
_SPEC_CONFIG_KEYS = {
    "sample": {"chain", "fugacity", "c", "steps", "burn_in", "samples",
               "post_select_k", "lazy", "inner", "inner_steps",
               "max_attempts", "on_inner_failure", "out"},
    "solve": {"alg", "objective", "k", "iterations", "sampler", "fugacity",
              "c", "mixing_steps", "retry_bound", "gamma", "t0", "seeds",
              "cold_restart"},
    "verify": {"mode", "dynamics", "fugacity", "c", "lazy", "law", "samples",
               "thin", "burn_in", "tol", "seed", "inner", "inner_steps",
               "max_attempts", "on_inner_failure"},
    "bench": {"scale", "seeds", "iterations", "mixing_steps", "fugacity",
              "c", "trials", "squares", "k_min", "k_max", "t0", "gamma"},
    "exit-time": {"squares", "fugacity", "trials"},
}


class ExperimentSpec:
    """A validated experiment description loaded from JSON.

    Top-level keys: ``task`` (required), ``name`` (preset name for bench),
    ``graph`` ({"kind", "params"}), ``seed``, ``out_dir``, ``replicates``
    and a per-task ``config`` block.  Validation happens entirely before
    any computation.
    """

    def __init__(self, task, name=None, graph=None, seed=0,
                 out_dir="runs/spec", replicates=1, config=None):
        self.task = task
        self.name = name
        self.graph = graph
        self.seed = seed
        self.out_dir = out_dir
        self.replicates = replicates
        self.config = config or {}

    @classmethod
    def from_file(cls, path) -> "ExperimentSpec":
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as err:
            raise CliError(f"cannot read spec {path}: {err}")
        return cls.from_dict(data)

    @classmethod
    def from_dict(cls, data) -> "ExperimentSpec":
        if not isinstance(data, dict):
            raise CliError("spec must be a JSON object")
        unknown = set(data) - _SPEC_TOP_KEYS
        if unknown:
            raise CliError(f"unknown spec keys: {sorted(unknown)}")
        task = data.get("task")
        if task not in _SPEC_TASKS:
            raise CliError(f"task must be one of {_SPEC_TASKS}, got {task!r}")
        graph = data.get("graph")
        if graph is not None:
            if (not isinstance(graph, dict)
                    or set(graph) - {"kind", "params", "seed"}):
                raise CliError(
                    'graph block must be {"kind", "params"[, "seed"]}')
            if graph.get("kind") not in _GRAPH_GENERATORS:
                raise CliError(f"unknown graph kind {graph.get('kind')!r}")
            params = graph.get("params", {})
            if not isinstance(params, dict) or not all(
                    isinstance(k, str) and isinstance(v, (int, float))
                    for k, v in params.items()):
                raise CliError("graph params must map names to numbers")
        config = data.get("config", {})
        if not isinstance(config, dict):
            raise CliError("config must be an object")
        allowed = _SPEC_CONFIG_KEYS[task]
        bad = set(config) - allowed
        if bad:
            raise CliError(f"unknown config keys for {task}: {sorted(bad)}")
        replicates = data.get("replicates", 1)
        if not isinstance(replicates, int) or replicates < 1:
            raise CliError("replicates must be a positive integer")
        if task == "bench" and data.get("name") not in _PRESETS:
            raise CliError(
                f"bench spec needs a preset name from {sorted(_PRESETS)}")
        return cls(task=task, name=data.get("name"), graph=graph,
                   seed=data.get("seed", 0), out_dir=data.get(
                       "out_dir", "runs/spec"),
                   replicates=replicates, config=config)

    def build_graph(self):
        if self.graph is None:
            raise CliError(f"task {self.task!r} needs a graph block")
        spec = GraphSpec.of(self.graph["kind"],
                            **self.graph.get("params", {}))
        seed = self.graph.get("seed", self.seed)
        g = gen_graph(spec, seed=seed)
        desc = {"source": "generator", "kind": spec.kind, **spec.as_dict(),
                "graph_seed": seed, "n": g.n, "m": g.m}
        return g, desc


def _run_spec(spec: ExperimentSpec) -> int:
    out_dir = _resolve_out(spec.out_dir)
    if spec.task == "bench":
        opts = dict(spec.config)
        opts["seed"] = spec.seed
        opts.setdefault("seeds", spec.replicates)
        return _run_preset(spec.name, opts, out_dir)
    if spec.task == "exit-time":
        opts = dict(spec.config)
        opts["seed"] = spec.seed
        return _run_preset("exit-time", opts, out_dir)
    g, desc = spec.build_graph()
    if spec.task == "solve":
        opts = {"alg": spec.config.get("alg", "rs"), "seed": spec.seed,
                **spec.config}
        if "k" not in opts:
            raise CliError("solve spec needs config.k")
        return _do_solve(g, desc, opts, out_dir)
    if spec.task == "sample":
        out_dir.mkdir(parents=True, exist_ok=True)
        opts = {"chain": "glauber", "steps": 10000, "burn_in": 0,
                "samples": 100, **spec.config}
        opts["chain"] = opts["chain"].replace("-", "_")
        code = EXIT_OK
        for r in range(spec.replicates):
            opts_r = dict(opts)
            opts_r["seed"] = derive_seed(spec.seed, f"replicate{r}")
            name = opts.get("out", "samples.csv")
            if spec.replicates > 1:
                stem, dot, ext = name.partition(".")
                name = f"{stem}_{r}{dot}{ext}"
            with open(out_dir / name, "w") as fh:
                code = _do_sample(g, opts_r, fh)
        return code
    # verify
    opts = {"mode": "balance", "dynamics": "glauber", "seed": spec.seed,
            **spec.config}
    if opts["mode"] == "balance":
        return _do_verify_balance(g, opts)
    return _do_verify_law(g, opts)


def _cmd_bench(args) -> int:
    if args.spec:
        if args.preset:
            raise CliError("give a preset name or --spec, not both")
        return _run_spec(ExperimentSpec.from_file(args.spec))
    if not args.preset:
        raise CliError(f"choose a preset {sorted(_PRESETS)} or --spec FILE")
    opts = {"scale": args.scale, "seeds": args.seeds,
            "iterations": args.iters, "mixing_steps": args.mixing_steps,
            "fugacity": args.fugacity, "c": args.c, "trials": args.trials,
            "squares": args.squares, "k_min": args.k_min,
            "k_max": args.k_max, "seed": args.seed}
    out_dir = _resolve_out(args.out_dir or f"runs/{args.preset}")
    return _run_preset(args.preset, opts, out_dir)


def _cmd_replot(args) -> int:
    run_dir = Path(args.dir)
    if not run_dir.is_dir():
        raise CliError(f"{args.dir} is not a directory")
    written = _render_plots(run_dir)
    if not written:
        print("no known CSV tables found", file=sys.stderr)
        return EXIT_FAILURE
    print("rewrote " + ", ".join(written))
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def _add_fugacity_args(p):
    p.add_argument("--lambda", dest="fugacity", type=_rational_arg,
                   default=None, metavar="L",
                   help="fugacity (accepts fractions like 1/4)")
    p.add_argument("--c", type=_rational_arg, default=None,
                   help="rescaling parameter; implies fugacity c^2")


def _add_inner_args(p):
    p.add_argument("--inner", choices=("chain", "exact"), default="chain",
                   help="inner perfect-matching sampler (double loop)")
    p.add_argument("--inner-steps", type=int, default=None,
                   help="inner chain steps per attempt")
    p.add_argument("--max-attempts", type=int, default=None,
                   help="inner chain attempts before giving up")
    p.add_argument("--on-inner-failure",
                   choices=("stay", "abort", "fallback"), default="stay",
                   help="policy when the inner budget runs out")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gbsmc",
        description="Matching-chain samplers, inner-loop perfect-matching "
                    "dynamics, and chain-enhanced subgraph search.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-graph", help="write a benchmark graph")
    p.add_argument("kind", choices=sorted(_GRAPH_KINDS))
    p.add_argument("--out", help="edge-list path (default stdout)")
    p.add_argument("--n", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--p", type=float)
    p.add_argument("--clique", type=int)
    p.add_argument("--edges", type=int)
    p.add_argument("--squares", type=int)
    p.add_argument("--seed", dest="graph_seed", type=_seed_arg, default=0)
    p.set_defaults(func=_cmd_gen_graph)

    p = sub.add_parser("sample", help="sample chain states")
    _add_graph_args(p)
    p.add_argument("--chain", choices=("glauber", "jerrum", "double-loop"),
                   default="glauber")
    _add_fugacity_args(p)
    p.add_argument("--steps", type=int, default=10000,
                   help="chain steps per sample window (default 10000)")
    p.add_argument("--burn-in", type=int, default=0)
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--post-select-k", type=int, default=None,
                   help="emit the latest state covering exactly k vertices")
    p.add_argument("--lazy", action="store_true")
    _add_inner_args(p)
    p.add_argument("--seed", type=_seed_arg, default=0)
    p.add_argument("--out", help="output file (default stdout)")
    p.set_defaults(func=_cmd_sample)

    p = sub.add_parser("solve", help="run solver trials")
    _add_graph_args(p)
    p.add_argument("--alg", required=True,
                   choices=sorted(_ALG_NAMES) + sorted(_ALG_NAMES.values()))
    p.add_argument("--objective", choices=("hafnian", "density"),
                   default="hafnian")
    p.add_argument("--k", type=int, required=True, help="subset size")
    p.add_argument("--iters", type=int, default=1000)
    p.add_argument("--sampler", choices=("glauber", "jerrum", "double-loop"),
                   default="double-loop")
    _add_fugacity_args(p)
    p.add_argument("--mixing-steps", type=int, default=1000)
    p.add_argument("--retry-bound", type=int, default=3)
    p.add_argument("--gamma", type=float, default=0.95)
    p.add_argument("--t0", type=float, default=1.0)
    p.add_argument("--seeds", type=int, default=1, help="seed-sweep size")
    p.add_argument("--seed", type=_seed_arg, default=0)
    p.add_argument("--cold-restart", action="store_true",
                   help="reset the proposal chain before every draw")
    p.add_argument("--out-dir", default="runs/solve")
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("verify", help="exactness checks")
    vsub = p.add_subparsers(dest="check", required=True)
    pb = vsub.add_parser("balance", help="detailed-balance certificate")
    _add_graph_args(pb)
    pb.add_argument("--dynamics", required=True,
                    choices=("glauber", "jerrum", "double-loop",
                             "double-loop-weighted", "pm", "pm-weighted"))
    _add_fugacity_args(pb)
    pb.add_argument("--lazy", action="store_true")
    pb.add_argument("--tol", type=float, default=1e-12)
    pb.set_defaults(func=_cmd_verify)
    pl = vsub.add_parser("law", help="empirical-vs-exact stationary TV")
    _add_graph_args(pl)
    pl.add_argument("--dynamics",
                    choices=("glauber", "jerrum", "double-loop"),
                    default="glauber")
    _add_fugacity_args(pl)
    pl.add_argument("--law", choices=LAW_KINDS, default=None,
                    help="target law (default fits the dynamics)")
    pl.add_argument("--samples", type=int, default=100000)
    pl.add_argument("--thin", type=int, default=None,
                    help="steps between kept samples (default: edge count)")
    pl.add_argument("--burn-in", type=int, default=1000)
    pl.add_argument("--tol", type=float, default=0.05)
    pl.add_argument("--lazy", action="store_true")
    _add_inner_args(pl)
    pl.add_argument("--seed", type=_seed_arg, default=0)
    pl.set_defaults(func=_cmd_verify)

    p = sub.add_parser("bench", help="run a named experiment preset")
    p.add_argument("preset", nargs="?", choices=sorted(_PRESETS))
    p.add_argument("--spec", help="ExperimentSpec JSON file")
    p.add_argument("--out-dir", default=None)
    p.add_argument("--scale", type=int, default=None,
                   help="total vertex count (structures shrink with it)")
    p.add_argument("--seeds", type=int, default=None)
    p.add_argument("--iters", type=int, default=None)
    p.add_argument("--mixing-steps", type=int, default=None)
    _add_fugacity_args(p)
    p.add_argument("--trials", type=int, default=None,
                   help="exit-time trial count")
    p.add_argument("--squares", type=int, default=None)
    p.add_argument("--k-min", type=int, default=None)
    p.add_argument("--k-max", type=int, default=None)
    p.add_argument("--seed", type=_seed_arg, default=None)
    p.set_defaults(func=_cmd_bench)

    p = sub.add_parser("replot", help="regenerate figures from CSVs")
    p.add_argument("--dir", required=True)
    p.set_defaults(func=_cmd_replot)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as err:
        print(f"error: {err}", file=sys.stderr)
        return err.code
    except PostSelectionMiss as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_STARVATION
    except (InnerSamplerError, PMSampleBudgetError, RejectionCapError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INNER_BUDGET
    except (OracleGuardError, EnumerationCapError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_ORACLE_GUARD
    except (GraphError, ChainConfigError, SolverConfigError, PMStateError,
            ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
