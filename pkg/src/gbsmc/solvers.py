"""Stochastic search for max-hafnian and densest-k-subgraph targets.

Four algorithms over k-vertex subsets of a host graph: random search and
simulated annealing, each in a plain flavor (uniform proposals) and an
enhanced flavor whose proposals come from a matching chain with
post-selection — the chain is advanced until its most recent state covers
exactly k vertices, and that vertex set is the proposal.  Chains
concentrate on subsets rich in perfect matchings, which is correlated with
both objectives, so the enhanced variants spend their evaluation budget in
a much better region than blind sampling.

Budget fairness is a hard contract here: every variant performs exactly
``iterations`` objective evaluations per trial, so best-score comparisons
between plain and enhanced runs are like for like.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, replace
from typing import Optional

from .graphs import Graph, bitset, bits_to_tuple
from .glauber import ChainConfig, _drive_glauber, _drive_jerrum
from .double_loop import DoubleLoopConfig, InnerStats, _drive_double
from .pm_chain import PMSamplerConfig
from .hafnian import count_induced_edges, hafnian_bits
from .seeds import child_rng, derive_seed


class SolverConfigError(ValueError):
    """Rejected solver configuration."""


OBJECTIVES = ("hafnian", "density")
SAMPLERS = ("uniform", "glauber", "jerrum", "double_loop")
_HAFNIAN_SIZE_GUARD = 32


@dataclass
class SAParams:
    """Annealing schedule: temperature starts at ``initial_temperature``
    and decays by ``gamma`` after every proposal."""
    initial_temperature: float = 1.0
    gamma: float = 0.95


@dataclass
class SolverConfig:
    objective: str = "hafnian"
    subset_size: int = 2
    iterations: int = 100
    sampler: str = "uniform"
    chain: object = None          # ChainConfig / DoubleLoopConfig for enhanced runs
    sa: Optional[SAParams] = None
    seed: object = 0
    mixing_steps: int = 1000      # chain budget per enhanced proposal
    retry_bound: int = 3          # post-selection retries before fallback
    warm_start: bool = True       # keep chain state across iterations


@dataclass
class TrialRecord:
    """Full provenance of one solver trial."""
    algorithm: str
    config: SolverConfig
    best_set: Optional[int]       # vertex bitset, None if nothing scored > 0
    best_score: object
    score_trajectory: tuple       # running best, one entry per iteration
    evaluations: int
    inner_failures: int
    starvation_count: int
    wall_time: float

    def best_vertices(self):
        return None if self.best_set is None else bits_to_tuple(self.best_set)


def objective_value(g: Graph, objective: str, bits: int):
    """Score a vertex set: perfect-matching (weighted) count, or edge
    density.  The empty set scores 0 under both objectives."""
    if bits == 0:
        return 0
    if objective == "hafnian":
        return hafnian_bits(g, bits)
    return count_induced_edges(g, bits) / bits.bit_count()


def _validate(g: Graph, cfg: SolverConfig, *, enhanced: bool, need_sa: bool):
    if cfg.objective not in OBJECTIVES:
        raise SolverConfigError(f"unknown objective {cfg.objective!r}")
    if cfg.sampler not in SAMPLERS:
        raise SolverConfigError(f"unknown sampler {cfg.sampler!r}")
    if not 1 <= cfg.subset_size <= g.n:
        raise SolverConfigError(
            f"subset size {cfg.subset_size} outside 1..{g.n}")
    if cfg.iterations < 0:
        raise SolverConfigError("iterations must be non-negative")
    if cfg.objective == "hafnian":
        if cfg.subset_size % 2:
            raise SolverConfigError(
                "hafnian objective needs an even subset size")
        if cfg.subset_size > _HAFNIAN_SIZE_GUARD:
            raise SolverConfigError(
                f"hafnian objective guarded at {_HAFNIAN_SIZE_GUARD} vertices")
    if enhanced:
        if cfg.sampler == "uniform":
            raise SolverConfigError(
                "enhanced variants need a chain sampler "
                "(glauber, jerrum, or double_loop)")
        if cfg.subset_size % 2:
            raise SolverConfigError(
                "chain proposals cover an even number of vertices; "
                "enhanced variants need an even subset size")
    elif cfg.sampler != "uniform":
        raise SolverConfigError(
            f"plain variants use the uniform sampler, not {cfg.sampler!r}")
    if need_sa:
        if cfg.sa is None:
            raise SolverConfigError("this solver needs sa parameters")
        if not 0 < cfg.sa.gamma < 1:
            raise SolverConfigError(f"gamma {cfg.sa.gamma} outside (0, 1)")
        if not cfg.sa.initial_temperature > 0:
            raise SolverConfigError("initial temperature must be positive")


class _ChainProposals:
    """Post-selected k-subset proposals from a persistent chain.

    One instance per trial; the chain state and RNG stream persist across
    draws when ``warm_start`` (the default), or reset to the configured
    initial state before every draw otherwise.
    """

    def __init__(self, g: Graph, cfg: SolverConfig):
        self.g = g
        self.cfg = cfg
        self.rng = child_rng(cfg.seed, "proposal-chain")
        self.stats = InnerStats()
        chain = cfg.chain
        if cfg.sampler == "double_loop":
            if chain is None or isinstance(chain, ChainConfig):
                # Search-grade inner budget: proposals only need an ergodic
                # inner draw, not certified uniformity, and the exactness
                # default (vertex count to the 4th power) is hopeless inside
                # a search loop on host-sized subgraphs.  Failed draws fall
                # back to the state's own matching — under "stay" the missed
                # removals pile up and the chain drifts far above the
                # post-selection size.  Pass a full DoubleLoopConfig to
                # override.
                pm = PMSamplerConfig(inner_steps=max(64, 4 * g.n),
                                     max_attempts=2)
                chain = DoubleLoopConfig(
                    chain=chain if chain is not None
                    else ChainConfig(fugacity=1.0), pm=pm,
                    on_inner_failure="fallback")
            self.dl_cfg = chain
            self.chain_cfg = chain.chain
        else:
            if chain is None:
                chain = ChainConfig(fugacity=1.0)
            if not isinstance(chain, ChainConfig):
                raise SolverConfigError(
                    f"{cfg.sampler} sampler takes a ChainConfig")
            self.dl_cfg = None
            self.chain_cfg = chain
        self.lam = self.chain_cfg.resolved_fugacity()
        self.x = self.chain_cfg.make_initial(g)

    def _advance(self, target_edges: int):
        if self.cfg.sampler == "glauber":
            return _drive_glauber(self.g, self.x, self.lam,
                                  self.chain_cfg.lazy, self.cfg.mixing_steps,
                                  self.rng, target_edges=target_edges)
        if self.cfg.sampler == "jerrum":
            return _drive_jerrum(self.g, self.x, self.lam,
                                 self.chain_cfg.lazy, self.cfg.mixing_steps,
                                 self.rng, target_edges=target_edges)
        snap, step, _ = _drive_double(self.g, self.x, self.lam, self.dl_cfg,
                                      self.cfg.mixing_steps, self.rng,
                                      weighted=self.g.weighted,
                                      stats=self.stats,
                                      target_edges=target_edges)
        return snap, step

    def draw(self, k_vertices: int):
        """Vertex bitset of the latest size-k state, or None on starvation
        (``retry_bound`` extra windows exhausted)."""
        if not self.cfg.warm_start:
            self.x = self.chain_cfg.make_initial(self.g)
        target = k_vertices // 2
        for _ in range(self.cfg.retry_bound + 1):
            snap, _ = self._advance(target)
            if snap is not None:
                bits = 0
                for i in snap:
                    bits |= self.g.edge_bits[i]
                return bits
        return None


def _uniform_subset(rng, n: int, k: int) -> list:
    return sorted(rng.sample(range(n), k))


def random_search(g: Graph, cfg: SolverConfig) -> TrialRecord:
    """Score ``iterations`` i.i.d. uniform k-subsets; keep the strict best."""
    _validate(g, cfg, enhanced=False, need_sa=False)
    t0 = time.perf_counter()
    rng = child_rng(cfg.seed, "rs")
    best, best_set = 0, None
    traj = []
    evals = 0
    for _ in range(cfg.iterations):
        bits = bitset(_uniform_subset(rng, g.n, cfg.subset_size))
        score = objective_value(g, cfg.objective, bits)
        evals += 1
        if score > best:
            best, best_set = score, bits
        traj.append(best)
    return TrialRecord("random_search", cfg, best_set, best, tuple(traj),
                       evals, 0, 0, time.perf_counter() - t0)


def enhanced_random_search(g: Graph, cfg: SolverConfig) -> TrialRecord:
    """Random search with chain-drawn proposals.

    Each iteration takes the chain's latest post-selected k-subset; an
    iteration whose draw starves falls back to one uniform subset so the
    evaluation budget stays identical to plain random search (the fallback
    is counted in ``starvation_count``).
    """
    _validate(g, cfg, enhanced=True, need_sa=False)
    t0 = time.perf_counter()
    rng = child_rng(cfg.seed, "ers-fallback")
    chain = _ChainProposals(g, cfg)
    best, best_set = 0, None
    traj = []
    evals = 0
    starved = 0
    for _ in range(cfg.iterations):
        bits = chain.draw(cfg.subset_size)
        if bits is None:
            starved += 1
            bits = bitset(_uniform_subset(rng, g.n, cfg.subset_size))
        score = objective_value(g, cfg.objective, bits)
        evals += 1
        if score > best:
            best, best_set = score, bits
        traj.append(best)
    return TrialRecord("enhanced_random_search", cfg, best_set, best,
                       tuple(traj), evals, chain.stats.failures, starved,
                       time.perf_counter() - t0)


def _anneal(g: Graph, cfg: SolverConfig, propose, rng) -> tuple:
    """Shared Metropolis loop: ``propose(current, keep_count)`` supplies the
    refreshed part of each neighbor.  Returns trajectory and best info.

    Iteration 1 evaluates the uniform starting subset; each later iteration
    keeps a uniformly-chosen prefix of the current subset, refreshes the
    rest, and accepts with probability min(1, exp((f_new - f_cur)/t)).
    """
    k = cfg.subset_size
    current = _uniform_subset(rng, g.n, k)
    f_cur = objective_value(g, cfg.objective, bitset(current))
    best, best_set = (f_cur, bitset(current)) if f_cur > 0 else (0, None)
    traj = [best]
    evals = 1
    temp = cfg.sa.initial_temperature
    for _ in range(cfg.iterations - 1):
        m = rng.randint(0, k - 1)
        keep = sorted(rng.sample(current, m))
        fresh = propose(keep, k - m)
        candidate = sorted(keep + fresh)
        f_new = objective_value(g, cfg.objective, bitset(candidate))
        evals += 1
        if f_new > best:
            best, best_set = f_new, bitset(candidate)
        delta = float(f_new) - float(f_cur)
        if delta >= 0 or rng.random() < math.exp(delta / temp):
            current, f_cur = candidate, f_new
        temp *= cfg.sa.gamma
        traj.append(best)
    return traj, best, best_set, evals


def simulated_annealing(g: Graph, cfg: SolverConfig) -> TrialRecord:
    """Metropolis search with uniform refreshes and geometric cooling."""
    _validate(g, cfg, enhanced=False, need_sa=True)
    if cfg.iterations == 0:
        return TrialRecord("simulated_annealing", cfg, None, 0, (), 0, 0, 0,
                           0.0)
    t0 = time.perf_counter()
    rng = child_rng(cfg.seed, "sa")

    def refresh(keep, need):
        banned = set(keep)
        pool = [v for v in range(g.n) if v not in banned]
        return rng.sample(pool, need)

    traj, best, best_set, evals = _anneal(g, cfg, refresh, rng)
    return TrialRecord("simulated_annealing", cfg, best_set, best,
                       tuple(traj), evals, 0, 0, time.perf_counter() - t0)


def enhanced_simulated_annealing(g: Graph, cfg: SolverConfig) -> TrialRecord:
    """Annealing whose refreshed vertices come from chain proposals.

    The chain supplies a k-subset; vertices colliding with the kept part
    are discarded, the remainder is trimmed uniformly to the needed count.
    Draws that starve or cannot supply enough non-overlapping vertices are
    retried up to ``retry_bound`` times, then the iteration falls back to a
    uniform refresh (counted in ``starvation_count``).
    """
    _validate(g, cfg, enhanced=True, need_sa=True)
    if cfg.iterations == 0:
        return TrialRecord("enhanced_simulated_annealing", cfg, None, 0, (),
                           0, 0, 0, 0.0)
    t0 = time.perf_counter()
    rng = child_rng(cfg.seed, "esa")
    chain = _ChainProposals(g, cfg)
    starved = 0

    def refresh(keep, need):
        nonlocal starved
        banned = set(keep)
        for _ in range(cfg.retry_bound + 1):
            bits = chain.draw(cfg.subset_size)
            if bits is None:
                break
            usable = [v for v in bits_to_tuple(bits) if v not in banned]
            if len(usable) >= need:
                if len(usable) > need:
                    usable = rng.sample(usable, need)
                return sorted(usable)
        starved += 1
        pool = [v for v in range(g.n) if v not in banned]
        return rng.sample(pool, need)

    traj, best, best_set, evals = _anneal(g, cfg, refresh, rng)
    return TrialRecord("enhanced_simulated_annealing", cfg, best_set, best,
                       tuple(traj), evals, chain.stats.failures, starved,
                       time.perf_counter() - t0)


SOLVERS = {
    "random_search": random_search,
    "enhanced_random_search": enhanced_random_search,
    "simulated_annealing": simulated_annealing,
    "enhanced_simulated_annealing": enhanced_simulated_annealing,
}


def solver_for(cfg: SolverConfig):
    """Pick the solver a config describes: chain samplers run the enhanced
    variant, an ``sa`` block selects annealing."""
    enhanced = cfg.sampler != "uniform"
    if cfg.sa is not None:
        return (enhanced_simulated_annealing if enhanced
                else simulated_annealing)
    return enhanced_random_search if enhanced else random_search


def score_advantage(g: Graph, cfg_pair, k_range, n_seeds: int = 1) -> dict:
    """Mean-best ratio (enhanced over plain) per subset size.

    ``cfg_pair`` is (plain_cfg, enhanced_cfg); both run ``n_seeds`` trials
    per k with seeds derived from their own seed fields, and the ratio of
    the mean best scores is reported.  A zero plain mean gives ``inf``
    when the enhanced mean is positive, 1.0 when both found nothing.
    """
    plain_cfg, enhanced_cfg = cfg_pair
    out = {}
    for k in k_range:
        means = []
        for cfg in (plain_cfg, enhanced_cfg):
            total = 0.0
            for j in range(n_seeds):
                trial_cfg = replace(cfg, subset_size=k,
                                    seed=derive_seed(cfg.seed, f"k{k}/t{j}"))
                record = solver_for(trial_cfg)(g, trial_cfg)
                total += float(record.best_score)
            means.append(total / max(1, n_seeds))
        plain_mean, enhanced_mean = means
        if plain_mean == 0:
            out[k] = 1.0 if enhanced_mean == 0 else math.inf
        else:
            out[k] = enhanced_mean / plain_mean
    return out
