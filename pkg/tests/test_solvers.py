"""Subset-search solvers: fairness of budgets, validation, determinism."""

import dataclasses
import math

import pytest

from gbsmc import solvers
from gbsmc.glauber import ChainConfig
from gbsmc.graphs import Graph, bits_to_tuple, complete, planted_clique
from gbsmc.solvers import (
    SAParams,
    SolverConfig,
    SolverConfigError,
    enhanced_random_search,
    enhanced_simulated_annealing,
    objective_value,
    random_search,
    score_advantage,
    simulated_annealing,
    solver_for,
)

from oracles import naive_hafnian_subset


def _rs_cfg(**kw):
    base = dict(objective="hafnian", subset_size=4, iterations=20, seed=3)
    base.update(kw)
    return SolverConfig(**base)


# --- configuration validation -------------------------------------------

def test_unknown_objective_rejected():
    with pytest.raises(SolverConfigError, match="objective"):
        random_search(complete(6), _rs_cfg(objective="girth"))


def test_unknown_sampler_rejected():
    with pytest.raises(SolverConfigError, match="sampler"):
        random_search(complete(6), _rs_cfg(sampler="metropolis"))


def test_hafnian_objective_needs_even_subset():
    with pytest.raises(SolverConfigError, match="even"):
        random_search(complete(6), _rs_cfg(subset_size=3))


def test_hafnian_size_guard():
    g = Graph(40, [(i, i + 1) for i in range(39)])
    with pytest.raises(SolverConfigError, match="guarded"):
        random_search(g, _rs_cfg(subset_size=34))
    # density has no such guard
    random_search(g, _rs_cfg(objective="density", subset_size=34,
                             iterations=2))


def test_subset_size_must_fit_graph():
    with pytest.raises(SolverConfigError, match="outside"):
        random_search(complete(4), _rs_cfg(subset_size=6))
    with pytest.raises(SolverConfigError, match="outside"):
        random_search(complete(4), _rs_cfg(subset_size=0))


def test_enhanced_requires_chain_sampler():
    with pytest.raises(SolverConfigError, match="chain sampler"):
        enhanced_random_search(complete(6), _rs_cfg(sampler="uniform"))


def test_enhanced_requires_even_subset_even_for_density():
    cfg = _rs_cfg(objective="density", subset_size=3, sampler="glauber")
    with pytest.raises(SolverConfigError, match="even"):
        enhanced_random_search(complete(6), cfg)


def test_plain_rejects_chain_samplers():
    with pytest.raises(SolverConfigError, match="uniform"):
        random_search(complete(6), _rs_cfg(sampler="jerrum"))


def test_annealing_parameter_validation():
    g = complete(6)
    with pytest.raises(SolverConfigError, match="sa parameters"):
        simulated_annealing(g, _rs_cfg(sa=None))
    for bad_gamma in (0.0, 1.0, 1.5):
        with pytest.raises(SolverConfigError, match="gamma"):
            simulated_annealing(g, _rs_cfg(sa=SAParams(gamma=bad_gamma)))
    with pytest.raises(SolverConfigError, match="temperature"):
        simulated_annealing(
            g, _rs_cfg(sa=SAParams(initial_temperature=0.0)))


def test_glauber_sampler_rejects_double_loop_config():
    from gbsmc.double_loop import DoubleLoopConfig
    cfg = _rs_cfg(sampler="glauber",
                  chain=DoubleLoopConfig(chain=ChainConfig(fugacity=1.0)))
    with pytest.raises(SolverConfigError, match="ChainConfig"):
        enhanced_random_search(complete(6), cfg)


# --- objective scoring ----------------------------------------------------

def test_objective_value_empty_set_is_zero():
    g = complete(6)
    assert objective_value(g, "hafnian", 0) == 0
    assert objective_value(g, "density", 0) == 0


def test_objective_value_matches_direct_computations():
    g = planted_clique(12, 4, 0.3, seed=7)
    subset = (0, 1, 2, 3)
    bits = sum(1 << v for v in subset)
    assert objective_value(g, "hafnian", bits) == naive_hafnian_subset(
        g.n, g.edges, subset)
    edges_inside = sum(1 for (u, v) in g.edges
                       if u in subset and v in subset)
    assert objective_value(g, "density", bits) == edges_inside / 4


# --- budgets, trajectories, determinism -----------------------------------

def _all_variant_configs(iterations=30):
    chain = ChainConfig(fugacity=0.4)
    sa = SAParams(initial_temperature=1.0, gamma=0.9)
    return [
        ("random_search", _rs_cfg(iterations=iterations)),
        ("enhanced_random_search",
         _rs_cfg(iterations=iterations, sampler="glauber", chain=chain,
                 mixing_steps=60)),
        ("simulated_annealing", _rs_cfg(iterations=iterations, sa=sa)),
        ("enhanced_simulated_annealing",
         _rs_cfg(iterations=iterations, sampler="jerrum", chain=chain,
                 mixing_steps=60, sa=sa)),
    ]


def test_every_variant_spends_the_same_evaluation_budget():
    g = planted_clique(14, 4, 0.3, seed=1)
    for name, cfg in _all_variant_configs(iterations=30):
        record = solver_for(cfg)(g, cfg)
        assert record.algorithm == name
        assert record.evaluations == 30
        assert len(record.score_trajectory) == 30


def test_trajectory_is_running_best():
    g = planted_clique(16, 6, 0.25, seed=2)
    for _, cfg in _all_variant_configs(iterations=25):
        for seed in (0, 1, 2):
            record = solver_for(dataclasses.replace(cfg, seed=seed))(
                g, dataclasses.replace(cfg, seed=seed))
            traj = record.score_trajectory
            assert all(a <= b for a, b in zip(traj, traj[1:]))
            assert traj[-1] == record.best_score


def test_identical_seeds_reproduce_the_whole_record():
    g = planted_clique(14, 4, 0.35, seed=9)
    for _, cfg in _all_variant_configs(iterations=20):
        first = solver_for(cfg)(g, cfg)
        second = solver_for(cfg)(g, cfg)
        assert first.best_set == second.best_set
        assert first.best_score == second.best_score
        assert first.score_trajectory == second.score_trajectory
        assert first.starvation_count == second.starvation_count


def test_zero_iteration_annealing_returns_empty_record():
    record = simulated_annealing(
        complete(6), _rs_cfg(iterations=0, sa=SAParams()))
    assert record.evaluations == 0
    assert record.score_trajectory == ()
    assert record.best_set is None


def test_best_set_none_when_nothing_scores():
    g = Graph(6, [])  # no edges, so every pair has hafnian zero
    record = random_search(g, _rs_cfg(subset_size=2, iterations=10))
    assert record.best_set is None
    assert record.best_score == 0
    assert record.best_vertices() is None


def test_best_vertices_decodes_the_bitset():
    g = complete(6)
    record = random_search(g, _rs_cfg(iterations=5))
    assert record.best_vertices() == bits_to_tuple(record.best_set)
    assert len(record.best_vertices()) == 4


# --- chain-proposal plumbing ----------------------------------------------

def test_starved_draws_fall_back_without_losing_budget():
    # A single edge can never post-select at two edges, so every draw
    # starves and the uniform fallback must cover the full budget.
    g = Graph(8, [(0, 1)])
    cfg = _rs_cfg(subset_size=4, iterations=12, sampler="glauber",
                  chain=ChainConfig(fugacity=1.0), mixing_steps=40,
                  retry_bound=1)
    record = enhanced_random_search(g, cfg)
    assert record.starvation_count == 12
    assert record.evaluations == 12


def test_plain_solvers_never_build_chain_machinery(monkeypatch):
    def explode(self, *a, **kw):
        raise AssertionError("plain solver touched the proposal chain")

    monkeypatch.setattr(solvers._ChainProposals, "__init__", explode)
    g = complete(8)
    random_search(g, _rs_cfg(iterations=5))
    simulated_annealing(g, _rs_cfg(iterations=5, sa=SAParams()))
    with pytest.raises(AssertionError):
        enhanced_random_search(
            g, _rs_cfg(sampler="glauber", iterations=5))


def test_cold_restarts_run_and_reproduce():
    g = complete(8)
    cfg = _rs_cfg(iterations=10, sampler="glauber",
                  chain=ChainConfig(fugacity=0.5), mixing_steps=50,
                  warm_start=False)
    first = enhanced_random_search(g, cfg)
    second = enhanced_random_search(g, cfg)
    assert first.evaluations == 10
    assert first.score_trajectory == second.score_trajectory


def test_solver_for_mapping():
    assert solver_for(_rs_cfg()) is random_search
    assert solver_for(_rs_cfg(sampler="glauber")) is enhanced_random_search
    assert solver_for(_rs_cfg(sa=SAParams())) is simulated_annealing
    assert solver_for(_rs_cfg(sampler="double_loop", sa=SAParams())) \
        is enhanced_simulated_annealing


# --- directional behaviour and ratios -------------------------------------

def test_enhanced_search_finds_the_planted_matching_rich_set():
    g = planted_clique(24, 6, 0.25, seed=3)
    lam = 3 / g.m
    plain_total = enhanced_total = 0
    for seed in (0, 1, 2):
        plain = random_search(
            g, _rs_cfg(subset_size=6, iterations=80, seed=seed))
        enh = enhanced_random_search(
            g, _rs_cfg(subset_size=6, iterations=80, seed=seed,
                       sampler="glauber", chain=ChainConfig(fugacity=lam),
                       mixing_steps=400))
        plain_total += float(plain.best_score)
        enhanced_total += float(enh.best_score)
    assert enhanced_total >= plain_total


def test_score_advantage_sentinels_and_keys():
    # Two disjoint edges in a sea of isolated vertices: uniform sampling
    # at five tries essentially never scores, while the chain walks
    # straight to the only positive 4-set; size 6 is impossible for both.
    g = Graph(20, [(0, 1), (2, 3)])
    plain = SolverConfig(objective="hafnian", iterations=5,
                         sampler="uniform", seed=11)
    enhanced = SolverConfig(objective="hafnian", iterations=5,
                            sampler="glauber",
                            chain=ChainConfig(fugacity=1.0),
                            mixing_steps=200, seed=11)
    adv = score_advantage(g, (plain, enhanced), [4, 6], n_seeds=2)
    assert list(adv) == [4, 6]
    assert math.isinf(adv[4])
    assert adv[6] == 1.0


def test_score_advantage_finite_ratio():
    g = complete(8)
    cfg = SolverConfig(objective="density", iterations=6, sampler="uniform",
                       seed=5)
    adv = score_advantage(g, (cfg, cfg), [4], n_seeds=2)
    assert adv[4] == pytest.approx(1.0)
