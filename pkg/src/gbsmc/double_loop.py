"""Double-loop Glauber dynamics: vertex sets weighted by squared hafnians.

The outer chain is the single-loop add/remove walk with fugacity lambda^2,
except that removing an edge ``e`` of the current matching X is gated by an
*inner* draw: sample a uniform perfect matching E of the subgraph induced by
V(X), and only if ``e`` landed in E may it be removed (with probability
1/(1+lambda^2)).  The gate thins removals by Haf(G_{X - e}) / Haf(G_X), which
tilts the stationary law from lambda^|X| to

    pi(X) proportional to lambda^(2|X|) * Haf(G_X),

whose vertex-set marginal is Pr[S] proportional to c^(2|S|) * Haf^2(S) with
lambda = c^2 — the Gaussian boson sampling distribution.  The weighted
variant gates removals by an extra 1/w_e^2 and draws the inner matching with
probability proportional to its weight, giving Pr[S] ~ lambda^|S| * Haf^2(S)
for the weighted hafnian.

Two inner samplers are available: ``"chain"`` runs the perfect-matching
chain of :mod:`gbsmc.pm_chain` under a finite budget (the real algorithm),
and ``"exact"`` replaces it with an enumeration-backed exact draw — the
reference used by kernel-level diagnostics and the hard-instance experiment,
where the analysis assumes exactly-uniform inner samples.
"""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass, field

from .graphs import Graph, Matching
from .glauber import ChainConfig, ChainConfigError, _drive_glauber
from .hafnian import hafnian_bits
from .pm_chain import PMSamplerConfig, _run_restricted
from .seeds import derive_seed


class PostSelectionMiss(RuntimeError):
    """No state of the requested size occurred within the step budget."""


class InnerSamplerError(RuntimeError):
    """Inner perfect-matching draw exhausted its budget (policy: abort)."""


class RejectionCapError(RuntimeError):
    """Rejection sampler hit its round cap without an acceptance."""


@dataclass
class InnerStats:
    """Bookkeeping for the inner sampler across one outer run."""
    calls: int = 0
    shortcuts: int = 0   # |X| = 1 removals, where the inner draw is forced
    failures: int = 0


@dataclass
class DoubleLoopConfig:
    """Outer chain config plus inner-sampler budgets and failure policy.

    ``on_inner_failure="stay"`` treats an exhausted inner budget as a
    rejected removal (the default: keeps the chain running and is counted in
    :class:`InnerStats`); ``"abort"`` raises; ``"fallback"`` substitutes the
    outer state's own matching for the missing draw — X is always a perfect
    matching of the subgraph it induces, so the proposed edge counts as hit.
    Frequent fallbacks loosen the removal gate (the stationary law drifts
    from Haf toward plain counting), which is fine for search proposals but
    not for law-grade sampling.  ``inner`` selects the chain inner sampler
    or the exact enumeration-backed one.
    """
    chain: ChainConfig = field(default_factory=ChainConfig)
    pm: PMSamplerConfig = field(default_factory=PMSamplerConfig)
    on_inner_failure: str = "stay"
    inner: str = "chain"

    def __post_init__(self):
        if self.on_inner_failure not in ("stay", "abort", "fallback"):
            raise ChainConfigError(
                f"unknown inner-failure policy {self.on_inner_failure!r}")
        if self.inner not in ("chain", "exact"):
            raise ChainConfigError(f"unknown inner sampler {self.inner!r}")


def _drive_double(g, x, lam, cfg, steps, rng, *, weighted,
                  stats=None, target_edges=-1, collect=None,
                  key_kind="vertexset", thin=0, burn_in=0, start_step=0,
                  haf_memo=None):
    """Run ``steps`` outer moves, mutating ``x``; same collection contract
    as the single-loop drivers."""
    if weighted and g.weighted and min(g.weights) < 1:
        raise ChainConfigError("weighted double loop needs all weights >= 1; "
                               "normalize_weights() first")
    m = g.m
    edges = g.edges
    ebits = g.edge_bits
    idxs = x.idxs
    partner = x.partner
    covered = x.covered
    rnd = rng.random
    lam2 = float(lam) * float(lam)
    p_add = lam2 / (1.0 + lam2)
    gate = 1.0 / (1.0 + lam2)
    wf = [float(w) for w in g.weights] if (weighted and g.weighted) else None
    exact_inner = cfg.inner == "exact"
    pm_cfg = cfg.pm
    abort = cfg.on_inner_failure == "abort"
    fallback = cfg.on_inner_failure == "fallback"
    if stats is None:
        stats = InnerStats()

    snap, snap_step = None, None
    if target_edges >= 0 and len(idxs) == target_edges:
        snap, snap_step = tuple(idxs), start_step
    countdown = thin if collect is not None else -1
    vertex_keys = key_kind == "vertexset"
    if haf_memo is None:
        haf_memo = {}

    for t in range(start_step + 1, start_step + steps + 1):
        if m:
            i = int(rnd() * m)
            if i == m:
                i = m - 1
            b = ebits[i]
            if not covered & b:
                if rnd() < p_add:
                    u, v = edges[i]
                    idxs.add(i)
                    covered |= b
                    partner[u] = v
                    partner[v] = u
            else:
                u, v = edges[i]
                if partner[u] == v:
                    # edge of X proposed for removal: consult the inner draw
                    in_inner = None
                    if len(idxs) == 1:
                        stats.shortcuts += 1
                        in_inner = True  # 2-vertex subgraph: E is forced
                    elif exact_inner:
                        x.covered = covered
                        big = hafnian_bits(g, covered, haf_memo)
                        small = hafnian_bits(g, covered & ~b, haf_memo)
                        ratio = float(small) / float(big)
                        if wf is not None:
                            ratio *= wf[i]
                        in_inner = rnd() < ratio
                    else:
                        stats.calls += 1
                        pool = [j for j in range(m) if not ebits[j] & ~covered]
                        nv = 2 * len(idxs)
                        got = _run_restricted(
                            g, covered, pool, idxs,
                            pm_cfg.steps_for(nv), pm_cfg.attempts_for(nv),
                            rng, weighted=weighted and g.weighted)
                        if got is None:
                            stats.failures += 1
                            if abort:
                                x.covered = covered
                                raise InnerSamplerError(
                                    f"inner budget exhausted at step {t}")
                            # "stay" rejects the removal; "fallback" stands
                            # in X itself (a perfect matching of V(X) that
                            # contains the proposed edge by construction).
                            in_inner = fallback
                        else:
                            in_inner = i in got
                    if in_inner:
                        accept = gate
                        if wf is not None:
                            wi = wf[i]
                            accept = gate / (wi * wi)
                        if rnd() < accept:
                            idxs.remove(i)
                            covered &= ~b
                            partner[u] = -1
                            partner[v] = -1
        if target_edges >= 0 and len(idxs) == target_edges:
            snap, snap_step = tuple(idxs), t
        if countdown >= 0 and t > burn_in:
            countdown -= 1
            if countdown <= 0:
                countdown = thin
                collect[covered if vertex_keys else
                        tuple(sorted(edges[j] for j in idxs))] += 1
    x.covered = covered
    return snap, snap_step, stats


def double_loop_step(g: Graph, x: Matching, cfg: DoubleLoopConfig, rng,
                     stats=None) -> Matching:
    """One outer move of the double-loop dynamics; mutates and returns x.

    For weighted graphs use :func:`weighted_double_loop_step` — this
    entry point deliberately refuses them rather than silently sampling
    the wrong law.
    """
    if g.weighted:
        raise ChainConfigError(
            "graph has weights; use weighted_double_loop_step")
    _drive_double(g, x, cfg.chain.resolved_fugacity(), cfg, 1, rng,
                  weighted=False, stats=stats)
    return x


def weighted_double_loop_step(g: Graph, x: Matching, cfg: DoubleLoopConfig,
                              rng, stats=None) -> Matching:
    """One outer move of the weighted variant (reduces to the plain step on
    unweighted graphs); mutates and returns x."""
    _drive_double(g, x, cfg.chain.resolved_fugacity(), cfg, 1, rng,
                  weighted=True, stats=stats)
    return x


def sample_vertex_set(g: Graph, cfg: DoubleLoopConfig,
                      post_select_size=None) -> int:
    """Run the outer chain for ``cfg.chain.steps`` moves and return the
    final vertex set V(X_T) as a bitset.

    With ``post_select_size`` the most recent state of exactly that many
    vertices is returned instead; :class:`PostSelectionMiss` if none
    occurred.  Weighted graphs automatically use the weighted dynamics.
    """
    target_edges = -1
    if post_select_size is not None:
        if post_select_size % 2:
            raise ChainConfigError(
                f"post-selection size {post_select_size} is odd")
        target_edges = post_select_size // 2
    rng = random.Random(cfg.chain.seed)
    x = cfg.chain.make_initial(g)
    snap, _, _ = _drive_double(g, x, cfg.chain.resolved_fugacity(), cfg,
                               cfg.chain.steps, rng, weighted=g.weighted,
                               target_edges=target_edges)
    if post_select_size is None:
        return x.covered
    if snap is None:
        raise PostSelectionMiss(
            f"no {post_select_size}-vertex state in {cfg.chain.steps} steps")
    bits = 0
    for i in snap:
        bits |= g.edge_bits[i]
    return bits


def vertex_set_histogram(g: Graph, cfg: DoubleLoopConfig, n_samples: int,
                         thin: int = 1, burn_in: int = 0):
    """Counter of vertex-set bitsets visited by one long outer run
    (every ``thin``-th state after ``burn_in``), plus inner stats."""
    rng = random.Random(cfg.chain.seed)
    x = cfg.chain.make_initial(g)
    counts: Counter = Counter()
    total = burn_in + n_samples * thin
    _, _, stats = _drive_double(g, x, cfg.chain.resolved_fugacity(), cfg,
                                total, rng, weighted=g.weighted,
                                collect=counts, thin=thin, burn_in=burn_in)
    return counts, stats


def rejection_sample(g: Graph, cfg: ChainConfig, max_rounds: int,
                     *, round_steps=None) -> int:
    """Accept-if-equal rejection sampling on top of two single-loop chains.

    Both chains run independently for ``cfg.steps`` mixing moves; then the
    pair is compared every ``round_steps`` further moves (default: the same
    mixing budget) until both show the same vertex set, which is returned.
    Marginally each chain's vertex set follows c^|S| Haf(S), so accepted sets
    follow its square — the same law the double loop targets.
    """
    for bits in rejection_sample_stream(g, cfg, max_rounds=max_rounds,
                                        round_steps=round_steps, limit=1):
        return bits
    raise RejectionCapError(f"no acceptance within {max_rounds} rounds")


def rejection_sample_stream(g: Graph, cfg: ChainConfig, *, max_rounds: int,
                            round_steps=None, limit=None):
    """Yield accepted vertex-set bitsets, at most ``limit`` of them.

    ``max_rounds`` caps the comparisons spent per accepted sample;
    exceeding it raises :class:`RejectionCapError`.
    """
    lam = cfg.resolved_fugacity()
    if round_steps is None:
        round_steps = max(1, cfg.steps)
    rng_a = random.Random(derive_seed(cfg.seed, "reject-a"))
    rng_b = random.Random(derive_seed(cfg.seed, "reject-b"))
    xa = cfg.make_initial(g)
    xb = cfg.make_initial(g)
    _drive_glauber(g, xa, lam, cfg.lazy, cfg.steps, rng_a)
    _drive_glauber(g, xb, lam, cfg.lazy, cfg.steps, rng_b)
    produced = 0
    while limit is None or produced < limit:
        for _ in range(max_rounds):
            if xa.covered == xb.covered:
                break
            _drive_glauber(g, xa, lam, cfg.lazy, round_steps, rng_a)
            _drive_glauber(g, xb, lam, cfg.lazy, round_steps, rng_b)
        else:
            raise RejectionCapError(
                f"no acceptance within {max_rounds} rounds")
        yield xa.covered
        produced += 1
        # decorrelate before hunting for the next acceptance
        _drive_glauber(g, xa, lam, cfg.lazy, round_steps, rng_a)
        _drive_glauber(g, xb, lam, cfg.lazy, round_steps, rng_b)
