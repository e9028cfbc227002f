"""(Near-)uniform sampling of perfect matchings via a local-move chain.

The chain walks perfect and near-perfect matchings (exactly one uncovered
vertex pair).  Pick an edge ``e = (u, v)`` uniformly at random:

* state perfect and ``e`` in it: drop ``e``;
* state near-perfect, both endpoints uncovered: add ``e``;
* state near-perfect, exactly one endpoint matched (say ``u`` to ``z``):
  slide — add ``e``, drop ``(z, u)``;
* anything else: hold.

Every move is matched by its mirror image at the same proposal probability,
so the stationary law is uniform over the state space.  The weighted variant
accepts removals with probability 1/w_e and slides with min(1, w_e/w_zu),
tilting the stationary law to Pr[M] proportional to the product of edge
weights.  On dense graphs the perfect states carry at least a 1/(2q^2+1)
share of the space (q = matching size), which is what makes "run, check,
retry" a practical uniform sampler for perfect matchings.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Optional

from .graphs import Graph, Matching


class PMStateError(ValueError):
    """Chain state is neither perfect nor near-perfect."""


class PMSampleBudgetError(RuntimeError):
    """All retry attempts elapsed without seeing a perfect matching."""

    def __init__(self, attempts):
        super().__init__(f"no perfect matching after {attempts} attempts")
        self.attempts = attempts


def default_inner_steps(n_vertices: int, c_mix: float = 1.0) -> int:
    """Per-attempt step budget: c_mix * n^4, floored at 16.

    The rigorous mixing bounds are much larger; this default trades
    certificates for practice and is recorded in experiment provenance.
    """
    return max(16, math.ceil(c_mix * n_vertices ** 4))


def default_max_attempts(n_vertices: int, failure_budget: float) -> int:
    """Retry count ceil((2 + 4q^2) * ln(2/eta)) with q = n_vertices/2.

    Chosen so that, given near-uniform per-attempt samples, all attempts
    miss the perfect states with probability at most eta.
    """
    q = n_vertices // 2
    return math.ceil((2 + 4 * q * q) * math.log(2.0 / failure_budget))


@dataclass
class PMSamplerConfig:
    """Budgets for :func:`sample_perfect_matching`.

    ``inner_steps`` (per attempt) and ``max_attempts`` default to
    :func:`default_inner_steps` / :func:`default_max_attempts` sized to the
    graph at hand when left as None.
    """
    failure_budget: float = 0.01
    inner_steps: Optional[int] = None
    max_attempts: Optional[int] = None
    c_mix: float = 1.0
    seed: object = 0

    def steps_for(self, n_vertices: int) -> int:
        if self.inner_steps is not None:
            return self.inner_steps
        return default_inner_steps(n_vertices, self.c_mix)

    def attempts_for(self, n_vertices: int) -> int:
        if self.max_attempts is not None:
            return self.max_attempts
        return default_max_attempts(n_vertices, self.failure_budget)


def _hole_count(m: Matching, vbits: int) -> int:
    holes = (vbits & ~m.covered).bit_count()
    if holes not in (0, 2):
        raise PMStateError(
            f"matching leaves {holes} vertices uncovered; the chain lives on "
            "perfect and near-perfect matchings only")
    return holes


def _step(g: Graph, m: Matching, rng, vbits: int, pool, weighted: bool):
    holes = _hole_count(m, vbits)
    k = len(pool)
    i = pool[min(int(rng.random() * k), k - 1)]
    u, v = g.edges[i]
    partner = m.partner
    pu, pv = partner[u], partner[v]
    if holes == 0:
        if pu == v:
            if not weighted or rng.random() < 1.0 / float(g.weights[i]):
                m.remove(i)
    elif pu == -1 and pv == -1:
        m.add(i)
    elif pu == -1 or pv == -1:
        if pu == -1:
            z = pv
            j = g.edge_index[(v, z) if v < z else (z, v)]
        else:
            z = pu
            j = g.edge_index[(u, z) if u < z else (z, u)]
        ok = True
        if weighted:
            ratio = float(g.weights[i]) / float(g.weights[j])
            ok = ratio >= 1.0 or rng.random() < ratio
        if ok:
            m.remove(j)
            m.add(i)
    return m


def pm_chain_step(g: Graph, m: Matching, rng) -> Matching:
    """One move of the uniform perfect-matching chain; mutates and returns m."""
    return _step(g, m, rng, g.full_bits, range(g.m), weighted=False)


def weighted_pm_chain_step(g: Graph, m: Matching, rng) -> Matching:
    """One move of the weight-proportional variant (weights must be >= 1)."""
    if g.weighted and min(g.weights) < 1:
        raise PMStateError("weighted chain needs all weights >= 1; "
                           "normalize_weights() first")
    return _step(g, m, rng, g.full_bits, range(g.m), weighted=g.weighted)


def _run_restricted(g: Graph, vbits: int, pool, start_idxs, steps: int,
                    attempts: int, rng, weighted: bool):
    """Drive the chain on the subgraph induced by ``vbits`` (edge indices in
    ``pool``), checking for perfection every ``steps`` moves.

    Returns the matching's edge-index set on success, None when the budget
    runs out.  Operates on host-graph labels throughout; ``start_idxs`` must
    cover ``vbits`` exactly (the outer chain's own state, in the double-loop
    context).
    """
    edges = g.edges
    eindex = g.edge_index
    weights = g.weights
    idxs = set(start_idxs)
    partner = [-1] * g.n
    for i in idxs:
        u, v = edges[i]
        partner[u] = v
        partner[v] = u
    holes = 0  # start state is perfect by contract
    k = len(pool)
    rnd = rng.random

    for _ in range(attempts):
        for _ in range(steps):
            i = pool[min(int(rnd() * k), k - 1)]
            u, v = edges[i]
            pu = partner[u]
            pv = partner[v]
            if holes == 0:
                if pu == v and (not weighted or rnd() < 1.0 / float(weights[i])):
                    idxs.remove(i)
                    partner[u] = -1
                    partner[v] = -1
                    holes = 2
            elif pu == -1 and pv == -1:
                idxs.add(i)
                partner[u] = v
                partner[v] = u
                holes = 0
            elif pu == -1 or pv == -1:
                if pu == -1:
                    z = pv
                    j = eindex[(v, z) if v < z else (z, v)]
                else:
                    z = pu
                    j = eindex[(u, z) if u < z else (z, u)]
                ok = True
                if weighted:
                    ratio = float(weights[i]) / float(weights[j])
                    ok = ratio >= 1.0 or rnd() < ratio
                if ok:
                    idxs.remove(j)
                    partner[z] = -1
                    idxs.add(i)
                    partner[u] = v
                    partner[v] = u
        if holes == 0:
            return idxs
    return None


def sample_perfect_matching(g: Graph, cfg: PMSamplerConfig,
                            initial: Matching, rng=None) -> Matching:
    """Draw a (near-)uniform perfect matching of ``g``.

    Runs the chain from ``initial`` (a perfect matching of ``g``) in rounds
    of ``cfg.inner_steps`` moves, returning the first round that ends
    perfect.  Raises :class:`PMSampleBudgetError` after ``cfg.max_attempts``
    failed rounds.  A one-edge graph returns its only matching immediately
    after the first round.
    """
    if g.n == 0:
        return Matching(g)
    if initial.covered != g.full_bits:
        raise PMStateError("initial matching must be perfect")
    if g.weighted and min(g.weights) < 1:
        raise PMStateError("weighted chain needs all weights >= 1; "
                           "normalize_weights() first")
    if rng is None:
        rng = random.Random(cfg.seed)
    steps = cfg.steps_for(g.n)
    attempts = cfg.attempts_for(g.n)
    got = _run_restricted(g, g.full_bits, range(g.m), initial.idxs,
                          steps, attempts, rng, weighted=g.weighted)
    if got is None:
        raise PMSampleBudgetError(attempts)
    return Matching(g, got)
