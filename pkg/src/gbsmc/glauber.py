"""Single-loop Glauber dynamics over matchings, and Jerrum's variant.

Both chains walk the set of matchings of a host graph and leave the
monomer-dimer law mu(X) proportional to lambda^|X| invariant:

* ``glauber``: pick an edge uniformly; if it can be added, add it with
  probability lambda/(1+lambda); if it is currently in the matching, remove
  it with probability 1/(1+lambda); otherwise hold.
* ``jerrum``: pick an edge uniformly; propose add / remove / slide (replace
  the conflicting edge when exactly one endpoint is blocked); accept with
  the Metropolis probability min(1, lambda^(size change)).

With the rescaling lambda = c^2 the vertex-set marginal of mu is
Pr[S] proportional to c^|S| * Haf(S), which is what makes these chains
useful as samplers for hafnian-weighted vertex sets.
"""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass, field
from typing import Optional

from .graphs import Graph, Matching


class ChainConfigError(ValueError):
    """Inconsistent or out-of-range chain configuration."""


@dataclass
class ChainConfig:
    """Parameters of one chain run.

    Exactly one of ``fugacity`` (lambda) or ``c`` must pin down the fugacity;
    when ``c`` is given, lambda = c*c exactly (give c as int/Fraction to keep
    exact arithmetic downstream).  ``initial`` may be a Matching or an
    iterable of (u, v) pairs; the default empty matching is always valid.
    """
    fugacity: object = None
    c: object = None
    steps: int = 0
    seed: object = 0
    lazy: bool = False
    initial: object = None

    def resolved_fugacity(self):
        if self.c is not None:
            lam = self.c * self.c
            if self.fugacity is not None and self.fugacity != lam:
                raise ChainConfigError(
                    f"fugacity {self.fugacity} contradicts c^2 = {lam}")
        else:
            lam = self.fugacity
        if lam is None:
            raise ChainConfigError("one of fugacity or c is required")
        if not lam > 0:
            raise ChainConfigError(f"fugacity must be positive, got {lam}")
        return lam

    def make_initial(self, g: Graph) -> Matching:
        if self.initial is None:
            return Matching(g)
        if isinstance(self.initial, Matching):
            return Matching(g, self.initial.idxs)
        return Matching.from_pairs(g, self.initial)


@dataclass
class ChainTrace:
    """What a chain run leaves behind."""
    final: Matching
    post_selected: Optional[Matching]
    step_of_post_selection: Optional[int]
    steps_run: int
    rng_state_out: object = field(repr=False, default=None)


def _pick(rng, m):
    # int(random() * m) can land on m through float rounding for large m
    i = int(rng.random() * m)
    return i if i < m else m - 1


def _drive_glauber(g, x, lam, lazy, steps, rng,
                   target_edges=-1, collect=None, key_kind="matching",
                   thin=0, burn_in=0, start_step=0):
    """Run ``steps`` Glauber steps, mutating ``x`` in place.

    Optionally tracks the most recent state of ``target_edges`` edges
    (post-selection) and/or fills ``collect`` (a Counter) with state keys
    every ``thin`` steps once past ``burn_in``.  Returns
    ``(post_snapshot, post_step)``.
    """
    m = g.m
    snap, snap_step = None, None
    if target_edges >= 0 and len(x.idxs) == target_edges:
        snap, snap_step = tuple(x.idxs), start_step
    if m == 0 or steps == 0:
        return snap, snap_step
    edges = g.edges
    ebits = g.edge_bits
    idxs = x.idxs
    partner = x.partner
    covered = x.covered
    rnd = rng.random
    lam = float(lam)
    p_add = lam / (1.0 + lam)
    p_rem = 1.0 / (1.0 + lam)
    if lazy:
        p_add *= 0.5
        p_rem *= 0.5
    countdown = thin if collect is not None else -1
    vertex_keys = key_kind == "vertexset"

    for t in range(start_step + 1, start_step + steps + 1):
        r = rnd()
        i = int(r * m)
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
            if partner[u] == v and rnd() < p_rem:
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
                        tuple(sorted(edges[i] for i in idxs))] += 1
    x.covered = covered
    return snap, snap_step


def _drive_jerrum(g, x, lam, lazy, steps, rng,
                  target_edges=-1, collect=None, key_kind="matching",
                  thin=0, burn_in=0, start_step=0):
    """Jerrum-style counterpart of :func:`_drive_glauber` (same contract)."""
    m = g.m
    snap, snap_step = None, None
    if target_edges >= 0 and len(x.idxs) == target_edges:
        snap, snap_step = tuple(x.idxs), start_step
    if m == 0 or steps == 0:
        return snap, snap_step
    edges = g.edges
    ebits = g.edge_bits
    eindex = g.edge_index
    idxs = x.idxs
    partner = x.partner
    covered = x.covered
    rnd = rng.random
    lam = float(lam)
    p_add = min(1.0, lam)
    p_rem = min(1.0, 1.0 / lam)
    p_slide = 1.0
    if lazy:
        p_add *= 0.5
        p_rem *= 0.5
        p_slide = 0.5
    countdown = thin if collect is not None else -1
    vertex_keys = key_kind == "vertexset"

    for t in range(start_step + 1, start_step + steps + 1):
        r = rnd()
        i = int(r * m)
        if i == m:
            i = m - 1
        u, v = edges[i]
        pu = partner[u]
        pv = partner[v]
        if pu == -1 and pv == -1:
            if rnd() < p_add:
                idxs.add(i)
                covered |= ebits[i]
                partner[u] = v
                partner[v] = u
        elif pu == v:
            if rnd() < p_rem:
                idxs.remove(i)
                covered &= ~ebits[i]
                partner[u] = -1
                partner[v] = -1
        elif pu == -1 or pv == -1:
            # exactly one endpoint blocked: slide the blocking edge off
            if p_slide == 1.0 or rnd() < p_slide:
                if pu == -1:
                    w = pv
                    j = eindex[(v, w) if v < w else (w, v)]
                else:
                    w = pu
                    j = eindex[(u, w) if u < w else (w, u)]
                idxs.remove(j)
                covered &= ~ebits[j]
                partner[w] = -1
                idxs.add(i)
                covered |= ebits[i]
                partner[u] = v
                partner[v] = u
        # both endpoints blocked by other edges: hold
        if target_edges >= 0 and len(idxs) == target_edges:
            snap, snap_step = tuple(idxs), t
        if countdown >= 0 and t > burn_in:
            countdown -= 1
            if countdown <= 0:
                countdown = thin
                collect[covered if vertex_keys else
                        tuple(sorted(edges[i] for i in idxs))] += 1
    x.covered = covered
    return snap, snap_step


_DRIVERS = {"glauber": _drive_glauber, "jerrum": _drive_jerrum}


def glauber_step(g: Graph, x: Matching, cfg: ChainConfig, rng) -> Matching:
    """One step of the add/remove Glauber dynamics; mutates and returns x."""
    _drive_glauber(g, x, cfg.resolved_fugacity(), cfg.lazy, 1, rng)
    return x


def jerrum_step(g: Graph, x: Matching, cfg: ChainConfig, rng) -> Matching:
    """One step of the Metropolis add/remove/slide dynamics; mutates x."""
    _drive_jerrum(g, x, cfg.resolved_fugacity(), cfg.lazy, 1, rng)
    return x


def run_chain(g: Graph, cfg: ChainConfig, step="glauber",
              post_select_size=None) -> ChainTrace:
    """Run a chain for ``cfg.steps`` steps from ``cfg.initial``.

    ``step`` is ``"glauber"``, ``"jerrum"``, or any callable with the
    ``step_fn(g, x, cfg, rng) -> Matching`` signature.  When
    ``post_select_size`` (a vertex count, necessarily even) is given, the
    trace also carries the most recent state with exactly that many covered
    vertices; if no such state occurred, ``post_selected`` is None and the
    caller decides whether to retry.  Runs are deterministic given cfg.seed.
    """
    lam = cfg.resolved_fugacity()
    target_edges = -1
    if post_select_size is not None:
        if post_select_size % 2:
            raise ChainConfigError(
                f"post-selection size {post_select_size} is odd; matchings "
                "cover an even number of vertices")
        target_edges = post_select_size // 2
    rng = random.Random(cfg.seed)
    x = cfg.make_initial(g)

    driver = _DRIVERS.get(step)
    if driver is not None:
        snap, snap_step = driver(g, x, lam, cfg.lazy, cfg.steps, rng,
                                 target_edges=target_edges)
    else:
        snap, snap_step = None, None
        if target_edges >= 0 and len(x) == target_edges:
            snap, snap_step = tuple(x.idxs), 0
        for t in range(1, cfg.steps + 1):
            x = step(g, x, cfg, rng)
            if target_edges >= 0 and len(x) == target_edges:
                snap, snap_step = tuple(x.idxs), t
    post = Matching(g, snap) if snap is not None else None
    return ChainTrace(final=x, post_selected=post,
                      step_of_post_selection=snap_step,
                      steps_run=cfg.steps, rng_state_out=rng.getstate())


def sample_states(g: Graph, cfg: ChainConfig, *, dynamics="glauber",
                  n_samples: int, thin: int = 1, burn_in: int = 0,
                  key_kind="matching") -> Counter:
    """Histogram of chain states along one trajectory.

    Runs ``burn_in + n_samples * thin`` steps and records every ``thin``-th
    state after burn-in, keyed either by canonical matching encoding
    (``key_kind="matching"``) or by covered-vertex bitset (``"vertexset"``).
    """
    driver = _DRIVERS[dynamics]
    rng = random.Random(cfg.seed)
    x = cfg.make_initial(g)
    counts: Counter = Counter()
    total = burn_in + n_samples * thin
    driver(g, x, cfg.resolved_fugacity(), cfg.lazy, total, rng,
           collect=counts, key_kind=key_kind, thin=thin, burn_in=burn_in)
    return counts
