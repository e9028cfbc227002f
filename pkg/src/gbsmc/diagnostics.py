"""Verification backbone: exact laws, exact kernels, TV, mixing curves.

Everything here exists to check the samplers against ground truth.  Exact
stationary laws and one-step transition kernels are computed in rational
arithmetic (``fractions.Fraction``) whenever the fugacity and weights are
exact numbers, so detailed-balance certificates come out as literal zeros
rather than "small floats".  The double-loop kernel uses the inner draw's
exact marginal — the probability that a uniform perfect matching of the
induced subgraph contains the proposed edge is a ratio of hafnians — which
is what "inner sampler replaced by exact enumeration" means operationally.
"""

from __future__ import annotations

import math
import random
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction

from .graphs import (Graph, Matching, enumerate_matchings, hard_instance,
                     hard_instance_core_matching)
from .glauber import ChainConfig, _drive_glauber, _drive_jerrum
from .double_loop import DoubleLoopConfig, _drive_double
from .hafnian import hafnian_bits, matching_weight
from .seeds import child_rng


class OracleGuardError(RuntimeError):
    """A brute-force oracle was asked for more than its guard allows."""


# ---------------------------------------------------------------------------
# Distribution tables
# ---------------------------------------------------------------------------

def encode_state(key) -> str:
    """Human/CSV encoding: vertex-set bitsets as hex, matchings as edge
    pair lists."""
    if isinstance(key, int):
        return f"0x{key:x}"
    if not key:
        return "-"
    return ";".join(f"{u}-{v}" for u, v in key)


@dataclass(frozen=True)
class DistributionTable:
    """A probability mass function over canonically-encoded states.

    ``support`` is sorted; masses are Fractions when built from exact
    weights/counts, floats otherwise.  States carrying zero mass are dropped.
    """
    support: tuple
    mass: tuple

    @classmethod
    def from_weights(cls, weights: dict) -> "DistributionTable":
        total = sum(weights.values())
        if not total > 0:
            raise ValueError("all weights vanish; no distribution")
        items = sorted((k, w) for k, w in weights.items() if w > 0)
        exact = all(isinstance(w, (int, Fraction)) for _, w in items) \
            and isinstance(total, (int, Fraction))
        if exact:
            masses = [Fraction(w, total) if isinstance(w, int)
                      and isinstance(total, int) else Fraction(w) / total
                      for _, w in items]
        else:
            ftot = float(total)
            masses = [float(w) / ftot for _, w in items]
        return cls(tuple(k for k, _ in items), tuple(masses))

    @classmethod
    def from_counts(cls, counts) -> "DistributionTable":
        return cls.from_weights(dict(counts))

    def as_dict(self) -> dict:
        return dict(zip(self.support, self.mass))

    def prob(self, key):
        try:
            i = self.support.index(key)
        except ValueError:
            return 0
        return self.mass[i]

    def total(self):
        return sum(self.mass)

    def __len__(self):
        return len(self.support)

    def to_csv_text(self) -> str:
        lines = ["state_encoding,probability"]
        for key, p in zip(self.support, self.mass):
            lines.append(f"{encode_state(key)},{repr(float(p))}")
        return "\n".join(lines) + "\n"

    def write_csv(self, path):
        with open(path, "w") as fh:
            fh.write(self.to_csv_text())


def tv_distance(p: DistributionTable, q: DistributionTable):
    """Total variation distance: half the L1 gap, supports unioned."""
    pd = p.as_dict()
    qd = q.as_dict()
    acc = 0
    for key in set(pd) | set(qd):
        acc += abs(pd.get(key, 0) - qd.get(key, 0))
    return acc / 2


# ---------------------------------------------------------------------------
# Exact stationary laws
# ---------------------------------------------------------------------------

def _exact_fugacity(lam):
    if isinstance(lam, (int, Fraction)):
        return Fraction(lam)
    return Fraction(lam)  # floats convert exactly (binary expansion)


def _matching_key(g: Graph, idxs) -> tuple:
    return tuple(sorted(g.edges[i] for i in idxs))


def even_subsets(n: int):
    for bits in range(1 << n):
        if bits.bit_count() % 2 == 0:
            yield bits


LAW_KINDS = ("matching_single", "matching_double",
             "vertexset_single", "vertexset_double")


def exact_stationary(g: Graph, lam, law: str) -> DistributionTable:
    """Exact stationary distribution of one of the four chain laws.

    * ``matching_single``:  mu(X)  ~ lambda^|X|           (keys: edge pairs)
    * ``matching_double``:  pi(X)  ~ lambda^(2|X|) Haf(G_X) w(X)
    * ``vertexset_single``: Pr[S]  ~ lambda^(|S|/2) Haf(S)  (keys: bitsets)
    * ``vertexset_double``: Pr[S]  ~ lambda^|S| Haf_w(S)^2

    With lambda = c^2 the two vertex-set laws are c^|S| Haf(S) and
    c^(2|S|) Haf(S)^2.  Single-loop laws ignore edge weights (that chain
    never looks at them); double-loop laws use the weighted hafnian.
    Guarded brute force: 12 vertices for matching laws, 14 for vertex-set.
    """
    if law not in LAW_KINDS:
        raise ValueError(f"unknown law {law!r}")
    lamF = _exact_fugacity(lam)
    weights = {}
    if law.startswith("matching"):
        if g.n > 12:
            raise OracleGuardError("matching laws are enumerable up to 12 vertices")
        memo = {}
        for x in enumerate_matchings(g):
            key = _matching_key(g, x.idxs)
            if law == "matching_single":
                weights[key] = lamF ** len(x.idxs)
            else:
                haf = hafnian_bits(g, x.covered, memo)
                haf = Fraction(haf) if not isinstance(haf, float) else haf
                weights[key] = (lamF ** (2 * len(x.idxs)) * haf
                                * matching_weight(g, x.idxs))
    else:
        if g.n > 14:
            raise OracleGuardError("vertex-set laws are enumerable up to 14 vertices")
        memo = {}
        unweighted = Graph(g.n, g.edges) if g.weighted else g
        umemo = {}
        for bits in even_subsets(g.n):
            size = bits.bit_count()
            if law == "vertexset_single":
                haf = hafnian_bits(unweighted, bits, umemo)
                w = lamF ** (size // 2) * haf
            else:
                haf = hafnian_bits(g, bits, memo)
                if not isinstance(haf, float):
                    haf = Fraction(haf)
                w = lamF ** size * haf * haf
            if w > 0:
                weights[bits] = w
    return DistributionTable.from_weights(weights)


# ---------------------------------------------------------------------------
# Exact one-step kernels
# ---------------------------------------------------------------------------

KERNEL_KINDS = ("glauber", "jerrum", "double_loop", "double_loop_weighted",
                "pm", "pm_weighted")


def _fraction_weights(g: Graph):
    return [Fraction(g.weight(i)) for i in range(g.m)]


def transition_kernel(g: Graph, dynamics: str, lam=None, lazy=False) -> dict:
    """One-step transition matrix as nested dicts of exact Fractions.

    Keys are canonical matching encodings (sorted edge-pair tuples).  Rows
    sum to 1 exactly.  For matching-space dynamics the state space is every
    matching of ``g``; for the perfect-matching dynamics it is the perfect
    plus near-perfect matchings (``g.n`` must be even and a perfect matching
    must exist).
    """
    if dynamics not in KERNEL_KINDS:
        raise ValueError(f"unknown dynamics {dynamics!r}")
    if dynamics.startswith("pm"):
        return _pm_kernel(g, weighted=dynamics.endswith("weighted"))
    if lam is None:
        raise ValueError(f"{dynamics} kernel needs a fugacity")
    lamF = _exact_fugacity(lam)
    if dynamics == "glauber":
        return _glauber_kernel(g, lamF, lazy)
    if dynamics == "jerrum":
        return _jerrum_kernel(g, lamF, lazy)
    return _double_loop_kernel(g, lamF,
                               weighted=dynamics.endswith("weighted"))


def _all_matching_states(g: Graph):
    return [(x, _matching_key(g, x.idxs)) for x in enumerate_matchings(g)]


def _glauber_kernel(g: Graph, lamF: Fraction, lazy=False) -> dict:
    m = g.m
    per_edge = Fraction(1, m)
    p_add = lamF / (1 + lamF)
    p_rem = Fraction(1, 1) / (1 + lamF)
    if lazy:
        p_add /= 2
        p_rem /= 2
    kernel = {}
    for x, key in _all_matching_states(g):
        row = Counter()
        moved = Fraction(0)
        for i in range(m):
            if x.can_add(i):
                x.add(i)
                row[_matching_key(g, x.idxs)] += per_edge * p_add
                x.remove(i)
                moved += per_edge * p_add
            elif i in x.idxs:
                x.remove(i)
                row[_matching_key(g, x.idxs)] += per_edge * p_rem
                x.add(i)
                moved += per_edge * p_rem
        row[key] += 1 - moved
        kernel[key] = dict(row)
    return kernel


def _jerrum_kernel(g: Graph, lamF: Fraction, lazy=False) -> dict:
    m = g.m
    per_edge = Fraction(1, m)
    p_add = min(Fraction(1), lamF)
    p_rem = min(Fraction(1), 1 / lamF)
    p_slide = Fraction(1)
    if lazy:
        p_add /= 2
        p_rem /= 2
        p_slide /= 2
    kernel = {}
    for x, key in _all_matching_states(g):
        row = Counter()
        moved = Fraction(0)
        for i in range(m):
            u, v = g.edges[i]
            pu, pv = x.partner[u], x.partner[v]
            if pu == -1 and pv == -1:
                x.add(i)
                row[_matching_key(g, x.idxs)] += per_edge * p_add
                x.remove(i)
                moved += per_edge * p_add
            elif pu == v:
                x.remove(i)
                row[_matching_key(g, x.idxs)] += per_edge * p_rem
                x.add(i)
                moved += per_edge * p_rem
            elif pu == -1 or pv == -1:
                if pu == -1:
                    z = pv
                    j = g.edge_index[(v, z) if v < z else (z, v)]
                else:
                    z = pu
                    j = g.edge_index[(u, z) if u < z else (z, u)]
                x.remove(j)
                x.add(i)
                row[_matching_key(g, x.idxs)] += per_edge * p_slide
                x.remove(i)
                x.add(j)
                moved += per_edge * p_slide
        row[key] += 1 - moved
        kernel[key] = dict(row)
    return kernel


def _double_loop_kernel(g: Graph, lamF: Fraction, weighted=False) -> dict:
    """Effective outer kernel with the inner draw marginalized exactly:
    Pr[e in E] = (w_e) Haf(G_{V(X)} - {u,v}) / Haf(G_{V(X)})."""
    m = g.m
    per_edge = Fraction(1, m)
    lam2 = lamF * lamF
    p_add = lam2 / (1 + lam2)
    gate = Fraction(1) / (1 + lam2)
    wF = _fraction_weights(g) if weighted else None
    gh = Graph(g.n, g.edges) if (g.weighted and not weighted) else g
    memo = {}

    def haf(bits):
        val = hafnian_bits(gh, bits, memo)
        return Fraction(val) if not isinstance(val, float) else val

    kernel = {}
    for x, key in _all_matching_states(g):
        row = Counter()
        moved = Fraction(0)
        haf_here = None
        for i in range(m):
            if x.can_add(i):
                x.add(i)
                row[_matching_key(g, x.idxs)] += per_edge * p_add
                x.remove(i)
                moved += per_edge * p_add
            elif i in x.idxs:
                if haf_here is None:
                    haf_here = haf(x.covered)
                ratio = haf(x.covered & ~g.edge_bits[i]) / haf_here
                if wF is not None:
                    ratio = ratio * wF[i]
                p = per_edge * ratio * gate
                if wF is not None:
                    p = p / (wF[i] * wF[i])
                x.remove(i)
                row[_matching_key(g, x.idxs)] += p
                x.add(i)
                moved += p
        row[key] += 1 - moved
        kernel[key] = dict(row)
    return kernel


def _pm_states(g: Graph):
    if g.n % 2:
        raise ValueError("perfect-matching chain needs an even vertex count")
    q = g.n // 2
    states = [x for x in enumerate_matchings(g)
              if len(x.idxs) in (q, q - 1)]
    if not any(len(x.idxs) == q for x in states):
        raise ValueError("graph has no perfect matching")
    return states, q


def _pm_kernel(g: Graph, weighted=False) -> dict:
    states, q = _pm_states(g)
    if weighted and g.weighted and min(g.weights) < 1:
        raise ValueError("weighted chain needs all weights >= 1")
    m = g.m
    per_edge = Fraction(1, m)
    wF = _fraction_weights(g)
    kernel = {}
    for x in states:
        key = _matching_key(g, x.idxs)
        row = Counter()
        moved = Fraction(0)
        perfect = len(x.idxs) == q
        for i in range(m):
            u, v = g.edges[i]
            pu, pv = x.partner[u], x.partner[v]
            if perfect:
                if pu == v:
                    p = per_edge * (1 / wF[i] if weighted else 1)
                    x.remove(i)
                    row[_matching_key(g, x.idxs)] += p
                    x.add(i)
                    moved += p
            elif pu == -1 and pv == -1:
                x.add(i)
                row[_matching_key(g, x.idxs)] += per_edge
                x.remove(i)
                moved += per_edge
            elif pu == -1 or pv == -1:
                if pu == -1:
                    z = pv
                    j = g.edge_index[(v, z) if v < z else (z, v)]
                else:
                    z = pu
                    j = g.edge_index[(u, z) if u < z else (z, u)]
                p = per_edge * (min(Fraction(1), wF[i] / wF[j])
                                if weighted else 1)
                x.remove(j)
                x.add(i)
                row[_matching_key(g, x.idxs)] += p
                x.remove(i)
                x.add(j)
                moved += p
        row[key] += 1 - moved
        kernel[key] = dict(row)
    return kernel


def pm_stationary(g: Graph, weighted=False) -> DistributionTable:
    """Stationary law of the perfect-matching chain: uniform over perfect
    plus near-perfect matchings, or proportional to matching weight."""
    states, _ = _pm_states(g)
    return DistributionTable.from_weights({
        _matching_key(g, x.idxs):
            Fraction(matching_weight(g, x.idxs)) if weighted else Fraction(1)
        for x in states})


def check_detailed_balance(g: Graph, kernel, law: DistributionTable,
                           lam=None):
    """Max over ordered state pairs of ``|pi(x) P(x,y) - pi(y) P(y,x)|``.

    ``kernel`` may be a prebuilt nested dict or one of the dynamics names
    accepted by :func:`transition_kernel` (then ``lam`` applies).  With
    exact tables and kernels the result is an exact Fraction — a true zero
    certifies reversibility.
    """
    if isinstance(kernel, str):
        kernel = transition_kernel(g, kernel, lam=lam)
    pi = law.as_dict()
    worst = 0
    for x, row in kernel.items():
        for y, pxy in row.items():
            if y == x:
                continue
            gap = abs(pi.get(x, 0) * pxy - pi.get(y, 0) * kernel[y].get(x, 0))
            if gap > worst:
                worst = gap
    return worst


# ---------------------------------------------------------------------------
# Empirical mixing diagnostics
# ---------------------------------------------------------------------------

def mixing_curve(g: Graph, cfg, law: DistributionTable, checkpoints,
                 replicas: int, dynamics="glauber",
                 key_kind="matching") -> dict:
    """Empirical TV to ``law`` at each checkpoint, over a replica ensemble.

    Runs ``replicas`` independent chains (seeds derived from the config
    seed), snapshots each at the given step counts, and compares the
    ensemble distribution at each checkpoint against the exact law.  This
    matches the fixed-time marginal in the mixing-time definition, unlike a
    single-trajectory time average.  ``cfg`` is a ChainConfig, or a
    DoubleLoopConfig to diagnose the double-loop dynamics.
    """
    checkpoints = sorted(set(checkpoints))
    if isinstance(cfg, DoubleLoopConfig):
        chain_cfg = cfg.chain
        dynamics = "double_loop"
    else:
        chain_cfg = cfg
        if dynamics == "double_loop":
            raise ValueError("double-loop diagnostics need a DoubleLoopConfig")
    lam = chain_cfg.resolved_fugacity()
    counts = {t: Counter() for t in checkpoints}
    for rep in range(replicas):
        rng = child_rng(chain_cfg.seed, f"rep{rep}")
        x = chain_cfg.make_initial(g)
        here = 0
        for t in checkpoints:
            span = t - here
            if dynamics == "glauber":
                _drive_glauber(g, x, lam, chain_cfg.lazy, span, rng)
            elif dynamics == "jerrum":
                _drive_jerrum(g, x, lam, chain_cfg.lazy, span, rng)
            elif dynamics == "double_loop":
                _drive_double(g, x, lam, cfg, span, rng, weighted=g.weighted)
            else:
                raise ValueError(f"unknown dynamics {dynamics!r}")
            here = t
            key = x.covered if key_kind == "vertexset" \
                else _matching_key(g, x.idxs)
            counts[t][key] += 1
    return {t: float(tv_distance(DistributionTable.from_counts(counts[t]),
                                 law))
            for t in checkpoints}


# ---------------------------------------------------------------------------
# Hard-instance escape experiment
# ---------------------------------------------------------------------------

def exit_probability(n_squares: int, lam) -> Fraction:
    """Per-step probability that the double-loop chain started at the
    isolated perfect matching of ``hard_instance(n_squares)`` removes one of
    its edges: (1/3) * 1/(1+2^n) * 1/(1+lambda^2)."""
    lamF = _exact_fugacity(lam)
    return (Fraction(1, 3) * Fraction(1, 1 + 2 ** n_squares)
            / (1 + lamF * lamF))


@dataclass
class ExitTimeResult:
    n_squares: int
    fugacity: object
    times: tuple
    mean: float
    stderr: float
    ci95: tuple
    expected_mean: float
    per_step_probability: Fraction

    def summary(self) -> str:
        lo, hi = self.ci95
        return (f"hard_instance({self.n_squares}) lambda={self.fugacity}: "
                f"mean first exit {self.mean:.2f} "
                f"(95% CI {lo:.2f}..{hi:.2f}, {len(self.times)} trials, "
                f"geometric prediction {self.expected_mean:.2f})")


def exit_time_experiment(n_squares: int, lam, trials: int, seed=0,
                         max_steps=None) -> ExitTimeResult:
    """First-exit times from the isolated perfect matching.

    Each trial starts the double-loop chain exactly at the inter-square
    matching and counts steps until any of its edges is removed.  The inner
    draw is exact (enumeration marginal), matching the assumption behind the
    geometric escape law; each step then exits independently with
    probability :func:`exit_probability`, so the observed times should be
    Geometric(phi) with mean 1/phi.
    """
    g = hard_instance(n_squares)
    core = hard_instance_core_matching(g)
    phi = exit_probability(n_squares, lam)
    expected = 1.0 / float(phi)
    if max_steps is None:
        max_steps = max(10_000, int(expected * 200))
    cfg = DoubleLoopConfig(chain=ChainConfig(fugacity=lam), inner="exact")
    haf_memo = {}
    times = []
    for trial in range(trials):
        rng = child_rng(seed, f"exit{trial}")
        x = Matching(g, core.idxs)
        start_size = len(x.idxs)
        for t in range(1, max_steps + 1):
            _drive_double(g, x, lam, cfg, 1, rng, weighted=False,
                          haf_memo=haf_memo)
            if len(x.idxs) != start_size:
                times.append(t)
                break
        else:
            raise RuntimeError(
                f"trial {trial} did not exit within {max_steps} steps")
    mean = sum(times) / len(times)
    var = sum((t - mean) ** 2 for t in times) / max(1, len(times) - 1)
    stderr = math.sqrt(var / len(times))
    ci = (mean - 1.96 * stderr, mean + 1.96 * stderr)
    return ExitTimeResult(n_squares=n_squares, fugacity=lam,
                          times=tuple(times), mean=mean, stderr=stderr,
                          ci95=ci, expected_mean=expected,
                          per_step_probability=phi)


# ---------------------------------------------------------------------------
# Geometric goodness of fit
# ---------------------------------------------------------------------------

# 99th-percentile chi-square quantiles, 1..30 degrees of freedom.
_CHI2_99 = (6.635, 9.210, 11.345, 13.277, 15.086, 16.812, 18.475, 20.090,
            21.666, 23.209, 24.725, 26.217, 27.688, 29.141, 30.578, 32.000,
            33.409, 34.805, 36.191, 37.566, 38.932, 40.289, 41.638, 42.980,
            44.314, 45.642, 46.963, 48.278, 49.588, 50.892)


@dataclass
class GeometricFit:
    statistic: float
    dof: int
    critical_1pct: float
    passed: bool
    bins: tuple


def geometric_fit(samples, p, max_bins: int = 10) -> GeometricFit:
    """Pearson chi-square test of ``samples`` against Geometric(p) on
    support 1, 2, ...; bins chosen at geometric quantiles so each expects
    at least ~5 observations.  ``passed`` is judged at the 1% level."""
    n = len(samples)
    if n < 20:
        raise ValueError("need at least 20 samples for a stable fit")
    p = float(p)
    n_bins = max(2, min(max_bins, n // 20))
    # bin boundaries at equal-probability quantiles of the geometric law
    edges = []
    for k in range(1, n_bins):
        tail = 1.0 - k / n_bins
        t = math.ceil(math.log(tail) / math.log(1.0 - p))
        edges.append(max(1, t))
    edges = sorted(set(edges))
    bounds = edges + [None]  # final bin is the open tail
    observed = [0] * len(bounds)
    for s in samples:
        for b, hi in enumerate(bounds):
            if hi is None or s <= hi:
                observed[b] += 1
                break
    expected = []
    prev_cdf = 0.0
    for hi in bounds:
        cdf = 1.0 if hi is None else 1.0 - (1.0 - p) ** hi
        expected.append(n * (cdf - prev_cdf))
        prev_cdf = cdf
    stat = sum((o - e) ** 2 / e for o, e in zip(observed, expected) if e > 0)
    dof = len(bounds) - 1
    crit = _CHI2_99[min(dof, len(_CHI2_99)) - 1]
    return GeometricFit(statistic=stat, dof=dof, critical_1pct=crit,
                        passed=stat < crit, bins=tuple(zip(observed, expected)))
