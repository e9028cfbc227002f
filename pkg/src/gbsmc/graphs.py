"""Graph containers, matchings, and benchmark graph generators.

Vertices are dense integers ``0..n-1``.  Vertex sets are plain Python ints
used as bitsets (bit ``v`` set means vertex ``v`` is a member), which keeps
set algebra cheap for graphs up to a few thousand vertices.  Edges are
canonical ``(u, v)`` tuples with ``u < v``; a :class:`Graph` stores them in
sorted order so that identical constructions are byte-identical on disk.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations


class GraphError(ValueError):
    """Invalid graph construction or generator parameters."""


class EnumerationCapError(RuntimeError):
    """Raised when a brute-force enumeration would exceed its configured cap."""


def bitset(vertices) -> int:
    """Pack an iterable of vertex indices into an int bitset."""
    bits = 0
    for v in vertices:
        bits |= 1 << v
    return bits


def bits_to_tuple(bits: int) -> tuple:
    """Unpack a bitset into a sorted tuple of vertex indices."""
    out = []
    while bits:
        low = bits & -bits
        out.append(low.bit_length() - 1)
        bits ^= low
    return tuple(out)


def popcount(bits: int) -> int:
    return bits.bit_count()


class Graph:
    """Immutable undirected graph with optional positive edge weights.

    Attributes:
        n: vertex count.
        edges: sorted tuple of canonical ``(u, v)`` pairs, ``u < v``.
        weights: tuple parallel to ``edges``, or ``None`` for unweighted
            graphs (all weights implicitly 1).  Weight values keep whatever
            numeric type they were given (int / Fraction / float), so exact
            arithmetic survives where the caller provides exact inputs.
        adj: per-vertex neighbor bitsets.
        edge_bits: per-edge endpoint bitsets ``(1<<u) | (1<<v)``.
        edge_index: dict mapping each canonical pair to its index in ``edges``.
        labels: for graphs produced by :func:`induced_subgraph`, a tuple
            mapping the new dense indices back to the parent graph's vertex
            labels; ``None`` otherwise.
    """

    __slots__ = ("n", "edges", "weights", "adj", "edge_bits", "edge_index",
                 "m", "full_bits", "labels", "_wmap")

    def __init__(self, n, edges, weights=None, labels=None):
        if n < 0:
            raise GraphError("vertex count must be non-negative")
        canon = []
        for e in edges:
            u, v = e
            if u == v:
                raise GraphError(f"self-loop on vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge {e} has an endpoint outside 0..{n - 1}")
            canon.append((u, v) if u < v else (v, u))
        if weights is not None:
            weights = list(weights)
            if len(weights) != len(canon):
                raise GraphError("weights must parallel the edge list")
            for w in weights:
                if not w > 0:
                    raise GraphError(f"non-positive edge weight {w!r}")
            order = sorted(range(len(canon)), key=lambda i: canon[i])
            canon = [canon[i] for i in order]
            weights = tuple(weights[i] for i in order)
        else:
            canon.sort()
        if any(canon[i] == canon[i + 1] for i in range(len(canon) - 1)):
            raise GraphError("duplicate edge in edge list")

        self.n = n
        self.edges = tuple(canon)
        self.weights = weights
        self.m = len(canon)
        self.labels = tuple(labels) if labels is not None else None
        adj = [0] * n
        ebits = []
        eindex = {}
        for i, (u, v) in enumerate(canon):
            adj[u] |= 1 << v
            adj[v] |= 1 << u
            ebits.append((1 << u) | (1 << v))
            eindex[(u, v)] = i
        self.adj = tuple(adj)
        self.edge_bits = tuple(ebits)
        self.edge_index = eindex
        self.full_bits = (1 << n) - 1
        self._wmap = None

    # -- basic queries ----------------------------------------------------

    @property
    def weighted(self) -> bool:
        return self.weights is not None

    def weight(self, i: int):
        """Weight of edge index ``i`` (1 for unweighted graphs)."""
        return 1 if self.weights is None else self.weights[i]

    def weight_of_pair(self, u: int, v: int):
        if self.weights is None:
            return 1
        return self.weights[self.edge_index[(u, v) if u < v else (v, u)]]

    def weight_map(self) -> dict:
        """Dict ``(u, v) -> weight`` over canonical pairs (cached)."""
        if self._wmap is None:
            if self.weights is None:
                self._wmap = {e: 1 for e in self.edges}
            else:
                self._wmap = dict(zip(self.edges, self.weights))
        return self._wmap

    def has_edge(self, u: int, v: int) -> bool:
        return ((u, v) if u < v else (v, u)) in self.edge_index

    def degree(self, v: int) -> int:
        return self.adj[v].bit_count()

    def __eq__(self, other):
        return (isinstance(other, Graph) and self.n == other.n
                and self.edges == other.edges and self.weights == other.weights)

    def __hash__(self):
        return hash((self.n, self.edges, self.weights))

    def __repr__(self):
        tag = ", weighted" if self.weighted else ""
        return f"Graph(n={self.n}, m={self.m}{tag})"


def induced_subgraph(g: Graph, members) -> Graph:
    """Subgraph induced by a vertex set, relabeled densely to ``0..|S|-1``.

    ``members`` may be an int bitset or an iterable of vertices.  The
    returned graph's ``labels`` attribute records the back-map from new
    indices to the original labels.  Weights are carried over.
    """
    bits = members if isinstance(members, int) else bitset(members)
    if bits & ~g.full_bits:
        raise GraphError("vertex set contains vertices outside the graph")
    keep = bits_to_tuple(bits)
    relabel = {v: i for i, v in enumerate(keep)}
    edges = []
    weights = [] if g.weighted else None
    for i, (u, v) in enumerate(g.edges):
        if bits >> u & 1 and bits >> v & 1:
            edges.append((relabel[u], relabel[v]))
            if weights is not None:
                weights.append(g.weights[i])
    return Graph(len(keep), edges, weights, labels=keep)


class Matching:
    """A set of pairwise vertex-disjoint edges of a host graph.

    The state of every chain in this package.  Stored as a set of edge
    *indices* into ``g.edges`` plus two derived views that the chains keep
    incrementally up to date: ``covered`` (bitset of matched vertices) and
    ``partner`` (list mapping each matched vertex to its partner, -1 when
    unmatched).  Mutating methods keep all three in sync.
    """

    __slots__ = ("g", "idxs", "covered", "partner")

    def __init__(self, g: Graph, edge_idxs=()):
        self.g = g
        self.idxs = set()
        self.covered = 0
        self.partner = [-1] * g.n
        for i in edge_idxs:
            self.add(i)

    @classmethod
    def from_pairs(cls, g: Graph, pairs):
        """Build from ``(u, v)`` pairs, which must be edges of ``g``."""
        idx = g.edge_index
        try:
            return cls(g, (idx[(u, v) if u < v else (v, u)] for u, v in pairs))
        except KeyError as exc:
            raise GraphError(f"{exc.args[0]} is not an edge of the graph") from None

    def add(self, i: int):
        u, v = self.g.edges[i]
        if self.covered & self.g.edge_bits[i]:
            raise GraphError(f"edge {(u, v)} collides with the current matching")
        self.idxs.add(i)
        self.covered |= self.g.edge_bits[i]
        self.partner[u] = v
        self.partner[v] = u

    def remove(self, i: int):
        self.idxs.remove(i)
        u, v = self.g.edges[i]
        self.covered &= ~self.g.edge_bits[i]
        self.partner[u] = -1
        self.partner[v] = -1

    def can_add(self, i: int) -> bool:
        return not self.covered & self.g.edge_bits[i]

    def __contains__(self, i: int) -> bool:
        return i in self.idxs

    def __len__(self):
        return len(self.idxs)

    @property
    def size(self) -> int:
        return len(self.idxs)

    def vertex_bitset(self) -> int:
        return self.covered

    def pairs(self) -> tuple:
        """Canonical sorted tuple of ``(u, v)`` pairs."""
        return tuple(sorted(self.g.edges[i] for i in self.idxs))

    def key(self) -> tuple:
        """Canonical hashable encoding (sorted edge indices)."""
        return tuple(sorted(self.idxs))

    def copy(self) -> "Matching":
        return Matching(self.g, self.idxs)

    def validate(self):
        """Re-derive the cached views and assert coherence (test helper)."""
        covered = 0
        for i in self.idxs:
            b = self.g.edge_bits[i]
            if covered & b:
                raise GraphError("matching edges are not vertex-disjoint")
            covered |= b
        if covered != self.covered:
            raise GraphError("covered bitset out of sync")
        if covered.bit_count() != 2 * len(self.idxs):
            raise GraphError("covered popcount != 2|matching|")
        for v in range(self.g.n):
            p = self.partner[v]
            if (p == -1) != (not covered >> v & 1) or (p != -1 and self.partner[p] != v):
                raise GraphError("partner array out of sync")

    def __repr__(self):
        return f"Matching({list(self.pairs())})"


def enumerate_matchings(g: Graph, max_size=None, cap: int = 2_000_000):
    """All matchings of ``g`` (including the empty one), as Matching objects.

    ``max_size`` bounds the number of edges per matching.  Enumeration stops
    with :class:`EnumerationCapError` once more than ``cap`` matchings have
    been produced — call sites that genuinely need huge enumerations must
    raise the cap explicitly.
    """
    out = []
    ebits = g.edge_bits
    m = g.m
    limit = g.m if max_size is None else max_size
    stack = []

    def walk(start, covered):
        if len(out) > cap:
            raise EnumerationCapError(f"more than {cap} matchings")
        out.append(Matching(g, stack))
        if len(stack) == limit:
            return
        for i in range(start, m):
            if not covered & ebits[i]:
                stack.append(i)
                walk(i + 1, covered | ebits[i])
                stack.pop()

    walk(0, 0)
    return out


# ---------------------------------------------------------------------------
# Generators
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GraphSpec:
    """A generator request: ``kind`` plus keyword parameters.

    Together with a seed this pins down a graph exactly —
    ``gen_graph(spec, seed)`` is deterministic.
    """
    kind: str
    params: tuple = ()

    @classmethod
    def of(cls, kind, **params):
        return cls(kind, tuple(sorted(params.items())))

    def as_dict(self):
        return dict(self.params)


def complete(n: int) -> Graph:
    return Graph(n, list(combinations(range(n), 2)))


def complete_bipartite(m: int, n: int) -> Graph:
    """K_{m,n} with left side ``0..m-1`` and right side ``m..m+n-1``."""
    return Graph(m + n, [(i, m + j) for i in range(m) for j in range(n)])


def path_graph(n: int) -> Graph:
    return Graph(n, [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise GraphError("a cycle needs at least 3 vertices")
    return Graph(n, [(i, (i + 1) % n) for i in range(n)])


def erdos_renyi(n: int, p: float, seed) -> Graph:
    """G(n, p): each pair independently an edge with probability p."""
    if not 0 <= p <= 1:
        raise GraphError(f"edge probability {p} outside [0, 1]")
    rng = random.Random(seed)
    edges = [(i, j) for i in range(n) for j in range(i + 1, n)
             if rng.random() < p]
    return Graph(n, edges)


def planted_clique(n: int, clique_size: int, p: float, seed) -> Graph:
    """Background G(n, p) with a complete graph forced on vertices
    ``0..clique_size-1``.

    Placing the clique on the lowest labels is a convention of this package;
    tests rely on it to name the planted set.
    """
    if not 0 <= p <= 1:
        raise GraphError(f"edge probability {p} outside [0, 1]")
    if clique_size > n:
        raise GraphError("clique larger than the graph")
    rng = random.Random(seed)
    edges = []
    for i in range(n):
        for j in range(i + 1, n):
            if j < clique_size or rng.random() < p:
                edges.append((i, j))
    return Graph(n, edges)


def decreasing_degree(n: int) -> Graph:
    """Deterministic graph whose degrees decrease with the vertex label:
    the pair ``(i, j)`` with ``i < j`` is an edge iff ``j <= n - 1 - i``.

    Vertex 0 is adjacent to everything; vertex ``n-1`` only to vertex 0.
    Any prefix ``0..k-1`` with ``k <= n/2`` induces a complete subgraph.
    """
    edges = [(i, j) for i in range(n) for j in range(i + 1, n)
             if j <= n - 1 - i]
    return Graph(n, edges)


def random_bipartite(n_per_side: int, p: float, seed) -> Graph:
    """Bipartite G(n, n, p): left ``0..n-1``, right ``n..2n-1``."""
    if not 0 <= p <= 1:
        raise GraphError(f"edge probability {p} outside [0, 1]")
    rng = random.Random(seed)
    n = n_per_side
    edges = [(i, n + j) for i in range(n) for j in range(n)
             if rng.random() < p]
    return Graph(2 * n, edges)


def sparse_bipartite(n_per_side: int, n_edges: int, seed) -> Graph:
    """Bipartite graph on n+n vertices with exactly ``n_edges`` distinct
    edges drawn uniformly without replacement from the n*n cross pairs."""
    n = n_per_side
    if n_edges > n * n:
        raise GraphError(f"{n_edges} edges requested but only {n * n} cross pairs exist")
    rng = random.Random(seed)
    picks = rng.sample(range(n * n), n_edges)
    edges = [(k // n, n + k % n) for k in picks]
    return Graph(2 * n, edges)


def hard_instance(n_squares: int) -> Graph:
    """A cycle of ``n`` squares: a graph whose unique inter-square perfect
    matching is exponentially isolated under the double-loop dynamics.

    Square ``s`` occupies vertices ``4s..4s+3`` (corners 1..4 clockwise) and
    carries its 4 side edges plus the diagonal (corner1, corner3).  Squares
    are chained into a cycle by connector edges (corner2 of square ``s``,
    corner4 of square ``s-1``).  Total: ``4n`` vertices and ``6n`` edges.
    """
    if n_squares < 1:
        raise GraphError("need at least one square")
    edges = []
    for s in range(n_squares):
        c1, c2, c3, c4 = 4 * s, 4 * s + 1, 4 * s + 2, 4 * s + 3
        edges += [(c1, c2), (c2, c3), (c3, c4), (c4, c1), (c1, c3)]
        prev4 = 4 * ((s - 1) % n_squares) + 3
        edges.append((c2, prev4))
    return Graph(4 * n_squares, edges)


def hard_instance_core_matching(g: Graph) -> Matching:
    """The unique perfect matching of :func:`hard_instance` that uses only
    diagonal and connector edges (the isolated mode the chain starts in)."""
    n_squares = g.n // 4
    pairs = []
    for s in range(n_squares):
        pairs.append((4 * s, 4 * s + 2))                        # diagonal
        pairs.append((4 * s + 1, 4 * ((s - 1) % n_squares) + 3))  # connector
    return Matching.from_pairs(g, pairs)


_GENERATORS = {
    "complete": complete,
    "complete_bipartite": complete_bipartite,
    "path": path_graph,
    "cycle": cycle_graph,
    "erdos_renyi": erdos_renyi,
    "planted_clique": planted_clique,
    "decreasing_degree": decreasing_degree,
    "random_bipartite": random_bipartite,
    "sparse_bipartite": sparse_bipartite,
    "hard_instance": hard_instance,
}

_SEEDED = {"erdos_renyi", "planted_clique", "random_bipartite", "sparse_bipartite"}


def gen_graph(spec: GraphSpec, seed=0) -> Graph:
    """Generate a benchmark graph; deterministic given (spec, seed)."""
    try:
        fn = _GENERATORS[spec.kind]
    except KeyError:
        raise GraphError(f"unknown generator kind {spec.kind!r}") from None
    kwargs = spec.as_dict()
    if spec.kind in _SEEDED:
        kwargs["seed"] = seed
    try:
        return fn(**kwargs)
    except TypeError as exc:
        raise GraphError(f"bad parameters for {spec.kind!r}: {exc}") from None


def normalize_weights(g: Graph):
    """Rescale weights so the minimum is 1; returns ``(graph, w_min)``.

    The weighted chains require all weights >= 1.  A graph with smaller
    weights can be normalized by w' = w / w_min, provided the caller also
    rescales the fugacity (lambda* = lambda * w_min) to keep the target
    law unchanged.  Unweighted graphs pass through untouched.
    """
    if not g.weighted:
        return g, 1
    w_min = min(g.weights)
    if w_min == 1:
        return g, 1
    if isinstance(w_min, float):
        scaled = [w / w_min for w in g.weights]
    else:
        scaled = [Fraction(w, w_min) for w in g.weights]
    return Graph(g.n, g.edges, scaled, labels=g.labels), w_min


# ---------------------------------------------------------------------------
# Edge-list text format
# ---------------------------------------------------------------------------
#
# First data line: "n_vertices n_edges" plus the word "weighted" when weights
# follow.  Then one edge per line, "u v" or "u v w", in canonical sorted
# order.  '#' starts a comment.  Saving the same graph twice is byte-stable.

def _format_weight(w) -> str:
    if isinstance(w, float):
        return repr(w)
    return str(w)


def _parse_weight(text: str):
    try:
        return int(text)
    except ValueError:
        pass
    if "/" in text:
        return Fraction(text)
    return float(text)


def to_edge_list_text(g: Graph) -> str:
    lines = [f"{g.n} {g.m} weighted" if g.weighted else f"{g.n} {g.m}"]
    for i, (u, v) in enumerate(g.edges):
        if g.weighted:
            lines.append(f"{u} {v} {_format_weight(g.weights[i])}")
        else:
            lines.append(f"{u} {v}")
    return "\n".join(lines) + "\n"


def save_edge_list(g: Graph, path):
    with open(path, "w") as fh:
        fh.write(to_edge_list_text(g))


def from_edge_list_text(text: str) -> Graph:
    data = [ln.strip() for ln in text.splitlines()]
    data = [ln for ln in data if ln and not ln.startswith("#")]
    if not data:
        raise GraphError("empty edge-list file")
    header = data[0].split()
    weighted = len(header) == 3 and header[2] == "weighted"
    if len(header) not in (2, 3) or (len(header) == 3 and not weighted):
        raise GraphError(f"bad header line {data[0]!r}")
    n, m = int(header[0]), int(header[1])
    if len(data) - 1 != m:
        raise GraphError(f"header promises {m} edges, file has {len(data) - 1}")
    edges, weights = [], [] if weighted else None
    for ln in data[1:]:
        parts = ln.split()
        if len(parts) != (3 if weighted else 2):
            raise GraphError(f"bad edge line {ln!r}")
        edges.append((int(parts[0]), int(parts[1])))
        if weighted:
            weights.append(_parse_weight(parts[2]))
    return Graph(n, edges, weights)


def load_edge_list(path) -> Graph:
    with open(path) as fh:
        return from_edge_list_text(fh.read())
