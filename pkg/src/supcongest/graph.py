"""Graph and partition types, subgraph checks, generators and the edge-list format.

Edges are stored canonically as ``(min, max)`` tuples and adjacency lists are
sorted, so every iteration over a graph is deterministic.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, Mapping, Optional, Tuple

from .bits import id_bits
from .errors import DuplicateEdgeError, FormatError, GraphError, OverlapError, SelfLoopError

NodeId = int
Edge = Tuple[int, int]


def edge_key(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


class Graph:
    """Immutable undirected simple graph with optional non-negative integer weights."""

    __slots__ = ("nodes", "edges", "weights", "_adj")

    def __init__(
        self,
        nodes: Iterable[int],
        edges: Iterable[Tuple[int, int]] = (),
        weights: Optional[Mapping[Tuple[int, int], int]] = None,
    ):
        node_set = frozenset(int(v) for v in nodes)
        for v in node_set:
            if v < 0:
                raise GraphError(f"node id {v} is negative")
        canon = set()
        for u, v in edges:
            if u == v:
                raise SelfLoopError(f"self-loop at node {u}")
            e = edge_key(int(u), int(v))
            if e in canon:
                raise DuplicateEdgeError(f"duplicate edge {e}")
            if e[0] not in node_set or e[1] not in node_set:
                raise GraphError(f"edge {e} has an endpoint outside the node set")
            canon.add(e)
        wmap = None
        if weights is not None:
            wmap = {}
            for (u, v), w in weights.items():
                e = edge_key(u, v)
                if e not in canon:
                    raise GraphError(f"weight given for missing edge {e}")
                if not isinstance(w, int) or w < 0:
                    raise GraphError(f"weight of {e} must be a non-negative integer")
                wmap[e] = w
            if len(wmap) != len(canon):
                raise GraphError("every edge of a weighted graph needs exactly one weight")
        adj: Dict[int, list] = {v: [] for v in node_set}
        for u, v in canon:
            adj[u].append(v)
            adj[v].append(u)
        self.nodes: FrozenSet[int] = node_set
        self.edges: FrozenSet[Edge] = frozenset(canon)
        self.weights: Optional[Dict[Edge, int]] = wmap
        self._adj = {v: tuple(sorted(nb)) for v, nb in adj.items()}

    # basic queries

    @property
    def n(self) -> int:
        return len(self.nodes)

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def weighted(self) -> bool:
        return self.weights is not None

    def neighbors(self, v: int) -> Tuple[int, ...]:
        return self._adj[v]

    def degree(self, v: int) -> int:
        return len(self._adj[v])

    def max_degree(self) -> int:
        return max((len(nb) for nb in self._adj.values()), default=0)

    def has_edge(self, u: int, v: int) -> bool:
        return edge_key(u, v) in self.edges

    def sorted_nodes(self) -> Tuple[int, ...]:
        return tuple(sorted(self.nodes))

    def sorted_edges(self) -> Tuple[Edge, ...]:
        return tuple(sorted(self.edges))

    def subgraph(self, nodes: Iterable[int]) -> "Graph":
        keep = frozenset(nodes)
        edges = [e for e in self.edges if e[0] in keep and e[1] in keep]
        weights = {e: self.weights[e] for e in edges} if self.weights is not None else None
        return Graph(keep, edges, weights)

    def without_edges(self, drop: Iterable[Tuple[int, int]]) -> "Graph":
        drop = {edge_key(u, v) for u, v in drop}
        edges = [e for e in self.edges if e not in drop]
        weights = {e: self.weights[e] for e in edges} if self.weights is not None else None
        return Graph(self.nodes, edges, weights)

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return (self.nodes, self.edges, self.weights) == (other.nodes, other.edges, other.weights)

    def __hash__(self):
        w = frozenset(self.weights.items()) if self.weights is not None else None
        return hash((self.nodes, self.edges, w))

    def __repr__(self):
        kind = "weighted " if self.weighted else ""
        return f"<{kind}Graph n={self.n} m={self.m}>"


def validate_subgraph(g: Graph, h: Graph) -> bool:
    """True iff ``g``'s nodes, edges and (where ``g`` has them) weights are contained in ``h``."""
    if not g.nodes <= h.nodes or not g.edges <= h.edges:
        return False
    if g.weights is not None:
        if h.weights is None:
            return False
        return all(h.weights[e] == w for e, w in g.weights.items())
    return True


def bfs_distances(g: Graph, source: int) -> Dict[int, int]:
    dist = {source: 0}
    queue = deque([source])
    while queue:
        v = queue.popleft()
        for u in g.neighbors(v):
            if u not in dist:
                dist[u] = dist[v] + 1
                queue.append(u)
    return dist


def is_connected(g: Graph) -> bool:
    if g.n == 0:
        return True
    return len(bfs_distances(g, min(g.nodes))) == g.n


def diameter(g: Graph) -> Optional[int]:
    """Hop diameter, or ``None`` when ``g`` is disconnected."""
    best = 0
    for v in g.sorted_nodes():
        dist = bfs_distances(g, v)
        if len(dist) != g.n:
            return None
        best = max(best, max(dist.values()))
    return best


# -- instances ----------------------------------------------------------------


@dataclass(frozen=True)
class SupportedInstance:
    """A support graph H together with an input graph G that must be a subgraph of H."""

    support: Graph
    input: Graph
    spanning: bool = True

    def __post_init__(self):
        if not validate_subgraph(self.input, self.support):
            raise GraphError("input graph is not a subgraph of the support graph")
        if self.spanning and self.input.nodes != self.support.nodes:
            raise GraphError("spanning instance must have V(G) = V(H)")
        limit = 1 << id_bits(self.support.n)
        too_big = [v for v in self.support.nodes if v >= limit]
        if too_big:
            raise GraphError(f"node ids {too_big[:5]} do not fit in {id_bits(self.support.n)} bits")

    @classmethod
    def plain(cls, g: Graph) -> "SupportedInstance":
        return cls(g, g, True)


@dataclass(frozen=True)
class PartitionedInstance:
    """A two-sided graph ``(V0 ∪ V1, E0 ∪ E1 ∪ S)`` built from the inputs ``x0`` and ``x1``."""

    v0: FrozenSet[int]
    v1: FrozenSet[int]
    e0: FrozenSet[Edge]
    e1: FrozenSet[Edge]
    cut: FrozenSet[Edge]
    n: int
    x0: str
    x1: str
    weights: Optional[Mapping[Edge, int]] = field(default=None, compare=False)

    def side_of(self, v: int) -> int:
        if v in self.v0:
            return 0
        if v in self.v1:
            return 1
        raise KeyError(v)

    def violations(self) -> list:
        """Structural problems (empty when well-formed)."""
        out = []
        if self.v0 & self.v1:
            out.append("sides overlap")
        if len(self.v0 | self.v1) != self.n:
            out.append(f"|V0 ∪ V1| = {len(self.v0 | self.v1)} != n = {self.n}")
        if any(u not in self.v0 or v not in self.v0 for u, v in self.e0):
            out.append("E0 leaves V0")
        if any(u not in self.v1 or v not in self.v1 for u, v in self.e1):
            out.append("E1 leaves V1")
        for u, v in self.cut:
            if not ((u in self.v0 and v in self.v1) or (u in self.v1 and v in self.v0)):
                out.append(f"cut edge {(u, v)} does not cross the sides")
        return out


def merge_to_graph(p: PartitionedInstance) -> Graph:
    """Flatten a partitioned instance to the graph on ``v0 ∪ v1`` with edges ``e0 ∪ e1 ∪ cut``."""
    if p.v0 & p.v1:
        raise OverlapError(f"sides share nodes {sorted(p.v0 & p.v1)}")
    edges = list(p.e0) + list(p.e1) + list(p.cut)
    return Graph(p.v0 | p.v1, edges, p.weights)


# -- edge-list text format ----------------------------------------------------


def serialize_graph(g: Graph) -> str:
    """Write ``g`` in the edge-list format.

    A ``v`` line listing the node ids is emitted only when the node set is not
    ``{0, ..., n-1}``.
    """
    kind = "w" if g.weighted else "u"
    lines = [f"{g.n} {g.m} {kind}"]
    if g.nodes != frozenset(range(g.n)):
        lines.append("v " + " ".join(str(v) for v in g.sorted_nodes()))
    for u, v in g.sorted_edges():
        if g.weighted:
            lines.append(f"{u} {v} {g.weights[(u, v)]}")
        else:
            lines.append(f"{u} {v}")
    return "\n".join(lines) + "\n"


def _ints(tokens, lineno):
    try:
        return [int(t) for t in tokens]
    except ValueError:
        raise FormatError(f"expected integers, got {' '.join(tokens)!r}", lineno) from None


def parse_graph(text: str) -> Graph:
    header = None
    explicit_nodes = None
    edges = []
    weights = {}
    seen = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        if header is None:
            if len(tokens) != 3 or tokens[2] not in ("u", "w"):
                raise FormatError("header must be 'n m t' with t in {u, w}", lineno)
            n, m = _ints(tokens[:2], lineno)
            if n < 0 or m < 0:
                raise FormatError("n and m must be non-negative", lineno)
            header = (n, m, tokens[2] == "w", lineno)
            continue
        if tokens[0] == "v":
            if explicit_nodes is not None or edges:
                raise FormatError("node list must directly follow the header", lineno)
            explicit_nodes = _ints(tokens[1:], lineno)
            if len(set(explicit_nodes)) != len(explicit_nodes) or len(explicit_nodes) != header[0]:
                raise FormatError("node list must hold n distinct ids", lineno)
            continue
        weighted = header[2]
        if len(tokens) != (3 if weighted else 2):
            raise FormatError(f"expected {'u v w' if weighted else 'u v'}", lineno)
        vals = _ints(tokens, lineno)
        u, v = vals[0], vals[1]
        if u < 0 or v < 0:
            raise FormatError("node ids must be non-negative", lineno)
        if u == v:
            raise SelfLoopError(f"self-loop at node {u}", lineno)
        e = edge_key(u, v)
        if e in seen:
            raise DuplicateEdgeError(f"duplicate edge {e}", lineno)
        seen.add(e)
        edges.append(e)
        if weighted:
            if vals[2] < 0:
                raise FormatError("weights must be non-negative", lineno)
            weights[e] = vals[2]
    if header is None:
        raise FormatError("missing header", 1)
    n, m, weighted, hline = header
    if len(edges) != m:
        raise FormatError(f"header announces {m} edges, found {len(edges)}", hline)
    nodes = set(explicit_nodes) if explicit_nodes is not None else set(range(n))
    for u, v in edges:
        if u not in nodes or v not in nodes:
            raise FormatError(f"edge {(u, v)} uses an id outside the node set", hline)
    return Graph(nodes, edges, weights if weighted else None)


def read_graph(path) -> Graph:
    with open(path, encoding="ascii") as fh:
        return parse_graph(fh.read())


def write_graph(g: Graph, path) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write(serialize_graph(g))


# -- generators ---------------------------------------------------------------


def path_graph(n: int) -> Graph:
    return Graph(range(n), [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise GraphError("a cycle needs at least 3 nodes")
    return Graph(range(n), [(i, (i + 1) % n) for i in range(n)])


def star_graph(n: int) -> Graph:
    """Star on ``n`` nodes with center 0."""
    return Graph(range(n), [(0, i) for i in range(1, n)])


def complete_graph(n: int) -> Graph:
    return Graph(range(n), [(i, j) for i in range(n) for j in range(i + 1, n)])


def random_graph(n: int, p: float, seed: int = 0) -> Graph:
    rng = random.Random(seed)
    return Graph(range(n), [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < p])


def random_connected_graph(n: int, p: float, seed: int = 0) -> Graph:
    """G(n, p) plus a random spanning tree, so the result is always connected."""
    rng = random.Random(seed)
    edges = {(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < p}
    order = list(range(n))
    rng.shuffle(order)
    for idx in range(1, n):
        edges.add(edge_key(order[idx], order[rng.randrange(idx)]))
    return Graph(range(n), edges)


def random_subgraph(h: Graph, keep_edge: float = 0.5, seed: int = 0, keep_node: float = 1.0) -> Graph:
    """Random subgraph of ``h``; with ``keep_node < 1`` the result may drop nodes."""
    rng = random.Random(seed)
    nodes = [v for v in h.sorted_nodes() if keep_node >= 1.0 or rng.random() < keep_node]
    if not nodes and h.n:
        nodes = [min(h.nodes)]
    keep = set(nodes)
    edges = [e for e in h.sorted_edges() if e[0] in keep and e[1] in keep and rng.random() < keep_edge]
    weights = {e: h.weights[e] for e in edges} if h.weights is not None else None
    return Graph(keep, edges, weights)


GENERATORS = {
    "path": path_graph,
    "cycle": cycle_graph,
    "star": star_graph,
    "clique": complete_graph,
    "random": random_graph,
    "random-connected": random_connected_graph,
}
