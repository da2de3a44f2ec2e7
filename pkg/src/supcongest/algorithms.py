"""Reference node algorithms.

Standard CONGEST primitives (BFS, pipelined APSP, diameter, 4-cycle
detection) and the problems that separate the supported models from plain
CONGEST (network-size upper bound, coloring from a colored support,
identifier sets), each in a supported and, where meaningful, a plain variant.
"""

from __future__ import annotations

import functools
import heapq
import math
import random
from collections import deque
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

from .bits import ceil_log2, decode_int, encode_int, id_bits, pack_ints, unpack_ints
from .engine import Algorithm, ExecutionMode, NodeContext
from .errors import ConfigError, IdSpaceExhausted, MissingAdvice
from .graph import Graph

INF = math.inf


def dist_bits(n: int) -> int:
    """Width of a hop count in ``[0, n-1]``."""
    return max(1, ceil_log2(n))


# -- advice functions (computed on the support graph) -------------------------


def advice_node_count(h: Graph, v: int) -> bytes:
    return str(h.n).encode()


def advice_sorted_ids(h: Graph, v: int) -> bytes:
    return ",".join(str(u) for u in h.sorted_nodes()).encode()


@functools.lru_cache(maxsize=64)
def greedy_coloring(h: Graph) -> Dict[int, int]:
    """First-fit coloring in ascending id order; uses at most ``Δ(h) + 1`` colors."""
    color: Dict[int, int] = {}
    for v in h.sorted_nodes():
        taken = {color[u] for u in h.neighbors(v) if u in color}
        c = 0
        while c in taken:
            c += 1
        color[v] = c
    return color


def advice_greedy_color(h: Graph, v: int) -> bytes:
    return str(greedy_coloring(h)[v]).encode()


def _require_advice(ctx: NodeContext, what: str) -> bytes:
    if not ctx.advice:
        raise MissingAdvice(f"node {ctx.node_id}: {what} needs preprocessing advice")
    return ctx.advice


def fresh_ids(exclude, count: int, idbits: int) -> Tuple[int, ...]:
    """The ``count`` smallest identifiers in ``[0, 2**idbits)`` outside ``exclude``."""
    exclude = set(exclude)
    out = []
    v = 0
    limit = 1 << idbits
    while len(out) < count:
        if v >= limit:
            raise IdSpaceExhausted(f"only {len(out)} of {count} fresh ids in a {idbits}-bit space")
        if v not in exclude:
            out.append(v)
        v += 1
    return tuple(out)


@dataclass(frozen=True)
class IdentifierSets:
    i0: Tuple[int, ...]
    i1: Tuple[int, ...]


def check_identifier_sets(out: IdentifierSets, ids_in_g) -> bool:
    ids_in_g = set(ids_in_g)
    return len(out.i0) == len(out.i1) and ids_in_g <= set(out.i1) and not ids_in_g & set(out.i0)


# -- breadth-first search -----------------------------------------------------


@dataclass
class _BFSState:
    ctx: NodeContext
    is_root: bool
    round: int = 0
    dist: Optional[float] = None
    sent: bool = False


class BFS(Algorithm):
    """Hop distance from ``root`` over the input graph.

    A node first reached in round ``r`` is at distance ``r - 1``. Nodes still
    unreached after round ``n`` output ``inf``.
    """

    name = "bfs"

    def __init__(self, root: int = 0):
        self.root = root

    def init(self, ctx):
        s = _BFSState(ctx, ctx.node_id == self.root and ctx.in_input)
        if s.is_root:
            s.dist = 0
        return s

    def on_round(self, s, inbox):
        s.round += 1
        out = {}
        if s.dist is None and inbox and s.ctx.in_input:
            s.dist = s.round - 1
        if s.dist is not None and s.dist != INF and not s.sent:
            s.sent = True
            out = {p: "1" for p in s.ctx.input_ports}
        if s.dist is None and s.round >= s.ctx.n and s.ctx.in_input:
            s.dist = INF
        return s, out

    def output(self, s):
        return s.dist


def alg_bfs(root: int = 0) -> BFS:
    return BFS(root)


# -- all-pairs shortest paths -------------------------------------------------


@dataclass
class _APSPState:
    ctx: NodeContext
    round: int = 0
    dist: Dict[int, int] = field(default_factory=dict)
    queue: List[Tuple[int, int]] = field(default_factory=list)
    announced: set = field(default_factory=set)
    done: bool = False
    # diameter phase
    ecc: Optional[int] = None
    ecc_sent: Optional[int] = None
    diameter: Optional[int] = None


class APSP(Algorithm):
    """Pipelined unweighted APSP.

    Each round a node announces its smallest not-yet-announced ``(distance,
    source)`` pair to all input neighbors. Distances are final after ``2n``
    rounds, when every node outputs its distance map.
    """

    name = "apsp"

    def min_bandwidth(self, n):
        return id_bits(n) + dist_bits(n)

    def horizon(self, n):
        return 2 * n

    def init(self, ctx):
        s = _APSPState(ctx)
        if ctx.in_input:
            s.dist[ctx.node_id] = 0
            s.queue.append((0, ctx.node_id))
        return s

    def _absorb(self, s, inbox):
        ib = s.ctx.idbits
        for payload in inbox.values():
            src, d = decode_int(payload[:ib]), decode_int(payload[ib:]) + 1
            if d < s.dist.get(src, INF):
                s.dist[src] = d
                heapq.heappush(s.queue, (d, src))

    def _announce(self, s):
        while s.queue:
            d, src = heapq.heappop(s.queue)
            if s.dist.get(src) == d and (d, src) not in s.announced:
                s.announced.add((d, src))
                msg = encode_int(src, s.ctx.idbits) + encode_int(d, dist_bits(s.ctx.n))
                return {p: msg for p in s.ctx.input_ports}
        return {}

    def on_round(self, s, inbox):
        s.round += 1
        if not s.ctx.in_input:
            return s, {}
        self._absorb(s, inbox)
        if s.round >= self.horizon(s.ctx.n):
            s.done = True
            return s, {}
        return s, self._announce(s)

    def output(self, s):
        return dict(sorted(s.dist.items())) if s.done else None


class Diameter(APSP):
    """APSP, then each node floods the largest eccentricity seen for ``n - 1`` rounds."""

    name = "diameter"

    def on_round(self, s, inbox):
        s.round += 1
        if not s.ctx.in_input:
            return s, {}
        A = self.horizon(s.ctx.n)
        if s.round < A:
            self._absorb(s, inbox)
            return s, self._announce(s)
        if s.round == A:
            self._absorb(s, inbox)
            s.ecc = max(s.dist.values())
        else:
            for payload in inbox.values():
                s.ecc = max(s.ecc, decode_int(payload))
        out = {}
        if s.ecc != s.ecc_sent:
            s.ecc_sent = s.ecc
            msg = encode_int(s.ecc, dist_bits(s.ctx.n))
            out = {p: msg for p in s.ctx.input_ports}
        if s.round >= A + s.ctx.n - 1:
            s.diameter = s.ecc
        return s, out

    def output(self, s):
        return s.diameter


def alg_apsp_pipelined() -> APSP:
    return APSP()


def alg_diameter() -> Diameter:
    return Diameter()


# -- 4-cycle detection --------------------------------------------------------


@dataclass
class _GatherState:
    ctx: NodeContext
    chunks: List[str]
    lists_len: int
    round: int = 0
    lists: Dict[int, set] = field(default_factory=dict)
    found: bool = False
    flagged: bool = False
    decided: Optional[int] = None


class FourCycleGather(Algorithm):
    """Decide whether the input graph contains a 4-cycle.

    For ``L = ceil((n - 1) / batch)`` rounds every node sends its sorted input
    neighbor list to each input neighbor, ``batch = floor(b / idbits)`` ids per
    message. A node with two neighbors sharing another common neighbor has
    found a 4-cycle and floods a 1-bit flag over its communication edges; all
    nodes output at round ``L + n``.
    """

    name = "four-cycle"

    def min_bandwidth(self, n):
        return id_bits(n)

    @staticmethod
    def list_rounds(n, bandwidth):
        batch = bandwidth // id_bits(n)
        return max(1, -(-(n - 1) // batch))

    def init(self, ctx):
        if not ctx.know_neighbor_ids:
            raise ConfigError("four-cycle gathering needs neighbor ids")
        batch = ctx.bandwidth // ctx.idbits
        nbrs = list(ctx.input_ports)
        chunks = [pack_ints(nbrs[i:i + batch], ctx.idbits) for i in range(0, len(nbrs), batch)]
        return _GatherState(ctx, chunks, self.list_rounds(ctx.n, ctx.bandwidth))

    def _detect(self, s):
        me = s.ctx.node_id
        seen = {}
        for u in s.ctx.input_ports:
            for x in s.lists.get(u, ()):
                if x == me:
                    continue
                if x in seen and seen[x] != u:
                    return True
                seen.setdefault(x, u)
        return False

    def on_round(self, s, inbox):
        s.round += 1
        L = s.lists_len
        out = {}
        if s.round <= L + 1:
            for u, payload in inbox.items():
                s.lists.setdefault(u, set()).update(unpack_ints(payload, s.ctx.idbits))
        if s.round <= L:
            i = s.round - 1
            if i < len(s.chunks):
                out = {p: s.chunks[i] for p in s.ctx.input_ports}
            return s, out
        if s.round == L + 1:
            s.found = self._detect(s)
        elif any(p == "1" for p in inbox.values()):
            s.found = True
        if s.found and not s.flagged:
            s.flagged = True
            out = {p: "1" for p in s.ctx.ports}
        if s.round >= L + s.ctx.n:
            s.decided = int(s.found)
        return s, out

    def output(self, s):
        return s.decided


def alg_four_cycle_gather() -> FourCycleGather:
    return FourCycleGather()


# -- constant and random deciders ---------------------------------------------


class ConstantDecider(Algorithm):
    """Outputs a fixed bit before round 1."""

    def __init__(self, bit: int):
        self.bit = int(bit)
        self.name = "always-accept" if self.bit else "always-reject"

    def init(self, ctx):
        return self.bit

    def on_round(self, s, inbox):
        return s, {}

    def output(self, s):
        return s


class RandomGuess(Algorithm):
    """Every node outputs an independent fair coin before round 1."""

    name = "random-guess"

    def init(self, ctx):
        return random.Random(ctx.seed).randrange(2)

    def on_round(self, s, inbox):
        return s, {}

    def output(self, s):
        return s


# -- separation problems: supported variants ----------------------------------


class _AdviceReadout(Algorithm):
    def on_round(self, s, inbox):
        return s, {}

    def output(self, s):
        return s


class SupportedSizeUpperBound(_AdviceReadout):
    """Outputs ``|V(H)|`` from advice, in zero rounds."""

    name = "size-upper-bound"
    advice = staticmethod(advice_node_count)

    def init(self, ctx):
        return int(_require_advice(ctx, "size upper bound"))


class ColorViaSupport(_AdviceReadout):
    """Outputs the node's color in a greedy coloring of the support graph, in zero rounds."""

    name = "coloring"
    advice = staticmethod(advice_greedy_color)

    def init(self, ctx):
        return int(_require_advice(ctx, "coloring"))


class SupportedIdentifierSets(_AdviceReadout):
    """``I1`` = identifiers of H, ``I0`` = as many fresh identifiers, in zero rounds."""

    name = "identifier-sets"
    advice = staticmethod(advice_sorted_ids)

    def init(self, ctx):
        raw = _require_advice(ctx, "identifier sets").decode()
        i1 = tuple(int(t) for t in raw.split(","))
        return IdentifierSets(fresh_ids(i1, len(i1), ctx.idbits), i1)


# -- separation problems: plain variants --------------------------------------

EXPLORE, PARENT = "0", "1"


@dataclass
class _TreeState:
    ctx: NodeContext
    is_root: bool
    batch: int
    round: int = 0
    reached_at: Optional[int] = None
    parent: Optional[int] = None
    heard: set = field(default_factory=set)
    children: List[int] = field(default_factory=list)
    child_count: Dict[int, int] = field(default_factory=dict)
    up_queue: deque = field(default_factory=deque)
    count_sent: bool = False
    known: List[int] = field(default_factory=list)
    total: Optional[int] = None
    total_sent: bool = False
    down_ptr: int = 0
    result: Any = None


class TreeAggregate(Algorithm):
    """Rooted BFS tree, convergecast of subtree sizes, then broadcast.

    With ``gather_ids`` the identifiers themselves are pipelined up to the
    root and back down, ``floor(b / idbits)`` per message, and every node
    outputs :class:`IdentifierSets`; otherwise nodes output ``|V(G)|``. The
    algorithm never reads ``ctx.n``, which would make the size problem
    trivial. Message meaning follows from the tree position of the sender:
    a child sends its subtree count and then identifier batches, a parent
    sends the total and then identifier batches.
    """

    def __init__(self, root: int = 0, gather_ids: bool = False):
        self.root = root
        self.gather_ids = gather_ids
        self.name = "identifier-sets" if gather_ids else "size-upper-bound"

    def min_bandwidth(self, n):
        # counts are sent b bits wide and must hold n
        need = n.bit_length()
        return max(need, id_bits(n)) if self.gather_ids else max(1, need)

    def init(self, ctx):
        is_root = ctx.node_id == self.root and ctx.in_input
        s = _TreeState(ctx, is_root, max(1, ctx.bandwidth // ctx.idbits))
        if is_root:
            s.reached_at = 0
            s.known.append(ctx.node_id)
        else:
            s.up_queue.append(ctx.node_id)
        return s

    def _finish(self, s):
        if s.result is not None:
            return
        if not self.gather_ids:
            if s.total is not None:
                s.result = s.total
        elif s.total is not None and len(s.known) == s.total:
            i1 = tuple(sorted(s.known))
            s.result = IdentifierSets(fresh_ids(i1, len(i1), s.ctx.idbits), i1)

    def on_round(self, s, inbox):
        s.round += 1
        ctx = s.ctx
        if not ctx.in_input:
            return s, {}
        ports = set(ctx.input_ports)
        out = {}
        newly = False
        if s.reached_at is None:
            senders = sorted(inbox)
            if not senders:
                return s, {}
            s.reached_at = s.round
            s.parent = senders[0]
            s.heard.update(senders)
            newly = True
            inbox = {}
        for u, payload in sorted(inbox.items()):
            if u not in s.heard:
                s.heard.add(u)
                if payload == PARENT:
                    s.children.append(u)
                    s.child_count[u] = None
            elif u in s.child_count:
                if s.child_count[u] is None:
                    s.child_count[u] = decode_int(payload)
                else:
                    ids = unpack_ints(payload, ctx.idbits)
                    (s.known if s.is_root else s.up_queue).extend(ids)
            elif u == s.parent:
                if s.total is None:
                    s.total = decode_int(payload)
                else:
                    s.known.extend(unpack_ints(payload, ctx.idbits))

        if newly or (s.is_root and s.round == 1):
            for p in ctx.input_ports:
                out[p] = PARENT if p == s.parent else EXPLORE
            self._finish(s)
            return s, out

        classified = s.heard >= ports
        counts_in = classified and all(c is not None for c in s.child_count.values())

        # upward traffic
        if counts_in and not s.count_sent:
            subtree = 1 + sum(s.child_count.values())
            s.count_sent = True
            if s.is_root:
                s.total = subtree
            else:
                out[s.parent] = encode_int(subtree, ctx.bandwidth)
        elif s.count_sent and not s.is_root and self.gather_ids and s.up_queue:
            batch = [s.up_queue.popleft() for _ in range(min(s.batch, len(s.up_queue)))]
            out[s.parent] = pack_ints(batch, ctx.idbits)

        # downward traffic
        if s.total is not None and s.children:
            if not s.total_sent:
                s.total_sent = True
                msg = encode_int(s.total, ctx.bandwidth)
                for c in s.children:
                    out[c] = msg
            elif self.gather_ids and s.down_ptr < len(s.known):
                chunk = s.known[s.down_ptr:s.down_ptr + s.batch]
                s.down_ptr += len(chunk)
                msg = pack_ints(chunk, ctx.idbits)
                for c in s.children:
                    out[c] = msg
        self._finish(s)
        return s, out

    def output(self, s):
        return s.result


def _is_plain(mode) -> bool:
    if isinstance(mode, str) and mode.lower() in ("supported", "plain"):
        return mode.lower() == "plain"
    return ExecutionMode.parse(mode) is ExecutionMode.PLAIN_CONGEST


def alg_size_upper_bound(mode="supported", root: int = 0) -> Algorithm:
    """Supported variant for the supported modes, rooted count for plain CONGEST."""
    return TreeAggregate(root) if _is_plain(mode) else SupportedSizeUpperBound()


def alg_color_via_support() -> ColorViaSupport:
    return ColorViaSupport()


def alg_identifier_sets(mode="supported", root: int = 0) -> Algorithm:
    return TreeAggregate(root, gather_ids=True) if _is_plain(mode) else SupportedIdentifierSets()


def is_proper_coloring(g: Graph, colors: Dict[int, int]) -> bool:
    return all(colors[u] != colors[v] for u, v in g.edges)


ALGORITHMS = {
    "bfs": lambda mode="plain", root=0: BFS(root),
    "apsp": lambda mode="plain", root=0: APSP(),
    "diameter": lambda mode="plain", root=0: Diameter(),
    "four-cycle": lambda mode="plain", root=0: FourCycleGather(),
    "size-upper-bound": lambda mode="plain", root=0: alg_size_upper_bound(mode, root),
    "coloring": lambda mode="plain", root=0: ColorViaSupport(),
    "identifier-sets": lambda mode="plain", root=0: alg_identifier_sets(mode, root),
    "always-accept": lambda mode="plain", root=0: ConstantDecider(1),
    "always-reject": lambda mode="plain", root=0: ConstantDecider(0),
    "random-guess": lambda mode="plain", root=0: RandomGuess(),
}
