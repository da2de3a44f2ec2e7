"""Synchronous round engine for plain CONGEST and the two SUPPORTED variants.

A run proceeds as follows. Every participating node gets a :class:`NodeContext`
and calls ``alg.init``. If all nodes of the input graph already hold an
output, the run ends with ``rounds == 0``. Otherwise rounds ``1, 2, ...``
execute: each node calls ``alg.on_round(state, inbox)`` with the messages sent
to it in the previous round and returns its new state and an outbox. Payloads
are bit strings checked against the bandwidth per edge, per direction and per
round. The run ends at the first round after which every input node has an
output.
"""

from __future__ import annotations

import enum
import hashlib
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Iterable, List, Mapping, Optional, Tuple

from .bits import id_bits, is_bitstring
from .errors import (
    BandwidthExceeded,
    ConfigError,
    EngineError,
    IllegalSend,
    NonTermination,
    OutputInstability,
)
from .graph import Edge, Graph, SupportedInstance, edge_key

AdviceFn = Callable[[Graph, int], bytes]


class ExecutionMode(enum.Enum):
    PLAIN_CONGEST = "plain"
    SUPPORTED_ACTIVE = "active"
    SUPPORTED_PASSIVE = "passive"

    @classmethod
    def parse(cls, value) -> "ExecutionMode":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ConfigError(f"unknown mode {value!r}; expected plain, active or passive") from None

    @property
    def supported(self) -> bool:
        return self is not ExecutionMode.PLAIN_CONGEST


PLAIN = ExecutionMode.PLAIN_CONGEST
ACTIVE = ExecutionMode.SUPPORTED_ACTIVE
PASSIVE = ExecutionMode.SUPPORTED_PASSIVE


def default_bandwidth(n: int) -> int:
    """Bits per edge, direction and round: ``2 * ceil(log2 n)`` with each factor at least 1."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return id_bits(n)


def default_max_rounds(n: int) -> int:
    return 10 * n + 100


def node_seed(seed: int, node: int) -> int:
    digest = hashlib.sha256(f"{seed}/{node}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


@dataclass(frozen=True)
class NodeContext:
    """What a node knows before round 1.

    ``ports`` are the keys the node uses for inbox and outbox: neighbor ids
    when ``know_neighbor_ids`` is set, otherwise port numbers ``0..deg-1`` in
    ascending neighbor-id order. ``input_ports`` is the subset of ports whose
    edge belongs to the input graph.
    """

    node_id: int
    n: int
    bandwidth: int
    idbits: int
    ports: Tuple[int, ...]
    input_ports: Tuple[int, ...]
    advice: bytes = b""
    seed: int = 0
    in_input: bool = True
    know_neighbor_ids: bool = True


class Algorithm:
    """Base class for node-local algorithms.

    Subclasses implement ``init``, ``on_round`` and ``output``. The engine never
    keeps an old state after ``on_round`` returns, so updating the state in
    place and returning it is fine. ``advice`` is an optional preprocessing
    function ``(H, node) -> bytes`` used in the supported modes.
    """

    name = "algorithm"
    advice: Optional[AdviceFn] = None

    def min_bandwidth(self, n: int) -> int:
        return 1

    def init(self, ctx: NodeContext) -> Any:
        raise NotImplementedError

    def on_round(self, state: Any, inbox: Mapping[int, str]) -> Tuple[Any, Dict[int, str]]:
        raise NotImplementedError

    def output(self, state: Any) -> Any:
        raise NotImplementedError

    def __repr__(self):
        return f"<{type(self).__name__} {self.name}>"


class AdviceMap(dict):
    """``NodeId -> bytes`` produced by :func:`preprocess`."""

    @property
    def sizes(self) -> Dict[int, int]:
        return {v: len(a) for v, a in sorted(self.items())}


def preprocess(h: Graph, advice_fn: AdviceFn, nodes: Optional[Iterable[int]] = None) -> AdviceMap:
    """Run ``advice_fn`` on the support graph for each node (all of ``h`` by default)."""
    out = AdviceMap()
    for v in sorted(h.nodes if nodes is None else nodes):
        a = advice_fn(h, v)
        if not isinstance(a, (bytes, bytearray)):
            raise TypeError(f"advice for node {v} must be bytes, got {type(a).__name__}")
        out[v] = bytes(a)
    return out


def resolve_bandwidth(alg: Algorithm, n: int, bandwidth: Optional[int] = None) -> int:
    """Explicit bandwidth if given, else the larger of the default and what ``alg`` needs."""
    need = alg.min_bandwidth(n)
    if bandwidth is None:
        return max(default_bandwidth(n), need)
    if bandwidth < 1:
        raise ConfigError("bandwidth must be >= 1")
    if bandwidth < need:
        raise ConfigError(f"{alg.name} needs at least {need} bits per message, bandwidth is {bandwidth}")
    return bandwidth


class NodeSlot:
    """Per-node runtime: context, communication neighbors, port table and current state."""

    __slots__ = ("ctx", "comm", "port_of", "state", "out")

    def __init__(self, ctx: NodeContext, comm: Tuple[int, ...]):
        self.ctx = ctx
        self.comm = comm
        self.port_of = {u: i for i, u in enumerate(comm)}
        self.state = None
        self.out = None

    def inbox_key(self, sender: int) -> int:
        return sender if self.ctx.know_neighbor_ids else self.port_of[sender]

    def targets(self, outbox: Mapping[int, str], round: int) -> List[Tuple[int, str]]:
        """Resolve outbox keys to neighbor ids and enforce the model; empty payloads are dropped."""
        v = self.ctx.node_id
        b = self.ctx.bandwidth
        sends = []
        for key, payload in outbox.items():
            if not payload:
                continue
            if self.ctx.know_neighbor_ids:
                if key not in self.port_of:
                    raise IllegalSend(v, (v, key), round)
                target = key
            else:
                if not isinstance(key, int) or not 0 <= key < len(self.comm):
                    raise IllegalSend(v, (v, key), round)
                target = self.comm[key]
            if not is_bitstring(payload):
                raise EngineError(f"node {v} sent a payload that is not a bit string: {payload!r}")
            if len(payload) > b:
                raise BandwidthExceeded(v, (v, target), round, len(payload), b)
            sends.append((target, payload))
        sends.sort()
        return sends


def make_context(
    v: int,
    *,
    n: int,
    bandwidth: int,
    comm: Tuple[int, ...],
    input_nbrs: Iterable[int],
    advice: bytes,
    seed: int,
    in_input: bool,
    know_neighbor_ids: bool,
) -> NodeContext:
    input_set = set(input_nbrs)
    if know_neighbor_ids:
        ports = comm
        input_ports = tuple(u for u in comm if u in input_set)
    else:
        ports = tuple(range(len(comm)))
        input_ports = tuple(i for i, u in enumerate(comm) if u in input_set)
    return NodeContext(
        node_id=v,
        n=n,
        bandwidth=bandwidth,
        idbits=id_bits(n),
        ports=ports,
        input_ports=input_ports,
        advice=advice,
        seed=node_seed(seed, v),
        in_input=in_input,
        know_neighbor_ids=know_neighbor_ids,
    )


@dataclass
class RunMetrics:
    rounds: int = 0
    bits_total: int = 0
    messages_total: int = 0
    bits_per_edge_per_direction: Dict[Tuple[int, int], int] = field(default_factory=dict)
    cut_bits: Optional[int] = None
    advice_bytes_per_node: Dict[int, int] = field(default_factory=dict)

    @property
    def advice_bytes_total(self) -> int:
        return sum(self.advice_bytes_per_node.values())


@dataclass
class RunResult:
    outputs: Dict[int, Any]
    metrics: RunMetrics
    trace: List[Tuple[int, int, int, str]]
    states: Dict[int, Any]
    bandwidth: int
    mode: ExecutionMode

    def __iter__(self):
        # allows ``outputs, metrics = run(...)``
        return iter((self.outputs, self.metrics))

    def decision(self) -> Any:
        """Output of the smallest-id node, the convention for decision problems."""
        return self.outputs[min(self.outputs)] if self.outputs else None


def run(
    instance: SupportedInstance,
    alg: Algorithm,
    mode=ExecutionMode.PLAIN_CONGEST,
    bandwidth: Optional[int] = None,
    seed: int = 0,
    max_rounds: Optional[int] = None,
    designated_cut: Optional[Iterable[Tuple[int, int]]] = None,
    advice_fn: Optional[AdviceFn] = None,
    know_neighbor_ids: bool = True,
) -> RunResult:
    """Execute ``alg`` on ``instance`` and return outputs, metrics and the message trace.

    In plain mode only nodes of G run and send over E(G), without advice. In
    passive mode the same holds but nodes receive advice computed on H. In
    active mode every node of H runs and sends over E(H); nodes outside G see
    ``ctx.in_input == False`` and their outputs are not required.
    """
    mode = ExecutionMode.parse(mode)
    h, g = instance.support, instance.input
    n = h.n
    if n == 0:
        raise ConfigError("empty support graph")
    b = resolve_bandwidth(alg, n, bandwidth)
    if max_rounds is None:
        max_rounds = default_max_rounds(n)
    if max_rounds < 0:
        raise ConfigError("max_rounds must be >= 0")

    comm_graph = h if mode is ExecutionMode.SUPPORTED_ACTIVE else g
    participants = h.sorted_nodes() if mode is ExecutionMode.SUPPORTED_ACTIVE else g.sorted_nodes()
    required = g.sorted_nodes()

    advice_fn = advice_fn or alg.advice
    if mode.supported and advice_fn is not None:
        advice = preprocess(h, advice_fn)
    else:
        advice = AdviceMap()

    cut = None
    if designated_cut is not None:
        cut = {edge_key(u, v) for u, v in designated_cut}

    slots: Dict[int, NodeSlot] = {}
    for v in participants:
        comm = comm_graph.neighbors(v)
        ctx = make_context(
            v,
            n=n,
            bandwidth=b,
            comm=comm,
            input_nbrs=g.neighbors(v) if v in g.nodes else (),
            advice=advice.get(v, b""),
            seed=seed,
            in_input=v in g.nodes,
            know_neighbor_ids=know_neighbor_ids,
        )
        slot = NodeSlot(ctx, comm)
        slot.state = alg.init(ctx)
        slot.out = alg.output(slot.state)
        slots[v] = slot

    metrics = RunMetrics(advice_bytes_per_node=advice.sizes, cut_bits=0 if cut is not None else None)
    per_edge = metrics.bits_per_edge_per_direction
    trace: List[Tuple[int, int, int, str]] = []

    def missing():
        return [v for v in required if slots[v].out is None]

    rnd = 0
    pending: Dict[int, List[Tuple[int, str]]] = {v: [] for v in participants}
    while missing():
        if rnd >= max_rounds:
            raise NonTermination(rnd, missing())
        rnd += 1
        nxt: Dict[int, List[Tuple[int, str]]] = {v: [] for v in participants}
        for v in participants:
            slot = slots[v]
            inbox = {slot.inbox_key(u): p for u, p in sorted(pending[v])}
            slot.state, outbox = alg.on_round(slot.state, inbox)
            for target, payload in slot.targets(outbox or {}, rnd):
                nxt[target].append((v, payload))
                bits = len(payload)
                per_edge[(v, target)] = per_edge.get((v, target), 0) + bits
                metrics.bits_total += bits
                metrics.messages_total += 1
                if cut is not None and edge_key(v, target) in cut:
                    metrics.cut_bits += bits
                trace.append((rnd, v, target, payload))
        for v in participants:
            slot = slots[v]
            new = alg.output(slot.state)
            if slot.out is not None and new != slot.out:
                raise OutputInstability(v, rnd, slot.out, new)
            slot.out = new
        pending = nxt
    metrics.rounds = rnd

    outputs = {v: slots[v].out for v in participants if slots[v].out is not None}
    states = {v: slots[v].state for v in participants}
    return RunResult(outputs, metrics, trace, states, b, mode)
