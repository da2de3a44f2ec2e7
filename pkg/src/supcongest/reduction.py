"""Two-party simulation of distributed algorithms on lower bound graph families.

Player ``i`` holds only ``(n, x_i)`` and the family. From these it builds its
side of the instance and the support graph, computes the advice of its own
nodes, and simulates them. Messages between its own nodes cost nothing.
Messages over the cut are exchanged with the other player each round and
recorded in a :class:`Transcript`. The recorded payload is what the round
bound ``2 * b * |S| * T`` limits.
"""

from __future__ import annotations

import dataclasses
import hashlib
import itertools
import math
import random
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from .bits import ceil_log2, decode_int, encode_int, from_hex, to_hex
from .engine import (
    Algorithm,
    ExecutionMode,
    NodeSlot,
    default_max_rounds,
    make_context,
    preprocess,
    resolve_bandwidth,
    run,
)
from .errors import CutViolation, FormatError, LengthMismatch, NonTermination, OutputInstability
from .graph import Edge, SupportedInstance, edge_key, merge_to_graph
from .lbgraphs import LowerBoundFamily, all_bitstrings

# -- transcripts --------------------------------------------------------------


@dataclass(frozen=True)
class TranscriptRecord:
    round: int
    edge: Edge
    direction: int  # 0: V0 -> V1, 1: V1 -> V0
    payload: str


@dataclass
class Transcript:
    """Every cut slot of every round, in ``(round, edge, direction)`` order.

    Empty slots are kept as zero-length records so both players stay in
    lockstep. Framing covers a length prefix per record, one continuation bit
    per round plus a final stop bit, and one bit saying whether an answer bit
    follows. Only payload bits (and the answer bit, when sent) count toward
    the round bound.
    """

    cut: Tuple[Edge, ...]
    bandwidth: int
    records: List[TranscriptRecord] = field(default_factory=list)
    rounds: int = 0
    answer_bit: Optional[int] = None

    @property
    def prefix_width(self) -> int:
        return max(1, ceil_log2(self.bandwidth + 1))

    @property
    def payload_bits_total(self) -> int:
        return sum(len(r.payload) for r in self.records) + (self.answer_bit is not None)

    @property
    def framing_bits_total(self) -> int:
        return len(self.records) * self.prefix_width + self.rounds + 1 + 1

    def nonempty(self) -> List[TranscriptRecord]:
        return [r for r in self.records if r.payload]

    def to_bits(self) -> str:
        w = self.prefix_width
        parts = []
        by_round: Dict[int, List[TranscriptRecord]] = {}
        for rec in self.records:
            by_round.setdefault(rec.round, []).append(rec)
        for rnd in range(1, self.rounds + 1):
            parts.append("1")
            for rec in by_round.get(rnd, []):
                parts.append(encode_int(len(rec.payload), w))
                parts.append(rec.payload)
        parts.append("0")
        parts.append("0" if self.answer_bit is None else "1" + str(self.answer_bit))
        return "".join(parts)

    @classmethod
    def from_bits(cls, stream: str, cut: Sequence[Edge], bandwidth: int) -> "Transcript":
        """Parse :meth:`to_bits` output given the cut and bandwidth both players know."""
        t = cls(tuple(sorted(edge_key(*e) for e in cut)), bandwidth)
        w = t.prefix_width
        pos = 0

        def take(k):
            nonlocal pos
            if pos + k > len(stream):
                raise FormatError(f"transcript stream ends early at bit {pos}")
            chunk = stream[pos:pos + k]
            pos += k
            return chunk

        rnd = 0
        while take(1) == "1":
            rnd += 1
            for e in t.cut:
                for d in (0, 1):
                    length = decode_int(take(w))
                    if length > bandwidth:
                        raise FormatError(f"record of {length} bits exceeds bandwidth {bandwidth}")
                    t.records.append(TranscriptRecord(rnd, e, d, take(length)))
        t.rounds = rnd
        if take(1) == "1":
            t.answer_bit = int(take(1))
        if pos != len(stream):
            raise FormatError(f"{len(stream) - pos} trailing bits after transcript")
        return t

    def export_lines(self) -> str:
        """One line per record: ``round edge_u edge_v dir payload_hex payload_bitlen``."""
        lines = []
        for r in self.records:
            d = "01" if r.direction == 0 else "10"
            lines.append(f"{r.round} {r.edge[0]} {r.edge[1]} {d} {to_hex(r.payload)} {len(r.payload)}")
        return "\n".join(lines) + ("\n" if lines else "")

    @classmethod
    def import_lines(cls, text: str, cut: Sequence[Edge], bandwidth: int) -> "Transcript":
        t = cls(tuple(sorted(edge_key(*e) for e in cut)), bandwidth)
        for lineno, line in enumerate(text.splitlines(), start=1):
            if not line.strip():
                continue
            try:
                rnd, u, v, d, hx, ln = line.split()
                rec = TranscriptRecord(int(rnd), (int(u), int(v)), 0 if d == "01" else 1, from_hex(hx, int(ln)))
            except ValueError:
                raise FormatError("malformed transcript line", lineno) from None
            t.records.append(rec)
            t.rounds = max(t.rounds, rec.round)
        return t


def theorem_bound(b: int, cut_size: int, rounds: int) -> int:
    return 2 * b * cut_size * rounds


def verify_theorem_bound(t: Transcript, b: int, cut_size: int, T: int) -> bool:
    """True iff the payload is at most ``2 * b * cut_size * T`` bits."""
    return t.payload_bits_total <= theorem_bound(b, cut_size, T)


def bound_ratio(t: Transcript, b: int, cut_size: int, T: int) -> float:
    bound = theorem_bound(b, cut_size, T)
    if bound == 0:
        return 0.0 if t.payload_bits_total == 0 else math.inf
    return t.payload_bits_total / bound


# -- simulation protocol ------------------------------------------------------


@dataclass
class ProtocolRun:
    answer: Optional[int]
    transcript: Transcript
    rounds: int
    outputs: Dict[int, Any] = field(default_factory=dict)
    states: Dict[int, Any] = field(default_factory=dict)

    def __iter__(self):
        return iter((self.answer, self.transcript, self.rounds))


class _Player:
    """One side of the simulation. Its constructor sees only ``(side, n, x, family)``."""

    def __init__(self, side: int, n: int, x: str, proto: "SimulationProtocol"):
        fam, alg, mode = proto.family, proto.alg, proto.mode
        self.side = side
        self.alg = alg
        nodes, own_edges = fam.build_side(side, n, x)
        self.nodes = tuple(sorted(nodes))
        cut = fam.cut(n)
        h = fam.support(n)
        input_adj: Dict[int, set] = {v: set() for v in self.nodes}
        for u, v in list(own_edges) + list(cut):
            for a, c in ((u, v), (v, u)):
                if a in input_adj:
                    input_adj[a].add(c)
        if mode is ExecutionMode.SUPPORTED_ACTIVE:
            comm = {v: h.neighbors(v) for v in self.nodes}
        else:
            comm = {v: tuple(sorted(input_adj[v])) for v in self.nodes}
        advice_fn = proto.advice_fn or alg.advice
        if mode.supported and advice_fn is not None:
            advice = preprocess(h, advice_fn, self.nodes)
        else:
            advice = {}
        self.slots: Dict[int, NodeSlot] = {}
        for v in self.nodes:
            ctx = make_context(
                v,
                n=n,
                bandwidth=proto.bandwidth,
                comm=comm[v],
                input_nbrs=input_adj[v],
                advice=advice.get(v, b""),
                seed=proto.seed,
                in_input=True,
                know_neighbor_ids=proto.know_neighbor_ids,
            )
            slot = NodeSlot(ctx, comm[v])
            slot.state = alg.init(ctx)
            slot.out = alg.output(slot.state)
            self.slots[v] = slot
        self.local: Dict[int, List[Tuple[int, str]]] = {v: [] for v in self.nodes}

    def done(self) -> bool:
        return all(s.out is not None for s in self.slots.values())

    def step(self, rnd: int, incoming: Dict[Tuple[int, int], str]) -> Dict[Tuple[int, int], str]:
        """Simulate round ``rnd``; ``incoming`` maps ``(sender, receiver)`` to cut payloads."""
        pending = self.local
        for (u, v), payload in incoming.items():
            pending[v].append((u, payload))
        self.local = {v: [] for v in self.nodes}
        outgoing = {}
        for v in self.nodes:
            slot = self.slots[v]
            inbox = {slot.inbox_key(u): p for u, p in sorted(pending[v])}
            slot.state, outbox = self.alg.on_round(slot.state, inbox)
            for target, payload in slot.targets(outbox or {}, rnd):
                if target in self.slots:
                    self.local[target].append((v, payload))
                else:
                    outgoing[(v, target)] = payload
        for v in self.nodes:
            slot = self.slots[v]
            new = self.alg.output(slot.state)
            if slot.out is not None and new != slot.out:
                raise OutputInstability(v, rnd, slot.out, new)
            slot.out = new
        return outgoing

    def answer(self) -> Optional[int]:
        for v in self.nodes:
            if self.slots[v].out is not None:
                return self.slots[v].out
        return None


Channel = Callable[[int, List[TranscriptRecord]], List[TranscriptRecord]]


@dataclass(frozen=True)
class SimulationProtocol:
    """Two-party protocol obtained by simulating ``alg`` on members of ``family``."""

    alg: Algorithm
    family: LowerBoundFamily
    n: int
    bandwidth: int
    seed: int = 0
    mode: ExecutionMode = ExecutionMode.SUPPORTED_ACTIVE
    max_rounds: Optional[int] = None
    advice_fn: Optional[Callable] = None
    know_neighbor_ids: bool = True

    def player(self, side: int, x: str) -> _Player:
        return _Player(side, self.n, x, self)

    def run(self, x0: str, x1: str, channel: Optional[Channel] = None) -> ProtocolRun:
        k = self.family.k(self.n)
        if len(x0) != k or len(x1) != k:
            raise LengthMismatch(f"inputs must have length {k}")
        cut = tuple(sorted(self.family.cut(self.n)))
        p0, p1 = self.player(0, x0), self.player(1, x1)
        side0 = set(p0.nodes)
        t = Transcript(cut, self.bandwidth)
        limit = default_max_rounds(self.n) if self.max_rounds is None else self.max_rounds
        to0: Dict[Tuple[int, int], str] = {}
        to1: Dict[Tuple[int, int], str] = {}
        rnd = 0
        while not (p0.done() and p1.done()):
            if rnd >= limit:
                missing = [v for p in (p0, p1) for v in p.nodes if p.slots[v].out is None]
                raise NonTermination(rnd, missing)
            rnd += 1
            out0 = p0.step(rnd, to0)
            out1 = p1.step(rnd, to1)
            for (u, v) in list(out0) + list(out1):
                if edge_key(u, v) not in self.family.cut(self.n):
                    raise CutViolation(u, v)
            records = []
            for (a, c) in cut:
                lo, hi = (a, c) if a in side0 else (c, a)
                records.append(TranscriptRecord(rnd, (a, c), 0, out0.get((lo, hi), "")))
                records.append(TranscriptRecord(rnd, (a, c), 1, out1.get((hi, lo), "")))
            if channel is not None:
                records = channel(rnd, records)
            t.records.extend(records)
            to0, to1 = {}, {}
            for rec in records:
                if not rec.payload:
                    continue
                a, c = rec.edge
                lo, hi = (a, c) if a in side0 else (c, a)
                if rec.direction == 0:
                    to1[(lo, hi)] = rec.payload
                else:
                    to0[(hi, lo)] = rec.payload
        t.rounds = rnd
        answer = p0.answer()
        if answer is None:
            # only side-1 nodes decided; player 1 sends the bit across
            answer = p1.answer()
            if answer is not None:
                t.answer_bit = int(answer)
        outputs = {v: s.out for p in (p0, p1) for v, s in p.slots.items() if s.out is not None}
        states = {v: s.state for p in (p0, p1) for v, s in p.slots.items()}
        return ProtocolRun(answer, t, rnd, outputs, states)


def extract_protocol(
    alg: Algorithm,
    fam: LowerBoundFamily,
    n: int,
    bandwidth: Optional[int] = None,
    seed: int = 0,
    mode=ExecutionMode.SUPPORTED_ACTIVE,
    **kwargs,
) -> SimulationProtocol:
    if not fam.valid_n(n):
        raise ValueError(f"{fam.name} is not defined at n = {n}")
    mode = ExecutionMode.parse(mode)
    if not mode.supported:
        raise ValueError("protocol extraction simulates a supported-mode algorithm")
    b = resolve_bandwidth(alg, n, bandwidth)
    return SimulationProtocol(alg, fam, n, b, seed, mode, **kwargs)


def run_protocol(p, x0: str, x1: str, **kwargs) -> ProtocolRun:
    return p.run(x0, x1, **kwargs)


def monolithic_run(alg, fam, n, x0, x1, seed=0, bandwidth=None, mode=ExecutionMode.SUPPORTED_ACTIVE):
    inst = fam.build(n, x0, x1)
    g = merge_to_graph(inst)
    return run(
        SupportedInstance(fam.support(n), g, spanning=g.nodes == fam.support(n).nodes),
        alg,
        mode=mode,
        bandwidth=bandwidth,
        seed=seed,
        designated_cut=inst.cut,
    )


def equivalence_check(
    alg: Algorithm,
    fam: LowerBoundFamily,
    n: int,
    x0: str,
    x1: str,
    seed: int = 0,
    bandwidth: Optional[int] = None,
    mode=ExecutionMode.SUPPORTED_ACTIVE,
    channel: Optional[Channel] = None,
) -> bool:
    """Compare the two-party simulation with a direct engine run, node by node."""
    proto = extract_protocol(alg, fam, n, bandwidth, seed, mode)
    mono = monolithic_run(alg, fam, n, x0, x1, seed, proto.bandwidth, proto.mode)
    two = proto.run(x0, x1, channel=channel)
    if two.rounds != mono.metrics.rounds or two.outputs != mono.outputs or two.states != mono.states:
        return False
    cut = set(fam.cut(n))
    mono_cut = [(r, u, v, p) for r, u, v, p in mono.trace if edge_key(u, v) in cut]
    side0 = fam.build_side(0, n, x0)[0]
    two_cut = []
    for rec in two.transcript.nonempty():
        a, c = rec.edge
        lo, hi = (a, c) if a in side0 else (c, a)
        u, v = (lo, hi) if rec.direction == 0 else (hi, lo)
        two_cut.append((rec.round, u, v, rec.payload))
    return sorted(mono_cut) == sorted(two_cut) and mono.metrics.cut_bits == two.transcript.payload_bits_total - (
        two.transcript.answer_bit is not None
    )


# -- communication complexity utilities ---------------------------------------


def f_disj(x: str, y: str) -> int:
    """Set disjointness: 1 iff no index holds a 1 in both strings."""
    return int(not any(a == "1" and b == "1" for a, b in zip(x, y)))


def f_eq(x: str, y: str) -> int:
    return int(x == y)


def complement(x: str) -> str:
    return x.translate(str.maketrans("01", "10"))


@dataclass(frozen=True)
class FoolingSetCertificate:
    f: Callable[[str, str], int]
    pairs: Tuple[Tuple[str, str], ...]

    @property
    def bound(self) -> int:
        """Certified lower bound on deterministic communication, ``floor(log2 |pairs|)`` bits."""
        return len(self.pairs).bit_length() - 1 if self.pairs else 0


def check_fooling_set(cert: FoolingSetCertificate) -> bool:
    pairs = cert.pairs
    if not pairs:
        return True
    values = {cert.f(a, b) for a, b in pairs}
    if len(values) != 1:
        return False
    v = values.pop()
    f = cert.f
    for (a, b), (a2, b2) in itertools.combinations(pairs, 2):
        if f(a, b2) == v and f(a2, b) == v:
            return False
    return True


def disjointness_fooling_set(k: int) -> FoolingSetCertificate:
    return FoolingSetCertificate(f_disj, tuple((x, complement(x)) for x in all_bitstrings(k)))


def equality_fooling_set(k: int) -> FoolingSetCertificate:
    return FoolingSetCertificate(f_eq, tuple((x, x) for x in all_bitstrings(k)))


@dataclass(frozen=True)
class TrivialProtocol:
    """Player 0 sends its input verbatim; player 1 evaluates ``f`` and keeps the answer."""

    f: Callable[[str, str], int]
    k: int

    def run(self, x0: str, x1: str) -> ProtocolRun:
        if len(x0) != self.k or len(x1) != self.k:
            raise LengthMismatch(f"inputs must have length {self.k}")
        t = Transcript(((0, 1),), max(1, self.k))
        if self.k:
            t.records.append(TranscriptRecord(1, (0, 1), 0, x0))
            t.records.append(TranscriptRecord(1, (0, 1), 1, ""))
            t.rounds = 1
        received = x0
        return ProtocolRun(self.f(received, x1), t, t.rounds)


def trivial_upper_bound_protocol(f: Callable[[str, str], int], k: int) -> TrivialProtocol:
    return TrivialProtocol(f, k)


# -- randomized runs ----------------------------------------------------------


def trial_seed(seed: int, trial: int) -> int:
    return int.from_bytes(hashlib.sha256(f"trial/{seed}/{trial}".encode()).digest()[:8], "big")


@dataclass
class SuccessEstimate:
    trials: int
    per_pair: Dict[Tuple[str, str], float]

    @property
    def minimum(self) -> float:
        return min(self.per_pair.values()) if self.per_pair else 0.0

    def meets(self, threshold: float = 2 / 3) -> bool:
        return self.minimum >= threshold


def estimate_success_probability(
    p: SimulationProtocol,
    trials: int,
    seed: int = 0,
    pairs: Optional[Iterable[Tuple[str, str]]] = None,
) -> SuccessEstimate:
    """Fraction of trials, each with a fresh global seed, whose answer equals ``f``."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    fam, n = p.family, p.n
    if pairs is None:
        xs = all_bitstrings(fam.k(n))
        pairs = [(a, b) for a in xs for b in xs]
    per_pair = {}
    for x0, x1 in pairs:
        want = fam.f(n, x0, x1)
        hits = 0
        for t in range(trials):
            proto = dataclasses.replace(p, seed=trial_seed(seed, t))
            hits += proto.run(x0, x1).answer == want
        per_pair[(x0, x1)] = hits / trials
    return SuccessEstimate(trials, per_pair)
