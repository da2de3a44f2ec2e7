"""Families of lower bound graphs, a conformance checker, and the table of transferred bounds."""

from __future__ import annotations

import abc
import itertools
import random
import re
from dataclasses import dataclass, field
from typing import FrozenSet, Iterable, List, Optional, Sequence, Tuple

from .errors import LengthMismatch
from .graph import Edge, Graph, PartitionedInstance, edge_key, merge_to_graph, validate_subgraph


def all_bitstrings(k: int) -> List[str]:
    return ["".join(bits) for bits in itertools.product("01", repeat=k)]


def intersects(x0: str, x1: str) -> int:
    """1 iff the two characteristic vectors share a 1 (the negation of disjointness)."""
    return int(any(a == "1" and b == "1" for a, b in zip(x0, x1)))


def predicate_four_cycle(g: Graph) -> int:
    """1 iff ``g`` has a simple cycle on exactly four nodes (brute force over node 4-sets)."""
    nodes = g.sorted_nodes()
    has = g.has_edge
    for a, b, c, d in itertools.combinations(nodes, 4):
        # the three distinct cyclic orders of a 4-set
        if has(a, b) and has(b, c) and has(c, d) and has(d, a):
            return 1
        if has(a, b) and has(b, d) and has(d, c) and has(c, a):
            return 1
        if has(a, c) and has(c, b) and has(b, d) and has(d, a):
            return 1
    return 0


class LowerBoundFamily(abc.ABC):
    """Interface for a family of lower bound graphs.

    For every valid ``n`` and inputs ``x0, x1`` of length ``k(n)`` the family
    builds a two-sided graph whose side ``i`` depends only on ``(i, n, x_i)``,
    whose cut has at least ``C(n)`` edges, and which satisfies ``predicate``
    exactly when ``f(n, x0, x1) == 1``.
    """

    name = "family"

    @abc.abstractmethod
    def valid_n(self, n: int) -> bool: ...

    @abc.abstractmethod
    def k(self, n: int) -> int: ...

    @abc.abstractmethod
    def C(self, n: int) -> int: ...

    @abc.abstractmethod
    def f(self, n: int, x0: str, x1: str) -> int: ...

    @abc.abstractmethod
    def predicate(self, g: Graph) -> int: ...

    @abc.abstractmethod
    def build_side(self, i: int, n: int, x: str) -> Tuple[FrozenSet[int], FrozenSet[Edge]]: ...

    @abc.abstractmethod
    def cut(self, n: int) -> FrozenSet[Edge]:
        """The cut used for every input at size ``n``."""

    @abc.abstractmethod
    def support(self, n: int) -> Graph:
        """Union of all family members at size ``n``."""

    def n_for_k(self, k: int) -> int:
        for n in range(1, 4 * k + 64):
            if self.valid_n(n) and self.k(n) == k:
                return n
        raise ValueError(f"{self.name} has no size with k = {k}")

    def build(self, n: int, x0: str, x1: str) -> PartitionedInstance:
        k = self.k(n)
        if len(x0) != len(x1):
            raise LengthMismatch(f"inputs have lengths {len(x0)} and {len(x1)}")
        if len(x0) != k:
            raise LengthMismatch(f"inputs must have length k(n) = {k}, got {len(x0)}")
        v0, e0 = self.build_side(0, n, x0)
        v1, e1 = self.build_side(1, n, x1)
        return PartitionedInstance(v0, v1, e0, e1, self.cut(n), n, x0, x1)


class ToyFourCycleFamily(LowerBoundFamily):
    """Set intersection encoded as 4-cycle detection.

    With ``n = 2k + 2``: side 0 is ``a = 0`` and ``u_j = j``, side 1 is
    ``b = k + 1`` and ``w_j = k + 1 + j``. Player 0's bit ``j`` adds ``(a, u_j)``,
    player 1's bit adds ``(b, w_j)``; the cut ``{(u_j, w_j)} ∪ {(a, b)}`` is
    fixed. The only possible 4-cycles are ``a, u_j, w_j, b``.
    """

    name = "toy"

    def valid_n(self, n: int) -> bool:
        return n >= 4 and n % 2 == 0

    def _check(self, n):
        if not self.valid_n(n):
            raise ValueError(f"toy family needs even n >= 4, got {n}")

    def k(self, n: int) -> int:
        self._check(n)
        return (n - 2) // 2

    def n_for_k(self, k: int) -> int:
        if k < 1:
            raise ValueError("k must be >= 1")
        return 2 * k + 2

    def C(self, n: int) -> int:
        return self.k(n) + 1

    def f(self, n: int, x0: str, x1: str) -> int:
        return intersects(x0, x1)

    def predicate(self, g: Graph) -> int:
        return predicate_four_cycle(g)

    def build_side(self, i: int, n: int, x: str):
        k = self.k(n)
        if len(x) != k:
            raise LengthMismatch(f"input must have length {k}, got {len(x)}")
        hub = 0 if i == 0 else k + 1
        nodes = frozenset(range(hub, hub + k + 1))
        edges = frozenset((hub, hub + j) for j in range(1, k + 1) if x[j - 1] == "1")
        return nodes, edges

    def cut(self, n: int):
        k = self.k(n)
        return frozenset([(j, k + 1 + j) for j in range(1, k + 1)] + [(0, k + 1)])

    def support(self, n: int) -> Graph:
        k = self.k(n)
        edges = [(0, j) for j in range(1, k + 1)] + [(k + 1, k + 1 + j) for j in range(1, k + 1)]
        return Graph(range(n), edges + sorted(self.cut(n)))


TOY = ToyFourCycleFamily()


def build_toy_instance(k: int, x0: str, x1: str) -> PartitionedInstance:
    if len(x0) != len(x1):
        raise LengthMismatch(f"inputs have lengths {len(x0)} and {len(x1)}")
    if k < 1 or len(x0) != k:
        raise LengthMismatch(f"inputs must have length k = {k}")
    return TOY.build(2 * k + 2, x0, x1)


def toy_support(k: int) -> Graph:
    return TOY.support(2 * k + 2)


# -- conformance checking -----------------------------------------------------


@dataclass(frozen=True)
class Violation:
    kind: str  # predicate | side-independence | cut-size | support | structure
    x0: str
    x1: str
    detail: str = ""


@dataclass
class FamilyReport:
    family: str
    n: int
    pairs_checked: int = 0
    violations: List[Violation] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def kinds(self) -> set:
        return {v.kind for v in self.violations}


def check_family(
    fam: LowerBoundFamily,
    n: int,
    exhaustive: bool = True,
    samples: int = 0,
    seed: int = 0,
) -> FamilyReport:
    """Check a family's defining conditions at size ``n``.

    Exhaustive mode checks every input pair. Otherwise ``samples`` pairs are
    drawn; side independence is still tested against every other-side input
    that appears in the sample.
    """
    if not fam.valid_n(n):
        raise ValueError(f"{fam.name} is not defined at n = {n}")
    k = fam.k(n)
    if exhaustive:
        xs = all_bitstrings(k)
        pairs = [(a, b) for a in xs for b in xs]
    else:
        rng = random.Random(seed)
        pairs = sorted(
            {("".join(rng.choice("01") for _ in range(k)), "".join(rng.choice("01") for _ in range(k)))
             for _ in range(samples)}
        )
    report = FamilyReport(fam.name, n)
    support = fam.support(n)
    c = fam.C(n)
    sides = {}
    for x0, x1 in pairs:
        report.pairs_checked += 1
        inst = fam.build(n, x0, x1)
        for problem in inst.violations():
            report.violations.append(Violation("structure", x0, x1, problem))
        if len(inst.cut) < c:
            report.violations.append(Violation("cut-size", x0, x1, f"|S| = {len(inst.cut)} < C(n) = {c}"))
        g = merge_to_graph(inst) if not inst.v0 & inst.v1 else None
        if g is not None:
            if fam.predicate(g) != fam.f(n, x0, x1):
                report.violations.append(Violation("predicate", x0, x1, "predicate disagrees with f"))
            if not validate_subgraph(g, support):
                report.violations.append(Violation("support", x0, x1, "instance is not a subgraph of the support"))
        for i, x, side in ((0, x0, (inst.v0, inst.e0)), (1, x1, (inst.v1, inst.e1))):
            key = (i, x)
            if key not in sides:
                sides[key] = (fam.build_side(i, n, x), (x0, x1))
            (ref, first) = sides[key]
            if side != ref:
                report.violations.append(
                    Violation("side-independence", x0, x1, f"side {i} differs from the one built for {first}")
                )
    return report


# -- table of transferred lower bounds ----------------------------------------


@dataclass(frozen=True)
class BoundEntry:
    bound: str
    problems: Tuple[str, ...]
    approximation: str
    sources: Tuple[str, ...]
    deterministic_only: bool = False

    @property
    def problem(self) -> str:
        return ", ".join(self.problems)

    @property
    def source(self) -> str:
        return ", ".join(self.sources)


REGISTRY: Tuple[BoundEntry, ...] = (
    BoundEntry(
        "Ω(n^{1/2}/log n)",
        ("4-cycle", "2k-cycle", "Girth"),
        "Girth: (2-ε)-apx.",
        ("drucker13", "KR17", "frischknecht2012"),
    ),
    BoundEntry(
        "Ω(n/log n)",
        ("(2k+1)-cycle", "APSP", "Diameter"),
        "Diameter: (3/2-ε)-apx.",
        ("drucker13", "frischknecht2012"),
    ),
    BoundEntry("Ω(n/(log n)^2)", ("Diameter on sparse graphs",), "", ("AbboudCK16",)),
    BoundEntry(
        "Ω(n/(log n)^3)",
        ("Diameter on sparse graphs", "Radius on sparse graphs", "Eccentricities on sparse graphs"),
        "Diameter, radius: (3/2-ε)-apx.; eccentricities: (5/3-ε)-apx.",
        ("AbboudCK16",),
    ),
    BoundEntry("Ω(n^{2-1/k}/(k log n))", ("Subgraph detection (for any k)",), "", ("subgraph_spaa",)),
    BoundEntry(
        "Ω(n^2/(log n)^2)",
        ("Min. vertex cover", "Max. independent set", "Chrom. number", "Weighted 8-cycle"),
        "Chrom. number: (4/3-ε)-apx.",
        ("CHKP17",),
    ),
    BoundEntry("Ω(n^2)", ("Identical subgraphs",), "", ("CHKP17",), deterministic_only=True),
)


def _norm(s: str) -> str:
    return re.sub(r"[^0-9a-zω^{}/()+\-]+", " ", s.lower()).strip()


def registry_lookup(query: str, registry: Sequence[BoundEntry] = REGISTRY) -> List[BoundEntry]:
    """Entries whose problem names or bound contain ``query`` (case and punctuation insensitive)."""
    q = _norm(query)
    out = []
    for entry in registry:
        hay = [_norm(p) for p in entry.problems] + [_norm(entry.bound)]
        if any(q in h for h in hay):
            out.append(entry)
    return out


FAMILIES = {"toy": TOY}
