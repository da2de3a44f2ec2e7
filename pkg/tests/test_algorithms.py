import math
import random

import networkx as nx
import pytest

from conftest import chromatic_number, to_nx
from supcongest.algorithms import (
    APSP,
    BFS,
    INF,
    ColorViaSupport,
    Diameter,
    FourCycleGather,
    IdentifierSets,
    SupportedIdentifierSets,
    SupportedSizeUpperBound,
    TreeAggregate,
    alg_identifier_sets,
    alg_size_upper_bound,
    check_identifier_sets,
    fresh_ids,
    greedy_coloring,
    is_proper_coloring,
)
from supcongest.engine import ACTIVE, PASSIVE, PLAIN, run
from supcongest.errors import ConfigError, IdSpaceExhausted, MissingAdvice
from supcongest.graph import (
    Graph,
    SupportedInstance,
    bfs_distances,
    complete_graph,
    cycle_graph,
    path_graph,
    random_connected_graph,
    random_graph,
    random_subgraph,
    star_graph,
)
from supcongest.lbgraphs import predicate_four_cycle


def plain(g):
    return SupportedInstance.plain(g)


def connected_part(h, size, seed):
    """Node set of a connected subgraph of ``h`` grown from a random start."""
    rng = random.Random(seed)
    start = rng.choice(h.sorted_nodes())
    seen = [start]
    frontier = [start]
    while frontier and len(seen) < size:
        v = frontier.pop(rng.randrange(len(frontier)))
        for u in h.neighbors(v):
            if u not in seen and len(seen) < size:
                seen.append(u)
                frontier.append(u)
    keep = set(seen)
    return Graph(keep, [e for e in h.edges if e[0] in keep and e[1] in keep])


# -- BFS ----------------------------------------------------------------------


def test_bfs_path():
    res = run(plain(path_graph(5)), BFS(0))
    assert res.outputs == {0: 0, 1: 1, 2: 2, 3: 3, 4: 4}
    assert res.metrics.rounds == 5


def test_bfs_star():
    res = run(plain(star_graph(7)), BFS(3))
    assert res.outputs == {3: 0, 0: 1, **{v: 2 for v in (1, 2, 4, 5, 6)}}


def test_bfs_disconnected_outputs_inf():
    g = Graph(range(4), [(0, 1), (2, 3)])
    res = run(plain(g), BFS(0))
    assert res.outputs == {0: 0, 1: 1, 2: INF, 3: INF}


@pytest.mark.parametrize("seed", range(5))
def test_bfs_random_matches_networkx(seed):
    g = random_connected_graph(32, 0.08, seed)
    res = run(plain(g), BFS(0))
    assert res.outputs == nx.single_source_shortest_path_length(to_nx(g), 0)
    assert res.metrics.rounds == max(res.outputs.values()) + 1


# -- APSP and diameter ---------------------------------------------------------


def test_apsp_path():
    res = run(plain(path_graph(5)), APSP())
    for v in range(5):
        assert res.outputs[v] == {u: abs(u - v) for u in range(5)}
    assert res.metrics.rounds == 10


def test_apsp_cycle_eccentricity():
    res = run(plain(cycle_graph(6)), APSP())
    assert {v: max(d.values()) for v, d in res.outputs.items()} == {v: 3 for v in range(6)}


@pytest.mark.parametrize("seed", range(8))
def test_apsp_random_matches_networkx(seed):
    g = random_connected_graph(16 + seed, 0.15, seed)
    res = run(plain(g), APSP())
    want = dict(nx.all_pairs_shortest_path_length(to_nx(g)))
    assert res.outputs == {v: dict(want[v]) for v in g.nodes}


def test_apsp_within_bandwidth_and_needs_more_than_one_bit():
    g = path_graph(6)
    res = run(plain(g), APSP())
    assert all(len(p) <= res.bandwidth for _, _, _, p in res.trace)
    with pytest.raises(ConfigError):
        run(plain(g), APSP(), bandwidth=1)


@pytest.mark.parametrize("g,want", [(path_graph(8), 7), (cycle_graph(6), 3), (complete_graph(5), 1),
                                    (star_graph(6), 2), (Graph([0]), 0)])
def test_diameter_examples(g, want):
    res = run(plain(g), Diameter())
    assert set(res.outputs.values()) == {want}


@pytest.mark.parametrize("seed", range(6))
def test_diameter_random_matches_networkx(seed):
    g = random_connected_graph(12 + 2 * seed, 0.12, seed)
    res = run(plain(g), Diameter())
    assert set(res.outputs.values()) == {nx.diameter(to_nx(g))}


def test_apsp_active_mode_h_only_nodes_relay_nothing():
    # distances are over G even though H offers shortcuts
    h = cycle_graph(6)
    g = Graph(range(6), [(i, i + 1) for i in range(5)])
    res = run(SupportedInstance(h, g), APSP(), mode=ACTIVE)
    assert res.outputs[0][5] == 5


# -- 4-cycle --------------------------------------------------------------------


@pytest.mark.parametrize("g,want", [(cycle_graph(4), 1), (cycle_graph(5), 0), (complete_graph(4), 1),
                                    (path_graph(6), 0), (cycle_graph(8), 0)])
def test_four_cycle_examples(g, want):
    res = run(plain(g), FourCycleGather())
    assert set(res.outputs.values()) == {want}


@pytest.mark.parametrize("seed", range(10))
def test_four_cycle_random_connected(seed):
    n = 10 + 2 * seed
    g = random_connected_graph(n, 1.5 / n, seed)
    res = run(plain(g), FourCycleGather())
    assert set(res.outputs.values()) == {predicate_four_cycle(g)}
    assert predicate_four_cycle(g) == int(any(len(c) == 4 for c in nx.simple_cycles(to_nx(g), length_bound=4)))


@pytest.mark.parametrize("mode", [ACTIVE, PASSIVE])
def test_four_cycle_supported_modes(mode):
    h = random_connected_graph(14, 0.2, 3)
    g = random_subgraph(h, 0.5, 4)
    if mode is PASSIVE:
        g = connected_part(h, 14, 1)
    res = run(SupportedInstance(h, g), FourCycleGather(), mode=mode)
    assert res.decision() == predicate_four_cycle(g)


def test_four_cycle_needs_neighbor_ids():
    with pytest.raises(ConfigError):
        run(plain(cycle_graph(4)), FourCycleGather(), know_neighbor_ids=False)


def test_four_cycle_uses_more_rounds_with_small_bandwidth():
    g = complete_graph(9)
    narrow = run(plain(g), FourCycleGather(), bandwidth=8)
    wide = run(plain(g), FourCycleGather(), bandwidth=64)
    assert narrow.decision() == wide.decision() == 1
    assert narrow.metrics.rounds > wide.metrics.rounds


# -- coloring -------------------------------------------------------------------


def test_greedy_coloring_c5():
    c = greedy_coloring(cycle_graph(5))
    assert is_proper_coloring(cycle_graph(5), c)
    assert len(set(c.values())) == 3 == chromatic_number(cycle_graph(5))


def test_coloring_k4_with_matching_subgraph():
    h = complete_graph(4)
    g = Graph(range(4), [(0, 1), (2, 3)])
    res = run(SupportedInstance(h, g), ColorViaSupport(), mode=PASSIVE)
    assert res.metrics.rounds == 0 and res.metrics.bits_total == 0
    assert is_proper_coloring(g, res.outputs)
    assert len(set(res.outputs.values())) == 4


@pytest.mark.parametrize("seed", range(10))
def test_coloring_random(seed):
    rng = random.Random(seed)
    n = rng.randint(2, 64)
    h = random_graph(n, rng.uniform(0.02, 0.3), seed)
    g = random_subgraph(h, 0.6, seed + 100)
    res = run(SupportedInstance(h, g), ColorViaSupport(), mode=PASSIVE)
    assert res.metrics.rounds == 0 and res.metrics.bits_total == 0
    assert is_proper_coloring(g, res.outputs)
    assert len(set(res.outputs.values())) <= h.max_degree() + 1


def test_coloring_in_plain_mode_has_no_advice():
    with pytest.raises(MissingAdvice):
        run(plain(cycle_graph(4)), ColorViaSupport(), mode=PLAIN)


# -- size upper bound ---------------------------------------------------------------


@pytest.mark.parametrize("n", [1, 2, 8, 16, 32])
def test_size_upper_bound_path(n):
    g = path_graph(n)
    sup = run(SupportedInstance(g, g), alg_size_upper_bound("supported"), mode=PASSIVE)
    pl = run(plain(g), alg_size_upper_bound("plain"), mode=PLAIN)
    assert sup.metrics.rounds == 0 and set(sup.outputs.values()) == {n}
    assert set(pl.outputs.values()) == {n}
    assert pl.metrics.rounds >= n - 1


def test_size_upper_bound_non_spanning_is_an_upper_bound():
    h = path_graph(10)
    g = Graph(range(6), [(i, i + 1) for i in range(5)])
    res = run(SupportedInstance(h, g, spanning=False), SupportedSizeUpperBound(), mode=PASSIVE)
    assert set(res.outputs.values()) == {10}
    plain_res = run(SupportedInstance(h, g, spanning=False), TreeAggregate(0), mode=PLAIN)
    assert set(plain_res.outputs.values()) == {6}


@pytest.mark.parametrize("seed", range(5))
def test_tree_aggregate_random_root(seed):
    g = random_connected_graph(20, 0.1, seed)
    root = random.Random(seed).randrange(20)
    res = run(plain(g), TreeAggregate(root))
    assert set(res.outputs.values()) == {20}


# -- identifier sets ----------------------------------------------------------------


def test_fresh_ids():
    assert fresh_ids({0, 2, 3}, 3, 3) == (1, 4, 5)
    with pytest.raises(IdSpaceExhausted):
        fresh_ids(range(3), 2, 2)


def test_check_identifier_sets():
    assert check_identifier_sets(IdentifierSets((4, 5), (0, 1)), {0, 1})
    assert not check_identifier_sets(IdentifierSets((4,), (0, 1)), {0, 1})
    assert not check_identifier_sets(IdentifierSets((1, 5), (0, 1)), {0, 1})
    assert not check_identifier_sets(IdentifierSets((4, 5), (0, 1)), {0, 2})


@pytest.mark.parametrize("mode", [ACTIVE, PASSIVE])
@pytest.mark.parametrize("seed", range(4))
def test_identifier_sets_supported(mode, seed):
    h = random_connected_graph(20, 0.1, seed)
    g = random_subgraph(h, 0.5, seed, keep_node=0.7)
    res = run(SupportedInstance(h, g, spanning=False), SupportedIdentifierSets(), mode=mode)
    assert res.metrics.rounds == 0
    assert all(check_identifier_sets(out, g.nodes) for out in res.outputs.values())


@pytest.mark.parametrize("seed", range(4))
def test_identifier_sets_plain(seed):
    h = random_connected_graph(24, 0.1, seed)
    for g in (h, connected_part(h, 15, seed)):
        inst = SupportedInstance(h, g, spanning=g.nodes == h.nodes)
        res = run(inst, alg_identifier_sets("plain", root=min(g.nodes)), mode=PLAIN)
        assert set(res.outputs) == g.nodes
        for out in res.outputs.values():
            assert check_identifier_sets(out, g.nodes)
            assert out.i1 == tuple(sorted(g.nodes))


def test_identifier_sets_with_sparse_ids():
    h = Graph([1, 5, 9, 12], [(1, 5), (5, 9), (9, 12)])
    res = run(plain(h), alg_identifier_sets("plain", root=1))
    assert {out for out in res.outputs.values()} == {IdentifierSets((0, 2, 3, 4), (1, 5, 9, 12))}


def test_supported_algorithms_need_advice():
    g = path_graph(3)
    for alg in (SupportedSizeUpperBound(), SupportedIdentifierSets()):
        with pytest.raises(MissingAdvice):
            run(plain(g), alg, mode=PLAIN)
