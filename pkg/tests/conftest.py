import itertools

import networkx as nx
import pytest

from supcongest.graph import Graph

_acceptance = []


def to_nx(g: Graph) -> nx.Graph:
    out = nx.Graph()
    out.add_nodes_from(g.nodes)
    out.add_edges_from(g.edges)
    return out


def chromatic_number(g: Graph) -> int:
    """Smallest k admitting a proper coloring, by enumeration (tiny graphs only)."""
    nodes = g.sorted_nodes()
    for k in range(1, len(nodes) + 1):
        for colors in itertools.product(range(k), repeat=len(nodes)):
            c = dict(zip(nodes, colors))
            if all(c[u] != c[v] for u, v in g.edges):
                return k
    return 0


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance.py" in report.nodeid:
        _acceptance.append((report.nodeid.split("::")[-1], report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in _acceptance:
        terminalreporter.write_line(f"{'PASS' if outcome == 'passed' else 'FAIL'}  {name}")
