"""Command-line experiment runner.

Subcommands ``simulate``, ``reduce``, ``separate``, ``registry`` and
``check-family`` each write a CSV report to ``--out`` (stdout by default).
Scenario files are INI-style (``[section]`` headers and ``key = value``
lines); command-line flags override them.

Exit codes: 0 success, 1 a requested check failed, 2 configuration error,
3 runtime/engine error.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import hashlib
import io
import json
import random
import sys
from typing import List, Optional

from . import algorithms as algs
from .bits import to_hex
from .engine import ExecutionMode, default_max_rounds, run
from .errors import ConfigError, EngineError, GraphError, LengthMismatch
from .graph import (
    GENERATORS,
    Graph,
    SupportedInstance,
    diameter,
    path_graph,
    random_graph,
    random_subgraph,
    read_graph,
)
from .lbgraphs import FAMILIES, REGISTRY, all_bitstrings, check_family
from .reduction import bound_ratio, extract_protocol, theorem_bound

EXIT_OK, EXIT_CHECK, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2, 3


# -- scenario handling --------------------------------------------------------


def load_scenario(path: Optional[str]) -> configparser.ConfigParser:
    cfg = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    if path:
        try:
            with open(path, encoding="utf-8") as fh:
                cfg.read_file(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read scenario {path}: {exc}") from None
        except configparser.Error as exc:
            raise ConfigError(f"bad scenario file: {exc}") from None
    return cfg


def _get(cfg, section, key, override=None, default=None):
    if override is not None:
        return override
    if cfg.has_option(section, key):
        value = cfg.get(section, key).strip()
        return value if value != "" else default
    return default


def _int(value, what):
    if value is None:
        return None
    try:
        return int(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{what} must be an integer, got {value!r}") from None


def _bool(value) -> bool:
    return str(value).strip().lower() in ("1", "true", "yes", "on")


def parse_int_list(spec: str) -> List[int]:
    """``"8,16,32"`` or ``"2-4"`` or a mix such as ``"2-4,6"``."""
    out = []
    try:
        for part in str(spec).split(","):
            part = part.strip()
            if not part:
                continue
            if "-" in part:
                lo, hi = part.split("-", 1)
                out.extend(range(int(lo), int(hi) + 1))
            else:
                out.append(int(part))
    except ValueError:
        raise ConfigError(f"cannot parse integer list {spec!r}") from None
    return out


def make_graph(spec: str) -> Graph:
    """``name:arg:arg...`` for a generator, anything else is a file path."""
    name, _, rest = spec.partition(":")
    if name in GENERATORS:
        args = [a for a in rest.split(":") if a] if rest else []
        try:
            if name in ("random", "random-connected"):
                n = int(args[0])
                p = float(args[1]) if len(args) > 1 else 0.2
                seed = int(args[2]) if len(args) > 2 else 0
                return GENERATORS[name](n, p, seed)
            return GENERATORS[name](int(args[0]))
        except (IndexError, ValueError):
            raise ConfigError(f"bad generator spec {spec!r}") from None
        except GraphError as exc:
            raise ConfigError(str(exc)) from None
    try:
        return read_graph(spec)
    except OSError as exc:
        raise ConfigError(f"cannot read graph {spec!r}: {exc}") from None


def make_algorithm(name: str, mode: ExecutionMode, root: int):
    try:
        factory = algs.ALGORITHMS[name]
    except KeyError:
        raise ConfigError(f"unknown algorithm {name!r}; known: {', '.join(sorted(algs.ALGORITHMS))}") from None
    return factory(mode=mode, root=root)


def parse_modes(spec) -> List[ExecutionMode]:
    return [ExecutionMode.parse(m.strip()) for m in str(spec).split(",") if m.strip()]


def parse_cut(spec: Optional[str]):
    if not spec:
        return None
    edges = []
    try:
        for part in spec.split(","):
            u, v = part.strip().split("-")
            edges.append((int(u), int(v)))
    except ValueError:
        raise ConfigError(f"cannot parse cut {spec!r}; expected 'u-v, u-v'") from None
    return edges


def outputs_digest(outputs) -> str:
    text = repr(sorted(outputs.items()))
    return hashlib.sha256(text.encode()).hexdigest()[:16]


class _Writer:
    def __init__(self, path: Optional[str]):
        self.path = path
        self.buf = io.StringIO()
        self.csv = csv.writer(self.buf, lineterminator="\n")

    def row(self, values):
        self.csv.writerow(values)

    def close(self):
        if self.path:
            with open(self.path, "w", encoding="utf-8", newline="") as fh:
                fh.write(self.buf.getvalue())
        else:
            sys.stdout.write(self.buf.getvalue())


# -- subcommands --------------------------------------------------------------


def cmd_simulate(args) -> int:
    cfg = load_scenario(args.config)
    graph_spec = _get(cfg, "graph", "source", args.graph)
    if graph_spec is None:
        raise ConfigError("no graph given (use --graph or [graph] source)")
    h = make_graph(graph_spec)
    g = h
    sub = _get(cfg, "graph", "subgraph", args.subgraph)
    if sub:
        try:
            parts = [float(x) for x in str(sub).split(":")]
            keep_edge, keep_node, sub_seed = (parts + [1.0, 1.0, 0.0][len(parts):])[:3]
        except ValueError:
            raise ConfigError(f"bad subgraph spec {sub!r}; expected edge_frac:node_frac:seed") from None
        g = random_subgraph(h, keep_edge, int(sub_seed), keep_node)
    input_spec = _get(cfg, "graph", "input")
    if input_spec:
        g = make_graph(input_spec)
    try:
        instance = SupportedInstance(h, g, spanning=g.nodes == h.nodes)
    except GraphError as exc:
        raise ConfigError(str(exc)) from None

    name = _get(cfg, "algorithm", "name", args.algorithm)
    if name is None:
        raise ConfigError("no algorithm given (use --algorithm or [algorithm] name)")
    root = _int(_get(cfg, "algorithm", "root", args.root), "root")
    if root is None:
        root = min(g.nodes)
    modes = parse_modes(_get(cfg, "run", "mode", args.mode, "plain"))
    bandwidth = _int(_get(cfg, "run", "bandwidth", args.bandwidth), "bandwidth")
    seed = _int(_get(cfg, "run", "seed", args.seed, 0), "seed")
    max_rounds = _int(_get(cfg, "run", "max_rounds", args.max_rounds), "max_rounds")
    if max_rounds is None:
        max_rounds = default_max_rounds(h.n)
    cut = parse_cut(_get(cfg, "run", "cut", args.cut))

    d = diameter(g)
    out = _Writer(args.out)
    out.row(["mode", "algorithm", "n", "D", "T", "bits_total", "cut_bits", "advice_bytes", "outputs_digest"])
    traces = []
    for mode in modes:
        alg = make_algorithm(name, mode, root)
        res = run(instance, alg, mode, bandwidth, seed, max_rounds, cut)
        m = res.metrics
        out.row([
            mode.value, name, h.n, -1 if d is None else d, m.rounds, m.bits_total,
            m.cut_bits or 0, m.advice_bytes_total, outputs_digest(res.outputs),
        ])
        traces.extend((mode.value, *t) for t in res.trace)
    out.close()
    if args.trace:
        with open(args.trace, "w", encoding="utf-8") as fh:
            for mode, rnd, u, v, payload in traces:
                fh.write(f"{mode} {rnd} {u} {v} {to_hex(payload)} {len(payload)}\n")
    return EXIT_OK


def _family(name):
    try:
        return FAMILIES[name]
    except KeyError:
        raise ConfigError(f"unknown family {name!r}; known: {', '.join(sorted(FAMILIES))}") from None


def _pairs(k, exhaustive, samples, rng):
    if exhaustive:
        xs = all_bitstrings(k)
        return [(a, b) for a in xs for b in xs]
    drawn = set()
    for _ in range(samples):
        drawn.add(("".join(rng.choice("01") for _ in range(k)), "".join(rng.choice("01") for _ in range(k))))
    return sorted(drawn)


def cmd_reduce(args) -> int:
    cfg = load_scenario(args.config)
    fam = _family(_get(cfg, "sweep", "family", args.family, "toy"))
    ks = parse_int_list(_get(cfg, "sweep", "k", args.k, "2-4"))
    name = _get(cfg, "algorithm", "name", args.algorithm, "four-cycle")
    mode = ExecutionMode.parse(_get(cfg, "run", "mode", args.mode, "active"))
    if not mode.supported:
        raise ConfigError("reduce simulates a supported mode (active or passive)")
    seed = _int(_get(cfg, "run", "seed", args.seed, 0), "seed")
    bandwidth = _int(_get(cfg, "run", "bandwidth", args.bandwidth), "bandwidth")
    samples = _int(_get(cfg, "sweep", "samples", args.samples), "samples")
    exhaustive = args.exhaustive or _bool(_get(cfg, "sweep", "exhaustive", None, "false")) or samples is None
    rng = random.Random(seed)

    out = _Writer(args.out)
    out.row(["x0", "x1", "answer", "f", "T", "payload_bits", "bound_2bST", "ok"])
    all_agree, all_bounds, worst, count = True, True, 0.0, 0
    for k in ks:
        try:
            n = fam.n_for_k(k)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        alg = make_algorithm(name, mode, 0)
        proto = extract_protocol(alg, fam, n, bandwidth, seed, mode)
        cut_size = len(fam.cut(n))
        for x0, x1 in _pairs(k, exhaustive, samples or 0, rng):
            res = proto.run(x0, x1)
            want = fam.f(n, x0, x1)
            bound = theorem_bound(proto.bandwidth, cut_size, res.rounds)
            agree = res.answer == want
            bound_ok = res.transcript.payload_bits_total <= bound
            all_agree &= agree
            all_bounds &= bound_ok
            worst = max(worst, bound_ratio(res.transcript, proto.bandwidth, cut_size, res.rounds))
            count += 1
            out.row([x0, x1, res.answer, want, res.rounds, res.transcript.payload_bits_total, bound,
                     int(agree and bound_ok)])
    out.close()
    if args.summary:
        with open(args.summary, "w", encoding="utf-8") as fh:
            json.dump({"family": fam.name, "algorithm": name, "k": ks, "pairs": count,
                       "all_agree": all_agree, "all_bounds_ok": all_bounds,
                       "worst_ratio": round(worst, 6)}, fh, indent=2, sort_keys=True)
            fh.write("\n")
    return EXIT_OK if all_agree and all_bounds else EXIT_CHECK


def cmd_separate(args) -> int:
    cfg = load_scenario(args.config)
    problem = _get(cfg, "separate", "problem", args.problem, "size-upper-bound")
    ns = parse_int_list(_get(cfg, "separate", "n", args.n, "8,16,32,64"))
    seed = _int(_get(cfg, "run", "seed", args.seed, 0), "seed")
    out = _Writer(args.out)
    ok_all = True
    if problem == "size-upper-bound":
        out.row(["n", "D", "supported_T", "plain_T", "supported_output", "plain_output", "ok"])
        for n in ns:
            g = path_graph(n)
            inst = SupportedInstance.plain(g)
            sup = run(inst, algs.alg_size_upper_bound("supported"), ExecutionMode.SUPPORTED_ACTIVE, seed=seed)
            pla = run(inst, algs.alg_size_upper_bound("plain", root=0), ExecutionMode.PLAIN_CONGEST, seed=seed)
            so, po = set(sup.outputs.values()), set(pla.outputs.values())
            d = n - 1
            ok = (sup.metrics.rounds == 0 and so == {n} and po == {n} and pla.metrics.rounds >= d)
            ok_all &= ok
            out.row([n, d, sup.metrics.rounds, pla.metrics.rounds, min(so), min(po), int(ok)])
    elif problem == "coloring":
        out.row(["n", "max_degree", "supported_T", "supported_bits", "colors", "proper", "ok"])
        for i, n in enumerate(ns):
            h = random_graph(n, 0.2, seed + i)
            g = random_subgraph(h, 0.5, seed + i)
            res = run(SupportedInstance(h, g), algs.alg_color_via_support(), ExecutionMode.SUPPORTED_ACTIVE, seed=seed)
            colors = len(set(res.outputs.values()))
            proper = algs.is_proper_coloring(g, res.outputs)
            ok = res.metrics.rounds == 0 and res.metrics.bits_total == 0 and proper and colors <= h.max_degree() + 1
            ok_all &= ok
            out.row([n, h.max_degree(), res.metrics.rounds, res.metrics.bits_total, colors, int(proper), int(ok)])
    elif problem == "identifier-sets":
        out.row(["n", "D", "supported_T", "plain_T", "invariants_ok", "ok"])
        for n in ns:
            g = path_graph(n)
            inst = SupportedInstance.plain(g)
            sup = run(inst, algs.alg_identifier_sets("supported"), ExecutionMode.SUPPORTED_ACTIVE, seed=seed)
            pla = run(inst, algs.alg_identifier_sets("plain", root=0), ExecutionMode.PLAIN_CONGEST, seed=seed)
            inv = all(algs.check_identifier_sets(o, g.nodes)
                      for res in (sup, pla) for o in res.outputs.values())
            ok = inv and sup.metrics.rounds == 0
            ok_all &= ok
            out.row([n, n - 1, sup.metrics.rounds, pla.metrics.rounds, int(inv), int(ok)])
    else:
        raise ConfigError(f"unknown problem {problem!r}; expected size-upper-bound, coloring or identifier-sets")
    out.close()
    return EXIT_OK if ok_all else EXIT_CHECK


REGISTRY_HEADER = ["problem", "bound", "approximation", "source", "deterministic_only"]


def registry_rows():
    return [[e.problem, e.bound, e.approximation, e.source, int(e.deterministic_only)] for e in REGISTRY]


def cmd_registry(args) -> int:
    out = _Writer(args.out)
    out.row(REGISTRY_HEADER)
    for row in registry_rows():
        out.row(row)
    out.close()
    return EXIT_OK


def cmd_check_family(args) -> int:
    cfg = load_scenario(args.config)
    fam = _family(_get(cfg, "sweep", "family", args.family, "toy"))
    ks = parse_int_list(_get(cfg, "sweep", "k", args.k, "1-4"))
    samples = _int(_get(cfg, "sweep", "samples", args.samples), "samples")
    seed = _int(_get(cfg, "run", "seed", args.seed, 0), "seed")
    exhaustive = args.exhaustive or samples is None
    kinds = ["predicate", "side-independence", "cut-size", "support", "structure"]
    out = _Writer(args.out)
    out.row(["k", "n", "pairs_checked"] + [k.replace("-", "_") for k in kinds] + ["passed"])
    ok_all = True
    for k in ks:
        try:
            n = fam.n_for_k(k)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        rep = check_family(fam, n, exhaustive=exhaustive, samples=samples or 0, seed=seed)
        counts = [sum(v.kind == kind for v in rep.violations) for kind in kinds]
        ok_all &= rep.passed
        out.row([k, n, rep.pairs_checked] + counts + [int(rep.passed)])
    out.close()
    return EXIT_OK if ok_all else EXIT_CHECK


# -- entry point --------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="supcongest", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="scenario file")
        p.add_argument("--out", help="output CSV path (default: stdout)")
        p.add_argument("--seed", type=int)
        return p

    p = common(sub.add_parser("simulate", help="run one algorithm on one instance"))
    p.add_argument("--graph", help="generator spec such as path:64 or random:24:0.2:7, or an edge-list file")
    p.add_argument("--subgraph", help="input graph as a random subgraph: edge_frac[:node_frac[:seed]]")
    p.add_argument("--algorithm", help=f"one of {', '.join(sorted(algs.ALGORITHMS))}")
    p.add_argument("--mode", help="plain, active, passive, or a comma-separated list")
    p.add_argument("--bandwidth", type=int)
    p.add_argument("--max-rounds", dest="max_rounds", type=int)
    p.add_argument("--root", type=int)
    p.add_argument("--cut", help="designated cut as 'u-v,u-v'")
    p.add_argument("--trace", help="write the message trace to this path")
    p.set_defaults(func=cmd_simulate)

    p = common(sub.add_parser("reduce", help="two-party simulation sweep over a family"))
    p.add_argument("--family")
    p.add_argument("--k", help="k values, e.g. 2-4")
    p.add_argument("--algorithm")
    p.add_argument("--mode", help="active or passive")
    p.add_argument("--bandwidth", type=int)
    p.add_argument("--exhaustive", action="store_true")
    p.add_argument("--samples", type=int)
    p.add_argument("--summary", help="write a JSON summary to this path")
    p.set_defaults(func=cmd_reduce)

    p = common(sub.add_parser("separate", help="supported vs plain round counts"))
    p.add_argument("--problem")
    p.add_argument("--n", help="sizes, e.g. 8,16,32")
    p.set_defaults(func=cmd_separate)

    p = common(sub.add_parser("registry", help="table of lower bounds that transfer"))
    p.set_defaults(func=cmd_registry)

    p = common(sub.add_parser("check-family", help="check a family's defining conditions"))
    p.add_argument("--family")
    p.add_argument("--k", help="k values, e.g. 1-4")
    p.add_argument("--exhaustive", action="store_true")
    p.add_argument("--samples", type=int)
    p.set_defaults(func=cmd_check_family)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, LengthMismatch) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except EngineError as exc:
        print(f"engine error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
