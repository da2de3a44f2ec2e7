import csv
import io
import json
import subprocess
import sys

import pytest

from supcongest.cli import main, parse_cut, parse_int_list
from supcongest.errors import ConfigError
from supcongest.graph import path_graph, write_graph


def rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_parse_int_list():
    assert parse_int_list("2-4,7") == [2, 3, 4, 7]
    assert parse_int_list("8, 16") == [8, 16]
    with pytest.raises(ConfigError):
        parse_int_list("a-b")


def test_parse_cut():
    assert parse_cut("0-1, 3-2") == [(0, 1), (3, 2)]
    assert parse_cut("") is None
    with pytest.raises(ConfigError):
        parse_cut("0:1")


def test_simulate_report(tmp_path):
    out = tmp_path / "sim.csv"
    code = main(["simulate", "--graph", "path:6", "--algorithm", "bfs", "--mode", "plain,active",
                 "--cut", "2-3", "--out", str(out)])
    assert code == 0
    r = rows(out)
    assert [x["mode"] for x in r] == ["plain", "active"]
    assert all(x["n"] == "6" and x["D"] == "5" and x["T"] == "6" for x in r)
    assert all(x["cut_bits"] == "2" for x in r)  # one flood bit each way
    assert r[0]["outputs_digest"] == r[1]["outputs_digest"]


def test_simulate_supported_advice_bytes(tmp_path):
    out = tmp_path / "sim.csv"
    assert main(["simulate", "--graph", "path:12", "--algorithm", "size-upper-bound",
                 "--mode", "passive,plain", "--out", str(out)]) == 0
    passive, plain = rows(out)
    assert passive["T"] == "0" and int(passive["advice_bytes"]) == 12 * 2
    assert int(plain["T"]) >= 11 and plain["advice_bytes"] == "0"


def test_simulate_from_edge_list_file(tmp_path):
    gpath = tmp_path / "g.txt"
    write_graph(path_graph(5), gpath)
    out = tmp_path / "sim.csv"
    assert main(["simulate", "--graph", str(gpath), "--algorithm", "diameter", "--out", str(out)]) == 0
    assert rows(out)[0]["D"] == "4"


def test_simulate_is_byte_identical_across_runs(tmp_path):
    args = ["simulate", "--graph", "random-connected:14:0.2:5", "--subgraph", "0.7:1:3", "--algorithm",
            "random-guess", "--mode", "plain,active,passive", "--seed", "9"]
    reports, traces = [], []
    for i in range(2):
        out, tr = tmp_path / f"r{i}.csv", tmp_path / f"t{i}.txt"
        assert main(args + ["--out", str(out), "--trace", str(tr)]) == 0
        reports.append(out.read_bytes())
        traces.append(tr.read_bytes())
    assert reports[0] == reports[1] and traces[0] == traces[1]


def test_simulate_trace_lines(tmp_path):
    tr = tmp_path / "t.txt"
    assert main(["simulate", "--graph", "path:3", "--algorithm", "bfs", "--out", str(tmp_path / "o.csv"),
                 "--trace", str(tr)]) == 0
    lines = tr.read_text().splitlines()
    assert lines[0] == "plain 1 0 1 1 1"
    assert len(lines) == 4


def test_simulate_bandwidth_too_small_is_config_error(tmp_path, capsys):
    code = main(["simulate", "--graph", "path:8", "--algorithm", "apsp", "--bandwidth", "1"])
    assert code == 2
    assert "configuration error" in capsys.readouterr().err


def test_simulate_non_termination_is_runtime_error(capsys):
    code = main(["simulate", "--graph", "path:8", "--algorithm", "bfs", "--max-rounds", "2"])
    assert code == 3
    assert "engine error" in capsys.readouterr().err


@pytest.mark.parametrize("argv", [
    ["simulate", "--graph", "path:8"],
    ["simulate", "--algorithm", "bfs"],
    ["simulate", "--graph", "nope:3", "--algorithm", "bfs"],
    ["simulate", "--graph", "path:x", "--algorithm", "bfs"],
    ["simulate", "--graph", "path:4", "--algorithm", "quicksort"],
    ["simulate", "--graph", "path:4", "--algorithm", "bfs", "--mode", "turbo"],
    ["reduce", "--mode", "plain"],
    ["reduce", "--family", "nope"],
    ["separate", "--problem", "sorting"],
])
def test_config_errors_exit_2(argv, capsys):
    assert main(argv) == 2


def test_reduce_exhaustive_with_summary(tmp_path):
    out, summary = tmp_path / "red.csv", tmp_path / "s.json"
    assert main(["reduce", "--k", "2-3", "--exhaustive", "--out", str(out), "--summary", str(summary)]) == 0
    r = rows(out)
    assert len(r) == 16 + 64
    assert all(x["answer"] == x["f"] and x["ok"] == "1" for x in r)
    assert all(int(x["payload_bits"]) <= int(x["bound_2bST"]) for x in r)
    s = json.loads(summary.read_text())
    assert s["pairs"] == 80 and s["all_agree"] and s["all_bounds_ok"] and 0 < s["worst_ratio"] <= 1


def test_reduce_wrong_algorithm_fails(tmp_path):
    out = tmp_path / "red.csv"
    assert main(["reduce", "--k", "2", "--algorithm", "always-accept", "--out", str(out)]) == 1
    assert sum(x["ok"] == "0" for x in rows(out)) == 9


def test_reduce_zero_samples_is_header_only(tmp_path):
    out = tmp_path / "red.csv"
    assert main(["reduce", "--k", "3", "--samples", "0", "--out", str(out)]) == 0
    assert out.read_text() == "x0,x1,answer,f,T,payload_bits,bound_2bST,ok\n"


def test_reduce_sampled_is_reproducible(tmp_path):
    outs = []
    for i in range(2):
        out = tmp_path / f"r{i}.csv"
        assert main(["reduce", "--k", "4", "--samples", "10", "--seed", "3", "--out", str(out)]) == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]
    assert 1 <= len(rows(tmp_path / "r0.csv")) <= 10


def test_separate_size(tmp_path):
    out = tmp_path / "sep.csv"
    assert main(["separate", "--n", "8,16", "--out", str(out)]) == 0
    r = rows(out)
    assert [x["supported_T"] for x in r] == ["0", "0"]
    assert all(int(x["plain_T"]) >= int(x["D"]) for x in r)


def test_separate_coloring_and_identifiers(tmp_path):
    out = tmp_path / "c.csv"
    assert main(["separate", "--problem", "coloring", "--n", "10,20", "--out", str(out)]) == 0
    assert list(rows(out)[0]) == ["n", "max_degree", "supported_T", "supported_bits", "colors", "proper", "ok"]
    out2 = tmp_path / "i.csv"
    assert main(["separate", "--problem", "identifier-sets", "--n", "8", "--out", str(out2)]) == 0
    assert rows(out2)[0]["invariants_ok"] == "1"


def test_registry_to_stdout(capsys):
    assert main(["registry"]) == 0
    r = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
    assert len(r) == 7
    assert r[-1]["problem"] == "Identical subgraphs" and r[-1]["deterministic_only"] == "1"


def test_check_family(tmp_path):
    out = tmp_path / "cf.csv"
    assert main(["check-family", "--k", "1-3", "--out", str(out)]) == 0
    r = rows(out)
    assert [x["pairs_checked"] for x in r] == ["4", "16", "64"]
    assert all(x["passed"] == "1" for x in r)


def test_check_family_bad_k():
    assert main(["check-family", "--k", "0"]) == 2


def test_scenario_file(tmp_path):
    ini = tmp_path / "s.ini"
    ini.write_text(
        "[graph]\nsource = cycle:8\n\n[algorithm]\nname = four-cycle\n\n[run]\nmode = active  # comment\nseed = 4\n"
    )
    out = tmp_path / "o.csv"
    assert main(["simulate", "--config", str(ini), "--out", str(out)]) == 0
    r = rows(out)
    assert r[0]["mode"] == "active" and r[0]["n"] == "8"
    # flags override the file
    assert main(["simulate", "--config", str(ini), "--mode", "plain", "--out", str(out)]) == 0
    assert rows(out)[0]["mode"] == "plain"


def test_missing_scenario_file(tmp_path):
    assert main(["simulate", "--config", str(tmp_path / "none.ini")]) == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "supcongest", "registry"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[0] == "problem,bound,approximation,source,deterministic_only"
