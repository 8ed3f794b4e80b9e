import csv
import json
import statistics

import numpy as np
import pytest

from corescore.cli import main
from corescore.ingest import read_edge_list, write_edge_list

from conftest import random_graph

FAST = ["--grid", "3x3", "--quiet"]


@pytest.fixture
def graph_file(tmp_path, rng):
    path = tmp_path / "g.tsv"
    write_edge_list(random_graph(rng, 20, 0.25, weighted=True), path)
    return path


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_score_outputs(graph_file, tmp_path):
    out = tmp_path / "out"
    assert main(["score", "--input", str(graph_file), "--output", str(out), *FAST]) == 0
    rows = read_csv(out / "scores.csv")
    assert list(rows[0]) == ["label", "core_score", "minres", "strength", "closeness", "betweenness",
                             "eigenvector"]
    assert rows[0]["core_score"] == "1.0000"
    assert all(len(v.split(".")[1]) == 4 for v in rows[1].values() if "." in v)
    meta = json.loads((out / "metadata.json").read_text())
    assert meta["seed"] == 0 and meta["config"]["grid"] == "3x3"
    assert "version" in meta and "schedule" in meta
    assert (out / "landscape_r.csv").exists() and (out / "landscape_top.csv").exists()


def test_single_cell(tmp_path):
    k2 = tmp_path / "k2.tsv"
    k2.write_text("a\tb\n")
    out = tmp_path / "o"
    args = ["score", "--input", str(k2), "--output", str(out), "--grid", "1x1", "--alpha", ".5",
            "--beta", ".5", "--quiet"]
    assert main(args) == 0
    assert (out / "landscape_r.csv").read_text().count("\n") == 2


def test_deterministic_across_runs_and_jobs(graph_file, tmp_path):
    outputs = []
    for name, jobs in [("a", "1"), ("b", "1"), ("c", "3")]:
        out = tmp_path / name
        assert main(["score", "--input", str(graph_file), "--output", str(out), "--jobs", jobs,
                     "--seed", "9", *FAST]) == 0
        outputs.append({f: (out / f).read_bytes()
                        for f in ("scores.csv", "landscape_r.csv", "landscape_top.csv", "metadata.json")})
    assert outputs[0] == outputs[1] == outputs[2]


@pytest.mark.parametrize("argv,code", [
    (["score", "--input", "missing.tsv"], 1),
    (["score"], 2),
    (["score", "--input", "X", "--grid", "ten"], 2),
    (["bench", "--k-max", "3", "--p", "0.25"], 2),
    (["frobnicate"], 2),
])
def test_exit_codes(argv, code, tmp_path, graph_file):
    argv = [str(graph_file) if a == "X" else a for a in argv]
    assert main([*argv, "--output", str(tmp_path / "o")] if argv[0] != "frobnicate" else argv) == code


def test_malformed_input(tmp_path):
    bad = tmp_path / "bad.tsv"
    bad.write_text("a\tb\n c\n")
    assert main(["score", "--input", str(bad), "--output", str(tmp_path / "o")]) == 1


def test_alpha_needs_single_grid(graph_file, tmp_path):
    assert main(["score", "--input", str(graph_file), "--output", str(tmp_path / "o"), "--alpha", ".5",
                 "--beta", ".5"]) == 2


def test_bench_smoke(tmp_path):
    out = tmp_path / "bench"
    argv = ["bench", "--output", str(out), "--n", "30", "--k-min", "1", "--k-max", "2", "--k-step", "0.5",
            "--replicates", "2", "--grid", "2x2", "--restarts", "1", "--quiet"]
    assert main(argv) == 0
    rows = read_csv(out / "benchmark.csv")
    assert {r["k"] for r in rows} == {"1.00", "1.50", "2.00"}
    assert len(rows) == 3 * 6
    first = (out / "benchmark.csv").read_bytes()
    assert main(argv) == 0
    assert (out / "benchmark.csv").read_bytes() == first


def test_centrality_and_baselines(graph_file, tmp_path):
    assert main(["centrality", "--input", str(graph_file), "--output", str(tmp_path / "c")]) == 0
    assert "betweenness" in (tmp_path / "c" / "centrality.csv").read_text().splitlines()[0]
    assert main(["baselines", "--input", str(graph_file), "--output", str(tmp_path / "b"), "--shuffles", "50",
                 "--ensemble-size", "5"]) == 0
    report = json.loads((tmp_path / "b" / "baselines.json").read_text())
    assert {"minres", "borgatti_everett", "holme", "da_silva"} <= set(report)


def test_synth(tmp_path):
    out = tmp_path / "s"
    assert main(["synth", "--output", str(out), "--n", "20", "--k", "2", "--seed", "3"]) == 0
    g = read_edge_list(out / "graph.tsv")
    assert g.n == 20
    assert (out / "truth.txt").read_text().split() == [str(i) for i in range(10)]
    assert main(["synth", "--output", str(out), "--k", "3"]) == 2


# --- roll-call votes ---------------------------------------------------------

MAPPING = {"1": "yea", "6": "nay", "9": "absent"}


def write_senate(tmp_path, n_major=22, n_minor=18, bills=120, seed=0):
    """Two parties with party-line votes, loyalty 0.9, occasional absences."""
    rng = np.random.default_rng(seed)
    line = rng.random(bills) < 0.5
    opposed = rng.random(bills) < 0.7
    rows = ["name,party,state," + ",".join(f"b{i}" for i in range(bills))]
    for idx in range(n_major + n_minor):
        party = "R" if idx < n_major else "D"
        want = line if party == "R" else np.where(opposed, ~line, line)
        vote = np.where(rng.random(bills) < 0.9, want, ~want)
        codes = np.where(vote, "1", "6")
        codes[rng.random(bills) < 0.05] = "9"
        rows.append(f"S{idx:02d},{party},ST{idx % 10}," + ",".join(codes))
    (tmp_path / "votes.csv").write_text("\n".join(rows) + "\n")
    (tmp_path / "map.json").write_text(json.dumps(MAPPING))
    return tmp_path / "votes.csv", tmp_path / "map.json"


def test_votes_two_identical(tmp_path):
    (tmp_path / "v.csv").write_text("name,b1,b2\nA,1,6\nB,1,6\n")
    (tmp_path / "m.json").write_text(json.dumps(MAPPING))
    out = tmp_path / "o"
    assert main(["votes", "--input", str(tmp_path / "v.csv"), "--mapping", str(tmp_path / "m.json"),
                 "--output", str(out)]) == 0
    assert read_edge_list(out / "similarity.tsv").edges() == [(0, 1, 1.0)]


def test_votes_missing_mapping(tmp_path):
    votes, _ = write_senate(tmp_path)
    assert main(["votes", "--input", str(votes), "--mapping", str(tmp_path / "nope.json"),
                 "--output", str(tmp_path / "o")]) == 2


def test_votes_malformed_matrix(tmp_path):
    (tmp_path / "v.csv").write_text("name,b1\nA,1\nB,7\n")
    (tmp_path / "m.json").write_text(json.dumps(MAPPING))
    assert main(["votes", "--input", str(tmp_path / "v.csv"), "--mapping", str(tmp_path / "m.json"),
                 "--output", str(tmp_path / "o")]) == 1


def test_votes_threshold_binarize(tmp_path):
    votes, mapping = write_senate(tmp_path)
    out = tmp_path / "o"
    assert main(["votes", "--input", str(votes), "--mapping", str(mapping), "--output", str(out),
                 "--threshold", "0.6", "--binarize"]) == 0
    g = read_edge_list(out / "similarity.tsv")
    assert {w for *_, w in g.edges()} == {1.0}


def test_votes_score_majority_higher(tmp_path):
    votes, mapping = write_senate(tmp_path)
    out = tmp_path / "o"
    assert main(["votes", "--input", str(votes), "--mapping", str(mapping), "--output", str(out),
                 "--score", "--grid", "5x5", "--quiet"]) == 0
    rows = read_csv(out / "scores.csv")
    assert {"party", "state"} <= set(rows[0])
    by_party = {p: [float(r["core_score"]) for r in rows if r["party"] == p] for p in ("R", "D")}
    assert statistics.median(by_party["R"]) > statistics.median(by_party["D"])
