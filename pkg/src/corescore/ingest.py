"""Reading and writing: edge lists, roll-call votes, score and landscape CSVs."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .graph import GraphError, WeightedGraph, build_graph, from_arrays
from .scoring import CoreScoreResult, ParameterGrid


class ParseError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


# --- edge lists -------------------------------------------------------------

def parse_edge_list(text: str) -> WeightedGraph:
    """Parse ``source<TAB>target[<TAB>weight]`` lines.

    ``#`` lines and blank lines are skipped. A ``%nodes:`` line lists nodes
    (tab separated) that come first in node order, which also allows isolated
    nodes. Other nodes follow in order of first appearance.
    """
    nodes: list[str] = []
    edges: list[tuple[str, str, float]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.rstrip("\r\n")
        if not line.strip() or line.startswith("#"):
            continue
        if line.startswith("%nodes:"):
            nodes.extend(tok for tok in line[len("%nodes:"):].strip().split("\t") if tok)
            continue
        parts = line.split("\t")
        if len(parts) not in (2, 3) or not parts[0] or not parts[1]:
            raise ParseError(f"expected 'source<TAB>target[<TAB>weight]', got {line!r}", lineno)
        weight = 1.0
        if len(parts) == 3:
            try:
                weight = float(parts[2])
            except ValueError:
                raise ParseError(f"bad weight {parts[2]!r}", lineno) from None
        if not weight >= 0:
            raise ParseError(f"negative weight {parts[2]!r}", lineno)
        if parts[0] == parts[1]:
            raise ParseError(f"self-loop on {parts[0]!r}", lineno)
        edges.append((parts[0], parts[1], weight))
    try:
        return build_graph(edges, nodes=nodes)
    except GraphError as exc:
        raise ParseError(str(exc)) from exc


def read_edge_list(path: str | Path) -> WeightedGraph:
    return parse_edge_list(Path(path).read_text(encoding="utf-8"))


def format_weight(w: float) -> str:
    return repr(float(w)) if w != int(w) else str(int(w))


def serialize_edge_list(g: WeightedGraph) -> str:
    buf = io.StringIO()
    buf.write("%nodes:\t" + "\t".join(g.labels) + "\n")
    for i, j, w in g.edges():
        buf.write(f"{g.labels[i]}\t{g.labels[j]}\t{format_weight(w)}\n")
    return buf.getvalue()


def write_edge_list(g: WeightedGraph, path: str | Path) -> None:
    Path(path).write_text(serialize_edge_list(g), encoding="utf-8")


def zachary_karate_club() -> WeightedGraph:
    """The unweighted karate club graph, nodes labeled "1".."34"."""
    text = resources.files("corescore").joinpath("data/zachary.tsv").read_text(encoding="utf-8")
    return parse_edge_list(text)


# --- roll-call votes --------------------------------------------------------

class Vote(str, Enum):
    YEA = "yea"
    NAY = "nay"
    ABSENT = "absent"


@dataclass
class VoteMatrix:
    legislators: list[dict[str, str]]
    votes: np.ndarray  # +1 yea, -1 nay, 0 absent; shape (legislators, bills)

    def __post_init__(self) -> None:
        self.votes = np.asarray(self.votes, dtype=np.int8)
        if self.votes.ndim != 2:
            raise ValueError("votes must be a 2-D matrix")
        if self.votes.shape[0] != len(self.legislators):
            raise ValueError("one vote row per legislator required")
        if self.votes.shape[0] < 2 or self.votes.shape[1] < 1:
            raise ValueError("need at least 2 legislators and 1 bill")
        if not np.isin(self.votes, (-1, 0, 1)).all():
            raise ValueError("votes must be encoded as +1, -1 or 0")

    @property
    def names(self) -> list[str]:
        return [rec["name"] for rec in self.legislators]


_VOTE_CODE = {Vote.YEA: 1, Vote.NAY: -1, Vote.ABSENT: 0}


def read_vote_mapping(path: str | Path) -> dict[str, Vote]:
    """Mapping from raw roll-call codes to yea/nay/absent.

    JSON object, e.g. ``{"1": "yea", "6": "nay", "9": "absent"}``. Codes
    missing from the mapping are an error when the matrix is read.
    """
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(data, dict):
        raise ValueError("vote mapping must be a JSON object")
    return {str(k): Vote(str(v).lower()) for k, v in data.items()}


META_COLUMNS = ("name", "party", "state")


def parse_vote_matrix(text: str, mapping: Mapping[str, Vote]) -> VoteMatrix:
    """CSV with header ``name,party,state,<bill>...``; one row per legislator.

    ``party`` and ``state`` columns are optional. Cells hold raw codes that
    ``mapping`` translates.
    """
    rows = list(csv.reader(io.StringIO(text)))
    rows = [r for r in rows if r and any(c.strip() for c in r)]
    if len(rows) < 3:
        raise ParseError("vote matrix needs a header and at least two legislators")
    header = [h.strip() for h in rows[0]]
    if not header or header[0] != "name":
        raise ParseError("first column must be 'name'", 1)
    meta = [h for h in header if h in META_COLUMNS]
    n_meta = len(meta)
    if header[:n_meta] != meta:
        raise ParseError("metadata columns must precede bill columns", 1)
    legislators, votes = [], []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise ParseError(f"expected {len(header)} fields, got {len(row)}", lineno)
        legislators.append(dict(zip(meta, (c.strip() for c in row[:n_meta]))))
        codes = []
        for cell in row[n_meta:]:
            code = cell.strip()
            if code not in mapping:
                raise ParseError(f"vote code {code!r} not in mapping", lineno)
            codes.append(_VOTE_CODE[mapping[code]])
        votes.append(codes)
    if len(header) == n_meta:
        raise ParseError("no bill columns", 1)
    names = [rec["name"] for rec in legislators]
    if len(set(names)) != len(names):
        raise ParseError("legislator names must be unique")
    return VoteMatrix(legislators, np.array(votes))


def read_vote_matrix(path: str | Path, mapping: Mapping[str, Vote]) -> VoteMatrix:
    return parse_vote_matrix(Path(path).read_text(encoding="utf-8"), mapping)


def votes_to_similarity(v: VoteMatrix) -> WeightedGraph:
    """Agreement fraction over bills where both legislators voted yea or nay.

    Pairs with no such bill, or that never agree, get no edge.
    """
    x = v.votes.astype(float)
    cast = (x != 0).astype(float)
    both = cast @ cast.T
    agree = ((x > 0).astype(float) @ (x > 0).T.astype(float)
             + (x < 0).astype(float) @ (x < 0).T.astype(float))
    with np.errstate(invalid="ignore", divide="ignore"):
        sim = np.where(both > 0, agree / both, 0.0)
    n = len(v.legislators)
    iu, ju = np.triu_indices(n, 1)
    keep = sim[iu, ju] > 0
    return from_arrays(v.names, zip(iu[keep], ju[keep], sim[iu, ju][keep]))


# --- result writers ---------------------------------------------------------

SCORE_COLUMNS = ("core_score", "minres", "strength", "closeness", "betweenness", "eigenvector")


def _fmt(x: float) -> str:
    if np.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.4f}"


def write_scores(
    labels: Sequence[str],
    columns: Mapping[str, Sequence[float]],
    destination,
    metadata: Mapping[str, Sequence[str]] | None = None,
) -> None:
    """One row per node, sorted by core_score descending (ties by label).

    Numeric columns print with four decimals; columns absent from
    ``columns``/``metadata`` are omitted from the header.
    """
    n = len(labels)
    numeric = {k: np.asarray(columns[k], dtype=float) for k in SCORE_COLUMNS if columns.get(k) is not None}
    numeric.update({k: np.asarray(v, dtype=float) for k, v in columns.items()
                    if k not in SCORE_COLUMNS and v is not None})
    meta = {k: list(v) for k, v in (metadata or {}).items() if v is not None}
    for name, col in [*numeric.items(), *meta.items()]:
        if len(col) != n:
            raise ValueError(f"column {name!r} has length {len(col)}, expected {n}")
    key = numeric.get("core_score")
    order = sorted(range(n), key=lambda i: ((-key[i]) if key is not None else 0.0, str(labels[i])))
    header = ["label", *numeric, *meta]

    def emit(fh) -> None:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for i in order:
            w.writerow([labels[i], *(_fmt(col[i]) for col in numeric.values()), *(m[i] for m in meta.values())])

    if isinstance(destination, (str, Path)):
        with open(destination, "w", encoding="utf-8", newline="") as fh:
            emit(fh)
    else:
        emit(destination)


def write_landscape(result: CoreScoreResult, destination: str | Path) -> tuple[Path, Path]:
    """Write ``<destination>_r.csv`` and ``<destination>_top.csv``.

    Rows are alphas, columns betas; the corner cell is ``alpha\\beta``.
    Top-node cells hold node labels.
    """
    base = Path(destination)
    r_path = base.with_name(base.name + "_r.csv")
    top_path = base.with_name(base.name + "_top.csv")
    grid = result.grid
    with open(r_path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["alpha\\beta", *(repr(b) for b in grid.betas)])
        for a, row in zip(grid.alphas, result.r_landscape):
            w.writerow([repr(a), *(repr(float(x)) for x in row)])
    with open(top_path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["alpha\\beta", *(repr(b) for b in grid.betas)])
        for a, row in zip(grid.alphas, result.top_node):
            w.writerow([repr(a), *(result.labels[i] for i in row)])
    return r_path, top_path


def read_landscape(path: str | Path) -> tuple[ParameterGrid, list[list[str]]]:
    """Inverse of one landscape CSV: the grid and the raw cell strings."""
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    betas = tuple(float(b) for b in rows[0][1:])
    alphas = tuple(float(r[0]) for r in rows[1:])
    return ParameterGrid(alphas, betas), [r[1:] for r in rows[1:]]


def write_benchmark(report, destination) -> None:
    def emit(fh) -> None:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["method", "k", "mean", "std", "replicates"])
        for row in report.rows():
            w.writerow([row["method"], f"{row['k']:.2f}", f"{row['mean']:.4f}", f"{row['std']:.4f}",
                        row["replicates"]])

    if isinstance(destination, (str, Path)):
        with open(destination, "w", encoding="utf-8", newline="") as fh:
            emit(fh)
    else:
        emit(destination)
