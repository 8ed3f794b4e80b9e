import io

import numpy as np
import pytest
from hypothesis import given, settings

from corescore.annealing import AnnealSchedule
from corescore.ingest import (
    ParseError,
    Vote,
    VoteMatrix,
    parse_edge_list,
    parse_vote_matrix,
    read_landscape,
    serialize_edge_list,
    votes_to_similarity,
    write_landscape,
    write_scores,
    zachary_karate_club,
)
from corescore.scoring import ParameterGrid, core_score

from conftest import graphs, path

MAPPING = {"1": Vote.YEA, "6": Vote.NAY, "9": Vote.ABSENT}


class TestEdgeList:
    def test_weighted_path(self):
        g = parse_edge_list("a\tb\t2\nb\tc\t1")
        assert g.labels == ("a", "b", "c")
        assert g.edges() == [(0, 1, 2.0), (1, 2, 1.0)]

    def test_duplicate_sum(self):
        assert parse_edge_list("a\tb\nb\ta").edges() == [(0, 1, 2.0)]

    def test_negative_weight_line(self):
        with pytest.raises(ParseError) as err:
            parse_edge_list("a\tb\t-1")
        assert err.value.line == 1

    def test_malformed_line_number(self):
        with pytest.raises(ParseError) as err:
            parse_edge_list("# header\na\tb\nc d\n")
        assert err.value.line == 3

    def test_bad_weight(self):
        with pytest.raises(ParseError):
            parse_edge_list("a\tb\tx")

    def test_self_loop(self):
        with pytest.raises(ParseError):
            parse_edge_list("a\ta")

    def test_nodes_header(self):
        g = parse_edge_list("%nodes:\tz\ty\n# c\n\na\tb\n")
        assert g.labels == ("z", "y", "a", "b")

    def test_zachary(self):
        g = zachary_karate_club()
        assert g.n == 34 and g.edge_count == 78
        assert g.degrees()[g.index("34")] == 17 and g.degrees()[g.index("1")] == 16

    @given(graphs())
    @settings(max_examples=80, deadline=None)
    def test_round_trip(self, g):
        again = parse_edge_list(serialize_edge_list(g))
        assert again.labels == g.labels
        assert again.edges() == g.edges()


class TestVotes:
    def test_identical(self):
        v = VoteMatrix([{"name": "a"}, {"name": "b"}], [[1, -1, 1], [1, -1, 1]])
        assert votes_to_similarity(v).edges() == [(0, 1, 1.0)]

    def test_opposite_no_edge(self):
        v = VoteMatrix([{"name": "a"}, {"name": "b"}], [[1, -1], [-1, 1]])
        assert votes_to_similarity(v).edge_count == 0

    def test_three_of_four(self):
        # the absent bill is excluded from both counts
        v = VoteMatrix([{"name": "a"}, {"name": "b"}], [[1, 1, -1, 1, 0], [1, 1, -1, -1, 1]])
        assert votes_to_similarity(v).edges() == [(0, 1, 0.75)]

    def test_symmetric_unit_range(self, rng):
        v = VoteMatrix([{"name": str(i)} for i in range(12)], rng.integers(-1, 2, (12, 30)))
        a = votes_to_similarity(v).to_dense()
        assert np.array_equal(a, a.T) and a.min() >= 0 and a.max() <= 1

    def test_parse_csv(self):
        text = "name,party,state,b1,b2\nSmith,R,TX,1,6\nJones,D,NY,1,9\n"
        v = parse_vote_matrix(text, MAPPING)
        assert v.names == ["Smith", "Jones"]
        assert v.legislators[0]["party"] == "R"
        assert v.votes.tolist() == [[1, -1], [1, 0]]

    def test_unknown_code(self):
        with pytest.raises(ParseError) as err:
            parse_vote_matrix("name,b1\na,1\nb,7\n", MAPPING)
        assert err.value.line == 3

    def test_ragged_row(self):
        with pytest.raises(ParseError):
            parse_vote_matrix("name,b1,b2\na,1,6\nb,1\n", MAPPING)


class TestWriters:
    def test_score_order_and_format(self):
        buf = io.StringIO()
        write_scores(["x", "b", "a"], {"core_score": [0.5, 1.0, 0.5], "strength": [1, 2, 3]}, buf)
        assert buf.getvalue().splitlines() == [
            "label,core_score,strength",
            "b,1.0000,2.0000",
            "a,0.5000,3.0000",
            "x,0.5000,1.0000",
        ]

    def test_metadata_columns(self):
        buf = io.StringIO()
        write_scores(["a", "b"], {"core_score": [1, 0]}, buf, {"party": ["R", "D"]})
        assert buf.getvalue().splitlines()[:2] == ["label,core_score,party", "a,1.0000,R"]

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            write_scores(["a", "b"], {"core_score": [1]}, io.StringIO())

    def test_landscape(self, tmp_path):
        res = core_score(path(3), ParameterGrid.midpoints(2), AnnealSchedule(), jobs=1)
        r_path, top_path = write_landscape(res, tmp_path / "land")
        r_lines = r_path.read_text().splitlines()
        assert len(r_lines) == 3 and all(len(line.split(",")) == 3 for line in r_lines)
        grid, cells = read_landscape(r_path)
        assert grid == res.grid
        assert np.array_equal(np.array(cells, dtype=float), res.r_landscape)
        grid, tops = read_landscape(top_path)
        assert tops == [[res.labels[i] for i in row] for row in res.top_node]
        assert all(t in res.labels for row in tops for t in row)
