import io

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from agony.evaluate import agony_value
from agony.graph import (
    DirectedGraph,
    EdgeListParseError,
    GraphError,
    dag_ranking,
    invert_ranking,
    is_dag,
    is_normalized,
    largest_scc_size,
    load_edge_list,
    merge_ranking,
    normalize_ranking,
    planted_ranking,
    read_edge_list,
    read_ranking_csv,
    save_edge_list,
    summarize,
    write_ranking_csv,
)

from conftest import cycle, graphs, random_dag


def _edges(g):
    return sorted(map(tuple, g.edges.tolist()))


class TestConstruction:
    def test_basic(self):
        g = DirectedGraph(3, [(0, 1), (1, 2)])
        assert g.node_count == 3 and g.m == 2
        assert g.out_degree().tolist() == [1, 1, 0]
        assert g.in_degree().tolist() == [0, 1, 1]

    @pytest.mark.parametrize(
        "edges",
        [[(0, 0)], [(0, 1), (0, 1)], [(0, 3)], [(-1, 0)]],
        ids=["self-loop", "duplicate", "out-of-range", "negative"],
    )
    def test_rejects(self, edges):
        with pytest.raises(GraphError):
            DirectedGraph(3, edges)

    def test_edges_read_only(self):
        g = DirectedGraph(2, [(0, 1)])
        with pytest.raises(ValueError):
            g.edges[0, 0] = 1

    def test_empty(self):
        g = DirectedGraph(0)
        assert g.m == 0 and is_dag(g)

    def test_subgraph_relabels_in_given_order(self):
        g = DirectedGraph(4, [(0, 1), (1, 2), (2, 3), (3, 0)])
        sub = g.subgraph([2, 1, 0])
        assert _edges(sub) == [(1, 0), (2, 1)]

    def test_equality_ignores_edge_order(self):
        assert DirectedGraph(3, [(0, 1), (1, 2)]) == DirectedGraph(3, [(1, 2), (0, 1)])
        assert DirectedGraph(3, [(0, 1)]) != DirectedGraph(3, [(1, 0)])


class TestEdgeList:
    def test_simple(self):
        g = load_edge_list(io.StringIO("0 1\n1 2\n"))
        assert g.node_count == 3 and _edges(g) == [(0, 1), (1, 2)]

    def test_duplicates_counted(self):
        res = read_edge_list(io.BytesIO(b"# comment\n0 1\n0 1\n"))
        assert res.graph.node_count == 2 and res.graph.m == 1
        assert res.duplicates == 1 and res.self_loops == 0

    def test_self_loops_dropped(self):
        res = read_edge_list(io.StringIO("0 0\n0 1\n"))
        assert res.self_loops == 1 and _edges(res.graph) == [(0, 1)]

    def test_parse_error_line_number(self):
        with pytest.raises(EdgeListParseError) as err:
            load_edge_list(io.StringIO("0 x\n"))
        assert err.value.lineno == 1

    def test_parse_error_later_line(self):
        with pytest.raises(EdgeListParseError) as err:
            load_edge_list(io.StringIO("# c\n0 1\n\n1\n"))
        assert err.value.lineno == 4

    def test_node_header(self):
        g = load_edge_list(io.StringIO("# nodes: 5\n0 1\n"))
        assert g.node_count == 5

    def test_header_too_small(self):
        with pytest.raises(GraphError):
            load_edge_list(io.StringIO("# nodes: 1\n0 1\n"))

    def test_file_round_trip(self, tmp_path, rng):
        g = DirectedGraph(6, [(0, 1), (5, 2), (3, 4)])
        save_edge_list(g, tmp_path / "g.txt")
        assert load_edge_list(tmp_path / "g.txt") == g

    @settings(max_examples=50, deadline=None)
    @given(graphs(max_nodes=8))
    def test_round_trip_property(self, g):
        buf = io.StringIO()
        save_edge_list(g, buf)
        buf.seek(0)
        assert load_edge_list(buf) == g


class TestRankingCsv:
    def test_round_trip(self, tmp_path):
        r = np.array([3, 1, 2, 2])
        write_ranking_csv(r, tmp_path / "r.csv")
        assert (tmp_path / "r.csv").read_text().splitlines()[0] == "node,rank"
        assert read_ranking_csv(tmp_path / "r.csv").tolist() == r.tolist()

    def test_missing_node(self):
        with pytest.raises(ValueError):
            read_ranking_csv(io.StringIO("node,rank\n0,1\n2,1\n"))


class TestDag:
    def test_path(self):
        g = DirectedGraph(3, [(0, 1), (1, 2)])
        assert is_dag(g)
        assert dag_ranking(g).tolist() == [1, 2, 3]

    def test_triangle(self):
        assert not is_dag(cycle(3))
        with pytest.raises(GraphError, match="not a DAG"):
            dag_ranking(cycle(3))

    def test_isolated(self):
        assert dag_ranking(DirectedGraph(2)).tolist() == [1, 1]

    def test_longest_path_layering(self):
        # 0->1->2 and 0->2: node 2 sits on the longest path, layer 3
        g = DirectedGraph(4, [(0, 1), (1, 2), (0, 2), (3, 2)])
        assert dag_ranking(g).tolist() == [1, 2, 3, 1]

    def test_zero_agony_every_d(self, rng):
        for _ in range(30):
            g = random_dag(rng, int(rng.integers(1, 15)), 0.3)
            r = dag_ranking(g)
            assert is_normalized(r)
            for d in (0, 0.5, 1, 2, 3):
                assert agony_value(g, r, d) == 0

    def test_scc(self):
        g = DirectedGraph(5, [(0, 1), (1, 2), (2, 0), (3, 4)])
        assert largest_scc_size(g) == 3
        assert largest_scc_size(DirectedGraph(3, [(0, 1)])) == 1

    def test_scc_against_closure(self, rng):
        for _ in range(20):
            n = int(rng.integers(1, 12))
            g = DirectedGraph(n, [(u, v) for u in range(n) for v in range(n) if u != v and rng.random() < 0.15])
            reach = np.eye(n, dtype=bool)
            reach[g.src, g.dst] = True
            for k in range(n):
                reach |= reach[:, [k]] & reach[[k], :]
            mutual = reach & reach.T
            assert largest_scc_size(g) == int(mutual.sum(axis=1).max())

    def test_summary_skips_isolated_ids(self):
        s = summarize(DirectedGraph(10, [(0, 1), (1, 0), (2, 3)]))
        assert s.active_nodes == 4 and s.m == 3
        assert s.density == pytest.approx(3 / 20)
        assert s.largest_scc == 2 and s.largest_scc_pct == pytest.approx(50.0)


class TestRankingAlgebra:
    @pytest.mark.parametrize(
        "r, expected", [((2, 5, 5), (1, 2, 2)), ((1, 2, 3), (1, 2, 3)), ((7,), (1,))]
    )
    def test_normalize(self, r, expected):
        assert normalize_ranking(r).tolist() == list(expected)

    @given(st.lists(st.integers(1, 50), max_size=30))
    def test_normalize_idempotent_and_order_preserving(self, r):
        r = np.array(r, dtype=np.int64)
        n = normalize_ranking(r)
        assert np.array_equal(normalize_ranking(n), n)
        assert np.array_equal(np.sign(r[:, None] - r[None, :]), np.sign(n[:, None] - n[None, :]))
        assert is_normalized(n)

    def test_invert(self):
        assert invert_ranking([1, 2, 3]).tolist() == [3, 2, 1]
        assert invert_ranking([1, 1]).tolist() == [1, 1]

    @given(st.lists(st.integers(1, 9), min_size=1, max_size=30))
    def test_invert_involution(self, r):
        r = normalize_ranking(r)
        assert np.array_equal(invert_ranking(invert_ranking(r)), r)

    def test_merge(self):
        assert merge_ranking([1, 2, 3, 4], 2).tolist() == [1, 1, 2, 2]
        assert merge_ranking([1, 2, 3, 4], 1).tolist() == [1, 2, 3, 4]
        with pytest.raises(ValueError):
            merge_ranking([1, 2, 3], 2)

    def test_planted(self):
        assert planted_ranking([2, 1, 3]).tolist() == [1, 1, 2, 3, 3, 3]

    def test_normalize_never_increases_agony(self, rng):
        for _ in range(50):
            n = int(rng.integers(1, 10))
            g = DirectedGraph(n, [(u, v) for u in range(n) for v in range(n) if u != v and rng.random() < 0.3])
            r = rng.integers(1, 20, n)
            for d in (0, 1, 2):
                assert agony_value(g, normalize_ranking(r), d) <= agony_value(g, r, d)
