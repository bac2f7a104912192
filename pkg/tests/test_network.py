import numpy as np
import pytest

from conftest import make_post
from marsad.errors import AnalysisError
from marsad.network import InteractionGraph, Edge, build_graph, centrality, pagerank, top_influencers
from oracles import dense_pagerank_power, linear_solve_pagerank


def graph_from_weights(weights: dict[tuple[str, str], float]) -> InteractionGraph:
    nodes = sorted({v for pair in weights for v in pair})
    edges = [Edge(src, dst, "mention", int(w)) for (src, dst), w in sorted(weights.items())]
    return InteractionGraph(nodes=nodes, edges=edges)


class TestBuildGraph:
    def test_reply_edge(self):
        posts = [
            make_post("a1", "original post", author="alice"),
            make_post("b1", "reply here", author="bob", parent_id="a1"),
        ]
        g = build_graph(posts)
        assert g.edges == [Edge("bob", "alice", "reply", 1)]

    def test_parallel_replies_accumulate(self):
        posts = [
            make_post("a1", "original", author="alice"),
            make_post("b1", "first reply", author="bob", parent_id="a1"),
            make_post("b2", "second reply", author="bob", parent_id="a1"),
        ]
        g = build_graph(posts)
        assert g.edges == [Edge("bob", "alice", "reply", 2)]

    def test_self_reply_and_self_mention_excluded(self):
        posts = [
            make_post("a1", "root", author="alice"),
            make_post("a2", "self reply", author="alice", parent_id="a1", mentions=["alice"]),
        ]
        assert build_graph(posts).edges == []

    def test_mention_edges_and_hand_counted_fixture(self):
        posts = [make_post("r0", "root", author="hub")]
        for i in range(1, 6):  # 5 replies to hub
            posts.append(make_post(f"r{i}", f"reply {i}", author=f"user{i}", parent_id="r0"))
        posts.append(make_post("m1", "shout", author="user1", mentions=["user2", "hub"]))
        g = build_graph(posts)
        expected = [Edge(f"user{i}", "hub", "reply", 1) for i in range(1, 6)]
        expected += [Edge("user1", "hub", "mention", 1), Edge("user1", "user2", "mention", 1)]
        assert sorted(g.edges, key=lambda e: (e.src, e.dst, e.kind)) == sorted(
            expected, key=lambda e: (e.src, e.dst, e.kind)
        )

    def test_permutation_invariant(self):
        posts = [
            make_post("a1", "root", author="alice"),
            make_post("b1", "reply", author="bob", parent_id="a1"),
            make_post("c1", "another", author="carol", parent_id="a1", mentions=["bob"]),
        ]
        g1 = build_graph(posts)
        g2 = build_graph(list(reversed(posts)))
        assert g1.nodes == g2.nodes and g1.edges == g2.edges


class TestPageRank:
    def test_two_node_cycle_is_half_half(self):
        g = graph_from_weights({("a", "b"): 1, ("b", "a"): 1})
        pr = pagerank(g)
        assert abs(pr["a"] - 0.5) < 1e-12
        assert abs(pr["b"] - 0.5) < 1e-12

    def test_three_isolated_nodes_uniform(self):
        g = InteractionGraph(nodes=["a", "b", "c"], edges=[])
        pr = pagerank(g)
        for v in "abc":
            assert abs(pr[v] - 1 / 3) < 1e-12

    def test_star_hub_dominates_and_matches_oracles(self):
        weights = {("a", "hub"): 1.0, ("b", "hub"): 1.0, ("c", "hub"): 1.0}
        g = graph_from_weights(weights)
        pr = pagerank(g)
        oracle = dense_pagerank_power(g.nodes, weights)
        exact = linear_solve_pagerank(g.nodes, weights)
        for v in g.nodes:
            assert abs(pr[v] - oracle[v]) < 1e-6
            assert abs(pr[v] - exact[v]) < 1e-6
        assert all(pr["hub"] > pr[v] for v in "abc")

    def test_sums_to_one_and_positive(self):
        rng = np.random.default_rng(8)
        for trial in range(10):
            n = int(rng.integers(2, 20))
            nodes = [f"n{i}" for i in range(n)]
            weights = {}
            for _ in range(int(rng.integers(1, 3 * n))):
                i, j = rng.integers(0, n, size=2)
                if i != j:
                    weights[(nodes[int(i)], nodes[int(j)])] = float(rng.integers(1, 5))
            g = graph_from_weights(weights) if weights else InteractionGraph(nodes=nodes, edges=[])
            g = InteractionGraph(nodes=nodes, edges=g.edges)  # keep isolated nodes
            pr = pagerank(g)
            assert abs(sum(pr.values()) - 1.0) < 1e-6
            assert all(v > 0 for v in pr.values())

    def test_matches_oracle_on_random_graphs(self):
        rng = np.random.default_rng(21)
        for trial in range(20):
            n = int(rng.integers(2, 31))
            nodes = [f"n{i:02d}" for i in range(n)]
            weights = {}
            for _ in range(int(rng.integers(1, 4 * n))):
                i, j = rng.integers(0, n, size=2)
                if i != j:
                    weights[(nodes[int(i)], nodes[int(j)])] = float(rng.integers(1, 6))
            g = InteractionGraph(
                nodes=nodes,
                edges=[Edge(s, d, "mention", int(w)) for (s, d), w in sorted(weights.items())],
            )
            pr = pagerank(g)
            oracle = dense_pagerank_power(nodes, weights)
            for v in nodes:
                assert abs(pr[v] - oracle[v]) < 1e-6

    def test_relabeling_preserves_score_multiset(self):
        weights = {("a", "b"): 2.0, ("b", "c"): 1.0, ("c", "a"): 3.0, ("a", "c"): 1.0}
        g1 = graph_from_weights(weights)
        relabel = {"a": "x", "b": "z", "c": "y"}
        g2 = graph_from_weights({(relabel[s], relabel[d]): w for (s, d), w in weights.items()})
        pr1 = sorted(pagerank(g1).values())
        pr2 = sorted(pagerank(g2).values())
        assert np.allclose(pr1, pr2, atol=1e-12)

    def test_empty_graph_raises(self):
        with pytest.raises(AnalysisError) as ei:
            pagerank(InteractionGraph(nodes=[], edges=[]))
        assert ei.value.code == "EMPTY_GRAPH"


class TestInfluencers:
    def test_star_hub_first(self):
        g = graph_from_weights({("a", "hub"): 1, ("b", "hub"): 1, ("c", "hub"): 1})
        assert top_influencers(g)[0] == "hub"

    def test_n_larger_than_nodes_returns_all(self):
        g = graph_from_weights({("a", "b"): 1})
        assert len(top_influencers(g, n=10)) == 2

    def test_two_community_hubs_in_top3(self):
        weights = {}
        for i in range(4):
            weights[(f"a{i}", "hub1")] = 1.0
            weights[(f"b{i}", "hub2")] = 1.0
        weights[("hub1", "hub2")] = 1.0
        g = graph_from_weights(weights)
        top3 = top_influencers(g, n=3)
        assert "hub1" in top3 and "hub2" in top3

    def test_centrality_degrees(self):
        g = graph_from_weights({("a", "b"): 2, ("c", "b"): 1})
        m = centrality(g)
        assert m["b"].in_degree == 3 and m["b"].out_degree == 0
        assert m["a"].out_degree == 2
