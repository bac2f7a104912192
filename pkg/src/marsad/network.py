"""Interaction-graph construction and influence metrics.

Edges run from the interacting user to the author they engage with (reply
to a post, mention of a user); parallel interactions accumulate weight.
Influence is measured with PageRank (damping 0.85 by default), dangling
rank mass spread uniformly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import AnalysisError
from .ingest import Post

EDGE_KINDS = ("reply", "mention", "share")


@dataclass(frozen=True)
class Edge:
    src: str
    dst: str
    kind: str
    weight: int


@dataclass
class InteractionGraph:
    nodes: list[str]  # sorted author ids
    edges: list[Edge]  # sorted by (src, dst, kind)

    def combined_weights(self) -> dict[tuple[str, str], float]:
        """Total interaction weight per (src, dst) across edge kinds."""
        combined: dict[tuple[str, str], float] = {}
        for e in self.edges:
            key = (e.src, e.dst)
            combined[key] = combined.get(key, 0.0) + e.weight
        return combined


@dataclass
class NodeMetrics:
    in_degree: float  # total incoming interaction weight
    out_degree: float  # total outgoing interaction weight
    pagerank: float


def build_graph(posts: list[Post]) -> InteractionGraph:
    """Derive the interaction graph from reply links and mentions.

    Replies resolve through ``parent_id`` to the parent post's author;
    self-interactions never create edges.  Like/share counts carry no actor
    ids in archive data, so they contribute to engagement statistics only.
    """
    author_of = {p.id: p.author for p in posts}
    weights: dict[tuple[str, str, str], int] = {}
    nodes: set[str] = set()
    for p in posts:
        if p.author:
            nodes.add(p.author)
        if p.author and p.parent_id is not None:
            parent_author = author_of.get(p.parent_id)
            if parent_author and parent_author != p.author:
                key = (p.author, parent_author, "reply")
                weights[key] = weights.get(key, 0) + 1
        if p.author:
            for m in p.mentions:
                if m and m != p.author:
                    key = (p.author, m, "mention")
                    weights[key] = weights.get(key, 0) + 1
    for src, dst, _ in weights:
        nodes.add(src)
        nodes.add(dst)
    edges = [Edge(src, dst, kind, w) for (src, dst, kind), w in sorted(weights.items())]
    return InteractionGraph(nodes=sorted(nodes), edges=edges)


def pagerank(
    graph: InteractionGraph,
    damping: float = 0.85,
    tol: float = 1e-8,
    max_iter: int = 200,
) -> dict[str, float]:
    """Weight-proportional PageRank; scores sum to 1.

    Power iteration stops at L1 residual < ``tol`` or ``max_iter`` sweeps.
    """
    n = len(graph.nodes)
    if n == 0:
        raise AnalysisError("EMPTY_GRAPH", "graph has no nodes")
    index = {node: i for i, node in enumerate(graph.nodes)}
    combined = graph.combined_weights()
    out_weight = np.zeros(n)
    for (src, _), w in combined.items():
        out_weight[index[src]] += w

    by_src: list[list[tuple[int, float]]] = [[] for _ in range(n)]
    for (src, dst), w in sorted(combined.items()):
        s = index[src]
        by_src[s].append((index[dst], w / out_weight[s]))
    indptr = np.zeros(n + 1, dtype=np.int64)
    indices = np.zeros(sum(len(row) for row in by_src), dtype=np.int64)
    trans_w = np.zeros(indices.shape[0], dtype=np.float64)
    pos = 0
    for s, row in enumerate(by_src):
        for dst, tw in row:
            indices[pos] = dst
            trans_w[pos] = tw
            pos += 1
        indptr[s + 1] = pos

    ranks = np.full(n, 1.0 / n)
    for _ in range(max_iter):
        ranks, residual = kernels.pagerank_iter(indptr, indices, trans_w, ranks, damping)
        if residual < tol:
            break
    return {node: float(ranks[i]) for node, i in index.items()}


def centrality(graph: InteractionGraph, damping: float = 0.85) -> dict[str, NodeMetrics]:
    """Per-node in/out interaction weight plus PageRank."""
    pr = pagerank(graph, damping=damping)
    in_deg = {node: 0.0 for node in graph.nodes}
    out_deg = {node: 0.0 for node in graph.nodes}
    for e in graph.edges:
        out_deg[e.src] += e.weight
        in_deg[e.dst] += e.weight
    return {
        node: NodeMetrics(in_degree=in_deg[node], out_degree=out_deg[node], pagerank=pr[node])
        for node in graph.nodes
    }


def top_influencers(graph: InteractionGraph, n: int = 10, damping: float = 0.85) -> list[str]:
    """Nodes ranked by PageRank desc, then in-degree desc, then id."""
    metrics = centrality(graph, damping=damping)
    ranked = sorted(
        graph.nodes,
        key=lambda node: (-metrics[node].pagerank, -metrics[node].in_degree, node),
    )
    return ranked[:n]
