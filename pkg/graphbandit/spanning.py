"""Spanning-tree extraction with small or large diameter."""
from typing import Dict, List, Optional, Sequence, Tuple

import networkx as nx

from graphbandit.graph import Edge, Graph
from graphbandit.shortest_paths import graph_diameter
from graphbandit.utils import edge_key


def tree_diameter(tree: Graph) -> int:
    """Diameter of a tree, 0 for a single node."""
    if tree.node_count == 1:
        return 0
    return nx.diameter(tree.nx_graph)


def min_diameter_spanning_tree(graph: Graph) -> Graph:
    """Spanning tree of smallest diameter.

    Every breadth-first tree grown from a single vertex, and every
    breadth-first tree grown from both endpoints of an edge (with that edge
    kept), is a candidate; the one with the smallest diameter wins, vertices
    before edges and lower labels first on ties. For unweighted graphs the
    optimum is always among these candidates.
    """
    if graph.is_tree():
        return graph

    best, best_diameter = None, None
    for v in graph.nodes:
        candidate = _bfs_tree(graph, [v])
        d = tree_diameter(candidate)
        if best_diameter is None or d < best_diameter:
            best, best_diameter = candidate, d
    for a, b in graph.sorted_edges():
        candidate = _bfs_tree(graph, [a, b], seed_edges=[(a, b)])
        d = tree_diameter(candidate)
        if d < best_diameter:
            best, best_diameter = candidate, d
    return best


def max_diameter_spanning_tree(graph: Graph) -> Graph:
    """Spanning tree with heuristically large diameter.

    Grows depth-first trees that always step to the first unvisited neighbor
    in adjacency order, so chains are extended as long as possible. Both ends
    of a double-sweep longest shortest path are tried first, then every other
    node; the deepest tree found is returned. Not optimal in general.
    """
    if graph.is_tree():
        return graph

    first = graph.bfs_distances(graph.nodes[0])
    a = _farthest(first)
    second = graph.bfs_distances(a)
    b = _farthest(second)
    starts = [a] + ([b] if b != a else [])
    starts += [v for v in graph.nodes if v not in starts]

    best, best_diameter = None, -1
    for start in starts:
        candidate = _dfs_tree(graph, start)
        d = tree_diameter(candidate)
        if d > best_diameter:
            best, best_diameter = candidate, d
        if best_diameter == graph.node_count - 1:
            break
    return best


def _farthest(dist: Dict[int, int]) -> int:
    """Lowest-labelled node at maximum distance."""
    top = max(dist.values())
    return min(v for v, d in dist.items() if d == top)


def _bfs_tree(graph: Graph, roots: Sequence[int],
              seed_edges: Optional[List[Edge]] = None) -> Graph:
    edges = set(edge_key(i, j) for i, j in (seed_edges or []))
    ordered = graph.ordered_digraph()
    if len(roots) == 1:
        source = roots[0]
    else:
        # virtual source whose successors are the roots, in order
        ordered = ordered.copy()
        source = min(graph.nodes) - 1
        ordered.add_edges_from((source, r) for r in roots)
    edges.update(edge_key(v, w) for v, w in nx.bfs_edges(ordered, source) if v != source)
    return graph.subgraph(edges)


def _dfs_tree(graph: Graph, start: int) -> Graph:
    return graph.subgraph(edge_key(v, w) for v, w in nx.dfs_edges(graph.ordered_digraph(), start))


def spanning_tree_diameters(graph: Graph) -> Tuple[int, int, int]:
    """(graph diameter, min-tree diameter, max-tree diameter)."""
    return (
        graph_diameter(graph),
        tree_diameter(min_diameter_spanning_tree(graph)),
        tree_diameter(max_diameter_spanning_tree(graph)),
    )
