"""All-pairs shortest paths kept as prunable breadth-first spanning trees.

One breadth-first spanning tree is kept per surviving node. The tree rooted at
r stores, for every node it still contains, the next hop towards r. Distances
are computed once on the full graph; eliminating a node only deletes its own
tree and trims it from the others, so stored paths between the remaining
survivors never change.
"""
import logging
from typing import Dict, FrozenSet, Iterable, List, Set

import networkx as nx

from graphbandit.exceptions import InvalidStateError, ModelViolationError
from graphbandit.graph import Edge, Graph, Path
from graphbandit.utils import edge_key

logger = logging.getLogger(__name__)


class ShortestPathSet:
    """Shortest paths between surviving nodes of a graph.

    Instances are treated as immutable: ``prune_node`` returns a new set and
    leaves the receiver untouched, so one instance can be shared read-only by
    many simulation runs.

    Attributes:
        graph: The original graph the distances were computed on
        survivors: Nodes whose trees are still present
    """

    def __init__(self, graph: Graph, distances: Dict[int, Dict[int, int]],
                 trees: Dict[int, Dict[int, int]], survivors: FrozenSet[int]):
        self.graph = graph
        self._distances = distances
        self._trees = trees
        self.survivors = survivors

    def length(self, i: int, j: int) -> int:
        """Shortest-path distance between i and j in the original graph."""
        return self._distances[i][j]

    def path(self, i: int, j: int) -> Path:
        """Stored shortest path from i to j.

        The path is walked from the lower-indexed endpoint, always taking the
        lowest-numbered next hop; the opposite direction is its reverse.

        Raises:
            InvalidStateError: If either endpoint has been pruned
        """
        if i == j:
            self._require_survivor(i)
            return (i,)
        low, high = (i, j) if i < j else (j, i)
        self._require_survivor(low)
        self._require_survivor(high)
        tree = self._trees[high]
        walk = [low]
        while walk[-1] != high:
            walk.append(tree[walk[-1]])
        return tuple(walk) if i == low else tuple(reversed(walk))

    def diameter(self) -> int:
        """Largest stored distance between two survivors (0 for one node)."""
        nodes = sorted(self.survivors)
        best = 0
        for a_idx, a in enumerate(nodes):
            row = self._distances[a]
            for b in nodes[a_idx + 1:]:
                best = max(best, row[b])
        return best

    def tree_nodes(self, root: int) -> Set[int]:
        """Nodes still present in the tree rooted at root."""
        self._require_survivor(root)
        return set(self._trees[root]) | {root}

    def prune_node(self, v: int) -> "ShortestPathSet":
        """Eliminate a survivor.

        Deletes the tree rooted at v and trims v from every other tree while
        it is a leaf there. A trimmed node's parent is trimmed in turn when it
        is no longer a survivor and has become a leaf. Nodes that still relay
        a path between two survivors stay in place.

        Raises:
            InvalidStateError: If v is not a survivor or is the last one
        """
        self._require_survivor(v)
        if len(self.survivors) < 2:
            raise InvalidStateError("Cannot prune the last surviving node")

        survivors = self.survivors - {v}
        trees = {}
        for root in survivors:
            parents = dict(self._trees[root])
            _trim_leaves(parents, root, survivors, start=v)
            trees[root] = parents
        logger.debug("Pruned node %d, %d survivors left", v, len(survivors))
        return ShortestPathSet(self.graph, self._distances, trees, frozenset(survivors))

    def restrict(self, survivors: Iterable[int]) -> "ShortestPathSet":
        """Prune every survivor not listed, in ascending order."""
        keep = set(survivors)
        result = self
        for v in sorted(self.survivors - keep):
            result = result.prune_node(v)
        return result

    def sampled_subgraph(self, survivors: Iterable[int] = None) -> Graph:
        """Union of the stored paths between every pair of survivors.

        Args:
            survivors: Subset of the current survivors (defaults to all)

        Returns:
            Graph whose node set may include relay nodes besides survivors
        """
        nodes = sorted(self.survivors if survivors is None else set(survivors))
        for v in nodes:
            self._require_survivor(v)
        edges: Set[Edge] = set()
        for a_idx, a in enumerate(nodes):
            for b in nodes[a_idx + 1:]:
                p = self.path(a, b)
                edges.update(edge_key(x, y) for x, y in zip(p, p[1:]))
        if not edges:
            return Graph(nodes, [])
        return self.graph.subgraph(edges, nodes)

    def _require_survivor(self, v: int):
        if v not in self.survivors:
            raise InvalidStateError(f"Node {v} is not a surviving node")

    def __repr__(self):
        return f"ShortestPathSet(survivors={len(self.survivors)}, graph={self.graph!r})"


def _trim_leaves(parents: Dict[int, int], root: int, survivors: Set[int], start: int):
    """Remove start from a parent-pointer tree, cascading through dead leaves."""
    if start not in parents:
        return
    children: Dict[int, int] = {}
    for child, parent in parents.items():
        children[parent] = children.get(parent, 0) + 1

    node = start
    while node != root and node in parents and children.get(node, 0) == 0:
        parent = parents.pop(node)
        children[parent] -= 1
        if parent in survivors:
            break
        node = parent


def all_pairs_shortest_paths(graph: Graph) -> ShortestPathSet:
    """Breadth-first spanning trees rooted at every node of a connected graph.

    In the tree rooted at r, the parent of v is the lowest-numbered neighbor
    of v one hop closer to r.

    Raises:
        ModelViolationError: If the graph is disconnected
    """
    if not graph.is_connected():
        raise ModelViolationError("Shortest paths need a connected graph")
    distances = {v: dict(dist) for v, dist in nx.all_pairs_shortest_path_length(graph.nx_graph)}

    trees = {}
    for root in graph.nodes:
        to_root = distances[root]
        parents = {}
        for v in graph.nodes:
            if v == root:
                continue
            parents[v] = min(w for w in graph.neighbors(v) if to_root[w] == to_root[v] - 1)
        trees[root] = parents
    return ShortestPathSet(graph, distances, trees, frozenset(graph.nodes))


def diameter(shortest_paths: ShortestPathSet) -> int:
    """Diameter over the surviving pairs of a shortest-path set."""
    return shortest_paths.diameter()


def prune_node(shortest_paths: ShortestPathSet, v: int) -> ShortestPathSet:
    """Functional form of ShortestPathSet.prune_node."""
    return shortest_paths.prune_node(v)


def sampled_subgraph(shortest_paths: ShortestPathSet, survivors: Iterable[int]) -> Graph:
    """Functional form of ShortestPathSet.sampled_subgraph."""
    return shortest_paths.sampled_subgraph(survivors)


def graph_diameter(graph: Graph) -> int:
    """Largest hop distance between two nodes of a connected graph."""
    if not graph.is_connected():
        raise ModelViolationError("Diameter needs a connected graph")
    return nx.diameter(graph.nx_graph)


def eccentricities(graph: Graph) -> Dict[int, int]:
    """Eccentricity of every node."""
    return dict(nx.eccentricity(graph.nx_graph))


def radius(graph: Graph) -> int:
    return nx.radius(graph.nx_graph)


def survivors_on_path(path: Path, survivors: Set[int]) -> List[int]:
    """Internal nodes of path that are survivors."""
    return [v for v in path[1:-1] if v in survivors]
