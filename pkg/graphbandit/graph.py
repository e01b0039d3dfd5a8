"""Undirected graph model with ordered adjacency lists."""
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import networkx as nx

from graphbandit.exceptions import IllegalObservationError, ModelViolationError
from graphbandit.utils import edge_key

Edge = Tuple[int, int]
Path = Tuple[int, ...]


class Graph:
    """Connected, undirected, simple graph over integer node labels.

    Nodes are 1-based in the reference experiments but any set of positive
    integers is accepted, so that subgraphs keep the labels of their parent.
    Each node keeps an ordered adjacency list; breadth-first and depth-first
    traversals visit neighbors in that order, which makes spanning-tree
    extraction deterministic.

    Attributes:
        nodes: Sorted tuple of node labels
        edges: Frozen set of canonical (lower, higher) edges
        nx_graph: The same graph as an undirected networkx graph
    """

    def __init__(self, nodes: Iterable[int], edges: Iterable[Edge],
                 adjacency: Optional[Dict[int, Sequence[int]]] = None):
        """Build and validate a graph.

        Args:
            nodes: Node labels
            edges: Unordered node pairs
            adjacency: Optional explicit neighbor order per node. Must list
                exactly the neighbors implied by ``edges``. Defaults to
                ascending order.

        Raises:
            ModelViolationError: On self-loops, duplicate edges, unknown
                nodes, inconsistent adjacency or a disconnected graph
        """
        self.nodes: Tuple[int, ...] = tuple(sorted(set(int(v) for v in nodes)))
        if not self.nodes:
            raise ModelViolationError("Graph must have at least one node")
        node_set = set(self.nodes)

        canonical = set()
        for i, j in edges:
            i, j = int(i), int(j)
            if i == j:
                raise ModelViolationError(f"Self-loop on node {i} is not allowed")
            if i not in node_set or j not in node_set:
                raise ModelViolationError(f"Edge ({i}, {j}) references an unknown node")
            key = edge_key(i, j)
            if key in canonical:
                raise ModelViolationError(f"Duplicate edge {key}")
            canonical.add(key)
        self.edges = frozenset(canonical)

        if adjacency is None:
            neighbors: Dict[int, List[int]] = {v: [] for v in self.nodes}
            for i, j in self.edges:
                neighbors[i].append(j)
                neighbors[j].append(i)
            self._adjacency = {v: tuple(sorted(ns)) for v, ns in neighbors.items()}
        else:
            self._adjacency = {v: tuple(adjacency.get(v, ())) for v in self.nodes}
            for v, ns in self._adjacency.items():
                implied = {j if i == v else i for i, j in self.edges if v in (i, j)}
                if set(ns) != implied or len(ns) != len(implied):
                    raise ModelViolationError(
                        f"Adjacency order for node {v} does not match its edges"
                    )

        self.nx_graph = nx.Graph()
        self.nx_graph.add_nodes_from(self.nodes)
        self.nx_graph.add_edges_from(sorted(self.edges))
        if not self.is_connected():
            raise ModelViolationError("Graph must be connected")
        self._ordered: Optional[nx.DiGraph] = None

    @classmethod
    def from_edges(cls, node_count: int, edges: Iterable[Edge]) -> "Graph":
        """Build a graph on nodes 1..node_count.

        Examples:
            >>> Graph.from_edges(3, [(1, 2), (2, 3)]).edge_count
            2
        """
        if node_count < 1:
            raise ModelViolationError("node_count must be positive")
        return cls(range(1, node_count + 1), edges)

    @property
    def node_count(self) -> int:
        return len(self.nodes)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def neighbors(self, v: int) -> Tuple[int, ...]:
        """Neighbors of v in adjacency order."""
        return self._adjacency[v]

    def degree(self, v: int) -> int:
        return len(self._adjacency[v])

    def has_node(self, v: int) -> bool:
        return v in self._adjacency

    def has_edge(self, i: int, j: int) -> bool:
        return edge_key(i, j) in self.edges

    def sorted_edges(self) -> List[Edge]:
        return sorted(self.edges)

    def bfs_distances(self, source: int) -> Dict[int, int]:
        """Hop distances from source to every node."""
        return dict(nx.single_source_shortest_path_length(self.nx_graph, source))

    def is_connected(self) -> bool:
        return nx.is_connected(self.nx_graph)

    def is_tree(self) -> bool:
        return nx.is_tree(self.nx_graph)

    def ordered_digraph(self) -> nx.DiGraph:
        """Both orientations of every edge, successors in adjacency order.

        networkx traversals of this digraph visit neighbors in this graph's
        adjacency order.
        """
        if self._ordered is None:
            ordered = nx.DiGraph()
            ordered.add_nodes_from(self.nodes)
            ordered.add_edges_from((v, w) for v in self.nodes for w in self._adjacency[v])
            self._ordered = ordered
        return self._ordered

    def is_path(self) -> bool:
        """True if the graph is a simple path (a single node counts)."""
        if not self.is_tree():
            return False
        return all(self.degree(v) <= 2 for v in self.nodes)

    def leaves(self) -> List[int]:
        return [v for v in self.nodes if self.degree(v) == 1]

    def validate_path(self, path: Sequence[int]) -> Path:
        """Check that consecutive nodes of path are adjacent.

        Raises:
            IllegalObservationError: If the path is empty or leaves the graph
        """
        path = tuple(int(v) for v in path)
        if not path:
            raise IllegalObservationError("Path must contain at least one node")
        if not self.has_node(path[0]):
            raise IllegalObservationError(f"Node {path[0]} is not in the graph")
        for a, b in zip(path, path[1:]):
            if not self.has_edge(a, b):
                raise IllegalObservationError(f"Path step ({a}, {b}) is not an edge")
        return path

    def subgraph(self, edges: Iterable[Edge], nodes: Iterable[int] = ()) -> "Graph":
        """Graph spanned by a subset of this graph's edges.

        Adjacency order is inherited from this graph.
        """
        edges = {edge_key(i, j) for i, j in edges}
        for key in edges:
            if key not in self.edges:
                raise ModelViolationError(f"{key} is not an edge of the parent graph")
        node_set = set(nodes)
        for i, j in edges:
            node_set.update((i, j))
        adjacency = {
            v: [w for w in self._adjacency[v] if edge_key(v, w) in edges]
            for v in node_set
        }
        return Graph(node_set, edges, adjacency=adjacency)

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return self.nodes == other.nodes and self.edges == other.edges

    def __hash__(self):
        return hash((self.nodes, self.edges))

    def __repr__(self):
        return f"Graph(nodes={self.node_count}, edges={self.edge_count})"


def parse_edge_list(text: str) -> Graph:
    """Parse the plain-text edge-list format.

    One ``i j`` pair per line, 1-based labels, ``#`` starts a comment. A
    ``# nodes: N`` comment declares the node count explicitly; otherwise the
    largest label seen is used.

    Raises:
        ModelViolationError: On malformed lines or an invalid graph
    """
    edges = []
    declared = None
    for line_no, raw in enumerate(text.splitlines(), start=1):
        content, _, comment = raw.partition("#")
        comment = comment.strip()
        if comment.lower().startswith("nodes:"):
            try:
                declared = int(comment.split(":", 1)[1])
            except ValueError:
                raise ModelViolationError(f"Line {line_no}: invalid node declaration")
        content = content.strip()
        if not content:
            continue
        parts = content.split()
        if len(parts) != 2:
            raise ModelViolationError(f"Line {line_no}: expected 'i j', got {content!r}")
        try:
            i, j = int(parts[0]), int(parts[1])
        except ValueError:
            raise ModelViolationError(f"Line {line_no}: node labels must be integers")
        if i < 1 or j < 1:
            raise ModelViolationError(f"Line {line_no}: node labels are 1-based")
        edges.append((i, j))

    largest = max((max(e) for e in edges), default=1)
    node_count = declared if declared is not None else largest
    if node_count < largest:
        raise ModelViolationError(
            f"Declared {node_count} nodes but edge list references node {largest}"
        )
    return Graph.from_edges(node_count, edges)


def format_edge_list(graph: Graph) -> str:
    """Render a graph in the edge-list format accepted by parse_edge_list."""
    lines = [f"# nodes: {graph.node_count}"]
    lines.extend(f"{i} {j}" for i, j in graph.sorted_edges())
    return "\n".join(lines) + "\n"


def read_edge_list(filepath: str) -> Graph:
    """Load a graph from an edge-list file."""
    with open(filepath, "r", encoding="utf-8") as f:
        return parse_edge_list(f.read())


def write_edge_list(graph: Graph, filepath: str) -> str:
    """Write a graph as an edge-list file.

    Returns:
        The file path written
    """
    with open(filepath, "w", encoding="utf-8") as f:
        f.write(format_edge_list(graph))
    return filepath
