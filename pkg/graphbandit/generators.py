"""Graph generators for experiments and tests.

Every generator returns a connected Graph on nodes 1..n.
"""
import logging
from typing import Optional

import networkx as nx
import numpy as np

from graphbandit.config import ERDOS_RENYI_MAX_ATTEMPTS, SPIDER_WEB_NODES_PER_RING, SPIDER_WEB_RINGS
from graphbandit.exceptions import ModelViolationError
from graphbandit.graph import Graph
from graphbandit.models import SpiderWebSpec

logger = logging.getLogger(__name__)


def generate_spider_web(rings: int = SPIDER_WEB_RINGS,
                        nodes_per_ring: int = SPIDER_WEB_NODES_PER_RING) -> Graph:
    """Concentric cycles joined by aligned radial spokes.

    Node (ring r, position p) is labelled (r - 1) * m + p. Position p on ring
    r is joined to positions p +/- 1 (mod m) on the same ring and to position
    p on rings r - 1 and r + 1. Neighbors are ordered: next on the ring,
    previous on the ring, outward spoke, inward spoke.

    Examples:
        >>> g = generate_spider_web(3, 5)
        >>> (g.node_count, g.edge_count)
        (15, 25)
    """
    spec = SpiderWebSpec(rings, nodes_per_ring)
    m = spec.nodes_per_ring
    edges = set()
    adjacency = {}
    for r in range(1, spec.rings + 1):
        for p in range(1, m + 1):
            v = spec.node(r, p)
            succ = spec.node(r, p % m + 1)
            pred = spec.node(r, (p - 2) % m + 1)
            order = [succ, pred]
            if r < spec.rings:
                order.append(spec.node(r + 1, p))
            if r > 1:
                order.append(spec.node(r - 1, p))
            adjacency[v] = order
            for w in order:
                edges.add((min(v, w), max(v, w)))
    return Graph(range(1, spec.node_count + 1), edges, adjacency=adjacency)


def line_graph(n: int) -> Graph:
    """Path 1 - 2 - ... - n."""
    if n < 1:
        raise ModelViolationError("A line needs at least 1 node")
    return Graph.from_edges(n, [(k, k + 1) for k in range(1, n)])


def star_graph(n: int) -> Graph:
    """Node 1 joined to nodes 2..n."""
    if n < 2:
        raise ModelViolationError("A star needs at least 2 nodes")
    return Graph.from_edges(n, [(1, k) for k in range(2, n + 1)])


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise ModelViolationError("A cycle needs at least 3 nodes")
    return Graph.from_edges(n, [(k, k % n + 1) for k in range(1, n + 1)])


def complete_graph(n: int) -> Graph:
    if n < 1:
        raise ModelViolationError("A complete graph needs at least 1 node")
    return Graph.from_edges(n, [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)])


def from_networkx(g: nx.Graph) -> Graph:
    """Relabel a networkx graph on 0..n-1 to a Graph on 1..n."""
    return Graph.from_edges(g.number_of_nodes(), [(u + 1, v + 1) for u, v in g.edges()])


def random_tree(n: int, seed: Optional[int] = None) -> Graph:
    """Uniformly random labelled tree, drawn from a random Pruefer sequence."""
    if n < 1:
        raise ModelViolationError("A tree needs at least 1 node")
    if n == 1:
        return Graph([1], [])
    if n == 2:
        return line_graph(2)
    rng = np.random.default_rng(seed)
    sequence = [int(v) for v in rng.integers(0, n, size=n - 2)]
    return from_networkx(nx.from_prufer_sequence(sequence))


def erdos_renyi_connected(n: int, p: float, seed: Optional[int] = None) -> Graph:
    """Connected G(n, p) graph by rejection sampling.

    Raises:
        ModelViolationError: On invalid parameters, or if no connected draw
            appears within the retry cap
    """
    if n < 1:
        raise ModelViolationError("n must be positive")
    if not 0.0 <= p <= 1.0:
        raise ModelViolationError(f"Edge probability must lie in [0, 1], got {p}")
    base = 0 if seed is None else int(seed)
    for attempt in range(ERDOS_RENYI_MAX_ATTEMPTS):
        g = nx.gnp_random_graph(n, p, seed=base + attempt)
        if nx.is_connected(g):
            logger.debug("G(%d, %.3f) connected after %d draws", n, p, attempt + 1)
            return from_networkx(g)
    raise ModelViolationError(
        f"No connected G({n}, {p}) graph after {ERDOS_RENYI_MAX_ATTEMPTS} attempts"
    )


GENERATORS = {
    "spider_web": generate_spider_web,
    "line": line_graph,
    "star": star_graph,
    "cycle": cycle_graph,
    "complete": complete_graph,
    "random_tree": random_tree,
    "erdos_renyi": erdos_renyi_connected,
}


def generate_graph(kind: str, **params) -> Graph:
    """Build a graph by generator name.

    Examples:
        >>> generate_graph("line", n=4).edge_count
        3
    """
    try:
        builder = GENERATORS[kind]
    except KeyError:
        valid = ", ".join(sorted(GENERATORS))
        raise ModelViolationError(f"Unknown graph kind {kind!r}; expected one of: {valid}")
    try:
        return builder(**params)
    except TypeError as e:
        raise ModelViolationError(f"Invalid parameters for {kind!r}: {e}")
