"""Tests for graph generators."""
import networkx as nx
import pytest

from graphbandit.exceptions import ModelViolationError
from graphbandit.generators import (
    GENERATORS,
    complete_graph,
    cycle_graph,
    erdos_renyi_connected,
    from_networkx,
    generate_graph,
    generate_spider_web,
    line_graph,
    random_tree,
    star_graph,
)


def test_spider_web_shape():
    """Test the reference spider web has 15 nodes and 25 edges."""
    web = generate_spider_web(3, 5)
    assert (web.node_count, web.edge_count) == (15, 25)
    assert sorted(web.degree(v) for v in web.nodes) == [3] * 10 + [4] * 5


def test_spider_web_adjacency_order():
    """Test neighbors are ring successor, ring predecessor, outward, inward."""
    web = generate_spider_web(3, 5)
    assert web.neighbors(1) == (2, 5, 6)
    assert web.neighbors(6) == (7, 10, 11, 1)
    assert web.neighbors(15) == (11, 14, 10)


def test_spider_web_single_ring_is_cycle():
    """Test one ring is a plain cycle."""
    assert generate_spider_web(1, 4) == cycle_graph(4)


def test_spider_web_invalid():
    """Test rings need three nodes."""
    with pytest.raises(ModelViolationError, match="nodes_per_ring"):
        generate_spider_web(2, 2)


def test_basic_families():
    """Test line, star, cycle and complete graphs."""
    assert line_graph(5).is_path()
    assert star_graph(5).degree(1) == 4
    assert cycle_graph(5).edge_count == 5
    assert complete_graph(5).edge_count == 10


@pytest.mark.parametrize("builder,n", [(line_graph, 0), (star_graph, 1), (cycle_graph, 2)])
def test_basic_families_too_small(builder, n):
    """Test degenerate sizes are rejected."""
    with pytest.raises(ModelViolationError):
        builder(n)


def test_from_networkx_relabels():
    """Test 0-based networkx labels become 1-based."""
    graph = from_networkx(nx.path_graph(3))
    assert graph.nodes == (1, 2, 3)
    assert graph.sorted_edges() == [(1, 2), (2, 3)]


@pytest.mark.parametrize("n", [1, 2, 3, 15])
def test_random_tree(n):
    """Test random trees span 1..n."""
    tree = random_tree(n, seed=1)
    assert tree.node_count == n
    assert tree.is_tree()


def test_random_tree_seeded():
    """Test equal seeds give equal trees."""
    assert random_tree(20, seed=4) == random_tree(20, seed=4)


def test_erdos_renyi_connected():
    """Test rejection sampling returns connected graphs reproducibly."""
    graph = erdos_renyi_connected(12, 0.25, seed=3)
    assert graph.node_count == 12
    assert graph.is_connected()
    assert graph == erdos_renyi_connected(12, 0.25, seed=3)


def test_erdos_renyi_invalid():
    """Test bad probabilities and unreachable connectivity."""
    with pytest.raises(ModelViolationError, match="Edge probability"):
        erdos_renyi_connected(5, 1.5)
    with pytest.raises(ModelViolationError, match="No connected"):
        erdos_renyi_connected(5, 0.0)


def test_generate_graph_dispatch():
    """Test generation by name."""
    assert set(GENERATORS) == {"spider_web", "line", "star", "cycle", "complete",
                               "random_tree", "erdos_renyi"}
    assert generate_graph("spider_web", rings=2, nodes_per_ring=4).node_count == 8
    assert generate_graph("erdos_renyi", n=6, p=0.5, seed=1).node_count == 6


def test_generate_graph_errors():
    """Test unknown kinds and parameters."""
    with pytest.raises(ModelViolationError, match="Unknown graph kind"):
        generate_graph("torus")
    with pytest.raises(ModelViolationError, match="Invalid parameters"):
        generate_graph("line", size=4)
