"""Tests for prunable all-pairs shortest paths."""
import networkx as nx
import pytest

from graphbandit.exceptions import InvalidStateError
from graphbandit.generators import complete_graph, erdos_renyi_connected, generate_spider_web, line_graph, star_graph
from graphbandit.graph import Graph
from graphbandit.shortest_paths import (
    all_pairs_shortest_paths,
    diameter,
    eccentricities,
    graph_diameter,
    prune_node,
    radius,
    sampled_subgraph,
    survivors_on_path,
)


@pytest.fixture
def square_paths():
    """Shortest paths of the 4-cycle 1-2-3-4-1."""
    return all_pairs_shortest_paths(Graph.from_edges(4, [(1, 2), (2, 3), (3, 4), (4, 1)]))


def test_line_path_and_length():
    """Test the unique path of a line."""
    sp = all_pairs_shortest_paths(line_graph(3))
    assert sp.path(1, 3) == (1, 2, 3)
    assert sp.length(1, 3) == 2
    assert sp.path(2, 2) == (2,)


def test_complete_graph_lengths():
    """Test every pair of a complete graph is adjacent."""
    sp = all_pairs_shortest_paths(complete_graph(4))
    assert all(sp.length(i, j) == 1 for i in range(1, 5) for j in range(1, 5) if i != j)
    assert sp.diameter() == 1


def test_path_tie_break_lowest_next_hop(square_paths):
    """Test ties go to the lowest-numbered next hop from the lower endpoint."""
    assert square_paths.path(1, 3) == (1, 2, 3)
    assert square_paths.path(2, 4) == (2, 1, 4)


def test_reverse_path_is_reversed(square_paths):
    """Test the path from the higher endpoint is the reversed path."""
    assert square_paths.path(3, 1) == (3, 2, 1)
    assert square_paths.path(4, 2) == (4, 1, 2)


def test_spider_web_diameter():
    """Test the spider web has diameter 4."""
    sp = all_pairs_shortest_paths(generate_spider_web(3, 5))
    assert sp.diameter() == 4
    assert diameter(sp) == 4
    assert graph_diameter(generate_spider_web(3, 5)) == 4


def test_graph_diameter_small_cases():
    """Test diameters of a single node and a long line."""
    assert graph_diameter(Graph([1], [])) == 0
    assert graph_diameter(line_graph(15)) == 14


def test_paths_match_networkx():
    """Test stored paths are valid shortest paths on random graphs."""
    for seed in range(5):
        graph = erdos_renyi_connected(12, 0.3, seed=seed)
        nx_graph = nx.Graph(list(graph.edges))
        sp = all_pairs_shortest_paths(graph)
        lengths = dict(nx.all_pairs_shortest_path_length(nx_graph))
        for i in graph.nodes:
            for j in graph.nodes:
                path = sp.path(i, j)
                assert graph.validate_path(path) == path
                assert path[0] == i and path[-1] == j
                assert len(path) - 1 == lengths[i][j] == sp.length(i, j)


# Pruning Tests
def test_prune_leaf_of_line():
    """Test pruning an end of a line removes it everywhere."""
    sp = all_pairs_shortest_paths(line_graph(3)).prune_node(3)
    assert sp.path(1, 2) == (1, 2)
    assert 3 not in sp.tree_nodes(1)
    assert 3 not in sp.tree_nodes(2)


def test_pruned_relay_is_retained():
    """Test a pruned node that relays between survivors stays in the trees."""
    sp = all_pairs_shortest_paths(line_graph(3)).prune_node(2)
    assert sp.survivors == frozenset({1, 3})
    assert sp.path(1, 3) == (1, 2, 3)
    assert 2 in sp.tree_nodes(3)


def test_prune_star_leaf():
    """Test leaves of a star still route through the centre."""
    sp = all_pairs_shortest_paths(star_graph(4)).prune_node(4)
    assert sp.path(2, 3) == (2, 1, 3)
    for root in (1, 2, 3):
        assert 4 not in sp.tree_nodes(root)


def test_prune_cascades_through_dead_relays(square_paths):
    """Test a relay is trimmed once it no longer serves any survivor."""
    sp = square_paths.prune_node(2)
    assert sp.path(1, 3) == (1, 2, 3)
    sp = sp.prune_node(1)
    assert sp.tree_nodes(3) == {3, 4}
    assert sp.path(3, 4) == (3, 4)


def test_prune_returns_new_set(square_paths):
    """Test pruning leaves the original untouched."""
    pruned = prune_node(square_paths, 2)
    assert 2 in square_paths.survivors
    assert 2 not in pruned.survivors


def test_prune_errors(square_paths):
    """Test pruning a non-survivor or the last survivor fails."""
    sp = square_paths.prune_node(2)
    with pytest.raises(InvalidStateError, match="not a surviving node"):
        sp.prune_node(2)
    with pytest.raises(InvalidStateError, match="not a surviving node"):
        sp.path(1, 2)
    last = sp.restrict([4])
    with pytest.raises(InvalidStateError, match="last surviving node"):
        last.prune_node(4)


def test_stored_paths_never_change_under_pruning():
    """Test paths between remaining survivors are the original ones."""
    graph = erdos_renyi_connected(14, 0.3, seed=3)
    full = all_pairs_shortest_paths(graph)
    pruned = full.restrict([1, 4, 7, 10, 13])
    for i in pruned.survivors:
        for j in pruned.survivors:
            assert pruned.path(i, j) == full.path(i, j)


# Sampled Subgraph Tests
def test_sampled_subgraph_whole_tree():
    """Test all nodes of a tree sample the whole tree."""
    tree = star_graph(5)
    assert sampled_subgraph(all_pairs_shortest_paths(tree), tree.nodes) == tree


def test_sampled_subgraph_line_endpoints():
    """Test two endpoints of a line sample every edge."""
    sub = all_pairs_shortest_paths(line_graph(4)).sampled_subgraph([1, 4])
    assert sub.sorted_edges() == [(1, 2), (2, 3), (3, 4)]


def test_sampled_subgraph_includes_relays(square_paths):
    """Test relays appear in the sampled subgraph."""
    sp = square_paths.prune_node(2)
    sub = sp.sampled_subgraph()
    assert 2 in sub.nodes
    assert sub.edge_count == 4


def test_sampled_subgraph_spider_outer_ring():
    """Test outer-ring survivors sample only outer-ring edges."""
    sp = all_pairs_shortest_paths(generate_spider_web(3, 5))
    ring = [11, 12, 13, 14, 15]
    sub = sp.sampled_subgraph(ring)
    assert sub.nodes == tuple(ring)
    assert sub.sorted_edges() == [(11, 12), (11, 15), (12, 13), (13, 14), (14, 15)]


def test_sampled_subgraph_single_survivor():
    """Test one survivor samples no edges."""
    sub = all_pairs_shortest_paths(line_graph(3)).sampled_subgraph([2])
    assert sub.nodes == (2,)
    assert sub.edge_count == 0


# Helper Tests
def test_eccentricities_and_radius():
    """Test eccentricity of a line."""
    ecc = eccentricities(line_graph(5))
    assert ecc == {1: 4, 2: 3, 3: 2, 4: 3, 5: 4}
    assert radius(line_graph(5)) == 2


def test_survivors_on_path():
    """Test internal survivors are reported in order."""
    assert survivors_on_path((1, 2, 3, 4), {1, 3, 4}) == [3]
