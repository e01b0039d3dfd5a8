"""PAC identification of the best node on line, tree and general graphs.

Sample sizes use the natural logarithm inside log(1/delta)-type terms and
ceil(log2 n) for the number of elimination phases. Every real-valued sample
size is rounded up.
"""
import logging
import math
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from graphbandit.config import LINE, NNE, TREE
from graphbandit.environment import BanditEnvironment
from graphbandit.exceptions import InvalidStateError, ModelViolationError
from graphbandit.graph import Graph, Path
from graphbandit.models import EdgeStats, EliminationState, IdentificationResult, PacParams
from graphbandit.shortest_paths import ShortestPathSet, all_pairs_shortest_paths, graph_diameter
from graphbandit.spanning import tree_diameter
from graphbandit.utils import ceil_count, phase_count

logger = logging.getLogger(__name__)

EdgeMean = Callable[[int, int], float]
# (phase index, survivors, sampled subgraph, phase diameter) -> (edge means, per-edge pulls, pulls)
PhaseSampler = Callable[[int, Tuple[int, ...], Graph, int], Tuple[EdgeMean, int, int]]
# (u, v) -> estimated r_v - r_u
PairDifference = Callable[[int, int], float]


def _accuracy(params: PacParams) -> float:
    accuracy = params.effective_accuracy
    if accuracy <= 0:
        raise ModelViolationError("max(epsilon, gap_hint) must be positive for a finite sample size")
    return accuracy


def line_sample_size(params: PacParams, n: int) -> int:
    """Pulls per edge for a line of n nodes: ceil(4n / eps^2 * ln(2 / delta)).

    Examples:
        >>> line_sample_size(PacParams(epsilon=2.0, delta=2 / math.e), 2)
        2
    """
    if n < 2:
        raise ModelViolationError("A line needs at least 2 nodes")
    eps = _accuracy(params)
    return ceil_count(4 * n / eps ** 2 * math.log(2 / params.delta))


def line_budgets_satisfy(params: PacParams, budgets: Sequence[int]) -> bool:
    """Check heterogeneous per-edge budgets T^1..T^(n-1) of a line.

    The PAC guarantee holds when (sum_i 4 / T^i)^-1 >= ln(2 / delta) / eps^2.
    A zero budget never satisfies it: every edge of a line is a bridge.
    """
    eps = _accuracy(params)
    if not budgets or any(t <= 0 for t in budgets):
        return False
    return 1.0 / sum(4.0 / t for t in budgets) >= math.log(2 / params.delta) / eps ** 2


def tree_sample_size(params: PacParams, diameter: int, leaf_count: int) -> int:
    """Pulls per edge for a tree: ceil(4D / eps^2 * ln(2|L| / delta))."""
    if diameter < 1 or leaf_count < 1:
        raise ModelViolationError("Tree sample size needs diameter >= 1 and at least one leaf")
    eps = _accuracy(params)
    return ceil_count(4 * diameter / eps ** 2 * math.log(2 * leaf_count / params.delta))


def nne_phase_sample_size(params: PacParams, n_total: int, n_i: int, diameter: int) -> int:
    """Pulls per sampled edge in one elimination phase.

    The tree bound with the phase's diameter and survivor count, at accuracy
    eps / P and confidence delta / P where P = ceil(log2 n_total).
    """
    if n_i < 2 or diameter < 1:
        raise ModelViolationError("Phase sample size needs n_i >= 2 and diameter >= 1")
    phases = phase_count(n_total)
    eps_i = _accuracy(params) / phases
    delta_i = params.delta / phases
    return ceil_count(4 * diameter / eps_i ** 2 * math.log(2 * n_i / delta_i))


def nne_pull_bound(params: PacParams, graph: Graph, diameter: Optional[int] = None) -> int:
    """Upper bound on the total pulls of run_nne on graph.

    Phase k samples at most |E| edges, with at most ceil(n / 2^(k-1))
    survivors and diameter at most D, over at most ceil(log2 n) phases.
    """
    n = graph.node_count
    if n < 2:
        return 0
    d = graph_diameter(graph) if diameter is None else diameter
    total = 0
    survivors = n
    for _ in range(phase_count(n)):
        if survivors < 2:
            break
        total += graph.edge_count * nne_phase_sample_size(params, n, survivors, d)
        survivors = (survivors + 1) // 2
    return total


# --- line -------------------------------------------------------------------

def line_order(graph: Graph) -> List[int]:
    """Nodes of a path graph from its lower-labelled endpoint to the other.

    Raises:
        InvalidStateError: If graph is not a path
    """
    if not graph.is_path():
        raise InvalidStateError("Line algorithm needs a path graph")
    if graph.node_count == 1:
        return [graph.nodes[0]]
    order = [min(graph.leaves())]
    previous = None
    while len(order) < graph.node_count:
        current = order[-1]
        nxt = [w for w in graph.neighbors(current) if w != previous][0]
        previous = current
        order.append(nxt)
    return order


def _argmax(estimates: Dict[int, float]) -> int:
    """Node with the largest estimate, lowest label on ties."""
    return min(estimates, key=lambda v: (-estimates[v], v))


def run_line(env: BanditEnvironment, graph: Graph, params: PacParams) -> IdentificationResult:
    """Best node on a line graph.

    Pulls every edge T = line_sample_size times, forms prefix sums of the
    edge means from the first node and returns their argmax.
    """
    order = line_order(graph)
    start = env.ledger.total
    if len(order) == 1:
        return IdentificationResult(LINE, order[0], 0, estimates={order[0]: 0.0})

    t = line_sample_size(params, len(order))
    stats = EdgeStats()
    for a, b in zip(order, order[1:]):
        stats.record(a, b, env.pull_edge_sum(a, b, t), t)

    estimates = {order[0]: 0.0}
    running = 0.0
    for a, b in zip(order, order[1:]):
        running += stats.mean(a, b)
        estimates[b] = running

    chosen = _argmax(estimates)
    return IdentificationResult(LINE, chosen, env.ledger.total - start, estimates=estimates)


# --- tree -------------------------------------------------------------------

def tree_root(graph: Graph) -> int:
    """Root used by the tree algorithm: node 1, or the lowest label."""
    return 1 if graph.has_node(1) else graph.nodes[0]


def tree_leaves(tree: Graph, root: int) -> List[int]:
    """Leaves of the tree rooted at root (nodes without children)."""
    if tree.node_count == 1:
        return []
    return [v for v in tree.nodes if v != root and tree.degree(v) == 1]


def root_paths(tree: Graph, root: int) -> Dict[int, Path]:
    """Path from root to every node of a tree."""
    paths = {root: (root,)}
    frontier = [root]
    while frontier:
        nxt = []
        for v in frontier:
            for w in tree.neighbors(v):
                if w not in paths:
                    paths[w] = paths[v] + (w,)
                    nxt.append(w)
        frontier = nxt
    return paths


def tree_winner(tree: Graph, root: int, stats: EdgeStats) -> Tuple[int, Dict[int, float]]:
    """Pick the best node of a tree from shared edge statistics.

    For each leaf k the candidate m_k maximises the root-relative estimate on
    the root-to-k path; the winner is the candidate with the largest estimate,
    the root competing with estimate 0.
    """
    paths = root_paths(tree, root)
    estimates = {v: stats.composed_mean(p) for v, p in paths.items()}
    candidates = {root: 0.0}
    for leaf in tree_leaves(tree, root):
        on_path = {v: estimates[v] for v in paths[leaf]}
        m_k = _argmax(on_path)
        candidates[m_k] = estimates[m_k]
    return _argmax(candidates), estimates


def sample_tree(env: BanditEnvironment, tree: Graph, per_edge: int) -> EdgeStats:
    """Pull every tree edge per_edge times."""
    stats = EdgeStats()
    for i, j in tree.sorted_edges():
        stats.record(i, j, env.pull_edge_sum(i, j, per_edge), per_edge)
    return stats


def run_tree(env: BanditEnvironment, graph: Graph, params: PacParams,
             algorithm: str = TREE) -> IdentificationResult:
    """Best node on a tree rooted at node 1.

    Every edge is pulled exactly T = tree_sample_size times; the estimates are
    shared by all root-to-leaf paths.

    Raises:
        InvalidStateError: If graph has a cycle
    """
    if not graph.is_tree():
        raise InvalidStateError("Tree algorithm needs an acyclic graph")
    root = tree_root(graph)
    start = env.ledger.total
    if graph.node_count == 1:
        return IdentificationResult(algorithm, root, 0, estimates={root: 0.0})

    t = tree_sample_size(params, tree_diameter(graph), len(tree_leaves(graph, root)))
    stats = sample_tree(env, graph, t)
    chosen, estimates = tree_winner(graph, root, stats)
    return IdentificationResult(algorithm, chosen, env.ledger.total - start, estimates=estimates)


# --- network node elimination ----------------------------------------------

def survivor_estimates(shortest_paths: ShortestPathSet, survivors: Sequence[int],
                       edge_mean: EdgeMean) -> Dict[int, float]:
    """Composed estimate of each survivor relative to the lowest survivor."""
    reference = min(survivors)
    estimates = {}
    for v in survivors:
        path = shortest_paths.path(reference, v)
        estimates[v] = sum(edge_mean(a, b) for a, b in zip(path, path[1:]))
    return estimates


def path_differences(shortest_paths: ShortestPathSet, edge_mean: EdgeMean) -> PairDifference:
    """Estimated r_v - r_u composed along the stored path from u to v."""
    def difference(u: int, v: int) -> float:
        path = shortest_paths.path(u, v)
        return sum(edge_mean(a, b) for a, b in zip(path, path[1:]))
    return difference


def relative_differences(estimates: Dict[int, float]) -> PairDifference:
    """Pair differences read off estimates relative to a common reference."""
    return lambda u, v: estimates[v] - estimates[u]


def comparison_edges(shortest_paths: ShortestPathSet,
                     nodes: Sequence[int]) -> List[Tuple[int, int]]:
    """Pairs of nodes whose stored path has no other listed node inside it."""
    members = set(nodes)
    ordered = sorted(members)
    pairs = []
    for idx, u in enumerate(ordered):
        for v in ordered[idx + 1:]:
            path = shortest_paths.path(u, v)
            if not any(w in members for w in path[1:-1]):
                pairs.append((u, v))
    return pairs


def _beats(difference: PairDifference, u: int, v: int) -> bool:
    """True if u ranks above v: v estimated lower, lower label on ties."""
    d = difference(u, v)
    return d < 0 or (d == 0 and u < v)


def local_maxima(shortest_paths: ShortestPathSet, nodes: Sequence[int],
                 difference: PairDifference) -> List[int]:
    """Nodes that rank above every comparison-adjacent node."""
    losers = set()
    for u, v in comparison_edges(shortest_paths, nodes):
        losers.add(v if _beats(difference, u, v) else u)
    return sorted(v for v in nodes if v not in losers)


def matched_pair_round(shortest_paths: ShortestPathSet, nodes: Sequence[int],
                       difference: PairDifference) -> List[int]:
    """One round of greedy matched-pair elimination on the comparison graph.

    Comparison edges are scanned in order; when both endpoints are still
    unmatched, the lower-ranked one is eliminated. Removes at least one node
    whenever two or more are given.
    """
    matched = set()
    eliminated = set()
    for u, v in comparison_edges(shortest_paths, nodes):
        if u in matched or v in matched:
            continue
        matched.update((u, v))
        eliminated.add(v if _beats(difference, u, v) else u)
    return sorted(v for v in nodes if v not in eliminated)


def select_survivors(shortest_paths: ShortestPathSet, survivors: Sequence[int],
                     difference: PairDifference) -> Tuple[List[int], bool]:
    """Survivors of one phase and whether the safeguard was needed.

    Keeps the local maxima of the comparison graph. This goes further than
    plain local-maxima selection: whenever the maxima exceed the halving
    target ceil(n_i / 2) (a star's leaves, for instance), matched-pair rounds
    on the same estimates continue until the target is met, so the next
    survivor set is a forced halving rather than the full maxima set.
    """
    target = (len(survivors) + 1) // 2
    keep = local_maxima(shortest_paths, survivors, difference)
    safeguard = False
    while len(keep) > target:
        safeguard = True
        keep = matched_pair_round(shortest_paths, keep, difference)
    return keep, safeguard


def network_elimination(shortest_paths: ShortestPathSet, sample_phase: PhaseSampler
                        ) -> Tuple[int, List[EliminationState], Dict[int, float]]:
    """Phase loop shared by the bandit and contextual network algorithms.

    Each phase forms the sampled subgraph of the survivors, lets sample_phase
    pull its edges, keeps the local maxima and prunes the rest from the
    shortest-path set. Two comparison-adjacent survivors are compared through
    the edge means on the stored path between them.

    Returns:
        (last survivor, phase records, estimates of the final phase)
    """
    sp = shortest_paths
    survivors = tuple(sorted(sp.survivors))
    phases: List[EliminationState] = []
    estimates: Dict[int, float] = {survivors[0]: 0.0}
    index = 1
    while len(survivors) > 1:
        sampled = sp.sampled_subgraph(survivors)
        diameter = sp.diameter()
        edge_mean, per_edge, pulls = sample_phase(index, survivors, sampled, diameter)
        estimates = survivor_estimates(sp, survivors, edge_mean)
        keep, safeguard = select_survivors(sp, survivors, path_differences(sp, edge_mean))

        assert set(keep) < set(survivors), "phase made no progress"
        assert not phases or diameter <= phases[-1].diameter, "phase diameter grew"

        state = EliminationState(
            phase=index,
            survivors=survivors,
            sampled_nodes=sampled.nodes,
            sampled_edges=sampled.edge_count,
            diameter=diameter,
            per_edge_pulls=per_edge,
            pulls=pulls,
            next_survivors=tuple(keep),
            safeguard=safeguard,
        )
        phases.append(state)
        logger.debug(
            "Phase %d: %d survivors, %d sampled edges, diameter %d, %d pulls per edge -> %d kept",
            index, len(survivors), sampled.edge_count, diameter, per_edge, len(keep),
        )
        if safeguard:
            logger.info("Phase %d needed matched-pair elimination to halve %d survivors",
                        index, len(survivors))

        for v in survivors:
            if v not in keep:
                sp = sp.prune_node(v)
        survivors = tuple(keep)
        index += 1
    return survivors[0], phases, estimates


def run_nne(env: BanditEnvironment, graph: Graph, params: PacParams,
            shortest_paths: Optional[ShortestPathSet] = None) -> IdentificationResult:
    """Network node elimination on a connected graph.

    Each phase pulls every edge of the sampled subgraph
    nne_phase_sample_size times with fresh statistics.

    Args:
        env: Observation channel
        graph: Graph to search (the environment's graph)
        params: Accuracy and confidence
        shortest_paths: Precomputed all-pairs structure of graph, if any
    """
    sp = shortest_paths if shortest_paths is not None else all_pairs_shortest_paths(graph)
    n_total = graph.node_count
    start = env.ledger.total

    def sample_phase(index, survivors, sampled, diameter):
        t = nne_phase_sample_size(params, n_total, len(survivors), diameter)
        stats = EdgeStats()
        for i, j in sampled.sorted_edges():
            stats.record(i, j, env.pull_edge_sum(i, j, t), t)
        return stats.mean, t, t * sampled.edge_count

    chosen, phases, estimates = network_elimination(sp, sample_phase)
    return IdentificationResult(NNE, chosen, env.ledger.total - start,
                                phases=phases, estimates=estimates)
