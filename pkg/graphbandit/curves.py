"""Error-versus-budget evaluation of the identification algorithms."""
import logging
import warnings
from typing import Callable, List, Optional, Sequence

from graphbandit.algorithms import network_elimination, sample_tree, tree_root, tree_winner
from graphbandit.config import CURVE_ALGORITHMS, NNE, TREE_MAX, TREE_MIN
from graphbandit.environment import BanditEnvironment
from graphbandit.exceptions import InsufficientBudgetError, ModelViolationError
from graphbandit.graph import Graph
from graphbandit.models import EdgeStats, ErrorCurvePoint, IdentificationResult
from graphbandit.shortest_paths import ShortestPathSet, all_pairs_shortest_paths
from graphbandit.spanning import max_diameter_spanning_tree, min_diameter_spanning_tree
from graphbandit.utils import phase_count

logger = logging.getLogger(__name__)

EnvironmentFactory = Callable[[int], BanditEnvironment]


def run_tree_budgeted(env: BanditEnvironment, tree: Graph, budget: int,
                      algorithm: str = "tree") -> IdentificationResult:
    """Tree algorithm with floor(budget / |E|) pulls on every edge.

    Raises:
        InsufficientBudgetError: If the budget cannot pull every edge once
    """
    root = tree_root(tree)
    if tree.node_count == 1:
        return IdentificationResult(algorithm, root, 0, estimates={root: 0.0})
    per_edge = budget // tree.edge_count
    if per_edge < 1:
        raise InsufficientBudgetError(
            f"Budget {budget} cannot pull each of {tree.edge_count} edges once"
        )
    start = env.ledger.total
    stats = sample_tree(env, tree, per_edge)
    chosen, estimates = tree_winner(tree, root, stats)
    return IdentificationResult(algorithm, chosen, env.ledger.total - start, estimates=estimates)


def nne_minimum_budget(shortest_paths: ShortestPathSet) -> int:
    """Smallest budget for which budgeted elimination pulls every edge once."""
    first = shortest_paths.sampled_subgraph()
    return phase_count(len(shortest_paths.survivors)) * first.edge_count


def run_nne_budgeted(env: BanditEnvironment, graph: Graph, budget: int,
                     shortest_paths: Optional[ShortestPathSet] = None) -> IdentificationResult:
    """Network elimination driven by a total pull budget instead of (eps, delta).

    Each phase receives the remaining budget divided by the phases still
    planned, ceil(log2 |V_i|), spread evenly over the sampled edges.

    Raises:
        InsufficientBudgetError: If some phase cannot pull every edge once
    """
    sp = shortest_paths if shortest_paths is not None else all_pairs_shortest_paths(graph)
    if graph.node_count == 1:
        return IdentificationResult(NNE, graph.nodes[0], 0)
    if budget < nne_minimum_budget(sp):
        raise InsufficientBudgetError(
            f"Budget {budget} is below the {nne_minimum_budget(sp)} pulls elimination needs"
        )
    start = env.ledger.total

    def sample_phase(index, survivors, sampled, diameter):
        remaining = budget - (env.ledger.total - start)
        share = remaining // phase_count(len(survivors))
        per_edge = share // sampled.edge_count
        if per_edge < 1:
            raise InsufficientBudgetError(f"Phase {index} cannot pull every sampled edge once")
        stats = EdgeStats()
        for i, j in sampled.sorted_edges():
            stats.record(i, j, env.pull_edge_sum(i, j, per_edge), per_edge)
        return stats.mean, per_edge, per_edge * sampled.edge_count

    chosen, phases, estimates = network_elimination(sp, sample_phase)
    return IdentificationResult(NNE, chosen, env.ledger.total - start,
                                phases=phases, estimates=estimates)


def budgeted_error_curve(env_factory: EnvironmentFactory, graph: Graph, algorithm: str,
                         budgets: Sequence[int], repetitions: int) -> List[ErrorCurvePoint]:
    """Empirical probability of missing the best node at each budget.

    Every (budget, repetition) pair runs on a fresh environment from
    env_factory(repetition); the same repetition index is reused across
    budgets, so budgets share random streams. A run errs when its winner is
    not the best node (epsilon = 0 scoring). Budgets too small to pull every
    required edge once are returned flagged.

    Args:
        env_factory: Builds the environment of a repetition
        graph: Graph the environments are defined on
        algorithm: One of "nne", "tree_min", "tree_max"
        budgets: Ascending total-pull budgets
        repetitions: Runs per budget

    Raises:
        ModelViolationError: On unknown algorithms, unsorted budgets or
            non-positive repetitions
    """
    if algorithm not in CURVE_ALGORITHMS:
        raise ModelViolationError(f"Unknown curve algorithm {algorithm!r}")
    if repetitions < 1:
        raise ModelViolationError("repetitions must be at least 1")
    if list(budgets) != sorted(budgets):
        raise ModelViolationError("budgets must be ascending")

    if algorithm == NNE:
        sp = all_pairs_shortest_paths(graph)

        def run(env, budget):
            return run_nne_budgeted(env, graph, budget, shortest_paths=sp)
    else:
        builder = min_diameter_spanning_tree if algorithm == TREE_MIN else max_diameter_spanning_tree
        tree = builder(graph)

        def run(env, budget):
            return run_tree_budgeted(env, tree, budget, algorithm=algorithm)

    points = []
    for budget in budgets:
        errors = 0
        flagged = False
        for repetition in range(repetitions):
            env = env_factory(repetition)
            try:
                result = run(env, int(budget))
            except InsufficientBudgetError as e:
                flagged = True
                message = f"{algorithm}: budget {budget} flagged ({e})"
                logger.warning(message)
                warnings.warn(message, UserWarning)
                break
            if result.chosen_node != env.rewards.best_node:
                errors += 1
        rate = None if flagged else errors / repetitions
        points.append(ErrorCurvePoint(algorithm, int(budget), rate, repetitions))
        logger.debug("%s budget %d: error rate %s", algorithm, budget, rate)
    return points
