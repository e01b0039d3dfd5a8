"""Best-node identification when node values depend on a context vector.

Node k hosts a hidden unit direction u_k; at context x its value is u_k . x.
Pulling edge (i, j) under x returns a preference-sign observation with mean
(u_j - u_i) . x. Every edge keeps a ridge-regression estimate of u_j - u_i
that survives from one context to the next, so directions that were already
learned need no further pulls.
"""
import logging
import math
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from graphbandit.algorithms import network_elimination, nne_phase_sample_size
from graphbandit.config import (
    CONTEXT_PATTERNS,
    DIRECTION_MAX_ATTEMPTS,
    KNOWN_HORIZON,
    UNKNOWN_HORIZON,
)
from graphbandit.environment import EdgeStreams, NoiseModel, draw_observations, draw_sum
from graphbandit.exceptions import IllegalObservationError, ModelViolationError
from graphbandit.graph import Graph
from graphbandit.ledger import PullLedger
from graphbandit.models import PacParams, StageResult
from graphbandit.shortest_paths import ShortestPathSet, all_pairs_shortest_paths
from graphbandit.utils import as_unit_vector, edge_key, phase_count

logger = logging.getLogger(__name__)

# Tolerance on unit norms and on the bounded-difference constraint
_NORM_TOL = 1e-9
# Spread of generated directions around their common centre
_DIRECTION_SPREAD = 0.5


class ContextualEnvironment:
    """Graph whose node values are linear in a context vector.

    Attributes:
        graph: Graph whose edges may be pulled
        directions: Array of shape (n, d); row k - 1 is node k's direction
        noise_model: Observation distribution applied to the edge mean
        seed: Seed of the per-edge streams
        ledger: Pull accounting
    """

    def __init__(self, graph: Graph, directions, noise_model=NoiseModel.PREFERENCE_SIGN,
                 seed: Optional[int] = 0):
        u = np.asarray(directions, dtype=float)
        if u.ndim != 2 or u.shape[0] != graph.node_count:
            raise ModelViolationError(
                f"Expected {graph.node_count} directions, got array of shape {u.shape}"
            )
        if graph.nodes != tuple(range(1, graph.node_count + 1)):
            raise ModelViolationError("Contextual environments need graph nodes labelled 1..n")
        norms = np.linalg.norm(u, axis=1)
        bad = np.flatnonzero(np.abs(norms - 1.0) > _NORM_TOL)
        if bad.size:
            raise ModelViolationError(f"Direction of node {bad[0] + 1} has norm {norms[bad[0]]:.6g}")
        for i, j in graph.sorted_edges():
            gap = float(np.linalg.norm(u[j - 1] - u[i - 1]))
            if gap > 1.0 + _NORM_TOL:
                raise ModelViolationError(
                    f"Directions of adjacent nodes {i} and {j} differ by {gap:.6g} > 1"
                )
        self.graph = graph
        self.directions = u
        self.noise_model = NoiseModel.parse(noise_model)
        self.seed = seed
        self._streams = EdgeStreams(seed)
        self.ledger = PullLedger()

    @property
    def dimension(self) -> int:
        return self.directions.shape[1]

    def check_context(self, x) -> np.ndarray:
        vector = as_unit_vector(x, _NORM_TOL)
        if vector.shape[0] != self.dimension:
            raise ModelViolationError(
                f"Context has dimension {vector.shape[0]}, expected {self.dimension}"
            )
        return vector

    def value(self, node: int, x) -> float:
        """u_node . x, the value of node at context x."""
        return float(self.directions[node - 1] @ self.check_context(x))

    def best_node(self, x) -> int:
        """Node with the largest value at x, lowest label on ties. Scoring only."""
        values = self.directions @ self.check_context(x)
        return int(np.argmax(values)) + 1

    def is_epsilon_optimal(self, node: int, x, epsilon: float) -> bool:
        return self.value(node, x) >= self.value(self.best_node(x), x) - epsilon

    def edge_mean(self, i: int, j: int, x) -> float:
        """Expected observation (u_j - u_i) . x of edge (i, j)."""
        x = self.check_context(x)
        return float(np.clip((self.directions[j - 1] - self.directions[i - 1]) @ x, -1.0, 1.0))

    def _prepare(self, i: int, j: int, x) -> Tuple[float, float]:
        if not self.graph.has_edge(i, j):
            raise IllegalObservationError(f"({i}, {j}) is not an edge; only edges can be observed")
        low, high = edge_key(i, j)
        return self.edge_mean(low, high, x), (1.0 if i == low else -1.0)

    def pull_edge(self, i: int, j: int, x, count: Optional[int] = None):
        """Observe edge (i, j) under context x; one float or an array of count."""
        mean, sign = self._prepare(i, j, x)
        n = 1 if count is None else int(count)
        obs = sign * draw_observations(self._streams.stream(i, j), mean, n, self.noise_model)
        self.ledger.record(i, j, n)
        return float(obs[0]) if count is None else obs

    def pull_edge_sum(self, i: int, j: int, x, count: int) -> float:
        """Sum of count fresh observations of edge (i, j) under context x."""
        mean, sign = self._prepare(i, j, x)
        total = sign * draw_sum(self._streams.stream(i, j), mean, int(count), self.noise_model)
        self.ledger.record(i, j, int(count))
        return total


def contextual_pull(env: ContextualEnvironment, i: int, j: int, x) -> float:
    """One observation of edge (i, j) under context x."""
    return env.pull_edge(i, j, x)


def generate_directions(graph: Graph, dimension: int, seed: Optional[int] = None) -> np.ndarray:
    """Random unit directions with ||u_j - u_i|| <= 1 on every edge.

    Directions are scattered around a random unit centre and redrawn until
    every adjacent pair satisfies the constraint. In one dimension every node
    gets the centre itself.

    Raises:
        ModelViolationError: If no valid draw is found within the retry cap
    """
    if dimension < 1:
        raise ModelViolationError("dimension must be at least 1")
    rng = np.random.default_rng(seed)
    n = graph.node_count
    for attempt in range(DIRECTION_MAX_ATTEMPTS):
        centre = rng.standard_normal(dimension)
        centre /= np.linalg.norm(centre)
        if dimension == 1:
            return np.tile(centre, (n, 1))
        noise = rng.standard_normal((n, dimension)) * _DIRECTION_SPREAD / math.sqrt(dimension)
        u = centre + noise
        u /= np.linalg.norm(u, axis=1, keepdims=True)
        if all(np.linalg.norm(u[j - 1] - u[i - 1]) <= 1.0 for i, j in graph.sorted_edges()):
            logger.debug("Directions accepted after %d attempts", attempt + 1)
            return u
    raise ModelViolationError(f"No valid directions after {DIRECTION_MAX_ATTEMPTS} attempts")


def generate_contexts(dimension: int, stages: int, pattern: str = "identical",
                      seed: Optional[int] = None) -> List[np.ndarray]:
    """Context sequence of a given pattern.

    ``identical`` repeats one random unit vector, ``basis_cycle`` cycles
    through e_1..e_d and ``random`` draws a fresh unit vector every stage.
    """
    if pattern not in CONTEXT_PATTERNS:
        raise ModelViolationError(f"Unknown context pattern {pattern!r}")
    rng = np.random.default_rng(seed)

    def draw():
        v = rng.standard_normal(dimension)
        return v / np.linalg.norm(v)

    if pattern == "identical":
        x = draw()
        return [x.copy() for _ in range(stages)]
    if pattern == "basis_cycle":
        return [np.eye(dimension)[s % dimension] for s in range(stages)]
    return [draw() for _ in range(stages)]


class ContextualEdgeEstimator:
    """Ridge-regression estimate of u_j - u_i for one edge.

    A starts at the identity and gains x x^T per observation; b gains
    observation * x. The estimate is A^-1 b.

    Attributes:
        dimension: Context dimension d
        matrix: Design accumulator A
        response: Response accumulator b
        stage_pulls: Observations recorded per stage
    """

    def __init__(self, dimension: int, matrix=None, response=None,
                 stage_pulls: Optional[Dict[int, int]] = None):
        self.dimension = dimension
        self.matrix = np.eye(dimension) if matrix is None else np.array(matrix, dtype=float)
        self.response = np.zeros(dimension) if response is None else np.array(response, dtype=float)
        self.stage_pulls: Dict[int, int] = dict(stage_pulls or {})

    @property
    def pulls(self) -> int:
        return sum(self.stage_pulls.values())

    def update(self, x, observation: float, stage: int = 1):
        """Record one observation taken under x."""
        self.update_many(x, observation, 1, stage)

    def update_many(self, x, total: float, count: int, stage: int = 1):
        """Record count observations under the same x whose sum is total."""
        x = np.asarray(x, dtype=float)
        self.matrix += count * np.outer(x, x)
        self.response += total * x
        self.stage_pulls[stage] = self.stage_pulls.get(stage, 0) + count

    def estimate(self) -> np.ndarray:
        return np.linalg.solve(self.matrix, self.response)

    def predict(self, x) -> float:
        return float(self.estimate() @ np.asarray(x, dtype=float))

    def quadratic_form(self, x) -> float:
        """x^T A^-1 x."""
        x = np.asarray(x, dtype=float)
        return float(x @ np.linalg.solve(self.matrix, x))

    def log_determinant(self) -> float:
        return float(np.linalg.slogdet(self.matrix)[1])

    def width_squared(self, x, delta: float, stage_total: float) -> float:
        """x^T A^-1 x * (d ln(stage_total) + ln(1 / delta))."""
        if stage_total < 1:
            raise ModelViolationError("stage_total must be at least 1")
        factor = self.dimension * math.log(stage_total) + math.log(1.0 / delta)
        return self.quadratic_form(x) * factor

    def confidence_width(self, x, delta: float, stage_total: float) -> float:
        return math.sqrt(self.width_squared(x, delta, stage_total))

    def copy(self) -> "ContextualEdgeEstimator":
        return ContextualEdgeEstimator(self.dimension, self.matrix, self.response, self.stage_pulls)

    def __repr__(self):
        return f"ContextualEdgeEstimator(d={self.dimension}, pulls={self.pulls})"


def estimator_update(est: ContextualEdgeEstimator, x, observation: float,
                     stage: int = 1) -> ContextualEdgeEstimator:
    """Copy of est with one more observation under unit context x."""
    updated = est.copy()
    updated.update(as_unit_vector(x, _NORM_TOL), observation, stage)
    return updated


def confidence_width(est: ContextualEdgeEstimator, x, delta: float, stage_total: float) -> float:
    """High-probability bound on |estimate . x - truth . x| for one edge."""
    return est.confidence_width(x, delta, stage_total)


class EstimatorBank:
    """Ridge estimators of every edge, shared across stages.

    The estimator of edge (i, j), i < j, models u_j - u_i; reads and writes
    through the reversed orientation are negated.
    """

    def __init__(self, dimension: int):
        self.dimension = dimension
        self.estimators: Dict[Tuple[int, int], ContextualEdgeEstimator] = {}

    @property
    def total(self) -> int:
        """Observations recorded over all edges and stages."""
        return sum(est.pulls for est in self.estimators.values())

    def total_pulls(self) -> int:
        return self.total

    def estimator(self, i: int, j: int) -> ContextualEdgeEstimator:
        key = edge_key(i, j)
        if key not in self.estimators:
            self.estimators[key] = ContextualEdgeEstimator(self.dimension)
        return self.estimators[key]

    def record(self, i: int, j: int, x, total: float, count: int, stage: int):
        """Add count observations of (i, j) under x summing to total."""
        oriented = total if i < j else -total
        self.estimator(i, j).update_many(x, oriented, count, stage)

    def mean(self, i: int, j: int, x) -> float:
        """Estimated (u_j - u_i) . x."""
        value = self.estimator(i, j).predict(x)
        return value if i < j else -value

    def to_rows(self) -> List[Dict]:
        """Flat rows: edge, A row-major, b, per-stage counts."""
        rows = []
        for (i, j), est in sorted(self.estimators.items()):
            rows.append({
                "i": i,
                "j": j,
                "matrix": [float(v) for v in est.matrix.reshape(-1)],
                "response": [float(v) for v in est.response],
                "stage_pulls": dict(sorted(est.stage_pulls.items())),
            })
        return rows

    @classmethod
    def from_rows(cls, dimension: int, rows: Iterable[Dict]) -> "EstimatorBank":
        bank = cls(dimension)
        for row in rows:
            matrix = np.asarray(row["matrix"], dtype=float).reshape(dimension, dimension)
            bank.estimators[edge_key(int(row["i"]), int(row["j"]))] = ContextualEdgeEstimator(
                dimension, matrix, row["response"],
                {int(s): int(c) for s, c in row["stage_pulls"].items()},
            )
        return bank

    def copy(self) -> "EstimatorBank":
        bank = EstimatorBank(self.dimension)
        bank.estimators = {k: est.copy() for k, est in self.estimators.items()}
        return bank


def stage_delta(delta: float, stage: int, horizon: Optional[int] = None,
                mode: str = KNOWN_HORIZON) -> float:
    """Failure probability allotted to one stage.

    delta / S with a known horizon S; 6 delta / (pi^2 s^2) otherwise, which
    sums to delta over all stages.
    """
    if stage < 1:
        raise ModelViolationError("stage index starts at 1")
    if mode == KNOWN_HORIZON:
        if not horizon or horizon < stage:
            raise ModelViolationError("A known horizon must cover every stage")
        return delta / horizon
    if mode == UNKNOWN_HORIZON:
        return 6.0 * delta / (math.pi ** 2 * stage ** 2)
    raise ModelViolationError(f"Unknown horizon mode {mode!r}")


def run_contextual_stage(env: ContextualEnvironment, graph: Graph, x, params: PacParams,
                         bank: EstimatorBank, stage: int = 1, delta_stage: Optional[float] = None,
                         previous_pulls: int = 0,
                         shortest_paths: Optional[ShortestPathSet] = None) -> StageResult:
    """Network elimination for one context, reusing every earlier observation.

    In phase i an edge is pulled until its confidence width at x drops to
    eps / (2 D_i P), or until its effective number of observations along x,
    1 / (x^T A^-1 x) - 1, reaches the phase's Hoeffding sample size. Edges
    that already meet either condition are not pulled.

    Args:
        env: Contextual observation channel
        graph: Graph to search
        x: Unit context of this stage
        params: Accuracy; params.delta is used when delta_stage is None
        bank: Estimators carried over from earlier stages (updated in place)
        stage: 1-based stage index
        delta_stage: Failure probability of this stage
        previous_pulls: Pulls of all earlier stages
        shortest_paths: Precomputed all-pairs structure of graph
    """
    x = env.check_context(x)
    sp = shortest_paths if shortest_paths is not None else all_pairs_shortest_paths(graph)
    delta_s = params.delta if delta_stage is None else delta_stage
    stage_params = params.with_delta(delta_s)
    n_total = graph.node_count
    phases_planned = phase_count(n_total)
    eps_phase = params.effective_accuracy / phases_planned
    start = env.ledger.total

    def sample_phase(index, survivors, sampled, diameter):
        budget = nne_phase_sample_size(stage_params, n_total, len(survivors), diameter)
        threshold = (eps_phase / (2 * diameter)) ** 2
        edge_delta = delta_s / (sampled.edge_count * phases_planned)
        stage_total = max(1, bank.total + budget * sampled.edge_count)
        factor = bank.dimension * math.log(stage_total) + math.log(1.0 / edge_delta)
        pulls = 0
        per_edge = 0
        for i, j in sampled.sorted_edges():
            q = bank.estimator(i, j).quadratic_form(x)
            by_width = max(0, math.ceil(factor / threshold - 1.0 / q))
            by_budget = max(0, budget - math.floor(1.0 / q - 1.0 + 1e-6))
            k = min(by_width, by_budget)
            if k > 0:
                bank.record(i, j, x, env.pull_edge_sum(i, j, x, k), k, stage)
                pulls += k
                per_edge = max(per_edge, k)
        return (lambda a, b: bank.mean(a, b, x)), per_edge, pulls

    chosen, phases, _ = network_elimination(sp, sample_phase)
    stage_pulls = env.ledger.total - start
    logger.debug("Stage %d: chose node %d with %d pulls", stage, chosen, stage_pulls)
    return StageResult(stage, chosen, stage_pulls, previous_pulls + stage_pulls, phases)


def run_contextual_sequence(env: ContextualEnvironment, graph: Graph, contexts: Sequence,
                            params: PacParams, bank: Optional[EstimatorBank] = None,
                            horizon_mode: str = KNOWN_HORIZON, horizon: Optional[int] = None,
                            start_stage: int = 1, previous_pulls: int = 0) -> List[StageResult]:
    """Identify a good node for every context in turn.

    Stages share one estimator bank. With a known horizon each stage runs at
    delta / S, S defaulting to the last stage index of this call; otherwise
    at 6 delta / (pi^2 s^2).

    Args:
        bank: Estimators to continue from (created empty if None)
        start_stage: Index of the first context, for resumed sequences
        previous_pulls: Pulls already spent before start_stage
    """
    if len(contexts) == 0:
        return []
    if bank is None:
        bank = EstimatorBank(env.dimension)
    if horizon is None:
        horizon = start_stage + len(contexts) - 1
    sp = all_pairs_shortest_paths(graph)

    results = []
    cumulative = previous_pulls
    for offset, x in enumerate(contexts):
        stage = start_stage + offset
        delta_s = stage_delta(params.delta, stage, horizon, horizon_mode)
        result = run_contextual_stage(env, graph, x, params, bank, stage=stage,
                                      delta_stage=delta_s, previous_pulls=cumulative,
                                      shortest_paths=sp)
        cumulative = result.cumulative_pulls
        results.append(result)
    return results
