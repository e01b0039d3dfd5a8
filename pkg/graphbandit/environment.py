"""Hidden node rewards and the edge observation channel."""
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Optional, Sequence, Tuple, Union

import numpy as np

from graphbandit.config import REWARD_TIE_MAX_REDRAWS
from graphbandit.exceptions import IllegalObservationError, ModelViolationError
from graphbandit.graph import Graph
from graphbandit.ledger import PullLedger
from graphbandit.utils import edge_key

logger = logging.getLogger(__name__)

# Largest batch of uniforms materialised at once when summing observations
_SUM_CHUNK = 1_000_000


class NoiseModel(str, Enum):
    """Distribution of a single edge observation with mean d = r_j - r_i.

    PREFERENCE_SIGN returns +1 with probability (1 + d) / 2 and -1 otherwise.
    UNIFORM_BOUNDED returns a uniform draw on [d - w, d + w], w = 1 - |d|.
    NOISELESS returns d exactly.
    """
    PREFERENCE_SIGN = "preference_sign"
    UNIFORM_BOUNDED = "uniform_bounded"
    NOISELESS = "noiseless"

    @classmethod
    def parse(cls, value: Union[str, "NoiseModel"]) -> "NoiseModel":
        try:
            return cls(value)
        except ValueError:
            valid = ", ".join(m.value for m in cls)
            raise ModelViolationError(f"Unknown noise model {value!r}; expected one of: {valid}")


@dataclass(frozen=True)
class NodeRewards:
    """Hidden rewards of nodes 1..n.

    Attributes:
        rewards: Reward of node k at position k - 1, each in [0, 1]
        best_node: Node with the largest reward
        gap: Best reward minus the second-best reward
    """
    rewards: Tuple[float, ...]
    best_node: int = field(init=False)
    gap: float = field(init=False)

    def __post_init__(self):
        """Validate rewards and derive the best node and reward gap."""
        values = tuple(float(r) for r in self.rewards)
        if not values:
            raise ModelViolationError("At least one node reward is required")
        for node, r in enumerate(values, start=1):
            if not 0.0 <= r <= 1.0:
                raise ModelViolationError(f"Reward of node {node} must lie in [0, 1], got {r}")
        top = max(values)
        leaders = [k for k, r in enumerate(values, start=1) if r == top]
        if len(leaders) > 1:
            raise ModelViolationError(f"Tied maximum reward {top} at nodes {leaders}")
        others = [r for r in values if r != top]
        object.__setattr__(self, "rewards", values)
        object.__setattr__(self, "best_node", leaders[0])
        object.__setattr__(self, "gap", top - max(others) if others else 0.0)

    @property
    def node_count(self) -> int:
        return len(self.rewards)

    def reward(self, node: int) -> float:
        return self.rewards[node - 1]

    def is_epsilon_optimal(self, node: int, epsilon: float) -> bool:
        """True if node's reward is within epsilon of the best reward."""
        return self.reward(node) >= self.reward(self.best_node) - epsilon

    def shifted(self, constant: float) -> "NodeRewards":
        """Rewards with a constant added to every node."""
        return NodeRewards(tuple(r + constant for r in self.rewards))

    def to_dict(self) -> Dict:
        return {
            "rewards": list(self.rewards),
            "best_node": self.best_node,
            "gap": self.gap,
        }


def generate_rewards(n: int, scheme: Union[str, Sequence[float]] = "uniform01",
                     seed: Optional[int] = None) -> NodeRewards:
    """Create node rewards.

    Args:
        n: Number of nodes
        scheme: ``"uniform01"`` for independent U[0, 1] rewards, or an
            explicit list of n rewards
        seed: Seed for the uniform draw

    Returns:
        NodeRewards with best node and gap filled in

    Raises:
        ModelViolationError: On invalid explicit lists, tied maxima or an
            unknown scheme

    Examples:
        >>> generate_rewards(3, [0.2, 0.9, 0.5]).best_node
        2
    """
    if isinstance(scheme, str):
        if scheme != "uniform01":
            raise ModelViolationError(f"Unknown reward scheme {scheme!r}")
        if n < 2:
            raise ModelViolationError("uniform01 rewards need at least 2 nodes")
        rng = np.random.default_rng(seed)
        for _ in range(REWARD_TIE_MAX_REDRAWS):
            values = rng.random(n)
            if np.count_nonzero(values == values.max()) == 1:
                return NodeRewards(tuple(float(v) for v in values))
            logger.debug("Redrawing rewards after a tied maximum")
        raise ModelViolationError("Could not draw untied rewards")

    values = [float(v) for v in scheme]
    if len(values) != n:
        raise ModelViolationError(f"Expected {n} rewards, got {len(values)}")
    return NodeRewards(tuple(values))


class EdgeStreams:
    """Independent random stream per canonical edge.

    The stream of edge (i, j), i < j, is seeded from the environment seed and
    the edge itself, so the draws an edge sees do not depend on how pulls on
    different edges are interleaved.
    """

    def __init__(self, seed: Optional[int]):
        self.seed = 0 if seed is None else int(seed)
        self._streams: Dict[Tuple[int, int], np.random.Generator] = {}

    def stream(self, i: int, j: int) -> np.random.Generator:
        key = edge_key(i, j)
        rng = self._streams.get(key)
        if rng is None:
            sequence = np.random.SeedSequence(entropy=self.seed, spawn_key=key)
            rng = np.random.default_rng(sequence)
            self._streams[key] = rng
        return rng


def draw_observations(rng: np.random.Generator, mean: float, count: int,
                      noise: NoiseModel) -> np.ndarray:
    """Draw count observations with the given mean in [-1, 1]."""
    if noise is NoiseModel.NOISELESS:
        return np.full(count, mean)
    u = rng.random(count)
    if noise is NoiseModel.PREFERENCE_SIGN:
        obs = np.where(u < (1.0 + mean) / 2.0, 1.0, -1.0)
    else:
        width = 1.0 - abs(mean)
        obs = mean + width * (2.0 * u - 1.0)
    assert np.all(np.abs(obs) <= 1.0 + 1e-12), "observation outside [-1, 1]"
    return obs


def draw_sum(rng: np.random.Generator, mean: float, count: int,
             noise: NoiseModel) -> float:
    """Sum of count observations, drawn exactly in distribution.

    A preference-sign sum is 2K - count with K binomial, so it costs one
    draw regardless of count.
    """
    if count <= 0:
        return 0.0
    if noise is NoiseModel.NOISELESS:
        return count * mean
    if noise is NoiseModel.PREFERENCE_SIGN:
        successes = int(rng.binomial(count, (1.0 + mean) / 2.0))
        return float(2 * successes - count)
    total = 0.0
    remaining = count
    while remaining > 0:
        chunk = min(remaining, _SUM_CHUNK)
        total += float(draw_observations(rng, mean, chunk, noise).sum())
        remaining -= chunk
    assert abs(total) <= count + 1e-9, "observation sum outside [-count, count]"
    return total


class BanditEnvironment:
    """Graphical bandit: node rewards are hidden, edges are observable.

    The only way to learn about rewards is to pull an edge (i, j), which
    returns a noisy observation with mean r_j - r_i. Pulling (j, i) returns
    the negation of the same mechanism. Every observation is recorded in
    the ledger.

    Attributes:
        graph: Graph whose edges may be pulled
        noise_model: Observation distribution
        seed: Seed of the per-edge streams
        ledger: Pull accounting
    """

    def __init__(self, graph: Graph, rewards: NodeRewards,
                 noise_model: Union[str, NoiseModel] = NoiseModel.PREFERENCE_SIGN,
                 seed: Optional[int] = 0):
        if rewards.node_count != graph.node_count or graph.nodes != tuple(range(1, graph.node_count + 1)):
            raise ModelViolationError(
                f"Rewards for {rewards.node_count} nodes do not match graph nodes 1..{graph.node_count}"
            )
        self.graph = graph
        self._rewards = rewards
        self.noise_model = NoiseModel.parse(noise_model)
        self.seed = seed
        self._streams = EdgeStreams(seed)
        self.ledger = PullLedger()

    @property
    def rewards(self) -> NodeRewards:
        """Ground truth, used for scoring runs; algorithms never read it."""
        return self._rewards

    def _check_edge(self, i: int, j: int):
        if not self.graph.has_edge(i, j):
            raise IllegalObservationError(f"({i}, {j}) is not an edge; only edges can be observed")

    def _canonical_mean(self, i: int, j: int) -> Tuple[float, float]:
        """Mean of the canonical orientation and the sign mapping it to (i, j)."""
        low, high = edge_key(i, j)
        mean = self._rewards.reward(high) - self._rewards.reward(low)
        return mean, (1.0 if i == low else -1.0)

    def pull_edge(self, i: int, j: int, count: Optional[int] = None):
        """Observe edge (i, j).

        Args:
            i: Source node
            j: Target node
            count: Number of independent observations; None for one

        Returns:
            A float when count is None, otherwise an array of observations

        Raises:
            IllegalObservationError: If (i, j) is not an edge
        """
        self._check_edge(i, j)
        n = 1 if count is None else int(count)
        mean, sign = self._canonical_mean(i, j)
        obs = sign * draw_observations(self._streams.stream(i, j), mean, n, self.noise_model)
        self.ledger.record(i, j, n)
        return float(obs[0]) if count is None else obs

    def pull_edge_sum(self, i: int, j: int, count: int) -> float:
        """Sum of count fresh observations of edge (i, j)."""
        self._check_edge(i, j)
        mean, sign = self._canonical_mean(i, j)
        total = sign * draw_sum(self._streams.stream(i, j), mean, int(count), self.noise_model)
        self.ledger.record(i, j, int(count))
        return total

    def pull_path(self, path: Sequence[int], count: Optional[int] = None):
        """Observe the composed edge along a path.

        One fresh pull per consecutive edge, summed. The trivial path returns
        exactly 0 and costs nothing.

        Raises:
            IllegalObservationError: If path is not a valid path of the graph
        """
        path = self.graph.validate_path(path)
        n = 1 if count is None else int(count)
        total = np.zeros(n)
        for a, b in zip(path, path[1:]):
            total += self.pull_edge(a, b, n)
        return float(total[0]) if count is None else total


def pull_edge(env: BanditEnvironment, i: int, j: int) -> float:
    """One observation of edge (i, j)."""
    return env.pull_edge(i, j)


def pull_path(env: BanditEnvironment, path: Sequence[int]) -> float:
    """One observation of the composed edge along path."""
    return env.pull_path(path)
