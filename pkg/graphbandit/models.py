"""Core data models for identification runs."""
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from graphbandit.exceptions import ModelViolationError
from graphbandit.utils import edge_key


@dataclass(frozen=True)
class PacParams:
    """Accuracy and confidence of an (epsilon, delta)-PAC run.

    Attributes:
        epsilon: Accuracy; 0 is allowed when a budget drives sampling
        delta: Failure probability in (0, 1)
        gap_hint: Known lower bound on the reward gap (0 when unknown)
    """
    epsilon: float
    delta: float
    gap_hint: float = 0.0

    def __post_init__(self):
        """Validate parameters."""
        if self.epsilon < 0:
            raise ModelViolationError("epsilon cannot be negative")
        if self.gap_hint < 0:
            raise ModelViolationError("gap_hint cannot be negative")
        if not 0.0 < self.delta < 1.0:
            raise ModelViolationError(f"delta must lie in (0, 1), got {self.delta}")
        if self.effective_accuracy > 2.0:
            raise ModelViolationError("max(epsilon, gap_hint) cannot exceed 2")

    @property
    def effective_accuracy(self) -> float:
        """max(epsilon, gap_hint), the accuracy the sample sizes are built on."""
        return max(self.epsilon, self.gap_hint)

    def with_delta(self, delta: float) -> "PacParams":
        return PacParams(self.epsilon, delta, self.gap_hint)


class EdgeStats:
    """Per-edge pull counts and empirical means of differential observations.

    Sums are stored for the canonical orientation (i < j); reading the mean
    of (j, i) returns the negation.
    """

    def __init__(self):
        self._counts: Dict[Tuple[int, int], int] = {}
        self._sums: Dict[Tuple[int, int], float] = {}

    def record(self, i: int, j: int, total: float, count: int):
        """Add count observations of (i, j) whose sum is total."""
        key = edge_key(i, j)
        oriented = total if i < j else -total
        self._counts[key] = self._counts.get(key, 0) + count
        self._sums[key] = self._sums.get(key, 0.0) + oriented

    def count(self, i: int, j: int) -> int:
        return self._counts.get(edge_key(i, j), 0)

    def mean(self, i: int, j: int) -> Optional[float]:
        """Empirical mean of (i, j), or None when the edge was never pulled."""
        key = edge_key(i, j)
        n = self._counts.get(key, 0)
        if n == 0:
            return None
        value = self._sums[key] / n
        return value if i < j else -value

    def composed_mean(self, path) -> float:
        """Sum of edge means along a path (0 for the trivial path).

        Raises:
            ValueError: If an edge on the path has no observations
        """
        total = 0.0
        for a, b in zip(path, path[1:]):
            m = self.mean(a, b)
            if m is None:
                raise ValueError(f"Edge ({a}, {b}) has no observations")
            total += m
        return total

    def edges(self) -> List[Tuple[int, int]]:
        return sorted(self._counts)

    def total_pulls(self) -> int:
        return sum(self._counts.values())


@dataclass
class EliminationState:
    """Bookkeeping of one network-node-elimination phase.

    Attributes:
        phase: 1-based phase index
        survivors: Surviving nodes entering the phase
        sampled_nodes: Nodes of the sampled subgraph (survivors plus relays)
        sampled_edges: Edge count of the sampled subgraph
        diameter: Largest stored distance between survivors
        per_edge_pulls: Pulls of each sampled edge in this phase
        pulls: Total pulls spent in this phase
        next_survivors: Nodes kept for the next phase
        safeguard: True if matched-pair elimination was needed
    """
    phase: int
    survivors: Tuple[int, ...]
    sampled_nodes: Tuple[int, ...]
    sampled_edges: int
    diameter: int
    per_edge_pulls: int
    pulls: int
    next_survivors: Tuple[int, ...] = ()
    safeguard: bool = False

    def to_dict(self) -> Dict:
        return {
            "phase": self.phase,
            "survivors": list(self.survivors),
            "sampled_edges": self.sampled_edges,
            "diameter": self.diameter,
            "per_edge_pulls": self.per_edge_pulls,
            "pulls": self.pulls,
            "next_survivors": list(self.next_survivors),
            "safeguard": self.safeguard,
        }


@dataclass
class IdentificationResult:
    """Outcome of one identification run.

    Attributes:
        algorithm: Algorithm name
        chosen_node: Node returned by the algorithm
        total_pulls: Edge pulls spent (equals the ledger difference)
        phases: Per-phase breakdown (network elimination only)
        estimates: Final reward estimates relative to the reference node
    """
    algorithm: str
    chosen_node: int
    total_pulls: int
    phases: List[EliminationState] = field(default_factory=list)
    estimates: Dict[int, float] = field(default_factory=dict)

    @property
    def phase_count(self) -> int:
        return len(self.phases)

    @property
    def safeguard_activations(self) -> int:
        return sum(1 for p in self.phases if p.safeguard)


@dataclass
class ErrorCurvePoint:
    """Empirical error of an algorithm at one total-pull budget.

    error_rate is None when the point is flagged (budget too small).
    """
    algorithm: str
    budget: int
    error_rate: Optional[float]
    repetitions: int

    @property
    def flagged(self) -> bool:
        return self.error_rate is None


@dataclass
class StageResult:
    """Outcome of one stage of a contextual sequence.

    Attributes:
        stage: 1-based stage index
        chosen_node: Node returned for this stage's context
        stage_pulls: Pulls spent in this stage, T(x_s)
        cumulative_pulls: Pulls spent in stages 1..stage
        phases: Per-phase breakdown of the stage
    """
    stage: int
    chosen_node: int
    stage_pulls: int
    cumulative_pulls: int
    phases: List[EliminationState] = field(default_factory=list)


@dataclass(frozen=True)
class SpiderWebSpec:
    """Concentric rings joined by aligned radial spokes.

    Attributes:
        rings: Number of rings (at least 1)
        nodes_per_ring: Nodes on every ring (at least 3)
    """
    rings: int = 3
    nodes_per_ring: int = 5

    def __post_init__(self):
        """Validate ring counts."""
        if self.rings < 1:
            raise ModelViolationError("rings must be at least 1")
        if self.nodes_per_ring < 3:
            raise ModelViolationError("nodes_per_ring must be at least 3")

    @property
    def node_count(self) -> int:
        return self.rings * self.nodes_per_ring

    def node(self, ring: int, position: int) -> int:
        """1-based label of the node at (ring, position), both 1-based."""
        return (ring - 1) * self.nodes_per_ring + position
