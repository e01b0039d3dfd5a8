"""Pull accounting for bandit environments."""
from typing import Dict, Tuple

from graphbandit.utils import edge_key


class PullLedger:
    """Counts every edge observation handed out by an environment.

    Provides per-edge counters and a running total; both only ever grow.
    Algorithms report their sample complexity as a difference of two
    ledger totals.
    """

    def __init__(self):
        """Initialize an empty ledger."""
        self.edge_pulls: Dict[Tuple[int, int], int] = {}
        self.total = 0

    def record(self, i: int, j: int, count: int = 1):
        """Record count pulls of edge (i, j).

        Args:
            i: One endpoint
            j: Other endpoint (orientation is ignored)
            count: Number of observations handed out

        Raises:
            ValueError: If count is negative
        """
        if count < 0:
            raise ValueError("Pull count cannot be negative")
        key = edge_key(i, j)
        self.edge_pulls[key] = self.edge_pulls.get(key, 0) + count
        self.total += count

    def pulls(self, i: int, j: int) -> int:
        """Number of pulls recorded on edge (i, j)."""
        return self.edge_pulls.get(edge_key(i, j), 0)

    def snapshot(self) -> Dict[Tuple[int, int], int]:
        """Copy of the per-edge counters."""
        return dict(self.edge_pulls)

    def is_consistent(self) -> bool:
        """Check that the total equals the sum of the per-edge counters."""
        return self.total == sum(self.edge_pulls.values())
