"""Summaries of repeated identification runs."""
from collections import defaultdict
from typing import Dict, List, Optional

from graphbandit.utils import binomial_standard_error


class ResultAnalytics:
    """Failure rates and pull statistics over result rows.

    A row fails when its ``epsilon_optimal`` entry is False; rows without
    that entry fail when the chosen node is not the best node.
    """

    def __init__(self, rows: List[Dict]):
        """Initialize analytics with result rows.

        Args:
            rows: Result dicts as produced by the experiment runner
        """
        self.rows = rows

    @staticmethod
    def _failed(row: Dict) -> bool:
        if "epsilon_optimal" in row:
            return not row["epsilon_optimal"]
        return int(row["chosen_node"]) != int(row["best_node"])

    def by_algorithm(self) -> Dict[str, List[Dict]]:
        grouped = defaultdict(list)
        for row in self.rows:
            grouped[row["algorithm"]].append(row)
        return dict(grouped)

    def _select(self, algorithm: Optional[str]) -> List[Dict]:
        if algorithm is None:
            return self.rows
        return [r for r in self.rows if r["algorithm"] == algorithm]

    def failure_rate(self, algorithm: Optional[str] = None) -> float:
        """Fraction of failed runs (0.0 when there are none)."""
        rows = self._select(algorithm)
        if not rows:
            return 0.0
        return sum(1 for r in rows if self._failed(r)) / len(rows)

    def failure_standard_error(self, algorithm: Optional[str] = None) -> float:
        rows = self._select(algorithm)
        return binomial_standard_error(self.failure_rate(algorithm), len(rows))

    def mean_pulls(self, algorithm: Optional[str] = None) -> float:
        rows = self._select(algorithm)
        if not rows:
            return 0.0
        return sum(int(r["total_pulls"]) for r in rows) / len(rows)

    def mean_phases(self, algorithm: Optional[str] = None) -> float:
        rows = self._select(algorithm)
        if not rows:
            return 0.0
        return sum(int(r["phases"]) for r in rows) / len(rows)

    def summary(self) -> Dict[str, Dict]:
        """Per-algorithm runs, failure rate, its standard error and mean pulls."""
        return {
            algorithm: {
                "runs": len(rows),
                "failure_rate": self.failure_rate(algorithm),
                "standard_error": self.failure_standard_error(algorithm),
                "mean_pulls": self.mean_pulls(algorithm),
            }
            for algorithm, rows in sorted(self.by_algorithm().items())
        }

    def get_insights(self) -> List[str]:
        """Generate textual insights about the runs.

        Returns:
            One line per algorithm, plus the cheapest algorithm when several ran
        """
        if not self.rows:
            return ["No result data available for analysis."]

        insights = []
        summary = self.summary()
        for algorithm, stats in summary.items():
            insights.append(
                f"{algorithm}: {stats['runs']} runs, failure rate {stats['failure_rate']:.3f} "
                f"(+/- {stats['standard_error']:.3f}), mean pulls {stats['mean_pulls']:,.0f}"
            )
        if len(summary) > 1:
            cheapest = min(summary.items(), key=lambda item: item[1]["mean_pulls"])
            insights.append(f"Fewest pulls: {cheapest[0]}")
        return insights
