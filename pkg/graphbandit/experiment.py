"""Config-driven Monte-Carlo experiments.

A config is a JSON object; see ``ExperimentConfig`` for its keys. Every
repetition r runs on a fresh environment seeded from (seed, r), so a run is
reproduced exactly from its manifest.
"""
import json
import logging
import os
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional, Union

import numpy as np

from graphbandit import __version__
from graphbandit.algorithms import run_line, run_nne, run_tree
from graphbandit.analytics import ResultAnalytics
from graphbandit.config import (
    CONFIG_FORMAT_VERSION,
    CONTEXT_PATTERNS,
    CURVE_ALGORITHMS,
    DEFAULT_DELTA,
    DEFAULT_EPSILON,
    DEFAULT_NOISE_MODEL,
    DEFAULT_REPETITIONS,
    DEFAULT_SEED,
    EXPERIMENT_MODES,
    HORIZON_MODES,
    KNOWN_HORIZON,
    LINE,
    NNE,
    PAC_ALGORITHMS,
    RESULT_COLUMNS,
    STAGE_COLUMNS,
    TREE,
    TREE_MAX,
    TREE_MIN,
)
from graphbandit.contextual import (
    ContextualEnvironment,
    generate_contexts,
    generate_directions,
    run_contextual_sequence,
)
from graphbandit.curves import budgeted_error_curve
from graphbandit.environment import BanditEnvironment, NodeRewards, NoiseModel, generate_rewards
from graphbandit.exceptions import ExperimentError, GraphBanditError, ModelViolationError
from graphbandit.exporter import CurveExporter, ResultExporter, write_manifest
from graphbandit.generators import generate_graph
from graphbandit.graph import Graph, read_edge_list
from graphbandit.models import ErrorCurvePoint, PacParams
from graphbandit.shortest_paths import all_pairs_shortest_paths
from graphbandit.spanning import max_diameter_spanning_tree, min_diameter_spanning_tree

logger = logging.getLogger(__name__)

# Generators that draw from a seed; the master seed is used when none is given
_SEEDED_GRAPHS = {"random_tree", "erdos_renyi"}

RESULTS_FILE = "results.csv"
CURVES_FILE = "curves.csv"
STAGES_FILE = "stages.csv"
MANIFEST_FILE = "manifest.json"


@dataclass
class ExperimentConfig:
    """Parameters of one experiment.

    Attributes:
        mode: "pac", "curve" or "contextual"
        graph: {"kind": ..., generator params} or {"edge_list": path}
        rewards: "uniform01" or an explicit list of node rewards
        noise_model: Observation noise
        algorithms: Algorithms to run
        epsilon: Accuracy
        delta: Confidence
        budgets: Ascending total-pull budgets (curve mode)
        repetitions: Independent runs per setting
        seed: Master seed
        output: Output directory
        dimension: Context dimension (contextual mode)
        stages: Contexts per sequence (contextual mode)
        context_pattern: "identical", "basis_cycle" or "random"
        horizon: "known_horizon" or "unknown_horizon"
    """
    mode: str = "pac"
    graph: Dict = field(default_factory=lambda: {"kind": "spider_web"})
    rewards: Union[str, List[float]] = "uniform01"
    noise_model: str = DEFAULT_NOISE_MODEL
    algorithms: List[str] = field(default_factory=lambda: [NNE])
    epsilon: float = DEFAULT_EPSILON
    delta: float = DEFAULT_DELTA
    budgets: List[int] = field(default_factory=list)
    repetitions: int = DEFAULT_REPETITIONS
    seed: int = DEFAULT_SEED
    output: str = "results"
    dimension: int = 3
    stages: int = 20
    context_pattern: str = "identical"
    horizon: str = KNOWN_HORIZON

    def __post_init__(self):
        """Validate config values."""
        if self.mode not in EXPERIMENT_MODES:
            raise ModelViolationError(f"Invalid mode: {self.mode}")
        if self.repetitions < 1:
            raise ModelViolationError("repetitions must be at least 1")
        if not self.algorithms:
            raise ModelViolationError("At least one algorithm is required")
        valid = CURVE_ALGORITHMS if self.mode == "curve" else PAC_ALGORITHMS
        for algorithm in self.algorithms:
            if algorithm not in valid:
                raise ModelViolationError(f"Invalid algorithm for {self.mode} mode: {algorithm}")
        NoiseModel.parse(self.noise_model)
        if "edge_list" in self.graph:
            if not os.path.isfile(self.graph["edge_list"]):
                raise ModelViolationError(f"Edge-list file not found: {self.graph['edge_list']}")
        elif "kind" not in self.graph:
            raise ModelViolationError("graph needs a 'kind' or an 'edge_list'")
        if self.mode == "curve":
            if not self.budgets:
                raise ModelViolationError("Curve experiments need at least one budget")
            if list(self.budgets) != sorted(self.budgets) or min(self.budgets) < 0:
                raise ModelViolationError("budgets must be non-negative and ascending")
        else:
            PacParams(self.epsilon, self.delta)
        if self.mode == "contextual":
            if self.dimension < 1 or self.stages < 0:
                raise ModelViolationError("dimension must be positive and stages non-negative")
            if self.context_pattern not in CONTEXT_PATTERNS:
                raise ModelViolationError(f"Invalid context pattern: {self.context_pattern}")
            if self.horizon not in HORIZON_MODES:
                raise ModelViolationError(f"Invalid horizon: {self.horizon}")

    def to_dict(self) -> Dict:
        return asdict(self)


def load_config(filepath: str) -> ExperimentConfig:
    """Read an experiment config from a JSON file.

    An optional ``version`` key must match the supported config format.

    Raises:
        ExperimentError: If the file cannot be read or parsed
        ModelViolationError: On unknown keys or invalid values
    """
    try:
        with open(filepath, "r", encoding="utf-8") as f:
            data = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise ExperimentError(f"Cannot load config {filepath}: {e}", path=filepath)
    if not isinstance(data, dict):
        raise ModelViolationError(f"Config {filepath} must hold a JSON object")
    version = data.pop("version", CONFIG_FORMAT_VERSION)
    if version != CONFIG_FORMAT_VERSION:
        raise ModelViolationError(f"Unsupported config version {version}")
    known = set(ExperimentConfig.__dataclass_fields__)
    unknown = sorted(set(data) - known)
    if unknown:
        raise ModelViolationError(f"Unknown config keys: {unknown}")
    graph = data.get("graph")
    if isinstance(graph, dict) and "edge_list" in graph and not os.path.isabs(graph["edge_list"]):
        base = os.path.dirname(os.path.abspath(filepath))
        data["graph"] = dict(graph, edge_list=os.path.join(base, graph["edge_list"]))
    return ExperimentConfig(**data)


def repetition_seed(master_seed: int, repetition: int) -> int:
    """Seed of one repetition, derived from the master seed."""
    sequence = np.random.SeedSequence([int(master_seed), int(repetition)])
    return int(sequence.generate_state(1)[0])


def build_graph(config: ExperimentConfig) -> Graph:
    spec = dict(config.graph)
    if "edge_list" in spec:
        return read_edge_list(spec["edge_list"])
    kind = spec.pop("kind")
    if kind in _SEEDED_GRAPHS:
        spec.setdefault("seed", config.seed)
    return generate_graph(kind, **spec)


def build_rewards(config: ExperimentConfig, graph: Graph, seed: int) -> NodeRewards:
    return generate_rewards(graph.node_count, config.rewards, seed=seed)


def build_environment(config: ExperimentConfig, graph: Graph, seed: int) -> BanditEnvironment:
    return BanditEnvironment(graph, build_rewards(config, graph, seed), config.noise_model, seed=seed)


@dataclass
class ExperimentOutcome:
    """Everything an experiment produced.

    Attributes:
        rows: Result rows (pac and contextual modes)
        points: Error-curve points (curve mode)
        manifest: Manifest written next to the CSV
        paths: Files written, keyed by role
    """
    rows: List[Dict] = field(default_factory=list)
    points: List[ErrorCurvePoint] = field(default_factory=list)
    manifest: Dict = field(default_factory=dict)
    paths: Dict[str, str] = field(default_factory=dict)


def _pac_runner(algorithm: str, graph: Graph, params: PacParams):
    if algorithm == LINE:
        return lambda env: run_line(env, graph, params)
    if algorithm == TREE:
        return lambda env: run_tree(env, graph, params)
    if algorithm in (TREE_MIN, TREE_MAX):
        builder = min_diameter_spanning_tree if algorithm == TREE_MIN else max_diameter_spanning_tree
        tree = builder(graph)
        return lambda env: run_tree(env, tree, params, algorithm=algorithm)
    sp = all_pairs_shortest_paths(graph)
    return lambda env: run_nne(env, graph, params, shortest_paths=sp)


def _run_pac(config: ExperimentConfig, graph: Graph, seeds: List[int]) -> List[Dict]:
    params = PacParams(config.epsilon, config.delta)
    rows = []
    for algorithm in config.algorithms:
        run = _pac_runner(algorithm, graph, params)
        logger.info("Running %s: %d repetitions on %r", algorithm, config.repetitions, graph)
        for repetition, seed in enumerate(seeds):
            env = build_environment(config, graph, seed)
            try:
                result = run(env)
            except GraphBanditError as e:
                raise ExperimentError(f"{algorithm} repetition {repetition} failed: {e}",
                                      repetition=repetition) from e
            rewards = env.rewards
            rows.append({
                "algorithm": algorithm,
                "seed": seed,
                "n": graph.node_count,
                "epsilon": config.epsilon,
                "delta": config.delta,
                "noise_model": config.noise_model,
                "chosen_node": result.chosen_node,
                "best_node": rewards.best_node,
                "total_pulls": result.total_pulls,
                "phases": result.phase_count,
                "repetition": repetition,
                "epsilon_optimal": rewards.is_epsilon_optimal(result.chosen_node, config.epsilon),
            })
    return sorted(rows, key=lambda r: (r["algorithm"], r["repetition"]))


def _run_curves(config: ExperimentConfig, graph: Graph, seeds: List[int]) -> List[ErrorCurvePoint]:
    def env_factory(repetition):
        return build_environment(config, graph, seeds[repetition])

    points = []
    for algorithm in config.algorithms:
        logger.info("Error curve for %s over %d budgets", algorithm, len(config.budgets))
        try:
            points.extend(budgeted_error_curve(env_factory, graph, algorithm,
                                               config.budgets, config.repetitions))
        except GraphBanditError as e:
            raise ExperimentError(f"Error curve for {algorithm} failed: {e}") from e
    return sorted(points, key=lambda p: (p.algorithm, p.budget))


def _run_contextual(config: ExperimentConfig, graph: Graph, seeds: List[int]) -> List[Dict]:
    params = PacParams(config.epsilon, config.delta)
    rows = []
    for repetition, seed in enumerate(seeds):
        try:
            directions = generate_directions(graph, config.dimension, seed=seed)
            env = ContextualEnvironment(graph, directions, config.noise_model, seed=seed)
            contexts = generate_contexts(config.dimension, config.stages,
                                         config.context_pattern, seed=seed)
            stages = run_contextual_sequence(env, graph, contexts, params,
                                             horizon_mode=config.horizon)
        except GraphBanditError as e:
            raise ExperimentError(f"Contextual repetition {repetition} failed: {e}",
                                  repetition=repetition) from e
        for x, result in zip(contexts, stages):
            rows.append({
                "algorithm": NNE,
                "seed": seed,
                "n": graph.node_count,
                "epsilon": config.epsilon,
                "delta": config.delta,
                "noise_model": config.noise_model,
                "chosen_node": result.chosen_node,
                "best_node": env.best_node(x),
                "total_pulls": result.stage_pulls,
                "phases": len(result.phases),
                "stage": result.stage,
                "cumulative_pulls": result.cumulative_pulls,
                "d": config.dimension,
                "repetition": repetition,
                "epsilon_optimal": env.is_epsilon_optimal(result.chosen_node, x, config.epsilon),
            })
        logger.info("Contextual repetition %d: %d pulls over %d stages",
                    repetition, stages[-1].cumulative_pulls if stages else 0, len(stages))
    return sorted(rows, key=lambda r: (r["repetition"], r["stage"]))


def run_experiment(config: ExperimentConfig, output_dir: Optional[str] = None) -> ExperimentOutcome:
    """Run an experiment and write its CSV and manifest.

    Args:
        config: Validated experiment config
        output_dir: Directory to write into; defaults to config.output

    Returns:
        The rows or curve points produced, the manifest and the written paths

    Raises:
        ExperimentError: If a repetition fails or outputs cannot be written
    """
    out = output_dir or config.output
    try:
        os.makedirs(out, exist_ok=True)
    except OSError as e:
        raise ExperimentError(f"Cannot create output directory {out}: {e}", path=out)

    graph = build_graph(config)
    seeds = [repetition_seed(config.seed, r) for r in range(config.repetitions)]
    outcome = ExperimentOutcome()

    if config.mode == "pac":
        outcome.rows = _run_pac(config, graph, seeds)
        path = ResultExporter(outcome.rows, RESULT_COLUMNS).to_csv(os.path.join(out, RESULTS_FILE))
    elif config.mode == "curve":
        outcome.points = _run_curves(config, graph, seeds)
        path = CurveExporter(outcome.points).to_csv(os.path.join(out, CURVES_FILE))
    else:
        outcome.rows = _run_contextual(config, graph, seeds)
        path = ResultExporter(outcome.rows, STAGE_COLUMNS).to_csv(os.path.join(out, STAGES_FILE))
    outcome.paths[config.mode] = path
    logger.info("Wrote %s", path)

    outcome.manifest = {
        "format_version": CONFIG_FORMAT_VERSION,
        "library_version": __version__,
        "config": config.to_dict(),
        "graph": {"nodes": graph.node_count, "edges": [list(e) for e in graph.sorted_edges()]},
        "repetition_seeds": seeds,
        "outputs": [os.path.basename(path)],
    }
    if outcome.rows:
        outcome.manifest["summary"] = ResultAnalytics(outcome.rows).summary()
    outcome.paths["manifest"] = write_manifest(outcome.manifest, os.path.join(out, MANIFEST_FILE))
    return outcome
