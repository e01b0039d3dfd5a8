"""
GraphBandit - Best-Node Identification on Graphical Bandits

Finds the node with the largest hidden reward when only noisy reward
differences along graph edges can be observed. Includes line, tree and
network-elimination PAC algorithms and a contextual extension.
"""

__version__ = "0.1.0"

from graphbandit.graph import Graph, parse_edge_list, read_edge_list, write_edge_list
from graphbandit.shortest_paths import ShortestPathSet, all_pairs_shortest_paths, graph_diameter
from graphbandit.spanning import max_diameter_spanning_tree, min_diameter_spanning_tree, tree_diameter
from graphbandit.environment import BanditEnvironment, NodeRewards, NoiseModel, generate_rewards
from graphbandit.ledger import PullLedger
from graphbandit.models import IdentificationResult, PacParams, SpiderWebSpec
from graphbandit.algorithms import (
    line_sample_size,
    nne_phase_sample_size,
    run_line,
    run_nne,
    run_tree,
    tree_sample_size,
)
from graphbandit.curves import budgeted_error_curve
from graphbandit.contextual import (
    ContextualEdgeEstimator,
    ContextualEnvironment,
    EstimatorBank,
    run_contextual_sequence,
    run_contextual_stage,
)
from graphbandit.generators import generate_graph, generate_spider_web
from graphbandit.analytics import ResultAnalytics
from graphbandit.experiment import ExperimentConfig, load_config, run_experiment
from graphbandit.exceptions import (
    ExperimentError,
    GraphBanditError,
    IllegalObservationError,
    InsufficientBudgetError,
    InvalidStateError,
    ModelViolationError,
)

__all__ = [
    'Graph',
    'parse_edge_list',
    'read_edge_list',
    'write_edge_list',
    'ShortestPathSet',
    'all_pairs_shortest_paths',
    'graph_diameter',
    'min_diameter_spanning_tree',
    'max_diameter_spanning_tree',
    'tree_diameter',
    'BanditEnvironment',
    'NodeRewards',
    'NoiseModel',
    'generate_rewards',
    'PullLedger',
    'IdentificationResult',
    'PacParams',
    'SpiderWebSpec',
    'line_sample_size',
    'tree_sample_size',
    'nne_phase_sample_size',
    'run_line',
    'run_tree',
    'run_nne',
    'budgeted_error_curve',
    'ContextualEdgeEstimator',
    'ContextualEnvironment',
    'EstimatorBank',
    'run_contextual_stage',
    'run_contextual_sequence',
    'generate_graph',
    'generate_spider_web',
    'ResultAnalytics',
    'ExperimentConfig',
    'load_config',
    'run_experiment',
    'GraphBanditError',
    'ModelViolationError',
    'IllegalObservationError',
    'InvalidStateError',
    'InsufficientBudgetError',
    'ExperimentError',
]
