"""Configuration and constants for graphbandit."""

# Algorithm names used in configs, result rows and error curves
LINE = "line"
TREE = "tree"
NNE = "nne"
TREE_MIN = "tree_min"
TREE_MAX = "tree_max"

PAC_ALGORITHMS = [LINE, TREE, NNE, TREE_MIN, TREE_MAX]
CURVE_ALGORITHMS = [NNE, TREE_MIN, TREE_MAX]

# Defaults used when a config leaves a key out
DEFAULT_EPSILON = 0.1
DEFAULT_DELTA = 0.1
DEFAULT_REPETITIONS = 200
DEFAULT_SEED = 0
DEFAULT_NOISE_MODEL = "preference_sign"

# Spider web of the reference experiment: 3 concentric rings of 5 nodes
SPIDER_WEB_RINGS = 3
SPIDER_WEB_NODES_PER_RING = 5

# Retry caps for rejection sampling
ERDOS_RENYI_MAX_ATTEMPTS = 1000
REWARD_TIE_MAX_REDRAWS = 100
DIRECTION_MAX_ATTEMPTS = 1000

# Per-stage confidence apportioning for contextual sequences
KNOWN_HORIZON = "known_horizon"
UNKNOWN_HORIZON = "unknown_horizon"
HORIZON_MODES = [KNOWN_HORIZON, UNKNOWN_HORIZON]

# Context sequences the harness can generate
CONTEXT_PATTERNS = ["identical", "basis_cycle", "random"]

# Experiment modes
EXPERIMENT_MODES = ["pac", "curve", "contextual"]

# Bumped whenever the config dialect changes; echoed into every manifest
CONFIG_FORMAT_VERSION = 1

RESULT_COLUMNS = [
    "algorithm", "seed", "n", "epsilon", "delta", "noise_model",
    "chosen_node", "best_node", "total_pulls", "phases",
]

CURVE_COLUMNS = ["algorithm", "budget", "error_rate", "repetitions"]

STAGE_COLUMNS = RESULT_COLUMNS + ["stage", "cumulative_pulls", "d"]
