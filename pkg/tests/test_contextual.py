"""Tests for the contextual environment, ridge estimators and stage sequences."""
import math

import numpy as np
import pytest

from graphbandit.config import KNOWN_HORIZON, UNKNOWN_HORIZON
from graphbandit.contextual import (
    ContextualEdgeEstimator,
    ContextualEnvironment,
    EstimatorBank,
    confidence_width,
    contextual_pull,
    estimator_update,
    generate_contexts,
    generate_directions,
    run_contextual_sequence,
    run_contextual_stage,
    stage_delta,
)
from graphbandit.exceptions import IllegalObservationError, ModelViolationError
from graphbandit.exporter import read_estimators_csv, write_estimators_csv
from graphbandit.generators import erdos_renyi_connected, line_graph
from graphbandit.models import PacParams

E1 = np.array([1.0, 0.0, 0.0])
E2 = np.array([0.0, 1.0, 0.0])


@pytest.fixture(scope="module")
def small_graph():
    return erdos_renyi_connected(6, 0.5, seed=2)


@pytest.fixture(scope="module")
def small_directions(small_graph):
    return generate_directions(small_graph, 3, seed=2)


@pytest.fixture
def params():
    return PacParams(0.2, 0.1)


@pytest.fixture
def pair_env():
    """Two nodes whose directions differ only along the first axis."""
    y = math.sqrt(1 - 0.15 ** 2)
    directions = [[-0.15, y, 0.0], [0.15, y, 0.0]]
    return ContextualEnvironment(line_graph(2), directions, seed=3)


# Environment Tests
def test_edge_mean_is_projection(pair_env):
    """Test the edge mean is (u_j - u_i) . x."""
    assert pair_env.edge_mean(1, 2, E1) == pytest.approx(0.3)
    assert pair_env.edge_mean(1, 2, E2) == pytest.approx(0.0)
    assert pair_env.edge_mean(2, 1, E1) == pytest.approx(-0.3)


def test_pulled_mean_matches_projection(pair_env):
    """Test many observations average to the projected difference."""
    assert pair_env.pull_edge_sum(1, 2, E1, 1_000_000) / 1_000_000 == pytest.approx(0.3, abs=0.01)
    assert pair_env.ledger.total == 1_000_000


def test_single_pull_is_sign(pair_env):
    """Test one preference observation is +/-1."""
    assert contextual_pull(pair_env, 1, 2, E1) in (-1.0, 1.0)


def test_values_and_best_node(pair_env):
    """Test node values and the best node at a context."""
    assert pair_env.value(2, E1) == pytest.approx(0.15)
    assert pair_env.best_node(E1) == 2
    assert pair_env.best_node(-E1) == 1
    assert pair_env.is_epsilon_optimal(1, E1, 0.31)
    assert not pair_env.is_epsilon_optimal(1, E1, 0.29)


def test_invalid_contexts_rejected(pair_env):
    """Test contexts must be unit vectors of the right dimension."""
    with pytest.raises(ModelViolationError, match="unit norm"):
        pair_env.pull_edge(1, 2, [1.0, 1.0, 0.0])
    with pytest.raises(ModelViolationError, match="dimension"):
        pair_env.pull_edge(1, 2, [1.0, 0.0])
    assert pair_env.ledger.total == 0


def test_non_edge_rejected():
    """Test only edges can be observed."""
    env = ContextualEnvironment(line_graph(3), [[1.0, 0.0]] * 3)
    with pytest.raises(IllegalObservationError, match="not an edge"):
        env.pull_edge(1, 3, [1.0, 0.0])


def test_invalid_directions_rejected():
    """Test directions must be unit and close on edges."""
    with pytest.raises(ModelViolationError, match="norm"):
        ContextualEnvironment(line_graph(2), [[1.0, 0.0], [0.5, 0.0]])
    with pytest.raises(ModelViolationError, match="differ by"):
        ContextualEnvironment(line_graph(2), [[1.0, 0.0], [-1.0, 0.0]])
    with pytest.raises(ModelViolationError, match="Expected 3 directions"):
        ContextualEnvironment(line_graph(3), [[1.0, 0.0], [1.0, 0.0]])


def test_generate_directions_valid(small_graph):
    """Test generated directions satisfy the model constraints."""
    u = generate_directions(small_graph, 4, seed=11)
    assert u.shape == (6, 4)
    np.testing.assert_allclose(np.linalg.norm(u, axis=1), 1.0)
    for i, j in small_graph.sorted_edges():
        assert np.linalg.norm(u[j - 1] - u[i - 1]) <= 1.0
    ContextualEnvironment(small_graph, u)


def test_generate_directions_one_dimension(small_graph):
    """Test one-dimensional directions are all equal."""
    u = generate_directions(small_graph, 1, seed=1)
    assert len(np.unique(u)) == 1


def test_generate_contexts_patterns():
    """Test the identical, basis and random patterns."""
    identical = generate_contexts(3, 4, "identical", seed=1)
    assert all(np.array_equal(x, identical[0]) for x in identical)
    basis = generate_contexts(3, 5, "basis_cycle")
    np.testing.assert_array_equal(basis[3], E1)
    np.testing.assert_array_equal(basis[4], E2)
    for x in generate_contexts(3, 10, "random", seed=2):
        assert np.linalg.norm(x) == pytest.approx(1.0)
    with pytest.raises(ModelViolationError, match="Unknown context pattern"):
        generate_contexts(3, 2, "spiral")


# Estimator Tests
def test_estimator_update_single_observation():
    """Test one observation along e1 halves towards the response."""
    est = estimator_update(ContextualEdgeEstimator(3), E1, 0.5)
    np.testing.assert_allclose(est.estimate(), [0.25, 0.0, 0.0])
    assert est.pulls == 1


def test_estimator_update_returns_copy():
    """Test the functional update leaves its input alone."""
    est = ContextualEdgeEstimator(3)
    estimator_update(est, E1, 0.5)
    assert est.pulls == 0
    np.testing.assert_array_equal(est.matrix, np.eye(3))


def test_quadratic_form_shrinks_with_pulls():
    """Test x^T A^-1 x = 1 / (1 + t) after t pulls along x."""
    est = ContextualEdgeEstimator(3)
    for t in range(1, 6):
        est.update(E2, 1.0)
        assert est.quadratic_form(E2) == pytest.approx(1 / (1 + t))
    assert est.quadratic_form(E1) == pytest.approx(1.0)


def test_ridge_estimate_noiseless_basis():
    """Test noiseless basis pulls shrink the error as |theta| / (1 + t)."""
    theta = np.array([0.3, -0.2, 0.1])
    t = 9
    est = ContextualEdgeEstimator(3)
    for axis in np.eye(3):
        est.update_many(axis, t * float(theta @ axis), t)
    assert np.linalg.norm(est.estimate() - theta) == pytest.approx(np.linalg.norm(theta) / (1 + t))


def test_sum_of_quadratic_forms_bounded_by_log_determinant():
    """Test sum of x_t^T A_t^-1 x_t never exceeds log det A_T."""
    rng = np.random.default_rng(4)
    for _ in range(100):
        est = ContextualEdgeEstimator(3)
        total = 0.0
        for _ in range(30):
            x = rng.standard_normal(3)
            x /= np.linalg.norm(x)
            est.update(x, 0.0)
            total += est.quadratic_form(x)
        assert total <= est.log_determinant() + 1e-9


def test_confidence_width_covers_truth():
    """Test the width covers the projected truth in most trials."""
    rng = np.random.default_rng(6)
    theta = np.array([0.3, -0.2])
    x0 = np.array([1.0, 1.0]) / math.sqrt(2)
    trials = 4000
    misses = 0
    for _ in range(trials):
        est = ContextualEdgeEstimator(2)
        for _ in range(20):
            x = rng.standard_normal(2)
            x /= np.linalg.norm(x)
            mean = float(theta @ x)
            est.update(x, 1.0 if rng.random() < (1 + mean) / 2 else -1.0)
        misses += abs(est.predict(x0) - theta @ x0) > confidence_width(est, x0, 0.1, 20)
    assert misses / trials <= 0.109


def test_width_requires_positive_total():
    """Test the log term needs at least one observation overall."""
    with pytest.raises(ModelViolationError, match="stage_total"):
        ContextualEdgeEstimator(2).width_squared([1.0, 0.0], 0.1, 0)


def test_fresh_width_worked_example():
    """Test a fresh estimator at delta = 1/e and one pull has unit width."""
    est = ContextualEdgeEstimator(3)
    assert confidence_width(est, [0.0, 1.0, 0.0], math.exp(-1.0), 1) == pytest.approx(1.0)


def test_width_ignores_context_sign():
    est = estimator_update(ContextualEdgeEstimator(2), [0.6, 0.8], 1.0)
    x = np.array([1.0, 1.0]) / math.sqrt(2)
    assert confidence_width(est, x, 0.1, 5) == pytest.approx(confidence_width(est, -x, 0.1, 5))


# Bank Tests
def test_bank_orientation():
    """Test the bank negates reversed edges."""
    bank = EstimatorBank(3)
    bank.record(2, 1, E1, 4.0, 4, stage=1)
    assert bank.mean(1, 2, E1) == pytest.approx(-0.8)
    assert bank.mean(2, 1, E1) == pytest.approx(0.8)
    assert bank.total == 4


def test_bank_rows_round_trip():
    """Test a bank rebuilt from rows equals the original."""
    bank = EstimatorBank(3)
    bank.record(1, 2, E1, 1.0, 3, stage=1)
    bank.record(2, 3, E2, -2.0, 5, stage=2)
    restored = EstimatorBank.from_rows(3, bank.to_rows())
    assert restored.to_rows() == bank.to_rows()
    assert restored.total == 8


def test_bank_copy_is_independent():
    """Test copies do not share estimator state."""
    bank = EstimatorBank(3)
    bank.record(1, 2, E1, 1.0, 1, stage=1)
    clone = bank.copy()
    clone.record(1, 2, E1, 1.0, 1, stage=1)
    assert bank.total == 1
    assert clone.total == 2


# Stage Tests
def test_stage_delta_modes():
    """Test known and unknown horizon apportioning."""
    assert stage_delta(0.1, 3, horizon=20, mode=KNOWN_HORIZON) == pytest.approx(0.005)
    assert stage_delta(0.1, 2, mode=UNKNOWN_HORIZON) == pytest.approx(0.6 / (math.pi ** 2 * 4))
    assert sum(stage_delta(0.1, s, mode=UNKNOWN_HORIZON) for s in range(1, 10_000)) < 0.1


def test_stage_delta_invalid():
    """Test stage indices and horizons are checked."""
    with pytest.raises(ModelViolationError, match="starts at 1"):
        stage_delta(0.1, 0, horizon=5)
    with pytest.raises(ModelViolationError, match="cover every stage"):
        stage_delta(0.1, 6, horizon=5)
    with pytest.raises(ModelViolationError, match="Unknown horizon mode"):
        stage_delta(0.1, 1, horizon=5, mode="forever")


def test_two_node_noiseless_stage():
    """Test the better node at the context is chosen."""
    angle = math.radians(30)
    directions = [[1.0, 0.0], [math.cos(angle), math.sin(angle)]]
    graph = line_graph(2)
    env = ContextualEnvironment(graph, directions, noise_model="noiseless")
    result = run_contextual_stage(env, graph, [0.0, 1.0], PacParams(0.2, 0.1), EstimatorBank(2))
    assert result.chosen_node == 2
    assert result.stage_pulls == env.ledger.total > 0


def test_empty_sequence():
    """Test no contexts means no stages."""
    env = ContextualEnvironment(line_graph(2), [[1.0, 0.0], [1.0, 0.0]])
    assert run_contextual_sequence(env, line_graph(2), [], PacParams(0.2, 0.1)) == []


@pytest.mark.parametrize("mode", [KNOWN_HORIZON, UNKNOWN_HORIZON])
def test_identical_contexts_stop_pulling(small_graph, small_directions, params, mode):
    """Test repeated contexts cost little beyond the first stage."""
    env = ContextualEnvironment(small_graph, small_directions, seed=1)
    contexts = generate_contexts(3, 20, "identical", seed=1)
    stages = run_contextual_sequence(env, small_graph, contexts, params, horizon_mode=mode)
    assert [s.stage for s in stages] == list(range(1, 21))
    assert stages[-1].cumulative_pulls == env.ledger.total
    assert stages[-1].cumulative_pulls <= 3 * stages[0].stage_pulls
    assert stages[1].stage_pulls <= stages[0].stage_pulls


def test_basis_cycle_flattens(small_graph, small_directions, params):
    """Test pulls level off once every basis direction has been seen."""
    env = ContextualEnvironment(small_graph, small_directions, seed=2)
    stages = run_contextual_sequence(env, small_graph, generate_contexts(3, 30, "basis_cycle"), params)
    cumulative = [s.cumulative_pulls for s in stages]
    quarter = len(cumulative) // 4
    first = cumulative[quarter - 1]
    last = cumulative[-1] - cumulative[-1 - quarter]
    assert last <= 0.1 * first


def test_orthogonal_contexts_need_fresh_pulls(small_graph, small_directions, params):
    """Test learning along e1 does not help along e2."""
    env = ContextualEnvironment(small_graph, small_directions, seed=3)
    stages = run_contextual_sequence(env, small_graph, [E1, E2], params)
    assert stages[1].stage_pulls > 0.5 * stages[0].stage_pulls


def test_sequence_picks_near_optimal_nodes(small_graph, small_directions):
    """Test every stage of a random-context sequence is epsilon-optimal in most runs."""
    params = PacParams(0.1, 0.1)
    reps = 60
    failures = 0
    for rep in range(reps):
        env = ContextualEnvironment(small_graph, small_directions, seed=rep)
        contexts = generate_contexts(3, 10, "random", seed=rep)
        stages = run_contextual_sequence(env, small_graph, contexts, params)
        failures += not all(
            env.is_epsilon_optimal(s.chosen_node, x, params.epsilon) for s, x in zip(stages, contexts)
        )
    assert failures / reps <= params.delta + 3 * math.sqrt(params.delta * (1 - params.delta) / reps)


def test_resumed_sequence_is_bit_exact(tmp_path, small_graph, small_directions, params):
    """Test a bank saved to CSV and restored continues exactly."""
    contexts = generate_contexts(3, 8, "random", seed=5)

    whole_bank = EstimatorBank(3)
    whole_env = ContextualEnvironment(small_graph, small_directions, seed=9)
    whole = run_contextual_sequence(whole_env, small_graph, contexts, params,
                                    bank=whole_bank, horizon=8)

    split_env = ContextualEnvironment(small_graph, small_directions, seed=9)
    bank = EstimatorBank(3)
    head = run_contextual_sequence(split_env, small_graph, contexts[:4], params, bank=bank, horizon=8)
    path = write_estimators_csv(bank, str(tmp_path / "estimators.csv"))
    restored = read_estimators_csv(path)
    tail = run_contextual_sequence(split_env, small_graph, contexts[4:], params, bank=restored,
                                   horizon=8, start_stage=5,
                                   previous_pulls=head[-1].cumulative_pulls)

    def key(stages):
        return [(s.stage, s.chosen_node, s.stage_pulls, s.cumulative_pulls) for s in stages]

    assert key(head + tail) == key(whole)
    assert restored.to_rows() == whole_bank.to_rows()
