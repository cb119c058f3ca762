import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dfsense import errors
from dfsense.model import (
    as_spin_vector,
    canonical_sign,
    mixed_k_state,
    network_from_samples,
    pure_strategy,
    sequential_strategy,
    validate_network,
    weight_matrix,
)

from conftest import NOISE_1, SIGNAL_1


def test_square_network_shape():
    net = validate_network(SIGNAL_1, NOISE_1, 1.0)
    assert (net.n_sensors, net.n_signals, net.n_noise) == (4, 2, 2)


def test_single_sensor_noiseless():
    net = validate_network([[1.0]], np.zeros((0, 1)), 1.0)
    assert net.n_sensors == 1 and net.n_noise == 0


def test_column_mismatch():
    with pytest.raises(errors.DimensionMismatch):
        validate_network(np.ones((2, 3)), np.ones((1, 4)), 1.0)


@pytest.mark.parametrize("t", [0.0, -1.0, float("nan")])
def test_bad_time(t):
    with pytest.raises((errors.NonPositiveTime, errors.NonFinite)):
        validate_network([[1.0]], [], t)


def test_non_finite_signal():
    with pytest.raises(errors.NonFinite):
        validate_network([[1.0, np.inf]], [], 1.0)


def test_network_is_read_only():
    net = validate_network(SIGNAL_1, NOISE_1)
    with pytest.raises(ValueError):
        net.signal[0, 0] = 3.0


def test_samples_constant_field():
    net = network_from_samples([[1.2] * 4], [], 1.0)
    assert np.array_equal(net.signal[0], [1.2] * 4)
    assert net.n_noise == 0


def test_ragged_samples():
    with pytest.raises(errors.DimensionMismatch):
        network_from_samples([[1, 2, 3], [1, 2]], [], 1.0)


def test_spin_vector_bounds():
    assert as_spin_vector([1, -1, 0.5]).tolist() == [1, -1, 0.5]
    with pytest.raises(errors.InvalidStrategy):
        as_spin_vector([1.1, 0])
    with pytest.raises(errors.DimensionMismatch):
        as_spin_vector([1, 0], n=3)


def test_pure_strategy_normalisation():
    with pytest.raises(errors.InvalidStrategy):
        pure_strategy([([1, 1], 0.5), ([1, -1], 0.5)])
    s = pure_strategy([([1, 1], 1), ([1, -1], 1)], normalize=True)
    assert np.isclose(s.weights.sum(), 1)


def test_pure_strategy_duplicates():
    with pytest.raises(errors.InvalidStrategy):
        pure_strategy([([1, 1], 0.6), ([1, 1], 0.8)])


def test_sequential_merges_pairs():
    s = sequential_strategy([([1, 0.5], 0.25), ([-1, -0.5], 0.25), ([0, 1], 0.5)])
    assert len(s) == 2
    assert np.allclose(sorted(s.rates), [0.5, 0.5])


def test_sequential_rejects_negative():
    with pytest.raises(errors.InvalidStrategy):
        sequential_strategy([([1, 1], 1.5), ([1, -1], -0.5)])


def test_weight_matrix_checks():
    with pytest.raises(errors.InvalidMatrix):
        weight_matrix([[1, 2], [0, 1]])
    with pytest.raises(errors.InvalidMatrix):
        weight_matrix([[1, 0], [0, -1]])
    assert np.array_equal(weight_matrix(np.eye(2)), np.eye(2))


def test_mixed_state_validation():
    with pytest.raises(errors.NonHermitian):
        mixed_k_state([[1, 0], [0, 1]], [[0.5, 0.1], [0.2, 0.5]])
    with pytest.raises(errors.NegativeEigenvalue):
        mixed_k_state([[1, 0], [0, 1]], [[1.2, 0], [0, -0.2]])


@given(st.lists(st.floats(-1, 1, allow_nan=False), min_size=1, max_size=6))
def test_canonical_sign_picks_one_of_pair(xs):
    k = np.array(xs)
    a = canonical_sign(k)
    b = canonical_sign(-k)
    assert np.array_equal(a, b) or np.max(np.abs(k)) <= 1e-12


@settings(max_examples=50)
@given(st.lists(st.floats(0.01, 1.0), min_size=1, max_size=5))
def test_sequential_rates_sum_to_one(raw):
    labels = np.eye(len(raw))
    s = sequential_strategy(list(zip(labels, raw)), normalize=True)
    assert abs(s.rates.sum() - 1) <= 1e-12
