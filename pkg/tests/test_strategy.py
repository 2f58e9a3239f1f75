import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kpr.strategy import (
    AVOID_CROWD,
    DICTATED,
    INFINITE,
    RANDOM_CHOICE,
    STRICT_RANK,
    ZERO,
    StrategyParams,
    Temperature,
    TemperatureKind,
    WeightVector,
    choice_probabilities,
    compute_weights,
)


def test_random_choice_is_uniform():
    p = choice_probabilities(RANDOM_CHOICE, [3, 0, 1, 7])
    np.testing.assert_allclose(p, [0.25] * 4, rtol=0, atol=1e-15)


def test_strict_rank_is_proportional_to_rank():
    w = compute_weights(STRICT_RANK, [5, 5, 0, 0])
    assert w.total == 10
    np.testing.assert_allclose(w.probabilities(), [0.1, 0.2, 0.3, 0.4], atol=1e-15)


def test_zero_temperature_picks_vacant_only():
    p = choice_probabilities(AVOID_CROWD, [2, 0, 1, 0])
    np.testing.assert_array_equal(p, [0, 0.5, 0, 0.5])


def test_zero_temperature_fallback_when_all_visited():
    p = choice_probabilities(AVOID_CROWD, [1, 1, 1, 1])
    np.testing.assert_array_equal(p, [0.25] * 4)


def test_zero_temperature_with_rank_weights():
    p = choice_probabilities(StrategyParams(1.0, ZERO), [0, 3, 0, 1])
    np.testing.assert_allclose(p, [0.25, 0, 0.75, 0], atol=1e-15)
    # all visited: plain rank weights
    p = choice_probabilities(StrategyParams(1.0, ZERO), [1, 3, 2, 1])
    np.testing.assert_allclose(p, [0.1, 0.2, 0.3, 0.4], atol=1e-15)


def test_finite_temperature_hand_value():
    p = choice_probabilities(StrategyParams(0.0, Temperature.finite(1.0)), [1, 0])
    e = math.exp(-1)
    np.testing.assert_allclose(p, [e / (1 + e), 1 / (1 + e)], rtol=0, atol=1e-15)
    np.testing.assert_allclose(p, [0.26894, 0.73106], atol=5e-6)


def test_finite_temperature_small_t_does_not_underflow():
    # every exponent is below -700; a naive evaluation gives 0/0
    p = choice_probabilities(StrategyParams(2.0, Temperature.finite(1e-3)), [5, 3, 4])
    np.testing.assert_allclose(p, [0, 1, 0], atol=1e-300)


def test_errors():
    with pytest.raises(ValueError):
        compute_weights(RANDOM_CHOICE, [])
    with pytest.raises(ValueError):
        compute_weights(RANDOM_CHOICE, [0, 0, 0], n_restaurants=4)
    with pytest.raises(ValueError):
        compute_weights(DICTATED, [0, 0])
    with pytest.raises(ValueError):
        StrategyParams(-1.0)
    with pytest.raises(ValueError):
        StrategyParams(math.inf)
    with pytest.raises(ValueError):
        Temperature.finite(0.0)
    with pytest.raises(ValueError):
        Temperature.finite(-2.0)


@pytest.mark.parametrize(
    "text, expected",
    [
        ("inf", INFINITE),
        ("INF", INFINITE),
        ("0", ZERO),
        ("0.0", ZERO),
        ("1000", Temperature.finite(1000)),
        ("0.25", Temperature.finite(0.25)),
        (0, ZERO),
        (math.inf, INFINITE),
        (3, Temperature.finite(3)),
    ],
)
def test_temperature_grammar(text, expected):
    assert Temperature.parse(text) == expected


@pytest.mark.parametrize("text", ["-1", "abc", "nan", "", "-inf"])
def test_temperature_grammar_rejects(text):
    with pytest.raises(ValueError):
        Temperature.parse(text)


def test_weight_vector_invariant():
    with pytest.raises(ValueError):
        WeightVector.from_array([0, 0])
    with pytest.raises(ValueError):
        WeightVector.from_array([1, -1, 3])
    w = WeightVector.from_array([1, 2, 3])
    assert w.total == 6 and len(w) == 3


temperatures = st.one_of(
    st.just(INFINITE),
    st.just(ZERO),
    st.floats(1e-3, 1e4).map(Temperature.finite),
)
occupancies = st.integers(1, 300).flatmap(lambda n: st.lists(st.integers(0, 50), min_size=n, max_size=n))


@settings(max_examples=200, deadline=None)
@given(st.floats(0, 5), temperatures, occupancies)
def test_probabilities_normalized(alpha, temp, counts):
    w = compute_weights(StrategyParams(alpha, temp), counts)
    assert np.all(w.weights >= 0)
    assert len(w) == len(counts)
    assert w.total > 0
    assert abs(w.total - math.fsum(w.weights)) <= 8 * np.spacing(w.total)
    assert abs(w.probabilities().sum() - 1) < 1e-12


@settings(max_examples=20, deadline=None)
@given(st.floats(0, 3), temperatures)
def test_probabilities_normalized_large_n(alpha, temp):
    counts = np.random.default_rng(1).poisson(1.0, 10_000)
    p = choice_probabilities(StrategyParams(alpha, temp), counts)
    assert abs(p.sum() - 1) < 1e-12


@settings(max_examples=200, deadline=None)
@given(st.floats(0, 3), st.floats(1e-2, 1e3), occupancies, st.floats(-20, 20))
def test_shift_invariance(alpha, t, counts, shift):
    params = StrategyParams(alpha, Temperature.finite(t))
    counts = np.asarray(counts, dtype=float)
    p = choice_probabilities(params, counts)
    q = choice_probabilities(params, counts + shift)
    assert np.abs(p - q).max() < 1e-12


@settings(max_examples=100, deadline=None)
@given(st.floats(0.01, 4), st.one_of(st.just(INFINITE), st.floats(1e-2, 1e3).map(Temperature.finite)),
       st.integers(2, 200), st.integers(0, 10))
def test_monotone_in_rank(alpha, temp, n, crowd):
    w = compute_weights(StrategyParams(alpha, temp), [crowd] * n).weights
    assert np.all(np.diff(w) > 0)


@settings(max_examples=100, deadline=None)
@given(st.floats(1e-1, 1e2), st.lists(st.integers(0, 30), min_size=2, max_size=100, unique=True))
def test_monotone_in_crowding(t, counts):
    w = compute_weights(StrategyParams(0.0, Temperature.finite(t)), counts).weights
    order = np.argsort(counts)
    assert np.all(np.diff(w[order]) < 0)


@settings(max_examples=200, deadline=None)
@given(occupancies)
def test_small_temperature_approaches_zero_limit(counts):
    if all(c > 0 for c in counts):
        counts[0] = 0
    finite = choice_probabilities(StrategyParams(0.0, Temperature.finite(1e-3)), counts)
    limit = choice_probabilities(AVOID_CROWD, counts)
    assert np.abs(finite - limit).max() < 1e-3


def test_history_free_flag():
    assert RANDOM_CHOICE.history_free and STRICT_RANK.history_free
    assert not AVOID_CROWD.history_free
    assert AVOID_CROWD.temperature.kind is TemperatureKind.ZERO
