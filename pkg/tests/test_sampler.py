import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kpr.sampler import (
    RngStream,
    build_sampler,
    derive_seed,
    draw,
    draw_many,
    draw_naive,
    rank_for_uniform,
    rank_for_uniform_naive,
    splitmix64,
    tally_draws,
)
from kpr.strategy import WeightVector


class FixedUniforms:
    """Stands in for an RngStream, replaying given uniforms."""

    def __init__(self, values):
        self._it = iter(values)

    def uniform(self):
        return next(self._it)


@pytest.mark.parametrize(
    "weights, prefix",
    [([1, 1, 1, 1], [1, 2, 3, 4]), ([1, 2, 3, 4], [1, 3, 6, 10]), ([0, 5, 0], [0, 5, 5])],
)
def test_prefix_sums(weights, prefix):
    s = build_sampler(WeightVector.from_array(weights))
    np.testing.assert_array_equal(s.prefix, prefix)
    assert s.total == prefix[-1]


def test_zero_total_rejected():
    with pytest.raises(ValueError):
        build_sampler(np.zeros(3))
    with pytest.raises(ValueError):
        rank_for_uniform_naive(np.zeros(3), 0.5)


def test_degenerate_distribution():
    s = build_sampler(WeightVector.from_array([1, 0, 0]))
    for u in (0.0, 0.3, 0.999999):
        assert rank_for_uniform(s, u) == 1


def test_inverse_cdf_examples():
    s = build_sampler(WeightVector.from_array([1, 1]))
    assert draw(s, FixedUniforms([0.3])) == 1
    assert draw(s, FixedUniforms([0.7])) == 2
    assert draw_naive(WeightVector.from_array([1, 1, 1, 1]), FixedUniforms([0.99])) == 4
    assert draw_naive(WeightVector.from_array([2, 1]), FixedUniforms([0.5])) == 1


def test_largest_uniform_stays_in_range():
    u = (2**53 - 1) * 2.0**-53
    for weights in ([1, 2, 3], [3.0], [0.1, 0.2, 0.0], [1e-300, 1e-300]):
        w = WeightVector.from_array(weights)
        k = rank_for_uniform(build_sampler(w), u)
        assert k == rank_for_uniform_naive(w, u)
        assert w.weights[k - 1] > 0


weight_lists = st.lists(
    st.one_of(st.just(0.0), st.floats(1e-6, 1e6), st.integers(0, 5).map(float)), min_size=1, max_size=60
).filter(lambda w: sum(w) > 0)


@settings(max_examples=300, deadline=None)
@given(weight_lists)
def test_uniform_grid_matches_linear_scan(weights):
    w = WeightVector.from_array(weights)
    s = build_sampler(w)
    for i in range(1000):
        u = i / 1000
        assert rank_for_uniform(s, u) == rank_for_uniform_naive(w, u)


@settings(max_examples=200, deadline=None)
@given(weight_lists, st.integers(0, 2**64 - 1))
def test_shared_stream_equivalence(weights, seed):
    w = WeightVector.from_array(weights)
    s = build_sampler(w)
    a, b = RngStream(seed), RngStream(seed)
    fast = [draw(s, a) for _ in range(50)]
    slow = [draw_naive(w, b) for _ in range(50)]
    assert fast == slow
    for k in fast:
        assert w.weights[k - 1] > 0


@settings(max_examples=100, deadline=None)
@given(weight_lists, st.integers(0, 2**64 - 1), st.integers(1, 300))
def test_batched_draws_match_single_draws(weights, seed, m):
    s = build_sampler(WeightVector.from_array(weights))
    singles = [draw(s, r) for r in [RngStream(seed)] for _ in range(m)]
    batch = draw_many(s, RngStream(seed), m)
    assert batch.tolist() == singles
    counts = tally_draws(s, RngStream(seed), m)
    np.testing.assert_array_equal(counts, np.bincount(batch - 1, minlength=len(weights)))


def test_empirical_frequencies():
    s = build_sampler(WeightVector.from_array([1, 2, 3, 4]))
    freq = tally_draws(s, RngStream(2024), 1_000_000) / 1_000_000
    assert np.abs(freq - [0.1, 0.2, 0.3, 0.4]).max() < 0.003


def test_zero_weights_never_drawn():
    w = np.zeros(50)
    w[[3, 17, 49]] = [1.0, 2.0, 0.5]
    counts = tally_draws(build_sampler(w), RngStream(5), 100_000)
    assert set(np.flatnonzero(counts)) == {3, 17, 49}


def test_stream_is_deterministic():
    a, b = RngStream(99), RngStream(99)
    assert [a.next_u64() for _ in range(10)] == [b.next_u64() for _ in range(10)]
    assert RngStream(1).next_u64() != RngStream(2).next_u64()


def test_uniform_uses_high_53_bits():
    words = RngStream(7).u64s(1000)
    expected = [(int(x) >> 11) / 2**53 for x in words]
    assert RngStream(7).uniforms(1000).tolist() == expected
    r = RngStream(7)
    assert [r.uniform() for _ in range(1000)] == expected


def test_seed_range():
    with pytest.raises(ValueError):
        RngStream(-1)
    with pytest.raises(ValueError):
        RngStream(2**64)
    RngStream(2**64 - 1)


def test_splitmix64_reference_values():
    # first outputs of the SplitMix64 generator seeded with 0
    state, out = 0, []
    for _ in range(3):
        out.append(splitmix64(state))
        state = (state + 0x9E3779B97F4A7C15) % 2**64
    assert out == [0xE220A8397B1DCDAF, 0x6E789E6AA1B965F4, 0x06C45D188009454F]


def test_derived_seeds_distinct_and_stable():
    seeds = [derive_seed(42, i) for i in range(1000)]
    assert len(set(seeds)) == 1000
    assert seeds == [derive_seed(42, i) for i in range(1000)]
    assert RngStream(42).spawn(3).seed == derive_seed(42, 3)


def test_normals_are_box_muller():
    z = RngStream(3).normals(5)
    u = RngStream(3).uniforms(6)
    r = np.sqrt(-2 * np.log(1 - u[0]))
    assert z[0] == pytest.approx(r * np.cos(2 * np.pi * u[1]), rel=1e-15)
    assert z[1] == pytest.approx(r * np.sin(2 * np.pi * u[1]), rel=1e-15)
    big = RngStream(4).normals(200_000)
    assert abs(big.mean()) < 0.01 and abs(big.std() - 1) < 0.01
