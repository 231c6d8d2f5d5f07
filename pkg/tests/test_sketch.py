import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mmlrsketch import worked_example, sketch
from mmlrsketch.dense import numerical_rank
from mmlrsketch.errors import DimensionError, InvalidWeights

RANDOM_KINDS = [sketch.WITHOUT_REPLACEMENT, sketch.WITH_REPLACEMENT, sketch.GAUSSIAN]


def test_without_replacement_full_sample_is_permutation():
    s = sketch.sample_without_replacement(3, 3, 1, seed=5)
    np.testing.assert_array_equal(s.matrix @ s.matrix.T, np.eye(3))
    np.testing.assert_array_equal(s.matrix.sum(axis=0), np.ones(3))


def test_without_replacement_structure():
    s = sketch.sample_without_replacement(50, 20, 5, seed=11)
    mat = s.matrix
    assert s.kind == sketch.WITHOUT_REPLACEMENT and (s.c, s.m, s.n) == (20, 50, 5)
    np.testing.assert_array_equal(mat.sum(axis=1), np.ones(20))
    np.testing.assert_array_equal((mat != 0).sum(axis=1), np.ones(20))
    assert len(set(mat.argmax(axis=1))) == 20
    np.testing.assert_array_equal(mat @ mat.T, np.eye(20))


@pytest.mark.parametrize("kind", RANDOM_KINDS)
def test_fixed_seed_reproducible(kind):
    s1 = sketch.make(kind, 6, 4, 2, seed=123)
    s2 = sketch.make(kind, 6, 4, 2, seed=123)
    np.testing.assert_array_equal(s1.matrix, s2.matrix)
    assert s1.seed == 123


def test_streams_differ_across_seeds():
    a = sketch.gaussian(30, 10, 2, seed=1).matrix
    b = sketch.gaussian(30, 10, 2, seed=2).matrix
    assert not np.array_equal(a, b)


def test_golden_streams():
    # pins this repo's generator: PCG64 seeded by SeedSequence([seed, kind])
    rows = sketch.sample_without_replacement(10, 4, 2, seed=7).matrix.argmax(axis=1)
    assert rows.tolist() == [1, 8, 6, 7]
    wr = sketch.sample_with_replacement(10, 4, 2, seed=7).matrix
    assert wr.argmax(axis=1).tolist() == [2, 4, 9, 6]
    np.testing.assert_allclose(wr.max(axis=1), np.sqrt(10 / 4))
    g = sketch.gaussian(5, 3, 2, seed=7).matrix
    assert [float(x).hex() for x in g[0, :3]] == [
        "-0x1.ecda6dcde12acp-1", "0x1.2e1b6d7ec2b46p-5", "0x1.b9d17a1b6847ep-1"]


@pytest.mark.parametrize("m,c,n", [(5, 6, 2), (5, 1, 2)])
@pytest.mark.parametrize("kind", RANDOM_KINDS)
def test_dimension_errors(kind, m, c, n):
    with pytest.raises(DimensionError):
        sketch.make(kind, m, c, n, seed=0)


def test_with_replacement_expectation_monte_carlo():
    m = c = 5
    draws = 10_000
    total = np.zeros((m, m))
    for i in range(draws):
        s = sketch.sample_with_replacement(m, c, 1, seed=i).matrix
        total += s.T @ s
    mean = total / draws
    assert np.max(np.abs(mean - np.eye(m))) <= 3 / np.sqrt(draws)


def test_with_replacement_weighted_scaling():
    w = np.array([0.1, 0.2, 0.3, 0.4])
    s = sketch.sample_with_replacement(4, 3, 1, seed=3, row_weights=w)
    rows = s.matrix.argmax(axis=1)
    np.testing.assert_allclose(s.matrix[np.arange(3), rows], 1 / np.sqrt(3 * w[rows]))


@pytest.mark.parametrize("weights", [[1.0, 0.0], [0.6, 0.6], [0.5, 0.5, 0.0], [np.nan, 1.0]])
def test_invalid_weights(weights):
    m = len(weights)
    with pytest.raises(InvalidWeights):
        sketch.sample_with_replacement(m, 2, 1, seed=0, row_weights=weights)


def test_gaussian_mean_and_variance():
    c, m = 100, 1000
    s = sketch.gaussian(m, c, 1, seed=99).matrix
    assert abs(s.mean()) <= 4 / np.sqrt(c * m * c)
    assert s.var() == pytest.approx(1 / c, rel=0.05)


def test_gaussian_smallest_shape():
    s = sketch.gaussian(1, 1, 1, seed=0)
    assert s.matrix.shape == (1, 1)


def test_from_matrix_worked_sketch():
    s = sketch.from_matrix(worked_example.S, n=3)
    assert s.kind == sketch.USER_SUPPLIED and s.seed is None
    assert (s.c, s.m) == (4, 6)
    np.testing.assert_array_equal(sketch.apply(s, worked_example.Q), worked_example.SQ_STATED)


def test_from_matrix_errors():
    with pytest.raises(DimensionError):
        sketch.from_matrix(np.ones((2, 6)), n=3)
    with pytest.raises(DimensionError):
        sketch.from_matrix(np.ones((7, 6)), n=3)


def test_identity_sketch_applies_as_identity(rng):
    s = sketch.from_matrix(np.eye(5), n=2)
    m = rng.standard_normal((5, 3))
    np.testing.assert_array_equal(sketch.apply(s, m), m)
    with pytest.raises(DimensionError):
        sketch.apply(s, rng.standard_normal((4, 3)))


def test_sampling_selects_rows(rng):
    s = sketch.sample_without_replacement(8, 3, 1, seed=4)
    m = rng.standard_normal((8, 2))
    rows = s.matrix.argmax(axis=1)
    np.testing.assert_array_equal(sketch.apply(s, m), m[rows])


def test_sketch_matrix_is_immutable():
    s = sketch.gaussian(4, 2, 1, seed=0)
    with pytest.raises(ValueError):
        s.matrix[0, 0] = 1.0


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(RANDOM_KINDS), st.integers(2, 30), st.integers(0, 2**63))
def test_rank_of_product_bounded(kind, m, seed):
    g = np.random.default_rng(seed % 2**32)
    n = max(1, m // 4)
    c = max(n, m // 2)
    s = sketch.make(kind, m, c, n, seed)
    a = g.standard_normal((m, n))
    r = numerical_rank(s.matrix @ a)
    assert r <= min(numerical_rank(s.matrix), numerical_rank(a))
