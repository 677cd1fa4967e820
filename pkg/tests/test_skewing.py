import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from skewsc.network import Dataset
from skewsc.skewing import (
    SkewSpec,
    UndefinedConditionalError,
    WeightVector,
    all_ones_weights,
    compute_weights,
    draw_weight_matrix,
    make_skew,
    weighted_probability,
)


def test_skew_spec_rejects_degenerate_strength():
    for s in (0.5, 1.0, 0.2):
        with pytest.raises(ValueError):
            SkewSpec((0, 1), s)
    with pytest.raises(ValueError):
        SkewSpec((0, 2), 0.75)


def test_weight_vector_rejects_negative():
    with pytest.raises(ValueError):
        WeightVector(np.array([0.5, -0.1]))


def test_single_row_weight_product():
    # one match at strength 0.75 and one mismatch at 0.25
    data = Dataset(["a", "b"], np.array([[0, 1]]))
    w = compute_weights(data, SkewSpec((0, 0), 0.75), normalize=False)
    assert w.weights[0] == pytest.approx(0.1875, abs=0)


def test_full_match_weight_is_strength_to_the_n():
    data = Dataset(["a", "b", "c"], np.array([[1, 1, 1]]))
    w = compute_weights(data, SkewSpec((1, 1, 1), 0.8), normalize=False)
    assert w.weights[0] == pytest.approx(0.512, abs=1e-12)


def test_identical_rows_get_identical_weights():
    data = Dataset(["a", "b"], np.array([[1, 0], [0, 1], [1, 0], [1, 0]]))
    w = compute_weights(data, SkewSpec((1, 1), 0.9)).weights
    assert w[0] == w[2] == w[3]


def test_normalized_weights_sum_to_m():
    rng = np.random.default_rng(0)
    data = Dataset([f"v{i}" for i in range(6)],
                   rng.integers(0, 2, size=(137, 6)))
    w = compute_weights(data, make_skew(6, rng)).weights
    assert w.sum() == pytest.approx(data.m, abs=1e-9)


@given(st.integers(min_value=1, max_value=10), st.integers(min_value=0, max_value=10**6))
@settings(max_examples=40, deadline=None)
def test_raw_weight_bounds(n, seed):
    rng = np.random.default_rng(seed)
    data = Dataset([f"v{i}" for i in range(n)], rng.integers(0, 2, size=(25, n)))
    skew = make_skew(n, rng)
    w = compute_weights(data, skew, normalize=False).weights
    s = skew.strength
    lo, hi = (1 - s) ** n, s ** n
    assert np.all(w >= lo - 1e-15) and np.all(w <= hi + 1e-15)


def test_make_skew_draw_statistics():
    rng = np.random.default_rng(123)
    favored_total = 0
    strengths = []
    for _ in range(10_000):
        skew = make_skew(5, rng)
        favored_total += sum(skew.favored)
        strengths.append(skew.strength)
    frac = favored_total / (10_000 * 5)
    mean_s = float(np.mean(strengths))
    assert 0.48 <= frac <= 0.52
    assert 0.74 <= mean_s <= 0.76
    assert all(0.5 < s < 1.0 for s in strengths)


def test_all_ones_weights_exact():
    w = all_ones_weights(4).weights
    assert np.array_equal(w, np.ones(4))


def test_draw_weight_matrix_first_row_ones_and_reproducible():
    rng = np.random.default_rng(9)
    data = Dataset(["a", "b", "c"], rng.integers(0, 2, size=(50, 3)))
    m1 = draw_weight_matrix(data, 5, np.random.default_rng(42))
    m2 = draw_weight_matrix(data, 5, np.random.default_rng(42))
    assert m1.shape == (5, 50)
    assert np.all(m1[0] == 1.0)
    assert np.array_equal(m1, m2)
    assert not np.array_equal(m1[1], m1[2])


# ------------------------------------------------------- weighted probability


def test_weighted_probability_hand_case():
    data = Dataset(["a", "b"], np.array([[0, 0], [0, 1], [1, 0], [1, 1]]))
    w = np.array([1.0, 2.0, 3.0, 4.0])
    # P(a=1) = (3+4)/10
    assert weighted_probability(data, w, {0: 1}) == pytest.approx(0.7, abs=1e-15)
    # P(b=1 | a=1) = 4/7
    assert weighted_probability(data, w, {1: 1}, {0: 1}) == pytest.approx(4 / 7, abs=1e-15)


def test_weighted_probability_scale_invariant():
    rng = np.random.default_rng(17)
    data = Dataset(["a", "b", "c"], rng.integers(0, 2, size=(60, 3)))
    w = rng.uniform(0.1, 2.0, size=60)
    p1 = weighted_probability(data, w, {2: 1}, {0: 0})
    p2 = weighted_probability(data, w * 37.5, {2: 1}, {0: 0})
    assert abs(p1 - p2) <= 1e-12


def test_weighted_probability_all_ones_reduces_to_frequency_exactly():
    rng = np.random.default_rng(23)
    data = Dataset(["a", "b"], rng.integers(0, 2, size=(101, 2)))
    ones = all_ones_weights(data.m)
    match = int(np.sum((data.values[:, 0] == 1) & (data.values[:, 1] == 0)))
    p = weighted_probability(data, ones, {0: 1, 1: 0})
    assert p == match / data.m


def test_weighted_probability_zero_mass_conditional():
    data = Dataset(["a", "b"], np.array([[0, 0], [0, 1]]))
    with pytest.raises(UndefinedConditionalError):
        weighted_probability(data, all_ones_weights(2), {1: 1}, {0: 1})
    # zero weight on the conditioning rows counts as zero mass too
    w = np.array([0.0, 1.0])
    with pytest.raises(UndefinedConditionalError):
        weighted_probability(data, w, {0: 1}, {1: 0})


def test_weighted_probability_rejects_overlap():
    data = Dataset(["a"], np.array([[0]]))
    with pytest.raises(ValueError, match="both"):
        weighted_probability(data, all_ones_weights(1), {0: 1}, {0: 0})
