"""Tests for HVDM distances and nearest-neighbour difficulty profiling."""

from __future__ import annotations

import numpy as np
import pytest

from helstrom import (
    AttributeStats,
    DifficultyProfile,
    RawSample,
    categorize,
    classify_point_type,
    hvdm_distance,
    point_types,
)
from helstrom.difficulty import POINT_TYPES, hvdm_matrix
from helstrom.errors import StatsMismatchError, TooFewSamplesError


def plain_stats(n: int) -> AttributeStats:
    """All-numeric stats with mean 0 and sigma 1 for every attribute."""
    return AttributeStats(means=np.zeros(n), stds=np.ones(n),
                          categorical=frozenset(), value_tables={})


class TestAttributeStats:
    def test_fit_uses_population_sigma(self):
        stats = AttributeStats.fit(np.array([[1.0], [3.0]]), [0, 1])
        assert stats.means[0] == 2.0
        assert stats.stds[0] == 1.0  # population, not the sample value sqrt(2)

    def test_fit_ignores_missing_entries(self):
        stats = AttributeStats.fit(np.array([[1.0], [3.0], [np.nan]]), [0, 1, 0])
        assert stats.means[0] == 2.0
        assert stats.stds[0] == 1.0

    def test_fit_builds_class_conditional_tables(self):
        features = np.array([[0.0], [0.0], [1.0], [1.0]])
        stats = AttributeStats.fit(features, [0, 1, 0, 0], categorical=[0])
        assert stats.value_tables[0][0.0] == (0.5, 0.5)
        assert stats.value_tables[0][1.0] == (1.0, 0.0)

    def test_fit_requires_matching_labels(self):
        with pytest.raises(StatsMismatchError):
            AttributeStats.fit(np.zeros((3, 2)), [0, 1])

    def test_rejects_out_of_range_categorical_index(self):
        with pytest.raises(StatsMismatchError):
            AttributeStats(means=np.zeros(2), stds=np.ones(2),
                           categorical=frozenset({5}), value_tables={})

    def test_rejects_table_for_numeric_attribute(self):
        with pytest.raises(StatsMismatchError):
            AttributeStats(means=np.zeros(1), stds=np.ones(1),
                           categorical=frozenset(), value_tables={0: {}})


class TestHvdmDistance:
    def test_hand_computed_numeric(self):
        # components 1.2/4 = 0.3 and 1.6/4 = 0.4, hypotenuse 0.5
        stats = plain_stats(2)
        d = hvdm_distance(np.array([1.2, 0.0]), np.array([0.0, 1.6]), stats)
        assert d == pytest.approx(0.5)

    def test_numeric_component_saturates_at_four_sigma(self):
        stats = plain_stats(1)
        at = hvdm_distance(np.array([0.0]), np.array([4.0]), stats)
        beyond = hvdm_distance(np.array([0.0]), np.array([400.0]), stats)
        assert at == pytest.approx(1.0)
        assert beyond == 1.0

    def test_zero_sigma_is_exact_match_metric(self):
        stats = AttributeStats(means=np.zeros(1), stds=np.zeros(1),
                               categorical=frozenset(), value_tables={})
        assert hvdm_distance(np.array([7.0]), np.array([7.0]), stats) == 0.0
        assert hvdm_distance(np.array([7.0]), np.array([7.1]), stats) == 1.0

    def test_missing_value_contributes_maximum(self):
        stats = plain_stats(2)
        d = hvdm_distance(np.array([np.nan, 0.0]), np.array([0.0, 0.0]), stats)
        assert d == 1.0
        both = hvdm_distance(np.array([np.nan, np.nan]),
                             np.array([0.0, 0.0]), stats)
        assert both == pytest.approx(np.sqrt(2.0))

    def test_hand_computed_categorical(self):
        stats = AttributeStats(
            means=np.zeros(1), stds=np.zeros(1), categorical=frozenset({0}),
            value_tables={0: {1.0: (0.5, 0.5), 2.0: (1.0, 0.0)}},
        )
        d = hvdm_distance(np.array([1.0]), np.array([2.0]), stats)
        assert d == pytest.approx(np.sqrt(0.5))

    def test_unseen_categorical_value_scores_like_missing(self):
        stats = AttributeStats(
            means=np.zeros(1), stds=np.zeros(1), categorical=frozenset({0}),
            value_tables={0: {1.0: (1.0, 0.0)}},
        )
        assert hvdm_distance(np.array([1.0]), np.array([9.0]), stats) == 1.0

    def test_symmetry_and_identity(self, rng):
        stats = plain_stats(3)
        x = rng.standard_normal(3)
        y = rng.standard_normal(3)
        assert hvdm_distance(x, y, stats) == pytest.approx(hvdm_distance(y, x, stats))
        assert hvdm_distance(x, x, stats) == 0.0

    def test_accepts_raw_samples(self):
        stats = plain_stats(2)
        a = RawSample(np.array([1.2, 0.0]), 0)
        b = RawSample(np.array([0.0, 1.6]), 1)
        assert hvdm_distance(a, b, stats) == pytest.approx(0.5)

    def test_dimension_mismatch_rejected(self):
        with pytest.raises(StatsMismatchError):
            hvdm_distance(np.array([1.0]), np.array([1.0, 2.0]), plain_stats(2))


class TestHvdmMatrix:
    def test_matches_scalar_entrywise(self, rng):
        features = rng.standard_normal((8, 3))
        features[1, 0] = np.nan
        features[4, 2] = np.nan
        features[:, 1] = rng.integers(0, 3, size=8).astype(float)
        labels = rng.integers(0, 2, size=8)
        stats = AttributeStats.fit(features, labels, categorical=[1])
        matrix = hvdm_matrix(features, stats)
        for i in range(8):
            for j in range(8):
                expected = hvdm_distance(features[i], features[j], stats)
                assert matrix[i, j] == pytest.approx(expected, abs=1e-12), (i, j)

    def test_shape_mismatch_rejected(self, rng):
        with pytest.raises(StatsMismatchError):
            hvdm_matrix(rng.standard_normal((4, 3)), plain_stats(2))


class TestPointTypes:
    def test_clustered_line_with_far_minority_point(self):
        features = np.array([[0.0], [1.0], [2.0], [3.0], [4.0], [5.0], [100.0]])
        labels = [0, 0, 0, 0, 0, 0, 1]
        assert list(point_types(features, labels)) == ["safe"] * 6 + ["outlier"]

    def test_adjacent_minority_pair_is_rare(self):
        # Each minority point sees its partner plus four majority points.
        features = np.array([[0.0], [1.0], [2.0], [3.0], [4.0], [10.0], [11.0]])
        labels = [0, 0, 0, 0, 0, 1, 1]
        assert list(point_types(features, labels)) == ["safe"] * 5 + ["rare"] * 2

    def test_alternating_line_is_borderline(self):
        features = np.arange(10.0).reshape(-1, 1)
        labels = [0, 1, 0, 1, 0, 1, 0, 1, 0, 1]
        assert list(point_types(features, labels)) == ["borderline"] * 10

    def test_distance_ties_broken_by_smaller_index(self):
        # Point 0 is equidistant from all others; the five smallest
        # indices win, all of which share its class.
        features = np.array([[0.0], [1.0], [1.0], [1.0], [1.0], [1.0], [1.0]])
        labels = [0, 0, 0, 0, 0, 1, 1]
        assert classify_point_type(0, features, labels) == "safe"

    def test_single_point_matches_batch(self, rng):
        features = rng.standard_normal((12, 2))
        labels = rng.integers(0, 2, size=12)
        batch = point_types(features, labels)
        for i in range(12):
            assert classify_point_type(i, features, labels) == batch[i]

    def test_duplicating_every_point_removes_outliers(self):
        features = np.array([[0.0], [1.0], [2.0], [3.0], [4.0], [5.0], [100.0]])
        labels = [0, 0, 0, 0, 0, 0, 1]
        doubled = np.vstack([features, features])
        types = point_types(doubled, labels + labels)
        assert "outlier" not in set(types)

    def test_too_few_points_rejected(self):
        with pytest.raises(TooFewSamplesError):
            point_types(np.zeros((5, 1)), [0, 0, 0, 1, 1])

    def test_index_out_of_range_rejected(self):
        features = np.zeros((6, 1))
        with pytest.raises(IndexError):
            classify_point_type(6, features, [0, 0, 0, 1, 1, 1])


class TestDifficultyProfile:
    def test_from_types_percentages(self):
        profile = DifficultyProfile.from_types(
            ["safe", "safe", "safe", "borderline", "rare", "outlier"])
        assert profile.safe_pct == pytest.approx(50.0)
        assert profile.borderline_pct == pytest.approx(100.0 / 6.0)
        assert profile.rare_pct == pytest.approx(100.0 / 6.0)
        assert profile.outlier_pct == pytest.approx(100.0 / 6.0)
        assert sum(profile.as_tuple()) == pytest.approx(100.0)

    def test_rejects_bad_sum(self):
        with pytest.raises(ValueError):
            DifficultyProfile(50.0, 10.0, 10.0, 10.0)

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            DifficultyProfile(120.0, -20.0, 0.0, 0.0)

    def test_from_types_rejects_empty(self):
        with pytest.raises(TooFewSamplesError):
            DifficultyProfile.from_types([])

    def test_from_types_rejects_unknown_type(self):
        with pytest.raises(KeyError):
            DifficultyProfile.from_types(["safe", "weird"])

    def test_point_type_names(self):
        assert POINT_TYPES == ("safe", "borderline", "rare", "outlier")


class TestCategorize:
    def test_profile_matches_types(self):
        features = np.array([[0.0], [1.0], [2.0], [3.0], [4.0], [5.0], [100.0]])
        labels = [0, 0, 0, 0, 0, 0, 1]
        profile, types = categorize(features, labels)
        assert profile == DifficultyProfile.from_types(list(types))
        assert profile.safe_pct == pytest.approx(600.0 / 7.0)
        assert profile.outlier_pct == pytest.approx(100.0 / 7.0)

    def test_two_tight_clusters_are_all_safe(self, rng):
        a = rng.normal(0.0, 0.01, size=(10, 2))
        b = rng.normal(5.0, 0.01, size=(10, 2))
        features = np.vstack([a, b])
        labels = [0] * 10 + [1] * 10
        profile, _ = categorize(features, labels)
        assert profile.safe_pct == 100.0

    def test_categorical_flag_changes_distances(self):
        # With a 0/1 column treated as categorical and perfectly class
        # correlated, the two clusters separate even though numerically
        # the values are close next to the second attribute's scale.
        features = np.column_stack([
            np.array([0.0] * 6 + [1.0] * 6),
            np.zeros(12),
        ])
        labels = [0] * 6 + [1] * 6
        profile_cat, _ = categorize(features, labels, categorical=[0])
        assert profile_cat.safe_pct == 100.0
