import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from layoutopt import (
    FeatureSet,
    ValidationError,
    alignment_score,
    fid,
    layout_from_array,
    layout_similarity,
    max_iou,
    overlap_score,
    solve_assignment,
    violation_rate,
)
from layoutopt.constraints import Constraint, ConstraintSet

from oracles import (
    alignment_scalar,
    brute_assignment,
    brute_layout_similarity,
    brute_max_iou,
    overlap_scalar,
)


def make_layout(rows, labels=None):
    labels = labels if labels is not None else [0] * len(rows)
    return layout_from_array(np.array(rows, dtype=float), labels)


def random_boxes(rng, n):
    return np.column_stack([
        rng.uniform(0.1, 0.9, n),
        rng.uniform(0.1, 0.9, n),
        rng.uniform(0.05, 0.5, n),
        rng.uniform(0.05, 0.5, n),
    ])


class TestAlignment:
    def test_single_element_is_zero(self):
        assert alignment_score(make_layout([[0.5, 0.5, 0.2, 0.2]])) == 0.0

    def test_shared_left_edge_is_zero(self):
        # binary-exact coordinates: both have x_left = 0.25 exactly
        lay = make_layout([[0.375, 0.25, 0.25, 0.125], [0.5, 0.75, 0.5, 0.25]])
        assert alignment_score(lay) == 0.0

    def test_hand_computed_small_gap(self):
        # closest line pair is the centers' x gap of 0.01 for both elements
        lay = make_layout([
            [0.20, 0.30, 0.1, 0.1],
            [0.21, 0.70, 0.3, 0.2],
        ])
        assert alignment_score(lay) == pytest.approx(-math.log(0.99), rel=1e-12)

    def test_matches_scalar_oracle(self):
        rng = np.random.default_rng(11)
        for n in range(2, 8):
            boxes = random_boxes(rng, n)
            lay = make_layout(boxes)
            assert alignment_score(lay) == pytest.approx(alignment_scalar(boxes), rel=1e-12)

    def test_permutation_invariant(self):
        rng = np.random.default_rng(3)
        boxes = random_boxes(rng, 6)
        lay = make_layout(boxes)
        shuffled = make_layout(boxes[rng.permutation(6)])
        assert alignment_score(lay) == pytest.approx(alignment_score(shuffled), rel=1e-12)

    def test_translation_invariant_with_stable_minima(self):
        base = np.array([
            [0.20, 0.30, 0.10, 0.10],
            [0.23, 0.62, 0.12, 0.14],
            [0.55, 0.41, 0.08, 0.06],
        ])
        shifted = base.copy()
        shifted[:, :2] += 0.05
        assert alignment_score(make_layout(base)) == pytest.approx(
            alignment_score(make_layout(shifted)), rel=1e-9
        )


class TestOverlap:
    def test_disjoint_is_zero(self):
        lay = make_layout([[0.2, 0.2, 0.2, 0.2], [0.7, 0.7, 0.2, 0.2]])
        assert overlap_score(lay) == 0.0

    def test_identical_pair_is_one(self):
        lay = make_layout([[0.5, 0.5, 0.4, 0.4], [0.5, 0.5, 0.4, 0.4]])
        assert overlap_score(lay) == pytest.approx(1.0)

    def test_half_area_containment(self):
        lay = make_layout([[0.5, 0.5, 0.4, 0.4], [0.5, 0.5, 0.4, 0.2]])
        assert overlap_score(lay) == pytest.approx(0.75)

    def test_zero_area_contributes_nothing(self):
        lay = make_layout([[0.5, 0.5, 0.0, 0.4], [0.5, 0.5, 0.4, 0.4]])
        # zero-area element owns no ratio; the solid one sees zero intersection area
        assert overlap_score(lay) == 0.0

    def test_tiling_layout_is_zero(self):
        lay = make_layout([
            [0.25, 0.25, 0.5, 0.5],
            [0.75, 0.25, 0.5, 0.5],
            [0.25, 0.75, 0.5, 0.5],
            [0.75, 0.75, 0.5, 0.5],
        ])
        assert overlap_score(lay) == 0.0

    def test_matches_scalar_oracle(self):
        rng = np.random.default_rng(12)
        for n in range(2, 8):
            boxes = random_boxes(rng, n)
            assert overlap_score(make_layout(boxes)) == pytest.approx(
                overlap_scalar(boxes), rel=1e-12
            )

    def test_permutation_invariant(self):
        rng = np.random.default_rng(4)
        boxes = random_boxes(rng, 5)
        shuffled = boxes[rng.permutation(5)]
        assert overlap_score(make_layout(boxes)) == pytest.approx(
            overlap_score(make_layout(shuffled)), rel=1e-12
        )


class TestAssignment:
    def test_dominant_diagonal(self):
        assert list(solve_assignment(np.eye(4), maximize=True)) == [0, 1, 2, 3]

    def test_two_by_two_swap(self):
        perm = solve_assignment(np.array([[0.1, 0.9], [0.8, 0.2]]), maximize=True)
        assert list(perm) == [1, 0]

    def test_all_equal_total(self):
        scores = np.full((3, 3), 0.7)
        perm = solve_assignment(scores, maximize=True)
        assert scores[np.arange(3), perm].sum() == pytest.approx(2.1)

    def test_non_finite_rejected(self):
        with pytest.raises(ValidationError):
            solve_assignment(np.array([[np.nan, 1.0], [1.0, 0.0]]))

    def test_non_square_rejected(self):
        with pytest.raises(ValidationError):
            solve_assignment(np.zeros((2, 3)))

    @settings(max_examples=60, deadline=None)
    @given(
        n=st.integers(min_value=1, max_value=5),
        seed=st.integers(min_value=0, max_value=10_000),
        maximize=st.booleans(),
    )
    def test_matches_brute_force_total(self, n, seed, maximize):
        scores = np.random.default_rng(seed).uniform(size=(n, n))
        perm = solve_assignment(scores, maximize=maximize)
        total = float(scores[np.arange(n), perm].sum())
        _, best = brute_assignment(scores, maximize)
        assert total == pytest.approx(best, abs=1e-12)


class TestLayoutSimilarity:
    def test_identity(self):
        rng = np.random.default_rng(5)
        lay = make_layout(random_boxes(rng, 4), labels=[0, 1, 1, 2])
        assert layout_similarity(lay, lay) == pytest.approx(1.0)

    def test_all_disjoint_is_zero(self):
        a = make_layout([[0.1, 0.1, 0.1, 0.1], [0.3, 0.1, 0.1, 0.1]], labels=[0, 0])
        b = make_layout([[0.8, 0.8, 0.1, 0.1], [0.6, 0.8, 0.1, 0.1]], labels=[0, 0])
        assert layout_similarity(a, b) == 0.0

    def test_label_mismatch_rejected(self):
        a = make_layout([[0.5, 0.5, 0.1, 0.1]], labels=[0])
        b = make_layout([[0.5, 0.5, 0.1, 0.1]], labels=[1])
        with pytest.raises(ValidationError):
            layout_similarity(a, b)

    def test_three_same_label_matches_brute_force(self):
        rng = np.random.default_rng(6)
        boxes_a, boxes_b = random_boxes(rng, 3), random_boxes(rng, 3)
        a, b = make_layout(boxes_a), make_layout(boxes_b)
        expected = brute_layout_similarity(boxes_a, [0] * 3, boxes_b, [0] * 3)
        assert layout_similarity(a, b) == pytest.approx(expected, abs=1e-12)

    @settings(max_examples=50, deadline=None)
    @given(
        n=st.integers(min_value=1, max_value=6),
        seed=st.integers(min_value=0, max_value=10_000),
    )
    def test_matches_brute_force(self, n, seed):
        rng = np.random.default_rng(seed)
        labels = rng.integers(0, 3, n).tolist()
        boxes_a, boxes_b = random_boxes(rng, n), random_boxes(rng, n)
        a = make_layout(boxes_a, labels)
        b = make_layout(boxes_b, list(reversed(labels)))
        expected = brute_layout_similarity(boxes_a, labels, boxes_b, list(reversed(labels)))
        assert layout_similarity(a, b) == pytest.approx(expected, abs=1e-12)


class TestMaxIou:
    def test_identity_collections(self):
        rng = np.random.default_rng(8)
        col = [make_layout(random_boxes(rng, 3), labels=[0, 1, 1]) for _ in range(4)]
        assert max_iou(col, list(col)) == pytest.approx(1.0)

    def test_no_shared_label_multisets(self):
        a = [make_layout([[0.5, 0.5, 0.2, 0.2]], labels=[0])]
        b = [make_layout([[0.5, 0.5, 0.2, 0.2]], labels=[1])]
        assert max_iou(a, b) == 0.0

    def test_size_mismatch_rejected(self):
        lay = make_layout([[0.5, 0.5, 0.2, 0.2]])
        with pytest.raises(ValidationError):
            max_iou([lay], [lay, lay])

    @settings(max_examples=30, deadline=None)
    @given(seed=st.integers(min_value=0, max_value=10_000))
    def test_mixed_instance_matches_brute_force(self, seed):
        rng = np.random.default_rng(seed)
        m = 4
        gen, ref = [], []
        gen_raw, ref_raw = [], []
        for _ in range(m):
            n = int(rng.integers(1, 4))
            labels = rng.integers(0, 2, n).tolist()
            ga, rb = random_boxes(rng, n), random_boxes(rng, n)
            gen.append(make_layout(ga, labels))
            ref.append(make_layout(rb, labels))
            gen_raw.append((ga, labels))
            ref_raw.append((rb, labels))
        assert max_iou(gen, ref) == pytest.approx(brute_max_iou(gen_raw, ref_raw), abs=1e-12)


class TestFid:
    def test_identical_sets_near_zero(self):
        rng = np.random.default_rng(9)
        x = FeatureSet(rng.normal(size=(64, 6)))
        assert fid(x, x) <= 1e-6

    def test_symmetry(self):
        rng = np.random.default_rng(10)
        x = FeatureSet(rng.normal(size=(50, 4)))
        y = FeatureSet(rng.normal(loc=0.3, size=(60, 4)))
        assert fid(x, y) == pytest.approx(fid(y, x), abs=1e-6)

    def test_zero_variance_mean_shift(self):
        x = FeatureSet(np.zeros((10, 1)))
        y = FeatureSet(np.ones((10, 1)))
        assert fid(x, y) == pytest.approx(1.0, abs=1e-12)

    def test_gaussian_scale_gap(self):
        rng = np.random.default_rng(1234)
        x = FeatureSet(rng.normal(0.0, 1.0, size=(100_000, 1)))
        y = FeatureSet(rng.normal(0.0, 2.0, size=(100_000, 1)))
        assert fid(x, y) == pytest.approx(1.0, abs=0.05)

    def test_dimension_mismatch_rejected(self):
        x = FeatureSet(np.zeros((5, 2)))
        y = FeatureSet(np.zeros((5, 3)))
        with pytest.raises(ValidationError):
            fid(x, y)

    def test_single_row_rejected(self):
        with pytest.raises(ValidationError):
            FeatureSet(np.zeros((1, 3)))

    def test_diagonal_case_matches_closed_form(self):
        # independent coordinates: fid = sum of per-coordinate (mu, sigma) gaps
        rng = np.random.default_rng(77)
        a = rng.normal(0.0, 1.0, size=(200_000, 2))
        b = np.column_stack([
            rng.normal(1.0, 1.0, 200_000),
            rng.normal(0.0, 3.0, 200_000),
        ])
        expected = 1.0 + (1.0 - 3.0) ** 2
        assert fid(FeatureSet(a), FeatureSet(b)) == pytest.approx(expected, rel=0.02)


class TestViolationRate:
    def lay(self):
        return make_layout([[0.2, 0.2, 0.2, 0.2], [0.7, 0.7, 0.2, 0.2]], labels=[0, 1])

    def test_all_satisfied(self):
        cs = ConstraintSet([Constraint("loc-above", subject=0, object=1)])
        assert violation_rate([self.lay()], [cs]) == 0.0

    def test_one_in_ten(self):
        sat = Constraint("loc-above", subject=0, object=1)
        bad = Constraint("loc-below", subject=0, object=1)
        sets = [ConstraintSet([sat] * 4 + [bad]), ConstraintSet([sat] * 5)]
        assert violation_rate([self.lay(), self.lay()], sets) == pytest.approx(10.0)

    def test_empty_total_is_zero(self):
        assert violation_rate([self.lay()], [ConstraintSet()]) == 0.0

    def test_arity_mismatch_rejected(self):
        with pytest.raises(ValidationError):
            violation_rate([self.lay()], [])
