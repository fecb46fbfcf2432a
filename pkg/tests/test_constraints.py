import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from layoutopt import (
    Constraint,
    ConstraintSet,
    ParseError,
    ValidationError,
    eval_all,
    eval_constraint,
    layout_from_array,
    load_constraints,
    relations_from_layout,
    save_constraints,
)
from layoutopt.constraints import constraint_set_from_dict

from oracles import finite_difference_gradient


def make_layout(rows, labels=None):
    labels = labels if labels is not None else [0] * len(rows)
    return layout_from_array(np.array(rows, dtype=float), labels)


def box(xc, yc, w, h):
    return [xc, yc, w, h]


def random_layout(rng, n):
    return make_layout(np.column_stack([
        rng.uniform(0.1, 0.9, n),
        rng.uniform(0.1, 0.9, n),
        rng.uniform(0.05, 0.5, n),
        rng.uniform(0.05, 0.5, n),
    ]), labels=rng.integers(0, 3, n).tolist())


class TestConstraintValidation:
    def test_relational_needs_distinct_indices(self):
        with pytest.raises(ValidationError):
            Constraint("loc-above", subject=1, object=1)

    def test_global_kinds_take_no_indices(self):
        with pytest.raises(ValidationError):
            Constraint("alignment", subject=0)
        Constraint("alignment")
        Constraint("non-overlap")

    def test_canvas_needs_region_no_object(self):
        with pytest.raises(ValidationError):
            Constraint("canvas-region", subject=0)
        with pytest.raises(ValidationError):
            Constraint("canvas-region", subject=0, object=1, region="top")
        Constraint("canvas-region", subject=0, region="middle")

    def test_unknown_kind_rejected(self):
        with pytest.raises(ValidationError):
            Constraint("loc-under", subject=0, object=1)

    def test_index_out_of_range_at_eval(self):
        lay = make_layout([box(0.5, 0.5, 0.2, 0.2)])
        with pytest.raises(ValidationError):
            eval_constraint(Constraint("loc-above", subject=0, object=3), lay)


class TestSizeCosts:
    def test_larger_satisfied_hand_computed(self):
        # areas: subject 0.12, object 0.10, gamma 0.1 -> max(0.11 - 0.12, 0) = 0
        lay = make_layout([box(0.3, 0.3, 0.4, 0.3), box(0.7, 0.7, 0.5, 0.2)])
        c = Constraint("size-larger", subject=0, object=1)
        assert eval_constraint(c, lay) == pytest.approx(0.0, abs=1e-12)

    def test_larger_equal_areas_hand_computed(self):
        # equal areas 0.10 -> max(1.1 * 0.10 - 0.10, 0) = 0.01
        lay = make_layout([box(0.3, 0.3, 0.5, 0.2), box(0.7, 0.7, 0.4, 0.25)])
        c = Constraint("size-larger", subject=0, object=1)
        assert eval_constraint(c, lay) == pytest.approx(0.01, abs=1e-12)

    def test_smaller_mirrors_larger(self):
        lay = make_layout([box(0.3, 0.3, 0.2, 0.2), box(0.7, 0.7, 0.5, 0.5)])
        small = eval_constraint(Constraint("size-smaller", subject=0, object=1), lay)
        large = eval_constraint(Constraint("size-larger", subject=1, object=0), lay)
        assert small == pytest.approx(large) == 0.0

    def test_equal_cost_zero_within_tolerance(self):
        lay = make_layout([box(0.3, 0.3, 0.4, 0.25), box(0.7, 0.7, 0.5, 0.21)])
        c = Constraint("size-equal", subject=0, object=1)
        assert eval_constraint(c, lay) == 0.0

    def test_equal_cost_positive_outside_tolerance(self):
        lay = make_layout([box(0.3, 0.3, 0.5, 0.5), box(0.7, 0.7, 0.2, 0.2)])
        c = Constraint("size-equal", subject=0, object=1)
        assert eval_constraint(c, lay) == pytest.approx(0.25 - 1.1 * 0.04, abs=1e-12)

    def test_gamma_override_per_constraint(self):
        lay = make_layout([box(0.3, 0.3, 0.5, 0.2), box(0.7, 0.7, 0.4, 0.25)])
        c = Constraint("size-larger", subject=0, object=1, gamma=0.0)
        assert eval_constraint(c, lay) == 0.0


class TestLocationCosts:
    def test_above_satisfied(self):
        # yB(subject) = 0.3, yT(object) = 0.5
        lay = make_layout([box(0.5, 0.2, 0.2, 0.2), box(0.5, 0.7, 0.2, 0.4)])
        assert eval_constraint(Constraint("loc-above", subject=0, object=1), lay) == 0.0

    def test_above_violated_hand_computed(self):
        # yB(subject) = 0.6, yT(object) = 0.5 -> 0.1
        lay = make_layout([box(0.5, 0.4, 0.2, 0.4), box(0.5, 0.7, 0.2, 0.4)])
        c = Constraint("loc-above", subject=0, object=1)
        assert eval_constraint(c, lay) == pytest.approx(0.1, abs=1e-12)

    def test_below_left_right_reflections(self):
        lay = make_layout([box(0.2, 0.8, 0.2, 0.2), box(0.7, 0.2, 0.2, 0.2)])
        assert eval_constraint(Constraint("loc-below", subject=0, object=1), lay) == 0.0
        assert eval_constraint(Constraint("loc-left", subject=0, object=1), lay) == 0.0
        assert eval_constraint(Constraint("loc-right", subject=1, object=0), lay) == 0.0
        # element 1 is above element 0 by 0.5 gap; asking the opposite costs
        cost = eval_constraint(Constraint("loc-above", subject=0, object=1), lay)
        assert cost == pytest.approx(0.9 - 0.1, abs=1e-12)

    def test_overlap_satisfied_when_touching(self):
        lay = make_layout([box(0.25, 0.5, 0.5, 0.2), box(0.75, 0.5, 0.5, 0.2)])
        assert eval_constraint(Constraint("loc-overlap", subject=0, object=1), lay) == 0.0

    def test_overlap_cost_is_axis_separation(self):
        lay = make_layout([box(0.2, 0.2, 0.2, 0.2), box(0.8, 0.7, 0.2, 0.2)])
        c = Constraint("loc-overlap", subject=0, object=1)
        # x gap: 0.7 - 0.3 = 0.4, y gap: 0.6 - 0.3 = 0.3
        assert eval_constraint(c, lay) == pytest.approx(0.7, abs=1e-12)


class TestCanvasRegion:
    @pytest.mark.parametrize("region,yc,cost", [
        ("top", 0.2, 0.0),
        ("top", 0.5, 0.5 - 1 / 3),
        ("middle", 0.5, 0.0),
        ("middle", 0.9, 0.9 - 2 / 3),
        ("bottom", 0.9, 0.0),
        ("bottom", 0.1, 2 / 3 - 0.1),
    ])
    def test_band_distance(self, region, yc, cost):
        lay = make_layout([box(0.5, yc, 0.2, 0.1)])
        c = Constraint("canvas-region", subject=0, region=region)
        assert eval_constraint(c, lay) == pytest.approx(cost, abs=1e-12)


class TestBeautificationCosts:
    def test_alignment_below_threshold_is_zero(self):
        # score is -log(0.997)/1-ish; tau at default 0.004 absorbs it
        lay = make_layout([box(0.2, 0.3, 0.1, 0.1), box(0.203, 0.7, 0.1, 0.1)])
        c = Constraint("alignment")
        assert eval_constraint(c, lay) == 0.0

    def test_alignment_above_threshold(self):
        lay = make_layout([box(0.2, 0.3, 0.1, 0.1), box(0.25, 0.7, 0.14, 0.12)])
        score = eval_constraint(Constraint("alignment"), lay, tau=0.0)
        assert eval_constraint(Constraint("alignment"), lay) == pytest.approx(
            max(score - 0.004, 0.0)
        )

    def test_non_overlap_equals_overlap_metric(self):
        from layoutopt import overlap_score

        lay = make_layout([box(0.5, 0.5, 0.4, 0.4), box(0.5, 0.5, 0.4, 0.2)])
        assert eval_constraint(Constraint("non-overlap"), lay) == pytest.approx(
            overlap_score(lay)
        )


class TestEvalAll:
    def test_empty_set(self):
        lay = make_layout([box(0.5, 0.5, 0.2, 0.2)])
        assert eval_all(ConstraintSet(), lay).shape == (0,)

    def test_componentwise_matches_individual_calls(self):
        rng = np.random.default_rng(21)
        lay = random_layout(rng, 5)
        cs = ConstraintSet([
            Constraint("alignment"),
            Constraint("non-overlap"),
            Constraint("size-larger", subject=0, object=1),
            Constraint("loc-above", subject=2, object=3),
            Constraint("canvas-region", subject=4, region="top"),
        ])
        vec = eval_all(cs, lay)
        assert vec.shape == (5,)
        for k, c in enumerate(cs):
            assert vec[k] == pytest.approx(
                eval_constraint(c, lay, tau=cs.tau, gamma=cs.gamma), abs=1e-12
            )


SATISFYING = {
    "alignment": ([box(0.25, 0.25, 0.25, 0.25), box(0.25, 0.75, 0.25, 0.25)], {}),
    "non-overlap": ([box(0.2, 0.2, 0.2, 0.2), box(0.7, 0.7, 0.2, 0.2)], {}),
    "size-larger": ([box(0.3, 0.3, 0.5, 0.5), box(0.7, 0.7, 0.2, 0.2)], {"subject": 0, "object": 1}),
    "size-smaller": ([box(0.3, 0.3, 0.2, 0.2), box(0.7, 0.7, 0.5, 0.5)], {"subject": 0, "object": 1}),
    "size-equal": ([box(0.3, 0.3, 0.3, 0.3), box(0.7, 0.7, 0.3, 0.3)], {"subject": 0, "object": 1}),
    "loc-above": ([box(0.5, 0.2, 0.2, 0.2), box(0.5, 0.8, 0.2, 0.2)], {"subject": 0, "object": 1}),
    "loc-below": ([box(0.5, 0.8, 0.2, 0.2), box(0.5, 0.2, 0.2, 0.2)], {"subject": 0, "object": 1}),
    "loc-left": ([box(0.2, 0.5, 0.2, 0.2), box(0.8, 0.5, 0.2, 0.2)], {"subject": 0, "object": 1}),
    "loc-right": ([box(0.8, 0.5, 0.2, 0.2), box(0.2, 0.5, 0.2, 0.2)], {"subject": 0, "object": 1}),
    "loc-overlap": ([box(0.5, 0.5, 0.3, 0.3), box(0.55, 0.55, 0.3, 0.3)], {"subject": 0, "object": 1}),
    "canvas-region": ([box(0.5, 0.2, 0.2, 0.2), box(0.5, 0.8, 0.2, 0.2)], {"subject": 0, "region": "top"}),
}

VIOLATING = {
    "alignment": ([box(0.21, 0.33, 0.17, 0.11), box(0.52, 0.68, 0.23, 0.29)], {}),
    "non-overlap": ([box(0.5, 0.5, 0.4, 0.4), box(0.5, 0.5, 0.4, 0.4)], {}),
    "size-larger": ([box(0.3, 0.3, 0.2, 0.2), box(0.7, 0.7, 0.5, 0.5)], {"subject": 0, "object": 1}),
    "size-smaller": ([box(0.3, 0.3, 0.5, 0.5), box(0.7, 0.7, 0.2, 0.2)], {"subject": 0, "object": 1}),
    "size-equal": ([box(0.3, 0.3, 0.5, 0.5), box(0.7, 0.7, 0.2, 0.2)], {"subject": 0, "object": 1}),
    "loc-above": ([box(0.5, 0.8, 0.2, 0.2), box(0.5, 0.2, 0.2, 0.2)], {"subject": 0, "object": 1}),
    "loc-below": ([box(0.5, 0.2, 0.2, 0.2), box(0.5, 0.8, 0.2, 0.2)], {"subject": 0, "object": 1}),
    "loc-left": ([box(0.8, 0.5, 0.2, 0.2), box(0.2, 0.5, 0.2, 0.2)], {"subject": 0, "object": 1}),
    "loc-right": ([box(0.2, 0.5, 0.2, 0.2), box(0.8, 0.5, 0.2, 0.2)], {"subject": 0, "object": 1}),
    "loc-overlap": ([box(0.2, 0.2, 0.2, 0.2), box(0.8, 0.8, 0.2, 0.2)], {"subject": 0, "object": 1}),
    "canvas-region": ([box(0.5, 0.9, 0.2, 0.2), box(0.5, 0.1, 0.2, 0.2)], {"subject": 0, "region": "top"}),
}


class TestZeroIffSatisfied:
    @pytest.mark.parametrize("kind", sorted(SATISFYING))
    def test_satisfying_layout_costs_zero(self, kind):
        rows, fields = SATISFYING[kind]
        assert eval_constraint(Constraint(kind, **fields), make_layout(rows)) == 0.0

    @pytest.mark.parametrize("kind", sorted(VIOLATING))
    def test_violating_layout_costs_positive(self, kind):
        rows, fields = VIOLATING[kind]
        assert eval_constraint(Constraint(kind, **fields), make_layout(rows)) > 0.0


class TestLipschitzSlopes:
    """Costs are piecewise differentiable with bounded slope away from kinks."""

    @pytest.mark.parametrize("kind,fields,bound", [
        ("size-larger", {"subject": 0, "object": 1}, 1.1),
        ("size-smaller", {"subject": 0, "object": 1}, 1.1),
        ("size-equal", {"subject": 0, "object": 1}, 1.1),
        ("loc-above", {"subject": 0, "object": 1}, 1.0),
        ("loc-below", {"subject": 0, "object": 1}, 1.0),
        ("loc-left", {"subject": 0, "object": 1}, 1.0),
        ("loc-right", {"subject": 0, "object": 1}, 1.0),
        ("loc-overlap", {"subject": 0, "object": 1}, 1.0),
        ("canvas-region", {"subject": 0, "region": "middle"}, 1.0),
    ])
    def test_coordinate_slope_bounded(self, kind, fields, bound):
        from layoutopt.constraints import eval_from_array

        c = Constraint(kind, **fields)
        rng = np.random.default_rng(hash(kind) % 2 ** 32)
        for _ in range(20):
            flat = rng.uniform(0.15, 0.85, 8)

            def cost_of(v):
                return eval_from_array(c, v.reshape(2, 4))

            g = finite_difference_gradient(cost_of, flat)
            # size gradients scale with the partner edge length (< 1 here)
            assert np.all(np.abs(g) <= bound + 1e-6)


class TestRelationsFromLayout:
    def test_fraction_zero_is_empty(self):
        lay = make_layout([box(0.2, 0.2, 0.2, 0.2), box(0.7, 0.7, 0.2, 0.2)])
        assert len(relations_from_layout(lay, 0.0, seed=1)) == 0

    def test_fraction_one_two_elements(self):
        lay = make_layout([box(0.2, 0.2, 0.2, 0.2), box(0.7, 0.7, 0.2, 0.2)])
        cs = relations_from_layout(lay, 1.0, seed=1)
        # one size + one location per pair, one canvas band per element
        assert len(cs) == 4
        assert np.all(eval_all(cs, lay) == 0.0)

    def test_count_for_partial_fraction(self):
        rng = np.random.default_rng(31)
        lay = random_layout(rng, 9)
        total = 2 * (9 * 8 // 2) + 9
        cs = relations_from_layout(lay, 0.1, seed=5)
        assert len(cs) == int(np.ceil(0.1 * total))

    def test_deterministic_under_seed(self):
        rng = np.random.default_rng(32)
        lay = random_layout(rng, 6)
        a = relations_from_layout(lay, 0.3, seed=9)
        b = relations_from_layout(lay, 0.3, seed=9)
        assert a == b
        c = relations_from_layout(lay, 0.3, seed=10)
        assert a != c  # overwhelmingly likely for this instance

    @settings(max_examples=40, deadline=None)
    @given(
        seed=st.integers(min_value=0, max_value=10_000),
        n=st.integers(min_value=1, max_value=9),
        fraction=st.floats(min_value=0.0, max_value=1.0),
    )
    def test_source_layout_always_feasible(self, seed, n, fraction):
        rng = np.random.default_rng(seed)
        lay = random_layout(rng, n)
        cs = relations_from_layout(lay, fraction, seed=seed)
        costs = eval_all(cs, lay)
        assert np.all(costs == 0.0)

    def test_unrelated_element_permutation_keeps_cost(self):
        rng = np.random.default_rng(33)
        lay = random_layout(rng, 5)
        c = Constraint("loc-above", subject=0, object=1)
        base = eval_constraint(c, lay)
        # swap elements 2 and 4, keeping 0 and 1 in place
        perm = [0, 1, 4, 3, 2]
        shuffled = make_layout(lay.boxes_array()[perm], labels=[lay.labels[i] for i in perm])
        assert eval_constraint(c, shuffled) == pytest.approx(base)


class TestConstraintFiles:
    def sample_set(self):
        return ConstraintSet(
            [
                Constraint("alignment"),
                Constraint("size-larger", subject=0, object=1),
                Constraint("canvas-region", subject=1, region="bottom", tau=0.01),
            ],
            tau=0.002,
            gamma=0.15,
        )

    def test_round_trip(self, tmp_path):
        path = tmp_path / "constraints.json"
        save_constraints(self.sample_set(), path)
        assert load_constraints(path) == self.sample_set()

    def test_bare_list_document(self):
        cs = constraint_set_from_dict([
            {"kind": "loc-above", "subject": 0, "object": 1},
        ])
        assert cs.tau == 0.004 and cs.gamma == 0.1 and len(cs) == 1

    def test_unknown_field_rejected(self):
        with pytest.raises(ParseError):
            constraint_set_from_dict([{"kind": "alignment", "weight": 2}])

    def test_malformed_document_rejected(self):
        with pytest.raises(ParseError):
            constraint_set_from_dict("alignment")
