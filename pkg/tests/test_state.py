"""
Tests for the flock state types: FlockState, Hierarchy and WeightMatrix.
"""

import numpy as np
import pytest

from hlflock.utils.core.state import FlockState, Frame, Hierarchy, WeightMatrix
from hlflock.utils.errors import DimensionError


class TestFlockState:
    def test_arrays_are_read_only(self):
        state = FlockState(t=0, x=np.zeros((2, 3)), v=np.ones((2, 3)))
        with pytest.raises(ValueError):
            state.x[0, 0] = 1.0

    def test_input_is_copied(self):
        x = np.zeros((2, 3))
        state = FlockState(t=0, x=x, v=np.zeros((2, 3)))
        x[1, 0] = 5.0
        assert state.x[1, 0] == 0.0

    @pytest.mark.parametrize(
        "x, v",
        [
            (np.zeros((2, 2)), np.zeros((2, 2))),
            (np.zeros((2, 3)), np.zeros((3, 3))),
            (np.zeros((1, 3)), np.zeros((1, 3))),
            (np.array([[0.0, 0.0, 0.0], [np.nan, 0.0, 0.0]]), np.zeros((2, 3))),
        ],
    )
    def test_rejects_bad_shapes_and_values(self, x, v):
        with pytest.raises(DimensionError):
            FlockState(t=0, x=x, v=v)

    def test_rejects_negative_step(self):
        with pytest.raises(DimensionError):
            FlockState(t=-1, x=np.zeros((2, 3)), v=np.zeros((2, 3)))

    def test_relative_frame_needs_bird_one_at_origin(self):
        x = np.array([[1.0, 0.0, 0.0], [0.0, 0.0, 0.0]])
        with pytest.raises(DimensionError, match="relative"):
            FlockState(t=0, x=x, v=np.zeros((2, 3)), frame=Frame.RELATIVE)

    def test_frame_accepts_string(self):
        state = FlockState(t=0, x=np.zeros((2, 3)), v=np.zeros((2, 3)), frame="relative")
        assert state.frame is Frame.RELATIVE

    def test_one_based_accessors(self):
        v = np.array([[0.0, 0.0, 0.0], [1.0, 2.0, 3.0]])
        state = FlockState(t=0, x=np.zeros((2, 3)), v=v)
        assert state.k == 2
        np.testing.assert_array_equal(state.velocity(2), [1.0, 2.0, 3.0])


class TestHierarchy:
    def test_chain_and_star(self):
        assert Hierarchy.chain(4).leaders == ((), (1,), (2,), (3,))
        assert Hierarchy.star(4).leaders == ((), (1,), (1,), (1,))

    def test_mask_matches_leader_sets(self):
        hier = Hierarchy.from_mapping(3, {2: [1], 3: [1, 2]})
        expected = np.array([[0, 0, 0], [1, 0, 0], [1, 1, 0]], dtype=bool)
        np.testing.assert_array_equal(hier.mask, expected)

    def test_mapping_round_trip(self):
        mapping = {2: [1], 3: [1, 2]}
        assert Hierarchy.from_mapping(3, mapping).as_mapping() == mapping

    def test_mapping_rejects_bird_beyond_flock(self):
        with pytest.raises(DimensionError, match="bird 7"):
            Hierarchy.from_mapping(2, {2: [1], 7: [1, 2, 3]})

    def test_wrong_number_of_rows(self):
        with pytest.raises(DimensionError):
            Hierarchy(k=3, leaders=((), (1,)))


class TestWeightMatrix:
    def test_problems_none_for_valid(self):
        hier = Hierarchy.chain(3)
        a = np.zeros((3, 3))
        a[1, 0] = 0.5
        a[2, 1] = 1.0
        assert WeightMatrix(t=1, a=a).problems(hier) is None

    def test_off_support_weight_is_reported(self):
        a = np.zeros((3, 3))
        a[2, 0] = 0.5
        problem = WeightMatrix(t=1, a=a).problems(Hierarchy.chain(3))
        assert "a_31" in problem

    @pytest.mark.parametrize("value", [-0.1, 1.5, np.inf])
    def test_out_of_range_weight_is_reported(self, value):
        a = np.zeros((2, 2))
        a[1, 0] = value
        assert WeightMatrix(t=1, a=a).problems(Hierarchy.chain(2)) is not None

    def test_size_mismatch_is_reported(self):
        assert WeightMatrix(t=1, a=np.zeros((2, 2))).problems(Hierarchy.chain(3)) is not None

    def test_rejects_non_square(self):
        with pytest.raises(DimensionError):
            WeightMatrix(t=1, a=np.zeros((2, 3)))
