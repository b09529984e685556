import numpy as np
import pytest

from pvtsoft.numerics import farthest_point_indices, stream


class TestStream:
    def test_same_address_same_sequence(self):
        a = stream(42, 3).random(10)
        b = stream(42, 3).random(10)
        np.testing.assert_array_equal(a, b)

    def test_distinct_ids_differ(self):
        a = stream(42, 0).random(10)
        b = stream(42, 1).random(10)
        assert not np.array_equal(a, b)

    def test_multi_level_addresses(self):
        a = stream(7, 2, 5).random(4)
        b = stream(7, 2, 5).random(4)
        c = stream(7, 5, 2).random(4)
        np.testing.assert_array_equal(a, b)
        assert not np.array_equal(a, c)

    def test_negative_seed_rejected(self):
        with pytest.raises(ValueError):
            stream(-1)


class TestFarthestPoint:
    def test_deterministic(self):
        pts = np.random.default_rng(0).normal(size=(30, 4))
        i1 = farthest_point_indices(pts, 5, stream(9))
        i2 = farthest_point_indices(pts, 5, stream(9))
        np.testing.assert_array_equal(i1, i2)

    def test_full_count_covers_all_rows(self):
        pts = np.random.default_rng(1).normal(size=(12, 2))
        idx = farthest_point_indices(pts, 12, stream(0))
        assert sorted(idx) == list(range(12))

    def test_spreads_out(self):
        # two well-separated blobs: the first two picks land in different blobs
        rng = np.random.default_rng(2)
        pts = np.vstack([rng.normal(0, 0.1, size=(10, 2)), rng.normal(100, 0.1, size=(10, 2))])
        idx = farthest_point_indices(pts, 2, stream(3))
        assert (idx[0] < 10) != (idx[1] < 10)

    def test_count_bounds(self):
        pts = np.zeros((3, 2))
        with pytest.raises(ValueError):
            farthest_point_indices(pts, 4, stream(0))
        with pytest.raises(ValueError):
            farthest_point_indices(pts, 0, stream(0))
