"""scene tests: ROI max pooling, channel sums, generation, serialization."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from unitprune.errors import ContractViolation, FormatError
from unitprune.scene import (
    FeatureMap,
    Roi,
    Scene,
    channel_sums,
    gen_scene,
    load_scene,
    roi_pool,
    save_scene,
)


def ref_roi_pool(data, roi, pool_h, pool_w):
    """Reference pooling: enumerate every cell's span and take the max by hand.

    Spans follow the floor-divided boundary rule with clamping for regions
    smaller than the grid, mirroring the documented cell partition.
    """
    c, _, _ = data.shape
    rh, rw = roi.y1 - roi.y0, roi.x1 - roi.x0

    def spans(extent, cells):
        out = []
        for i in range(cells):
            lo = min(i * extent // cells, extent - 1)
            hi = (i + 1) * extent // cells
            if hi <= lo:
                hi = lo + 1
            out.append((lo, hi))
        return out

    out = []
    for ch in range(c):
        for ylo, yhi in spans(rh, pool_h):
            for xlo, xhi in spans(rw, pool_w):
                best = None
                for y in range(ylo, yhi):
                    for x in range(xlo, xhi):
                        v = data[ch, roi.y0 + y, roi.x0 + x]
                        best = v if best is None or v > best else best
                out.append(best)
    return np.array(out)


def one_channel(rows):
    return FeatureMap(np.array([rows], dtype=float))


class TestRoiPool:
    def test_global_max(self):
        fm = one_channel([[1, 2], [3, 4]])
        assert roi_pool(fm, Roi(0, 0, 2, 2), 1, 1).tolist() == [4.0]

    def test_all_zero_channel(self):
        data = np.zeros((2, 3, 3))
        data[1] = 5.0
        fm = FeatureMap(data)
        got = roi_pool(fm, Roi(0, 1, 3, 3), 2, 2)
        assert got[:4].tolist() == [0.0, 0.0, 0.0, 0.0]
        assert got[4:].tolist() == [5.0] * 4

    def test_2x2_partition(self):
        fm = one_channel([[1, 2], [3, 4]])
        assert roi_pool(fm, Roi(0, 0, 2, 2), 2, 2).tolist() == [1.0, 2.0, 3.0, 4.0]

    def test_1x1_roi_pool_1x1_exact_value(self):
        fm = one_channel([[1, 2], [3, 4]])
        assert roi_pool(fm, Roi(1, 0, 2, 1), 1, 1).tolist() == [2.0]

    def test_small_roi_replicates(self):
        fm = one_channel([[1, 2], [3, 4]])
        # a single cell pooled onto 2x2 repeats that cell's value
        assert roi_pool(fm, Roi(0, 1, 1, 2), 2, 2).tolist() == [3.0] * 4

    def test_channel_major_flatten(self):
        data = np.arange(8.0).reshape(2, 2, 2)
        fm = FeatureMap(data)
        got = roi_pool(fm, Roi(0, 0, 2, 2), 2, 2)
        assert got.tolist() == data.reshape(-1).tolist()

    def test_invalid_roi_rejected(self):
        fm = one_channel([[1, 2], [3, 4]])
        with pytest.raises(ContractViolation):
            roi_pool(fm, Roi(0, 0, 3, 1), 1, 1)

    def test_matches_reference(self):
        rng = np.random.default_rng(12)
        data = rng.uniform(0, 1, size=(3, 9, 11))
        data[rng.uniform(size=data.shape) < 0.5] = 0.0
        fm = FeatureMap(data)
        for x0, y0, x1, y1, ph, pw in [
            (0, 0, 11, 9, 3, 3),
            (2, 1, 5, 8, 4, 2),
            (10, 8, 11, 9, 2, 3),
            (3, 3, 4, 4, 1, 1),
        ]:
            roi = Roi(x0, y0, x1, y1)
            got = roi_pool(fm, roi, ph, pw)
            want = ref_roi_pool(data, roi, ph, pw)
            assert got.tobytes() == want.tobytes()

    @settings(deadline=None, max_examples=100)
    @given(st.integers(0, 2**32 - 1))
    def test_bounds_and_subset_property(self, seed):
        rng = np.random.default_rng(seed)
        c, h, w = int(rng.integers(1, 4)), int(rng.integers(1, 7)), int(rng.integers(1, 7))
        sc = gen_scene(
            c, h, w,
            zero_channels=int(rng.integers(0, c + 1)),
            n_rois=4,
            pool_h=int(rng.integers(1, 4)),
            pool_w=int(rng.integers(1, 4)),
            seed=seed,
        )
        sums = channel_sums(sc.fmap)
        ch_max = sc.fmap.data.max(axis=(1, 2))
        cells = sc.pool_h * sc.pool_w
        for roi in sc.rois:
            pooled = roi_pool(sc.fmap, roi, sc.pool_h, sc.pool_w)
            assert (pooled >= 0.0).all()
            for ch in range(c):
                block = pooled[ch * cells : (ch + 1) * cells]
                assert (block <= ch_max[ch]).all()
                if sums[ch] == 0.0:
                    # zero-sum channel can never contribute to any region
                    assert (block == 0.0).all()
                    assert block.tobytes() == np.zeros(cells).tobytes()


class TestChannelSums:
    def test_two_channels(self):
        data = np.zeros((2, 2, 2))
        data[1] = [[1, 2], [3, 4]]
        assert channel_sums(FeatureMap(data)).tolist() == [0.0, 10.0]

    def test_all_zero(self):
        assert channel_sums(FeatureMap(np.zeros((3, 2, 2)))).tolist() == [0.0] * 3

    def test_singleton(self):
        assert channel_sums(FeatureMap(np.full((1, 1, 1), 5.0))).tolist() == [5.0]


class TestFeatureMap:
    def test_rejects_negative(self):
        with pytest.raises(ContractViolation):
            FeatureMap(np.array([[[-1.0]]]))

    def test_rejects_wrong_rank(self):
        with pytest.raises(ContractViolation):
            FeatureMap(np.zeros((2, 2)))

    def test_read_only(self):
        fm = FeatureMap(np.zeros((1, 1, 1)))
        with pytest.raises(ValueError):
            fm.data[0, 0, 0] = 1.0


class TestRoi:
    def test_degenerate_rejected(self):
        with pytest.raises(ContractViolation):
            Roi(2, 0, 2, 1)
        with pytest.raises(ContractViolation):
            Roi(-1, 0, 1, 1)

    def test_scene_rejects_out_of_bounds_roi(self):
        fm = FeatureMap(np.zeros((1, 2, 2)))
        with pytest.raises(ContractViolation):
            Scene(fm, (Roi(0, 0, 3, 1),), 1, 1)


class TestGenScene:
    def test_determinism(self):
        a = save_scene(gen_scene(6, 5, 4, zero_channels=2, n_rois=7, seed=3))
        b = save_scene(gen_scene(6, 5, 4, zero_channels=2, n_rois=7, seed=3))
        assert a == b

    def test_zero_channel_count_exact(self):
        sc = gen_scene(64, 8, 8, zero_channels=30, n_rois=0, seed=1)
        sums = channel_sums(sc.fmap)
        assert int((sums == 0.0).sum()) == 30

    def test_all_channels_zero(self):
        sc = gen_scene(5, 3, 3, zero_channels=5, seed=0)
        assert channel_sums(sc.fmap).tolist() == [0.0] * 5

    def test_live_channels_have_support(self):
        # every non-zeroed channel keeps at least one positive entry
        for seed in range(10):
            sc = gen_scene(12, 2, 2, zero_channels=4, seed=seed)
            sums = channel_sums(sc.fmap)
            assert int((sums == 0.0).sum()) == 4

    def test_rois_valid_and_counted(self):
        sc = gen_scene(2, 6, 9, n_rois=50, seed=5)
        assert len(sc.rois) == 50
        for r in sc.rois:
            assert 0 <= r.x0 < r.x1 <= 9
            assert 0 <= r.y0 < r.y1 <= 6

    def test_bad_args(self):
        with pytest.raises(ContractViolation):
            gen_scene(4, 2, 2, zero_channels=5)
        with pytest.raises(ContractViolation):
            gen_scene(0, 2, 2)
        with pytest.raises(ContractViolation):
            gen_scene(2, 2, 2, n_rois=-1)


class TestSceneSerialization:
    def test_round_trip_bytes(self):
        sc = gen_scene(3, 4, 5, zero_channels=1, n_rois=6, pool_h=2, pool_w=3, seed=2)
        blob = save_scene(sc)
        assert save_scene(load_scene(blob)) == blob

    def test_round_trip_preserves_geometry(self):
        sc = load_scene(save_scene(gen_scene(2, 3, 3, n_rois=2, pool_h=4, pool_w=5, seed=1)))
        assert (sc.fmap.channels, sc.fmap.height, sc.fmap.width) == (2, 3, 3)
        assert (sc.pool_h, sc.pool_w) == (4, 5)
        assert len(sc.rois) == 2

    def test_data_length_mismatch(self):
        doc = '{"version": 1, "C": 1, "H": 2, "W": 2, "pool_h": 1, "pool_w": 1, "data": [1, 2, 3], "rois": []}'
        with pytest.raises(FormatError, match="expected 4"):
            load_scene(doc)

    def test_negative_entry_rejected(self):
        doc = '{"version": 1, "C": 1, "H": 1, "W": 1, "pool_h": 1, "pool_w": 1, "data": [-1.0], "rois": []}'
        with pytest.raises(FormatError):
            load_scene(doc)

    def test_bad_roi_rejected(self):
        doc = '{"version": 1, "C": 1, "H": 1, "W": 1, "pool_h": 1, "pool_w": 1, "data": [1.0], "rois": [[0, 0, 2, 1]]}'
        with pytest.raises(FormatError, match="roi"):
            load_scene(doc)
        doc2 = doc.replace("[[0, 0, 2, 1]]", "[[1, 0, 0, 1]]")
        with pytest.raises(FormatError, match="roi 0"):
            load_scene(doc2)

    def test_truncated(self):
        blob = save_scene(gen_scene(2, 2, 2, seed=0))
        with pytest.raises(FormatError):
            load_scene(blob[:30])
