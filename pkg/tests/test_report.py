"""report tests: deviation measurement over collections and threshold sweeps."""

import math

import numpy as np
import pytest

from unitprune.errors import ContractViolation
from unitprune.model import (
    ActivationKind,
    DenseLayer,
    Network,
    gen_network,
    output,
)
from unitprune.prune import PruneConfig, prune_input_channels, prune_output_topn
from unitprune.report import (
    SWEEP_CSV_HEADER,
    DeviationReport,
    compare_outputs,
    deviation_json,
    sweep,
    sweep_csv,
)
from unitprune.scene import channel_sums, gen_scene, roi_pool


def id_net(w, b):
    layer = DenseLayer(np.array(w, dtype=float), np.array(b, dtype=float), ActivationKind.IDENTITY)
    return Network((layer,))


def pooled_examples(scene):
    return [roi_pool(scene.fmap, r, scene.pool_h, scene.pool_w) for r in scene.rois]


class TestCompareOutputs:
    def test_identical_networks(self):
        net = gen_network([4, 6, 3], seed=9)
        xs = [np.random.default_rng(i).uniform(-1, 1, size=4) for i in range(5)]
        rep = compare_outputs(net, net, xs)
        assert rep.n_examples == 5
        assert rep.max_abs == 0.0 and rep.mean_abs == 0.0
        assert rep.argmax_agreement == 1.0
        assert rep.bound is None

    def test_exact_zero_scene_pruning(self):
        sc = gen_scene(10, 5, 5, zero_channels=4, n_rois=30, pool_h=2, pool_w=2, seed=7)
        net = gen_network([40, 8, 5], seed=2)
        pruned, prep = prune_input_channels(
            net, channel_sums(sc.fmap), 2, 2, PruneConfig.exact_zero()
        )
        rep = compare_outputs(
            net,
            pruned,
            pooled_examples(sc),
            input_keep=prep.selections[0].kept,
            bound=prep.deviation_bound,
        )
        assert rep.max_abs == 0.0 and rep.mean_abs == 0.0
        assert rep.argmax_agreement == 1.0
        assert rep.bound == 0.0

    def test_topn_excluding_a_winner_counts_against(self):
        net = id_net([[1, 0], [0, 1], [0, 0]], [0, 0, 0])
        pruned, lm, _ = prune_output_topn(net, [0.9, 0.1, 0.5], 1)
        assert lm.indices == (0,)
        xs = [np.array([0.0, 1.0]), np.array([1.0, 0.0])]  # winners 1 then 0
        rep = compare_outputs(net, pruned, xs, label_map=lm)
        assert rep.argmax_agreement == 0.5
        assert rep.max_abs == 0.0  # the surviving coordinate itself is untouched

    def test_mean_at_most_max(self):
        sc = gen_scene(6, 4, 4, zero_channels=1, n_rois=20, pool_h=2, pool_w=2, seed=3)
        net = gen_network([24, 7, 4], seed=11)
        sums = channel_sums(sc.fmap)
        tau = float(np.sort(sums)[3])
        pruned, prep = prune_input_channels(net, sums, 2, 2, PruneConfig.thresholded(tau))
        rep = compare_outputs(
            net, pruned, pooled_examples(sc), input_keep=prep.selections[0].kept
        )
        assert 0.0 <= rep.mean_abs <= rep.max_abs
        assert 0.0 <= rep.argmax_agreement <= 1.0

    def test_width_mismatch_needs_keep_set(self):
        net = gen_network([6, 3], seed=0)
        narrow = gen_network([4, 3], seed=0)
        with pytest.raises(ContractViolation, match="input widths"):
            compare_outputs(net, narrow, [np.zeros(6)])

    def test_output_mismatch_needs_label_map(self):
        net = gen_network([4, 5], seed=0)
        pruned, lm, _ = prune_output_topn(net, [5.0, 4.0, 3.0, 2.0, 1.0], 2)
        with pytest.raises(ContractViolation, match="output widths"):
            compare_outputs(net, pruned, [np.zeros(4)])
        rep = compare_outputs(net, pruned, [np.zeros(4)], label_map=lm)
        assert rep.n_examples == 1

    def test_wrong_keep_size(self):
        net = gen_network([6, 3], seed=0)
        narrow = gen_network([4, 3], seed=0)
        with pytest.raises(ContractViolation, match="keep set"):
            compare_outputs(net, narrow, [np.zeros(6)], input_keep=(0, 1, 2))

    def test_no_examples(self):
        net = gen_network([3, 2], seed=0)
        rep = compare_outputs(net, net, [])
        assert rep.n_examples == 0
        assert rep.max_abs == 0.0 and rep.argmax_agreement == 1.0


class TestSweep:
    def make(self):
        sc = gen_scene(8, 6, 6, zero_channels=3, n_rois=25, pool_h=2, pool_w=2, seed=42)
        net = gen_network([32, 5, 4], seed=3)
        return net, sc

    def test_zero_threshold_point(self):
        net, sc = self.make()
        (pt,) = sweep(net, sc, [0.0])
        assert pt.tau == 0.0
        assert pt.pruned_units == 3
        assert pt.max_abs == 0.0
        assert pt.argmax_agreement == 1.0
        assert pt.bound == 0.0

    def test_full_schedule_monotone_and_sound(self):
        net, sc = self.make()
        sums = np.sort(channel_sums(sc.fmap))
        taus = [0.0, float(sums[4]), float(sums[6]), math.inf]
        points = sweep(net, sc, taus)
        assert [p.tau for p in points] == taus
        for a, b in zip(points, points[1:]):
            assert a.pruned_units <= b.pruned_units
            assert a.param_reduction <= b.param_reduction
            assert a.mac_reduction <= b.mac_reduction
        for p in points:
            assert 0.0 <= p.param_reduction <= 1.0
            assert 0.0 <= p.mac_reduction <= 1.0
            assert p.max_abs <= p.bound

    def test_infinite_threshold_degenerates_to_bias(self):
        net, sc = self.make()
        points = sweep(net, sc, [0.0, math.inf])
        last = points[-1]
        assert last.pruned_units == 8
        assert last.mac_reduction == 1.0
        w0 = net.layers[0].weights.size
        b0 = net.layers[0].bias.size
        assert last.param_reduction == pytest.approx(w0 / (w0 + b0))

    def test_unsorted_thresholds_rejected(self):
        net, sc = self.make()
        with pytest.raises(ContractViolation, match="ascending"):
            sweep(net, sc, [0.5, 0.1])

    def test_empty_thresholds_rejected(self):
        net, sc = self.make()
        with pytest.raises(ContractViolation, match="at least one"):
            sweep(net, sc, [])

    def test_geometry_mismatch_rejected(self):
        _, sc = self.make()
        with pytest.raises(ContractViolation, match="pools to"):
            sweep(gen_network([10, 4], seed=0), sc, [0.0])

    def test_deterministic(self):
        net, sc = self.make()
        taus = [0.0, 1.0, 5.0]
        assert sweep(net, sc, taus) == sweep(net, sc, taus)
        assert sweep_csv(sweep(net, sc, taus)) == sweep_csv(sweep(net, sc, taus))


class TestRendering:
    def test_csv_shape(self):
        net = gen_network([32, 5, 4], seed=3)
        sc = gen_scene(8, 6, 6, zero_channels=3, n_rois=10, pool_h=2, pool_w=2, seed=42)
        text = sweep_csv(sweep(net, sc, [0.0, 2.0]))
        lines = text.splitlines()
        assert lines[0] == SWEEP_CSV_HEADER
        assert lines[0] == "tau,pruned_units,param_reduction,mac_reduction,max_abs,argmax_agreement"
        assert len(lines) == 3
        assert text.endswith("\n")
        first = lines[1].split(",")
        assert first[0] == "0.0" and first[1] == "3" and first[4] == "0.0"
        for row in lines[1:]:
            cells = row.split(",")
            assert len(cells) == 6
            float(cells[0])
            int(cells[1])
            for c in cells[2:]:
                assert math.isfinite(float(c))

    def test_deviation_json(self):
        rep = DeviationReport(3, 0.5, 0.25, 1.0, bound=0.75)
        text = deviation_json(rep)
        assert text == (
            '{"n_examples": 3, "max_abs": 0.5, "mean_abs": 0.25, '
            '"argmax_agreement": 1.0, "bound": 0.75}'
        )

    def test_deviation_json_null_bound(self):
        rep = DeviationReport(1, 0.0, 0.0, 1.0)
        assert deviation_json(rep).endswith('"bound": null}')
