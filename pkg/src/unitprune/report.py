"""Measurement: compare a pruned network against its original, sweep thresholds.

compare_outputs measures what pruning actually did to a collection of
examples; sweep runs the whole input-channel pruning pipeline across an
ascending threshold schedule and tabulates cost versus deviation. Both are
deterministic: fixed example order, plain left-to-right accumulation of
totals, no clocks and no global RNG.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import linalg
from .errors import ContractViolation
from .model import Network, output
from .prune import LabelMap, PruneConfig, prune_input_channels
from .scene import Scene, channel_sums, roi_pool

__all__ = [
    "DeviationReport",
    "SweepPoint",
    "compare_outputs",
    "sweep",
    "sweep_csv",
    "deviation_json",
    "SWEEP_CSV_HEADER",
]

SWEEP_CSV_HEADER = "tau,pruned_units,param_reduction,mac_reduction,max_abs,argmax_agreement"


@dataclass(frozen=True)
class DeviationReport:
    """How far a pruned network's outputs moved on a collection of examples.

    max_abs/mean_abs are over all compared output coordinates;
    argmax_agreement is the fraction of examples whose winning output is
    preserved. bound, when present, is the certificate the pruning step
    promised; it is carried through untouched so callers can check
    max_abs <= bound.
    """

    n_examples: int
    max_abs: float
    mean_abs: float
    argmax_agreement: float
    bound: float | None = None


@dataclass(frozen=True)
class SweepPoint:
    """One row of a threshold sweep.

    param_reduction and mac_reduction are fractions of the first layer's
    parameter and multiply-accumulate counts (the layer the sweep prunes).
    bound is the collection-wide deviation certificate for this threshold;
    it does not appear in the CSV, which carries the measured max_abs.
    """

    tau: float
    pruned_units: int
    param_reduction: float
    mac_reduction: float
    max_abs: float
    argmax_agreement: float
    bound: float = 0.0


def _argmax_agrees(
    original_out: np.ndarray, pruned_out: np.ndarray, kept: Sequence[int] | None
) -> bool:
    if original_out.size == 0:
        return True
    winner = int(np.argmax(original_out))
    if kept is None:
        return int(np.argmax(pruned_out)) == winner
    if pruned_out.size == 0:
        return False
    return kept[int(np.argmax(pruned_out))] == winner


def compare_outputs(
    original: Network,
    pruned: Network,
    examples: Iterable,
    label_map: LabelMap | None = None,
    input_keep: Sequence[int] | None = None,
    bound: float | None = None,
) -> DeviationReport:
    """Run both networks over the examples and measure output deviation.

    Examples are full-width inputs for the original network. When the pruned
    network's input was shrunk (forward pruning), input_keep lists the
    surviving input coordinates; when its output was shrunk (top-n pruning),
    label_map says which original outputs survive, and deviations are
    measured on those. An example whose original winning output was pruned
    away counts against argmax_agreement.
    """
    kept_out = None
    if label_map is not None:
        kept_out = list(label_map.indices)
        if len(kept_out) != pruned.output_dim:
            raise ContractViolation(
                f"label map keeps {len(kept_out)} outputs but the pruned "
                f"network has {pruned.output_dim}"
            )
        if kept_out and kept_out[-1] >= original.output_dim:
            raise ContractViolation("label map index exceeds the original output width")
    elif original.output_dim != pruned.output_dim:
        raise ContractViolation(
            f"output widths differ ({original.output_dim} vs {pruned.output_dim}); "
            "pass the label map produced by top-n pruning"
        )
    keep_in = None
    if input_keep is not None:
        keep_in = linalg.check_index_set(input_keep, original.input_dim, "input keep set")
        if len(keep_in) != pruned.input_dim:
            raise ContractViolation(
                f"input keep set has {len(keep_in)} indices but the pruned "
                f"network expects {pruned.input_dim} inputs"
            )
    elif original.input_dim != pruned.input_dim:
        raise ContractViolation(
            f"input widths differ ({original.input_dim} vs {pruned.input_dim}); "
            "pass the keep set from the pruning report"
        )
    keep_list = list(keep_in) if keep_in is not None else None
    n = 0
    max_abs = 0.0
    total_abs = 0.0
    total_coords = 0
    agree = 0
    for x in examples:
        x = linalg.vector(x)
        oa = output(original, x)
        ob = output(pruned, x[keep_list] if keep_list is not None else x)
        ref = oa[kept_out] if kept_out is not None else oa
        diff = np.abs(ref - ob)
        if diff.size:
            max_abs = max(max_abs, float(diff.max()))
            total_abs += float(diff.sum())
            total_coords += diff.size
        if _argmax_agrees(oa, ob, kept_out):
            agree += 1
        n += 1
    return DeviationReport(
        n_examples=n,
        max_abs=max_abs,
        mean_abs=total_abs / total_coords if total_coords else 0.0,
        argmax_agreement=agree / n if n else 1.0,
        bound=bound,
    )


def sweep(net: Network, scene: Scene, thresholds: Sequence[float]) -> list[SweepPoint]:
    """Prune input channels at each threshold and measure the damage.

    thresholds must be ascending and nonnegative. Each point prunes the
    original network's input channels at that threshold, runs every region
    of the scene through both networks, and records the channel count,
    first-layer cost reductions, worst output deviation, and argmax
    agreement. Larger thresholds always prune a superset of channels, so
    pruned_units and both reduction columns are non-decreasing.
    """
    taus = [float(t) for t in thresholds]
    if not taus:
        raise ContractViolation("sweep needs at least one threshold")
    for a, b in zip(taus, taus[1:]):
        if b < a:
            raise ContractViolation(f"thresholds must be ascending, got {a} before {b}")
    if not net.layers:
        raise ContractViolation("cannot sweep an empty network")
    if net.input_dim != scene.pooled_width:
        raise ContractViolation(
            f"network expects {net.input_dim} inputs but the scene pools to "
            f"{scene.pooled_width}"
        )
    sums = channel_sums(scene.fmap)
    pooled = [roi_pool(scene.fmap, r, scene.pool_h, scene.pool_w) for r in scene.rois]
    base = [output(net, x) for x in pooled]
    w0, b0 = net.layers[0].weights.size, net.layers[0].bias.size
    points = []
    for tau in taus:
        cfg = PruneConfig.for_threshold(tau)
        pruned_net, rep = prune_input_channels(net, sums, scene.pool_h, scene.pool_w, cfg)
        keep = list(rep.selections[0].kept)
        max_abs = 0.0
        agree = 0
        for x, oa in zip(pooled, base):
            ob = output(pruned_net, x[keep])
            diff = np.abs(oa - ob)
            if diff.size:
                max_abs = max(max_abs, float(diff.max()))
            if _argmax_agrees(oa, ob, None):
                agree += 1
        wa, ba = rep.params_after.per_layer[0]
        layer_params = w0 + b0
        points.append(
            SweepPoint(
                tau=tau,
                pruned_units=len(rep.channels.pruned),
                param_reduction=(layer_params - wa - ba) / layer_params if layer_params else 0.0,
                mac_reduction=(w0 - wa) / w0 if w0 else 0.0,
                max_abs=max_abs,
                argmax_agreement=agree / len(pooled) if pooled else 1.0,
                bound=rep.deviation_bound if rep.deviation_bound is not None else 0.0,
            )
        )
    return points


def sweep_csv(points: Sequence[SweepPoint]) -> str:
    """Render sweep points as CSV, floats in shortest round-trip form."""
    fmt = linalg.fmt_float
    lines = [SWEEP_CSV_HEADER]
    for p in points:
        lines.append(
            ",".join(
                (
                    fmt(p.tau),
                    str(p.pruned_units),
                    fmt(p.param_reduction),
                    fmt(p.mac_reduction),
                    fmt(p.max_abs),
                    fmt(p.argmax_agreement),
                )
            )
        )
    return "\n".join(lines) + "\n"


def deviation_json(report: DeviationReport) -> str:
    """One-line JSON rendering of a DeviationReport, byte-deterministic."""
    fmt = linalg.fmt_float
    bound = "null" if report.bound is None else fmt(report.bound)
    return (
        "{"
        f'"n_examples": {report.n_examples}, '
        f'"max_abs": {fmt(report.max_abs)}, '
        f'"mean_abs": {fmt(report.mean_abs)}, '
        f'"argmax_agreement": {fmt(report.argmax_agreement)}, '
        f'"bound": {bound}'
        "}"
    )
