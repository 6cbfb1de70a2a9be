"""Unit pruning transforms and their accounting.

Two primitive rewrites on a dense layer, plus the compositions that keep a
network consistent:

* backward prune: remove units of layer k itself (weight rows and bias
  entries). Standalone this only leaves a consistent network on the final
  layer, where it restricts the output vocabulary (prune_output_topn).
* forward prune: remove input columns of layer k. Standalone this only makes
  sense on layer 0, where it shrinks the network's input width
  (prune_input_channels, driven by per-channel statistics of a scene).
* prune_units: both at once for a hidden layer k; units leave layer k and
  their columns leave layer k+1, so the chain stays consistent.

Selections come from activation magnitudes on a probe input. At threshold 0
only units that output exactly 0.0 are selected, and because matvec
accumulates in a pinned order, removing those columns is bit-identical.
For positive thresholds, deviation_bound gives a certificate on how far the
probe's output can move.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _jsonio, linalg
from .errors import ContractViolation, FormatError, ValidationError
from .model import (
    ActivationProfile,
    DenseLayer,
    Network,
    ParamCount,
    param_count,
)

__all__ = [
    "PruneMode",
    "PruneConfig",
    "PruneSelection",
    "LabelMap",
    "PruneReport",
    "select_units",
    "select_channels",
    "channel_columns",
    "backward_prune",
    "forward_prune",
    "prune_units",
    "prune_input_channels",
    "prune_output_topn",
    "deviation_bound",
    "column_drop_bound",
    "save_report",
    "load_report",
    "save_labelmap",
    "load_labelmap",
]

FORMAT_VERSION = 1

REPORT_KINDS = ("units", "input-channels", "topn")


class PruneMode(enum.Enum):
    EXACT_ZERO = "exact-zero"
    THRESHOLDED = "thresholded"


@dataclass(frozen=True)
class PruneConfig:
    """Selection rule: prune where |activation| <= threshold.

    EXACT_ZERO requires threshold 0.0 and promises bit-identical outputs;
    THRESHOLDED allows any nonnegative threshold (including +inf) and only
    promises the deviation_bound certificate.
    """

    threshold: float = 0.0
    mode: PruneMode = PruneMode.EXACT_ZERO

    def __post_init__(self):
        t = float(self.threshold)
        if not t >= 0.0:
            raise ContractViolation(f"threshold must be nonnegative, got {self.threshold}")
        if self.mode is PruneMode.EXACT_ZERO and t != 0.0:
            raise ContractViolation(f"exact-zero mode requires threshold 0, got {self.threshold}")
        if not isinstance(self.mode, PruneMode):
            raise ContractViolation(f"unknown prune mode: {self.mode!r}")
        object.__setattr__(self, "threshold", t)

    @classmethod
    def exact_zero(cls) -> "PruneConfig":
        return cls(0.0, PruneMode.EXACT_ZERO)

    @classmethod
    def thresholded(cls, threshold: float) -> "PruneConfig":
        return cls(threshold, PruneMode.THRESHOLDED)

    @classmethod
    def for_threshold(cls, threshold: float) -> "PruneConfig":
        """exact_zero at 0.0, thresholded otherwise."""
        return cls.exact_zero() if float(threshold) == 0.0 else cls.thresholded(threshold)


@dataclass(frozen=True)
class PruneSelection:
    """A partition of range(size) into pruned and kept indices, both ascending.

    layer records which layer's units (or, for column selections, whose
    inputs) the indices refer to.
    """

    layer: int
    pruned: tuple[int, ...]
    kept: tuple[int, ...]

    def __post_init__(self):
        size = len(self.pruned) + len(self.kept)
        pruned = linalg.check_index_set(self.pruned, size, "pruned set")
        kept = linalg.check_index_set(self.kept, size, "kept set")
        seen = np.zeros(size, dtype=bool)
        for i in pruned:
            seen[i] = True
        for i in kept:
            if seen[i]:
                raise ContractViolation(f"index {i} is both pruned and kept")
            seen[i] = True
        # lengths add up to size and there is no overlap, so coverage follows
        object.__setattr__(self, "layer", int(self.layer))
        object.__setattr__(self, "pruned", pruned)
        object.__setattr__(self, "kept", kept)

    @property
    def size(self) -> int:
        return len(self.pruned) + len(self.kept)

    @classmethod
    def from_pruned(cls, pruned: Sequence[int], size: int, layer: int = 0) -> "PruneSelection":
        pruned = linalg.check_index_set(pruned, size, "pruned set")
        return cls(layer=layer, pruned=pruned, kept=linalg.complement(pruned, size))


@dataclass(frozen=True)
class LabelMap:
    """Kept output indices (ascending) with their names, if the model had any."""

    indices: tuple[int, ...]
    names: tuple[str, ...] | None = None

    def __post_init__(self):
        idx = tuple(int(i) for i in self.indices)
        for a, b in zip(idx, idx[1:]):
            if b <= a:
                raise ContractViolation("label map indices must be strictly ascending")
        if idx and idx[0] < 0:
            raise ContractViolation("label map indices must be nonnegative")
        names = self.names
        if names is not None:
            names = tuple(str(s) for s in names)
            if len(names) != len(idx):
                raise ContractViolation(
                    f"{len(names)} names for {len(idx)} kept outputs"
                )
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "names", names)

    def __len__(self) -> int:
        return len(self.indices)


@dataclass(frozen=True)
class PruneReport:
    """What a pruning call did: selections, exact counts, and the certificate.

    deviation_bound is None when no probe was supplied, 0.0 for transforms
    that cannot change the surviving outputs, and otherwise an upper bound
    on the infinity-norm output change for the probe (or, for
    input-channels pruning, for every region of the scene at once).
    """

    kind: str
    selections: tuple[PruneSelection, ...]
    params_before: ParamCount
    params_after: ParamCount
    layer_reduction: tuple[tuple[int, float], ...]
    total_reduction: float
    deviation_bound: float | None = None
    channels: PruneSelection | None = None

    def __post_init__(self):
        if self.kind not in REPORT_KINDS:
            raise ValidationError(f"unknown report kind {self.kind!r}")
        object.__setattr__(self, "selections", tuple(self.selections))
        object.__setattr__(
            self,
            "layer_reduction",
            tuple((int(k), float(f)) for k, f in self.layer_reduction),
        )


def _build_report(
    kind: str,
    selections: tuple[PruneSelection, ...],
    before: Network,
    after: Network,
    bound: float | None,
    channels: PruneSelection | None = None,
) -> PruneReport:
    pb = param_count(before)
    pa = param_count(after)
    reductions = []
    for k, ((wb, bb), (wa, ba)) in enumerate(zip(pb.per_layer, pa.per_layer)):
        if (wb, bb) != (wa, ba):
            layer_total = wb + bb
            reductions.append((k, (layer_total - wa - ba) / layer_total))
    total = (pb.total - pa.total) / pb.total if pb.total else 0.0
    return PruneReport(
        kind=kind,
        selections=selections,
        params_before=pb,
        params_after=pa,
        layer_reduction=tuple(reductions),
        total_reduction=total,
        deviation_bound=bound,
        channels=channels,
    )


# -- selection --------------------------------------------------------------


def select_units(activations, config: PruneConfig, layer: int = 0) -> PruneSelection:
    """Select units whose |activation| <= config.threshold.

    At threshold 0 this picks exactly the units that output 0.0 (or -0.0).
    """
    h = linalg.vector(activations)
    pruned = np.flatnonzero(np.abs(h) <= config.threshold)
    return PruneSelection.from_pruned([int(i) for i in pruned], h.shape[0], layer=layer)


def select_channels(sums, config: PruneConfig) -> PruneSelection:
    """Select channels whose total activation mass is <= config.threshold.

    sums must be nonnegative (channel sums of a post-relu feature map). Zero
    sum means the channel is zero at every position, so at threshold 0 the
    selected channels cannot contribute to any pooled region.
    """
    s = linalg.vector(sums)
    if (s < 0.0).any():
        raise ContractViolation("channel sums must be nonnegative")
    pruned = np.flatnonzero(s <= config.threshold)
    return PruneSelection.from_pruned([int(i) for i in pruned], s.shape[0], layer=0)


def channel_columns(
    channels: PruneSelection | Sequence[int], n_channels: int, pool_h: int, pool_w: int
) -> tuple[int, ...]:
    """Input columns owned by the given channels under channel-major pooling.

    channels is either a channel-level PruneSelection (its pruned set is
    mapped) or a plain ascending index sequence. Channel c owns the
    contiguous block [c * pool_h * pool_w, (c + 1) * pool_h * pool_w); the
    result is ascending because the channel indices are.
    """
    if isinstance(channels, PruneSelection):
        channels = channels.pruned
    idx = linalg.check_index_set(channels, n_channels, "channel set")
    if pool_h < 1 or pool_w < 1:
        raise ContractViolation(f"pool grid must be at least 1x1, got {pool_h}x{pool_w}")
    cells = pool_h * pool_w
    cols: list[int] = []
    for c in idx:
        cols.extend(range(c * cells, (c + 1) * cells))
    return tuple(cols)


# -- transforms -------------------------------------------------------------


def _check_layer(net: Network, layer: int) -> None:
    if not 0 <= layer < len(net.layers):
        raise ContractViolation(
            f"layer index {layer} out of range for a {len(net.layers)}-layer network"
        )


def backward_prune(net: Network, layer: int, sel: PruneSelection) -> Network:
    """Remove the selected units of one layer (weight rows and bias entries).

    Standalone this yields a consistent network only on the final layer,
    where it shrinks the output (labels are subset accordingly); anywhere
    else the next layer is left expecting the old width and network
    validation rejects the result. Pair with a forward prune of layer+1 via
    prune_units for hidden layers.
    """
    _check_layer(net, layer)
    lay = net.layers[layer]
    if sel.size != lay.units:
        raise ContractViolation(
            f"selection covers {sel.size} units but layer {layer} has {lay.units}"
        )
    keep = sel.kept
    new = DenseLayer(
        linalg.drop_rows(lay.weights, keep), linalg.subvector(lay.bias, keep), lay.activation
    )
    labels = net.labels
    if labels is not None and layer == len(net.layers) - 1:
        labels = tuple(labels[i] for i in keep)
    return Network(net.layers[:layer] + (new,) + net.layers[layer + 1 :], labels=labels)


def forward_prune(net: Network, layer: int, sel: PruneSelection) -> Network:
    """Remove the selected input columns of one layer.

    The new layer computes the same per-unit dot products restricted to the
    kept inputs, so callers must feed it inputs with the pruned coordinates
    removed. Standalone this yields a consistent network only on layer 0
    (the network's input shrinks); for hidden layers use prune_units.
    """
    _check_layer(net, layer)
    lay = net.layers[layer]
    if sel.size != lay.inputs:
        raise ContractViolation(
            f"selection covers {sel.size} inputs but layer {layer} has {lay.inputs}"
        )
    new = DenseLayer(linalg.drop_cols(lay.weights, sel.kept), lay.bias, lay.activation)
    return Network(net.layers[:layer] + (new,) + net.layers[layer + 1 :], labels=net.labels)


def prune_units(
    net: Network,
    layer: int,
    sel: PruneSelection,
    profile: ActivationProfile | None = None,
) -> tuple[Network, PruneReport]:
    """Remove hidden units: backward prune layer, forward prune layer+1.

    With q of p units removed from a layer with m inputs feeding a layer of
    n units, exactly q*(m+1) + n*q parameters and q*m + n*q
    multiply-accumulates disappear; the report carries the exact counts.

    When the activation profile the selection came from is given, the report
    also carries deviation_bound for that probe; selections of exactly-zero
    units get bound 0.0 and bit-identical outputs.
    """
    _check_layer(net, layer)
    if layer == len(net.layers) - 1:
        raise ContractViolation(
            "prune_units needs a hidden layer; use prune_output_topn for the final layer"
        )
    lay = net.layers[layer]
    nxt = net.layers[layer + 1]
    if sel.size != lay.units:
        raise ContractViolation(
            f"selection covers {sel.size} units but layer {layer} has {lay.units}"
        )
    bound = None
    if profile is not None:
        bound = deviation_bound(net, layer, profile, sel)
    keep = sel.kept
    new_lay = DenseLayer(
        linalg.drop_rows(lay.weights, keep), linalg.subvector(lay.bias, keep), lay.activation
    )
    new_nxt = DenseLayer(linalg.drop_cols(nxt.weights, keep), nxt.bias, nxt.activation)
    layers = net.layers[:layer] + (new_lay, new_nxt) + net.layers[layer + 2 :]
    pruned_net = Network(layers, labels=net.labels)
    return pruned_net, _build_report("units", (sel,), net, pruned_net, bound)


def prune_input_channels(
    net: Network, sums, pool_h: int, pool_w: int, config: PruneConfig
) -> tuple[Network, PruneReport]:
    """Forward prune layer 0 by dropping whole channels of pooled input.

    sums are per-channel totals of a nonnegative feature map; a channel is
    dropped when its total is <= config.threshold, taking all pool_h*pool_w
    of its input columns with it. Each pooled coordinate of channel c is a
    max over nonnegative entries, so it never exceeds the channel's total;
    expanding the totals across each channel's columns therefore dominates
    every region's pooled vector at once, and the reported deviation_bound
    holds for the entire collection, not just one probe. At threshold 0 the
    dropped columns only ever carry exact zeros and outputs are
    bit-identical for every region.
    """
    s = linalg.vector(sums)
    cells = int(pool_h) * int(pool_w)
    if pool_h < 1 or pool_w < 1:
        raise ContractViolation(f"pool grid must be at least 1x1, got {pool_h}x{pool_w}")
    if not net.layers:
        raise ContractViolation("cannot prune the input of an empty network")
    n_cols = s.shape[0] * cells
    if net.input_dim != n_cols:
        raise ContractViolation(
            f"layer 0 expects {net.input_dim} inputs but {s.shape[0]} channels "
            f"pooled {pool_h}x{pool_w} give {n_cols}"
        )
    csel = select_channels(s, config)
    cols = channel_columns(csel.pruned, s.shape[0], pool_h, pool_w)
    colsel = PruneSelection.from_pruned(cols, n_cols, layer=0)
    pruned_net = forward_prune(net, 0, colsel)
    probe = np.repeat(s, cells)
    bound = column_drop_bound(net, 0, probe, cols)
    return pruned_net, _build_report(
        "input-channels", (colsel,), net, pruned_net, bound, channels=csel
    )


def prune_output_topn(
    net: Network, scores, n: int
) -> tuple[Network, LabelMap, PruneReport]:
    """Keep only the n highest-scoring output units (ties go to lower index).

    The surviving outputs are computed bit-identically to before; the label
    map records which original output each new coordinate corresponds to.
    """
    if not net.layers:
        raise ContractViolation("cannot prune the outputs of an empty network")
    s = linalg.vector(scores)
    out_dim = net.output_dim
    if s.shape[0] != out_dim:
        raise ContractViolation(
            f"{s.shape[0]} scores for {out_dim} output units"
        )
    if not 1 <= int(n) <= out_dim:
        raise ContractViolation(f"n must be in 1..{out_dim}, got {n}")
    # stable sort on negated scores: ties resolve to the lower index
    order = np.argsort(-s, kind="stable")
    kept = tuple(sorted(int(i) for i in order[: int(n)]))
    sel = PruneSelection(
        layer=len(net.layers) - 1, pruned=linalg.complement(kept, out_dim), kept=kept
    )
    pruned_net = backward_prune(net, len(net.layers) - 1, sel)
    names = None if net.labels is None else tuple(net.labels[i] for i in kept)
    label_map = LabelMap(indices=kept, names=names)
    report = _build_report("topn", (sel,), net, pruned_net, 0.0)
    return pruned_net, label_map, report


# -- deviation certificate ---------------------------------------------------


def _inf_op_norm(w: np.ndarray) -> float:
    """Operator norm for the infinity norm: max absolute row sum."""
    if w.shape[0] == 0:
        return 0.0
    return float(np.abs(w).sum(axis=1).max())


def column_drop_bound(net: Network, layer: int, magnitudes, cols: Sequence[int]) -> float:
    """Bound the output change (infinity norm) of dropping input columns.

    magnitudes must dominate, entrywise, the absolute value of whatever is
    fed to the given layer's inputs. Dropping columns `cols` changes the
    layer's pre-activation by at most max_i sum_{j in cols} |w[i, j]| * mag[j]
    (biases cancel in the difference); relu is 1-Lipschitz, so each later
    layer amplifies an input gap by at most its max absolute row sum.

    The certificate must hold for outputs as actually computed in float64,
    not just in real arithmetic, so a first-order rounding allowance is added
    on top: each layer evaluation carries per-row summation error below
    (m+1) * u * S, where u is the unit roundoff and S envelopes the row's
    absolute term sum, and both the original and the pruned evaluation incur
    it. The allowance is inflated 8x to absorb second-order terms. When every
    dropped column contributes an exactly-zero product the evaluations are
    bit-identical and the bound is exactly 0.0.
    """
    _check_layer(net, layer)
    w = net.layers[layer].weights
    cols = linalg.check_index_set(cols, w.shape[1], "column set")
    mags = linalg.vector(magnitudes)
    if mags.shape[0] != w.shape[1]:
        raise ContractViolation(
            f"{mags.shape[0]} magnitudes for a layer with {w.shape[1]} inputs"
        )
    if (mags < 0.0).any():
        raise ContractViolation("magnitudes must be nonnegative")
    if not cols:
        return 0.0
    idx = list(cols)
    per_row = linalg.matvec(np.abs(w[:, idx]), mags[idx])
    head = float(per_row.max()) if per_row.size else 0.0
    if head == 0.0:
        # every dropped product is +-0.0, so the accumulation is unchanged
        return 0.0
    amp = 1.0
    for lay in net.layers[layer + 1 :]:
        amp *= _inf_op_norm(lay.weights)

    u = float(np.finfo(np.float64).eps) / 2.0
    in_env = float(mags.max())
    real_gap = 0.0
    fp = 0.0
    for i, lay in enumerate(net.layers[layer:]):
        norm = _inf_op_norm(lay.weights)
        bmax = float(np.abs(lay.bias).max()) if lay.bias.size else 0.0
        s = norm * (in_env + real_gap) + bmax
        fp = fp * norm + 2.0 * (lay.inputs + 1) * u * s
        real_gap = head if i == 0 else real_gap * norm
        in_env = s
    return head * amp + 8.0 * fp


def deviation_bound(
    net: Network, layer: int, profile: ActivationProfile, sel: PruneSelection
) -> float:
    """Certificate for prune_units on the probe that produced `profile`.

    Bounds the infinity-norm change of the network output when the selected
    units of the given hidden layer are removed. Exactly 0.0 when every
    pruned unit's activation is exactly zero.
    """
    _check_layer(net, layer)
    if layer >= len(net.layers) - 1:
        raise ContractViolation("deviation_bound applies to hidden layers only")
    h = profile.layer(layer)
    if sel.size != h.shape[0]:
        raise ContractViolation(
            f"selection covers {sel.size} units but the profile has {h.shape[0]}"
        )
    return column_drop_bound(net, layer + 1, np.abs(h), sel.pruned)


# -- serialization ----------------------------------------------------------


def _int_line(values: Sequence[int]) -> str:
    return "[" + ", ".join(str(int(v)) for v in values) + "]"


def _selection_lines(sel: PruneSelection) -> list[str]:
    return [
        "{",
        f'"layer": {sel.layer},',
        f'"pruned": {_int_line(sel.pruned)},',
        f'"kept": {_int_line(sel.kept)}',
        "}",
    ]


def _params_lines(pc: ParamCount) -> list[str]:
    per = ", ".join(f"[{w}, {b}]" for w, b in pc.per_layer)
    return [
        "{",
        f'"per_layer": [{per}],',
        f'"total": {pc.total},',
        f'"macs": {pc.macs}',
        "}",
    ]


def save_report(report: PruneReport) -> bytes:
    """Serialize a PruneReport to deterministic valid JSON."""
    fmt = linalg.fmt_float
    out = ["{", f'"version": {FORMAT_VERSION},']
    out.append(f'"kind": "{report.kind}",')
    red = ", ".join(f"[{k}, {fmt(f)}]" for k, f in report.layer_reduction)
    out.append(f'"layer_reduction": [{red}],')
    out.append(f'"total_reduction": {fmt(report.total_reduction)},')
    if report.deviation_bound is None:
        out.append('"deviation_bound": null,')
    else:
        out.append(f'"deviation_bound": {fmt(report.deviation_bound)},')
    out.append('"params_before":')
    out.extend(_params_lines(report.params_before))
    out[-1] += ","
    out.append('"params_after":')
    out.extend(_params_lines(report.params_after))
    out[-1] += ","
    out.append('"selections": [')
    for i, sel in enumerate(report.selections):
        lines = _selection_lines(sel)
        if i + 1 < len(report.selections):
            lines[-1] += ","
        out.extend(lines)
    out.append("],")
    if report.channels is None:
        out.append('"channels": null')
    else:
        out.append('"channels":')
        out.extend(_selection_lines(report.channels))
    out.append("}")
    return ("\n".join(out) + "\n").encode("utf-8")


def _selection_from_doc(entry, where: str) -> PruneSelection:
    layer = _jsonio.get(entry, "layer", int, where)
    pruned = _jsonio.int_list(_jsonio.get(entry, "pruned", list, where), f"{where} pruned")
    kept = _jsonio.int_list(_jsonio.get(entry, "kept", list, where), f"{where} kept")
    try:
        return PruneSelection(layer=layer, pruned=tuple(pruned), kept=tuple(kept))
    except ContractViolation as e:
        raise FormatError(f"{where}: {e}") from e


def _params_from_doc(entry, where: str) -> ParamCount:
    raw = _jsonio.get(entry, "per_layer", list, where)
    per = []
    for i, pair in enumerate(raw):
        vals = _jsonio.int_list(pair, f"{where} per_layer[{i}]")
        if len(vals) != 2 or vals[0] < 0 or vals[1] < 0:
            raise FormatError(f"{where} per_layer[{i}]: expected two nonnegative integers")
        per.append((vals[0], vals[1]))
    total = _jsonio.get(entry, "total", int, where)
    macs = _jsonio.get(entry, "macs", int, where)
    if total != sum(w + b for w, b in per) or macs != sum(w for w, _ in per):
        raise FormatError(f"{where}: totals do not match per-layer counts")
    return ParamCount(per_layer=tuple(per), total=total, macs=macs)


def load_report(data: bytes | str) -> PruneReport:
    """Parse the version-1 report format."""
    doc = _jsonio.parse_doc(data, "report")
    version = _jsonio.get(doc, "version", int, "report")
    if version != FORMAT_VERSION:
        raise FormatError(f"unsupported report format version {version}")
    kind = _jsonio.get(doc, "kind", str, "report")
    if kind not in REPORT_KINDS:
        raise FormatError(f"report: unknown kind {kind!r}")
    raw_red = _jsonio.get(doc, "layer_reduction", list, "report")
    reductions = []
    for i, pair in enumerate(raw_red):
        if not isinstance(pair, list) or len(pair) != 2:
            raise FormatError(f"report layer_reduction[{i}]: expected [layer, fraction]")
        k = pair[0]
        if isinstance(k, bool) or not isinstance(k, int):
            raise FormatError(f"report layer_reduction[{i}]: layer must be an integer")
        f = pair[1]
        if isinstance(f, bool) or not isinstance(f, (int, float)):
            raise FormatError(f"report layer_reduction[{i}]: fraction must be a number")
        reductions.append((k, float(f)))
    total_red = _jsonio.get(doc, "total_reduction", float, "report")
    bound = doc.get("deviation_bound")
    if bound is not None:
        if isinstance(bound, bool) or not isinstance(bound, (int, float)):
            raise FormatError("report: deviation_bound must be null or a number")
        bound = float(bound)
    pb = _params_from_doc(_jsonio.get(doc, "params_before", dict, "report"), "params_before")
    pa = _params_from_doc(_jsonio.get(doc, "params_after", dict, "report"), "params_after")
    raw_sels = _jsonio.get(doc, "selections", list, "report")
    sels = tuple(
        _selection_from_doc(entry, f"selection {i}") for i, entry in enumerate(raw_sels)
    )
    channels = doc.get("channels")
    if channels is not None:
        channels = _selection_from_doc(channels, "channels")
    try:
        return PruneReport(
            kind=kind,
            selections=sels,
            params_before=pb,
            params_after=pa,
            layer_reduction=tuple(reductions),
            total_reduction=total_red,
            deviation_bound=bound,
            channels=channels,
        )
    except ContractViolation as e:
        raise FormatError(f"report: {e}") from e


def save_labelmap(label_map: LabelMap) -> bytes:
    """Serialize a LabelMap to deterministic valid JSON."""
    out = ["{", f'"version": {FORMAT_VERSION},']
    out.append(f'"kept": {_int_line(label_map.indices)},')
    if label_map.names is None:
        out.append('"labels": null')
    else:
        out.append(f'"labels": [{", ".join(json.dumps(s) for s in label_map.names)}]')
    out.append("}")
    return ("\n".join(out) + "\n").encode("utf-8")


def load_labelmap(data: bytes | str) -> LabelMap:
    """Parse the version-1 label map format."""
    doc = _jsonio.parse_doc(data, "label map")
    version = _jsonio.get(doc, "version", int, "label map")
    if version != FORMAT_VERSION:
        raise FormatError(f"unsupported label map format version {version}")
    kept = _jsonio.int_list(_jsonio.get(doc, "kept", list, "label map"), "label map kept")
    names = doc.get("labels")
    if names is not None:
        if not isinstance(names, list) or not all(isinstance(s, str) for s in names):
            raise FormatError("label map: labels must be null or an array of strings")
        names = tuple(names)
    try:
        return LabelMap(indices=tuple(kept), names=names)
    except ContractViolation as e:
        raise FormatError(f"label map: {e}") from e
