"""Feedforward network container and the version-1 text model format.

Networks are immutable: layer arrays are private copies with the writeable
flag cleared, so a loaded model can be shared across threads and pruning
always builds new objects. Serialization is deterministic byte for byte;
floats are written in shortest round-trip form, one matrix row per line.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _jsonio, linalg
from .errors import ContractViolation, FormatError, ValidationError

__all__ = [
    "ActivationKind",
    "DenseLayer",
    "Network",
    "ActivationProfile",
    "ParamCount",
    "forward",
    "output",
    "param_count",
    "gen_network",
    "save_network",
    "load_network",
]

FORMAT_VERSION = 1


class ActivationKind(enum.Enum):
    RELU = "relu"
    IDENTITY = "identity"


def _freeze(a: np.ndarray) -> np.ndarray:
    """Private read-only copy, so callers cannot mutate us and vice versa."""
    a = np.array(a, dtype=np.float64, order="C", copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class DenseLayer:
    """One fully connected layer: out = activation(bias + weights @ input).

    weights has shape (units, inputs); row i feeds unit i.
    """

    weights: np.ndarray
    bias: np.ndarray
    activation: ActivationKind = ActivationKind.RELU

    def __post_init__(self):
        w = _freeze(linalg.matrix(self.weights))
        b = _freeze(linalg.vector(self.bias))
        if b.shape[0] != w.shape[0]:
            raise ValidationError(
                f"bias has {b.shape[0]} entries but the layer has {w.shape[0]} units"
            )
        if not isinstance(self.activation, ActivationKind):
            raise ValidationError(f"unknown activation: {self.activation!r}")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "bias", b)

    @property
    def units(self) -> int:
        return self.weights.shape[0]

    @property
    def inputs(self) -> int:
        return self.weights.shape[1]

    def __eq__(self, other):
        if not isinstance(other, DenseLayer):
            return NotImplemented
        return (
            self.activation is other.activation
            and self.weights.shape == other.weights.shape
            and self.weights.tobytes() == other.weights.tobytes()
            and self.bias.tobytes() == other.bias.tobytes()
        )


@dataclass(frozen=True, eq=False)
class Network:
    """A chain of dense layers, optionally with output labels.

    Hidden layers must use relu; only the final layer may be identity.
    Layer k's input width must equal layer k-1's unit count.
    """

    layers: tuple[DenseLayer, ...]
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        layers = tuple(self.layers)
        for lay in layers:
            if not isinstance(lay, DenseLayer):
                raise ValidationError(f"layers must be DenseLayer, got {type(lay).__name__}")
        for k in range(len(layers) - 1):
            if layers[k + 1].inputs != layers[k].units:
                raise ValidationError(
                    f"layer {k} has {layers[k].units} units but layer {k + 1} "
                    f"expects {layers[k + 1].inputs} inputs"
                )
            if layers[k].activation is not ActivationKind.RELU:
                raise ValidationError(
                    f"layer {k} uses {layers[k].activation.value}; "
                    "only the final layer may be non-relu"
                )
        labels = self.labels
        if labels is not None:
            labels = tuple(str(s) for s in labels)
            if not layers:
                raise ValidationError("labels given for an empty network")
            if len(labels) != layers[-1].units:
                raise ValidationError(
                    f"{len(labels)} labels for {layers[-1].units} output units"
                )
        object.__setattr__(self, "layers", layers)
        object.__setattr__(self, "labels", labels)

    @property
    def input_dim(self) -> int:
        return self.layers[0].inputs if self.layers else 0

    @property
    def output_dim(self) -> int:
        return self.layers[-1].units if self.layers else 0

    def __eq__(self, other):
        if not isinstance(other, Network):
            return NotImplemented
        return self.labels == other.labels and self.layers == other.layers


@dataclass(frozen=True)
class ActivationProfile:
    """Post-activation vectors per layer for one input, as produced by forward."""

    per_layer: tuple[np.ndarray, ...]
    input_dim: int

    def layer(self, k: int) -> np.ndarray:
        if not 0 <= k < len(self.per_layer):
            raise ContractViolation(
                f"profile has layers 0..{len(self.per_layer) - 1}, got {k}"
            )
        return self.per_layer[k]


@dataclass(frozen=True)
class ParamCount:
    """Exact parameter and multiply-accumulate counts.

    per_layer holds (weight_count, bias_count) pairs; macs counts one
    multiply-accumulate per weight.
    """

    per_layer: tuple[tuple[int, int], ...]
    total: int
    macs: int


def forward(net: Network, x) -> ActivationProfile:
    """Run the network on x, capturing every layer's post-activation vector."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise ContractViolation(f"forward: input must be 1-dimensional, got shape {x.shape}")
    if net.layers and x.shape[0] != net.input_dim:
        raise ContractViolation(
            f"forward: layer 0 expects {net.input_dim} inputs, got {x.shape[0]}"
        )
    per = []
    h = x
    for lay in net.layers:
        z = lay.bias + linalg.matvec(lay.weights, h)
        if lay.activation is ActivationKind.RELU:
            z = linalg.relu(z)
        z.setflags(write=False)
        per.append(z)
        h = z
    return ActivationProfile(per_layer=tuple(per), input_dim=x.shape[0])


def output(net: Network, x) -> np.ndarray:
    """Final layer's output for x (the input itself for an empty network)."""
    profile = forward(net, x)
    if not profile.per_layer:
        return np.asarray(x, dtype=np.float64).copy()
    return profile.per_layer[-1]


def param_count(net: Network) -> ParamCount:
    per = tuple((int(lay.weights.size), int(lay.bias.size)) for lay in net.layers)
    total = sum(w + b for w, b in per)
    macs = sum(w for w, _ in per)
    return ParamCount(per_layer=per, total=total, macs=macs)


def gen_network(
    sizes: Sequence[int],
    sparsity: float = 0.0,
    seed: int = 0,
    activations: Sequence[ActivationKind] | None = None,
) -> Network:
    """Deterministic random network for the given layer sizes.

    sizes lists the input width followed by each layer's unit count.
    sparsity is the fraction of each hidden layer's units whose weight row
    and bias are forced to exact zero; those units output exactly 0.0 for
    every input, which gives zero-threshold pruning known targets. The
    count per layer is round(sparsity * units). Same seed, same bytes.
    """
    sizes = [int(s) for s in sizes]
    if not sizes:
        raise ContractViolation("gen_network: sizes must be nonempty")
    if any(s < 0 for s in sizes):
        raise ContractViolation(f"gen_network: sizes must be nonnegative, got {sizes}")
    if not 0.0 <= float(sparsity) <= 1.0:
        raise ContractViolation(f"gen_network: sparsity must be in [0, 1], got {sparsity}")
    n_layers = len(sizes) - 1
    if activations is None:
        activations = [ActivationKind.RELU] * max(n_layers - 1, 0)
        if n_layers:
            activations.append(ActivationKind.IDENTITY)
    if len(activations) != n_layers:
        raise ContractViolation(
            f"gen_network: {len(activations)} activations for {n_layers} layers"
        )
    rng = np.random.default_rng(seed)
    layers = []
    for k in range(n_layers):
        fan_in, units = sizes[k], sizes[k + 1]
        w = rng.uniform(-1.0, 1.0, size=(units, fan_in))
        b = rng.uniform(-0.1, 0.1, size=units)
        if k < n_layers - 1 and sparsity > 0.0 and units > 0:
            dead = int(round(float(sparsity) * units))
            if dead:
                rows = np.sort(rng.choice(units, size=dead, replace=False))
                w[rows, :] = 0.0
                b[rows] = 0.0
        layers.append(DenseLayer(w, b, activations[k]))
    return Network(tuple(layers))


# -- serialization ----------------------------------------------------------


def save_network(net: Network) -> bytes:
    """Serialize to the version-1 text format; output is byte-deterministic.

    The stream is valid JSON laid out for diffing: fixed key order, one
    weight row per line, floats in shortest round-trip decimal form.
    """
    fmt = linalg.fmt_float
    out = ["{", f'"version": {FORMAT_VERSION},']
    if net.labels is None:
        out.append('"labels": null,')
    else:
        names = ", ".join(json.dumps(s) for s in net.labels)
        out.append(f'"labels": [{names}],')
    out.append('"layers": [')
    for k, lay in enumerate(net.layers):
        out.append("{")
        out.append(f'"activation": "{lay.activation.value}",')
        out.append(f'"rows": {lay.units},')
        out.append(f'"cols": {lay.inputs},')
        if lay.weights.size:
            out.append('"weights": [')
            for i in range(lay.units):
                line = ", ".join(fmt(v) for v in lay.weights[i])
                out.append(line + ("," if i + 1 < lay.units else ""))
            out.append("],")
        else:
            # a dimension is zero; bare row lines would not parse
            out.append('"weights": [],')
        out.append(f'"bias": [{", ".join(fmt(v) for v in lay.bias)}]')
        out.append("}," if k + 1 < len(net.layers) else "}")
    out.append("]")
    out.append("}")
    return ("\n".join(out) + "\n").encode("utf-8")


def load_network(data: bytes | str) -> Network:
    """Parse the version-1 text model format.

    Raises FormatError for anything unparseable and ValidationError when the
    parsed layers do not form a consistent network.
    """
    doc = _jsonio.parse_doc(data, "model")
    version = _jsonio.get(doc, "version", int, "model")
    if version != FORMAT_VERSION:
        raise FormatError(f"unsupported model format version {version}")
    raw_layers = _jsonio.get(doc, "layers", list, "model")
    layers = []
    for k, entry in enumerate(raw_layers):
        where = f"layer {k}"
        act_name = _jsonio.get(entry, "activation", str, where)
        try:
            act = ActivationKind(act_name)
        except ValueError:
            raise FormatError(f"{where}: unknown activation {act_name!r}") from None
        units = _jsonio.get(entry, "rows", int, where)
        inputs = _jsonio.get(entry, "cols", int, where)
        if units < 0 or inputs < 0:
            raise FormatError(f"{where}: rows and cols must be nonnegative")
        flat = _jsonio.number_list(_jsonio.get(entry, "weights", list, where), f"{where} weights")
        if len(flat) != units * inputs:
            raise FormatError(
                f"{where} weights: expected {units * inputs} values, got {len(flat)}"
            )
        bias = _jsonio.number_list(_jsonio.get(entry, "bias", list, where), f"{where} bias")
        if len(bias) != units:
            raise FormatError(f"{where} bias: expected {units} values, got {len(bias)}")
        try:
            w = linalg.matrix(flat, units, inputs)
            layers.append(DenseLayer(w, np.asarray(bias, dtype=np.float64), act))
        except ContractViolation as e:
            raise FormatError(f"{where}: {e}") from e
    labels = doc.get("labels")
    if labels is not None:
        if not isinstance(labels, list) or not all(isinstance(s, str) for s in labels):
            raise FormatError("model: labels must be null or an array of strings")
        labels = tuple(labels)
    return Network(tuple(layers), labels=labels)
