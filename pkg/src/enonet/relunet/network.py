"""Minimal feedforward ReLU inference engine with JSON (de)serialization."""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

RELU = "relu"
IDENTITY = "identity"

OUTPUT_RULES = ("none", "min_argmax", "min_argmin", "softmax")


class NetworkFormatError(ValueError):
    """Raised when a serialized network is malformed; carries the layer index."""

    def __init__(self, message, layer=None):
        if layer is not None:
            message = f"layer {layer}: {message}"
        super().__init__(message)
        self.layer = layer


@dataclass(frozen=True)
class DenseLayer:
    """One affine map plus activation; weights are (out, in) row-major."""

    weights: np.ndarray
    bias: np.ndarray
    activation: str = RELU

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        b = np.asarray(self.bias, dtype=float)
        if w.ndim != 2:
            raise ValueError("weights must be a matrix")
        if b.shape != (w.shape[0],):
            raise ValueError(f"bias length {b.shape} does not match {w.shape[0]} rows")
        if self.activation not in (RELU, IDENTITY):
            raise ValueError(f"unknown activation {self.activation!r}")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "bias", b)

    @property
    def in_width(self) -> int:
        return self.weights.shape[1]

    @property
    def out_width(self) -> int:
        return self.weights.shape[0]

    def __call__(self, x: np.ndarray) -> np.ndarray:
        y = x @ self.weights.T + self.bias
        if self.activation == RELU:
            np.maximum(y, 0.0, out=y)
        return y


@dataclass(frozen=True)
class MlpNetwork:
    """Immutable stack of dense layers with an output rule.

    The canonical form produced by all builders has ReLU on every hidden
    layer and identity on the final one; `forward` evaluates any stack.
    """

    layers: tuple
    output_rule: str = "none"

    def __post_init__(self):
        layers = tuple(self.layers)
        if not layers:
            raise ValueError("network needs at least one layer")
        for i in range(1, len(layers)):
            if layers[i].in_width != layers[i - 1].out_width:
                raise ValueError(
                    f"layer {i} expects {layers[i].in_width} inputs, "
                    f"previous layer emits {layers[i - 1].out_width}"
                )
        if self.output_rule not in OUTPUT_RULES:
            raise ValueError(f"unknown output rule {self.output_rule!r}")
        object.__setattr__(self, "layers", layers)

    @property
    def input_width(self) -> int:
        return self.layers[0].in_width

    @property
    def output_width(self) -> int:
        return self.layers[-1].out_width

    @property
    def hidden_widths(self) -> tuple:
        return tuple(layer.out_width for layer in self.layers[:-1])

    @property
    def n_hidden(self) -> int:
        return len(self.layers) - 1

    def forward(self, x) -> np.ndarray:
        """Raw network output for a single vector or an (n, d) batch."""
        x = np.asarray(x, dtype=float)
        single = x.ndim == 1
        if single:
            x = x[None, :]
        if x.shape[1] != self.input_width:
            raise ValueError(f"input width {x.shape[1]} != {self.input_width}")
        for layer in self.layers:
            x = layer(x)
        return x[0] if single else x

    def classify(self, x) -> np.ndarray:
        """Class indices under the network's min-argmax / min-argmin rule.

        Ties resolve to the smallest index.  Softmax never changes the
        argmax of the raw scores, so it classifies like min_argmax.
        """
        raw = self.forward(x)
        single = raw.ndim == 1
        if single:
            raw = raw[None, :]
        if self.output_rule == "min_argmin":
            cls = np.argmin(raw, axis=1)
        elif self.output_rule in ("min_argmax", "softmax"):
            cls = np.argmax(raw, axis=1)
        else:
            raise ValueError("classify requires a classification output rule")
        return int(cls[0]) if single else cls

    def apply_output(self, x) -> np.ndarray:
        """Raw output passed through the output function (softmax only)."""
        raw = self.forward(x)
        if self.output_rule == "softmax":
            return softmax(raw)
        return raw


def softmax(z) -> np.ndarray:
    z = np.asarray(z, dtype=float)
    shifted = z - z.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=-1, keepdims=True)


def forward(net: MlpNetwork, x) -> np.ndarray:
    return net.forward(x)


def classify(net: MlpNetwork, x):
    return net.classify(x)


# ---------------------------------------------------------------------------
# JSON wire format


def network_to_json(net: MlpNetwork) -> str:
    payload = {
        "input_width": net.input_width,
        "output_rule": net.output_rule,
        "layers": [
            {
                "weights": layer.weights.tolist(),
                "bias": layer.bias.tolist(),
                "activation": layer.activation,
            }
            for layer in net.layers
        ],
    }
    return json.dumps(payload, allow_nan=False)


def save_network(net: MlpNetwork, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(network_to_json(net))


def network_from_json(text: str) -> MlpNetwork:
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise NetworkFormatError(f"invalid JSON: {exc}") from exc
    if not isinstance(payload, dict):
        raise NetworkFormatError("top level must be an object")
    try:
        input_width = int(payload["input_width"])
        rule = payload["output_rule"]
        raw_layers = payload["layers"]
    except KeyError as exc:
        raise NetworkFormatError(f"missing field {exc}") from exc
    if rule not in OUTPUT_RULES:
        raise NetworkFormatError(f"unknown output rule {rule!r}")
    if not isinstance(raw_layers, list) or not raw_layers:
        raise NetworkFormatError("layers must be a non-empty list")
    layers = []
    width = input_width
    for i, spec in enumerate(raw_layers):
        try:
            w = np.asarray(spec["weights"], dtype=float)
            b = np.asarray(spec["bias"], dtype=float)
            act = spec["activation"]
        except (KeyError, TypeError, ValueError) as exc:
            raise NetworkFormatError(f"malformed layer spec: {exc}", layer=i) from exc
        if act not in (RELU, IDENTITY):
            raise NetworkFormatError(f"unknown activation {act!r}", layer=i)
        if w.ndim != 2 or w.shape[1] != width:
            raise NetworkFormatError(
                f"weight shape {w.shape} breaks the dimension chain (expected in-width {width})",
                layer=i,
            )
        if b.shape != (w.shape[0],):
            raise NetworkFormatError(f"bias shape {b.shape} does not match rows {w.shape[0]}", layer=i)
        if not (np.isfinite(w).all() and np.isfinite(b).all()):
            raise NetworkFormatError("non-finite weight or bias", layer=i)
        if i < len(raw_layers) - 1 and act != RELU:
            raise NetworkFormatError("hidden layers must use relu", layer=i)
        if i == len(raw_layers) - 1 and act != IDENTITY:
            raise NetworkFormatError("final layer must use identity", layer=i)
        layers.append(DenseLayer(w, b, act))
        width = w.shape[0]
    return MlpNetwork(tuple(layers), rule)


def load_network(source) -> MlpNetwork:
    """Load a network from a path or a JSON string."""
    text = source
    if hasattr(source, "read"):
        text = source.read()
    elif isinstance(source, str) and not source.lstrip().startswith("{"):
        with open(source, "r", encoding="utf-8") as fh:
            text = fh.read()
    elif not isinstance(source, str):
        with open(source, "r", encoding="utf-8") as fh:
            text = fh.read()
    return network_from_json(text)


def agreement_rate(net: MlpNetwork, oracle, sampler, n: int) -> float:
    """Fraction of `n` sampled inputs where the net's class matches the oracle.

    `sampler(n)` must return an (n, input_width) batch; `oracle(batch)` the
    reference class per row.
    """
    if n < 1:
        raise ValueError("need at least one sample")
    x = np.asarray(sampler(n), dtype=float)
    predicted = net.classify(x)
    expected = np.asarray(oracle(x))
    return float(np.mean(predicted == expected))
