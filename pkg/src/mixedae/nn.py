"""Dense feed-forward networks with exact reverse-mode gradients and Adam.

Everything is float64 numpy. A network is a plain list of layers; forward
returns the full activation trace so backward can run the chain rule
without recomputation. ``backward`` also returns the gradient with
respect to the batch input, which is how encoder/decoder stacks and the
VAE pieces are chained.
"""

from __future__ import annotations

import io
import json
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DimensionError, ShapeError
from .rng import make_rng

TANH = "tanh"
IDENTITY = "identity"
_ACT_CODES = {IDENTITY: 0, TANH: 1}
_ACT_NAMES = {v: k for k, v in _ACT_CODES.items()}

_MAGIC = b"MAEN1\n"


@dataclass
class Layer:
    W: np.ndarray  # out x in
    b: np.ndarray  # out
    activation: str


@dataclass
class Network:
    layers: list[Layer]

    @property
    def in_width(self) -> int:
        return self.layers[0].W.shape[1]

    @property
    def out_width(self) -> int:
        return self.layers[-1].W.shape[0]

    def copy(self) -> "Network":
        return Network([Layer(l.W.copy(), l.b.copy(), l.activation) for l in self.layers])


@dataclass
class Trace:
    """Forward pass record: activations a_0..a_L and pre-activations z_1..z_L."""

    activations: list[np.ndarray]
    pre: list[np.ndarray]

    @property
    def output(self) -> np.ndarray:
        return self.activations[-1]


@dataclass
class Gradients:
    """(dW, db) per layer plus the gradient w.r.t. the batch input."""

    layers: list[tuple[np.ndarray, np.ndarray]]
    wrt_input: np.ndarray


def init_network(dims: list[int], activations: list[str], seed: int) -> Network:
    """Glorot-uniform weights, zero biases, deterministic per seed."""
    if len(dims) < 2:
        raise DimensionError("need at least input and output widths")
    if len(activations) != len(dims) - 1:
        raise DimensionError(f"{len(dims) - 1} layers need {len(dims) - 1} activations")
    if any(d < 1 for d in dims):
        raise DimensionError(f"widths must be >= 1, got {dims}")
    for a in activations:
        if a not in _ACT_CODES:
            raise DimensionError(f"unknown activation {a!r}")
    rng = make_rng(seed)
    layers = []
    for fan_in, fan_out, act in zip(dims, dims[1:], activations):
        s = np.sqrt(6.0 / (fan_in + fan_out))
        W = (2.0 * rng.random((fan_out, fan_in)) - 1.0) * s
        layers.append(Layer(W, np.zeros(fan_out), act))
    return Network(layers)


def forward(net: Network, batch: np.ndarray) -> Trace:
    batch = np.asarray(batch, dtype=np.float64)
    if batch.ndim != 2 or batch.shape[1] != net.in_width:
        raise ShapeError(f"expected B x {net.in_width} batch, got {batch.shape}")
    activations = [batch]
    pre = []
    a = batch
    for layer in net.layers:
        z = a @ layer.W.T + layer.b
        a = np.tanh(z) if layer.activation == TANH else z
        pre.append(z)
        activations.append(a)
    return Trace(activations, pre)


def backward(net: Network, trace: Trace, d_output: np.ndarray) -> Gradients:
    """Exact gradients of the scalar loss whose output-gradient is supplied."""
    d_output = np.asarray(d_output, dtype=np.float64)
    if d_output.shape != trace.output.shape:
        raise ShapeError(
            f"d_output shape {d_output.shape} != output shape {trace.output.shape}"
        )
    grads: list[tuple[np.ndarray, np.ndarray]] = [None] * len(net.layers)  # type: ignore
    delta = d_output
    for k in range(len(net.layers) - 1, -1, -1):
        layer = net.layers[k]
        if layer.activation == TANH:
            a = trace.activations[k + 1]
            delta = delta * (1.0 - a * a)
        grads[k] = (delta.T @ trace.activations[k], delta.sum(axis=0))
        delta = delta @ layer.W
    return Gradients(grads, delta)


@dataclass
class AdamState:
    m: list[tuple[np.ndarray, np.ndarray]]
    v: list[tuple[np.ndarray, np.ndarray]]
    step: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    @classmethod
    def for_network(cls, net: Network, **kw) -> "AdamState":
        zeros = lambda l: (np.zeros_like(l.W), np.zeros_like(l.b))
        return cls(m=[zeros(l) for l in net.layers], v=[zeros(l) for l in net.layers], **kw)


def adam_step(state: AdamState, net: Network, grads: Gradients, lr: float) -> None:
    """Standard Adam update with bias correction, in place."""
    state.step += 1
    b1, b2, eps = state.beta1, state.beta2, state.eps
    c1 = 1.0 - b1**state.step
    c2 = 1.0 - b2**state.step
    for layer, (mW, mb), (vW, vb), (gW, gb) in zip(net.layers, state.m, state.v, grads.layers):
        for p, m, v, g in ((layer.W, mW, vW, gW), (layer.b, mb, vb, gb)):
            m *= b1
            m += (1.0 - b1) * g
            v *= b2
            v += (1.0 - b2) * (g * g)
            p -= lr * (m / c1) / (np.sqrt(v / c2) + eps)


# ----------------------------------------------------------------------
# Checkpoint format: magic, u32 JSON header length, header bytes, then
# u32 network count and per network u32 layer count followed by
# (u32 in, u32 out, u8 activation, f64 W row-major, f64 b) per layer.
# Little-endian throughout; round-trips bit-exactly.
# ----------------------------------------------------------------------

def write_networks(path: str | Path, nets: list[Network], header: dict | None = None) -> None:
    buf = io.BytesIO()
    buf.write(_MAGIC)
    payload = json.dumps(header or {}, sort_keys=True).encode()
    buf.write(struct.pack("<I", len(payload)))
    buf.write(payload)
    buf.write(struct.pack("<I", len(nets)))
    for net in nets:
        buf.write(struct.pack("<I", len(net.layers)))
        for layer in net.layers:
            out_w, in_w = layer.W.shape
            buf.write(struct.pack("<IIB", in_w, out_w, _ACT_CODES[layer.activation]))
            buf.write(np.ascontiguousarray(layer.W, dtype="<f8").tobytes())
            buf.write(np.ascontiguousarray(layer.b, dtype="<f8").tobytes())
    Path(path).write_bytes(buf.getvalue())


def read_networks(path: str | Path) -> tuple[list[Network], dict]:
    raw = Path(path).read_bytes()
    if raw[: len(_MAGIC)] != _MAGIC:
        raise ShapeError(f"{path}: not a network checkpoint")
    off = len(_MAGIC)
    (hlen,) = struct.unpack_from("<I", raw, off)
    off += 4
    header = json.loads(raw[off : off + hlen].decode())
    off += hlen
    (n_nets,) = struct.unpack_from("<I", raw, off)
    off += 4
    nets = []
    for _ in range(n_nets):
        (n_layers,) = struct.unpack_from("<I", raw, off)
        off += 4
        layers = []
        for _ in range(n_layers):
            in_w, out_w, act = struct.unpack_from("<IIB", raw, off)
            off += 9
            W = np.frombuffer(raw, dtype="<f8", count=in_w * out_w, offset=off).reshape(out_w, in_w)
            off += 8 * in_w * out_w
            b = np.frombuffer(raw, dtype="<f8", count=out_w, offset=off)
            off += 8 * out_w
            layers.append(Layer(W.copy(), b.copy(), _ACT_NAMES[act]))
        nets.append(Network(layers))
    return nets, header
