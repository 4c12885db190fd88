"""Compact little-endian binary model files.

Layout (all multi-byte ints are unsigned LEB128 varints, reals are
little-endian IEEE):

    magic  b"HRVM\\x01"
    kind   1 byte: 0=DT 1=RF 2=KNN 3=MLP
    n_features varint
    payload: see _encode_* below

Trees store one varint tag per node (feature+1, 0 marks a leaf), float32
thresholds and float64 leaf values.  KNN stores its standardised float32
training matrix and float64 labels.  MLP stores float32 weights/biases and
standardisation statistics (float64 for the label scale).  Models keep the
same quantised parameters in memory, so decode(encode(m)) predicts
bit-identically.
"""

from __future__ import annotations

import struct

import numpy as np

from ..errors import ParseError
from .base import ModelKind, TrainMeta, TrainedModel
from .forest import RandomForest
from .knn import DISTANCES, KnnRegressor
from .mlp import ACTIVATIONS, MlpRegressor
from .tree import LEAF, DecisionTree, TreeNodes

MAGIC = b"HRVM\x01"

_KIND_TAGS = {ModelKind.DT: 0, ModelKind.RF: 1, ModelKind.KNN: 2, ModelKind.MLP: 3}
_TAG_KINDS = {v: k for k, v in _KIND_TAGS.items()}


def _write_varint(buf: bytearray, v: int) -> None:
    if v < 0:
        raise ValueError("varints encode non-negative integers only")
    while True:
        byte = v & 0x7F
        v >>= 7
        if v:
            buf.append(byte | 0x80)
        else:
            buf.append(byte)
            return


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.data):
            raise ParseError(f"model file truncated at byte {self.pos}")
        out = self.data[self.pos : self.pos + n]
        self.pos += n
        return out

    def varint(self) -> int:
        v = 0
        shift = 0
        while True:
            b = self.take(1)[0]
            v |= (b & 0x7F) << shift
            if not b & 0x80:
                return v
            shift += 7
            if shift > 63:
                raise ParseError(f"varint too long at byte {self.pos}")

    def f32(self) -> float:
        return struct.unpack("<f", self.take(4))[0]

    def f64(self) -> float:
        return struct.unpack("<d", self.take(8))[0]

    def f32_array(self, count: int) -> np.ndarray:
        return np.frombuffer(self.take(4 * count), dtype="<f4").astype(np.float32)

    def f64_array(self, count: int) -> np.ndarray:
        return np.frombuffer(self.take(8 * count), dtype="<f8").astype(np.float64)

    def done(self) -> None:
        if self.pos != len(self.data):
            raise ParseError(f"{len(self.data) - self.pos} trailing bytes in model file")


def _encode_nodes(buf: bytearray, nodes: TreeNodes) -> None:
    _write_varint(buf, len(nodes))
    for i in range(len(nodes)):
        f = int(nodes.feature[i])
        _write_varint(buf, f + 1)
        if f == LEAF:
            buf += struct.pack("<d", float(nodes.value[i]))
        else:
            buf += struct.pack("<f", float(nodes.threshold[i]))
            _write_varint(buf, int(nodes.left[i]))
            _write_varint(buf, int(nodes.right[i]))


def _decode_nodes(r: _Reader) -> TreeNodes:
    count = r.varint()
    if count < 1:
        raise ParseError("tree with zero nodes")
    feature = np.empty(count, dtype=np.int32)
    threshold = np.zeros(count, dtype=np.float32)
    left = np.full(count, -1, dtype=np.int32)
    right = np.full(count, -1, dtype=np.int32)
    value = np.zeros(count, dtype=np.float64)
    for i in range(count):
        tag = r.varint()
        if tag == 0:
            feature[i] = LEAF
            value[i] = r.f64()
        else:
            feature[i] = tag - 1
            threshold[i] = np.float32(r.f32())
            left[i] = r.varint()
            right[i] = r.varint()
            if left[i] >= count or right[i] >= count:
                raise ParseError(f"node {i} points past the node table")
    return TreeNodes(feature, threshold, left, right, value)


def encode(model: TrainedModel) -> bytes:
    buf = bytearray(MAGIC)
    buf.append(_KIND_TAGS[model.kind])
    _write_varint(buf, model.n_features)
    if isinstance(model, DecisionTree):
        _encode_nodes(buf, model.nodes)
    elif isinstance(model, RandomForest):
        _write_varint(buf, len(model.trees))
        for t in model.trees:
            _encode_nodes(buf, t)
    elif isinstance(model, KnnRegressor):
        _write_varint(buf, model.k)
        buf.append(DISTANCES.index(model.distance))
        _write_varint(buf, model.X.shape[0])
        buf += model.mu.astype("<f4").tobytes()
        buf += model.sigma.astype("<f4").tobytes()
        buf += model.X.astype("<f4").tobytes()
        buf += model.y.astype("<f8").tobytes()
    elif isinstance(model, MlpRegressor):
        buf.append(ACTIVATIONS.index(model.activation))
        _write_varint(buf, len(model.params32))
        sizes = [model.params32[0][0].shape[0]] + [
            W.shape[1] for W, _ in model.params32
        ]
        for s in sizes:
            _write_varint(buf, s)
        for W, b in model.params32:
            buf += W.astype("<f4").tobytes()
            buf += b.astype("<f4").tobytes()
        buf += model.x_mu.astype("<f4").tobytes()
        buf += model.x_sigma.astype("<f4").tobytes()
        buf += struct.pack("<d", model.y_mu)
        buf += struct.pack("<d", model.y_sigma)
    else:
        raise ParseError(f"cannot encode model of type {type(model).__name__}")
    return bytes(buf)


def decode(data: bytes) -> TrainedModel:
    r = _Reader(data)
    if r.take(len(MAGIC)) != MAGIC:
        raise ParseError("bad magic bytes; not a model file")
    tag = r.take(1)[0]
    if tag not in _TAG_KINDS:
        raise ParseError(f"unknown model kind tag {tag}")
    kind = _TAG_KINDS[tag]
    d = r.varint()

    if kind is ModelKind.DT:
        nodes = _decode_nodes(r)
        r.done()
        meta = TrainMeta(hyperparams={}, seed=0, n_features=d)
        return DecisionTree(nodes, meta)

    if kind is ModelKind.RF:
        count = r.varint()
        trees = tuple(_decode_nodes(r) for _ in range(count))
        r.done()
        meta = TrainMeta(hyperparams={"trees": count}, seed=0, n_features=d)
        return RandomForest(trees, meta)

    if kind is ModelKind.KNN:
        k = r.varint()
        dist_tag = r.take(1)[0]
        if dist_tag >= len(DISTANCES):
            raise ParseError(f"unknown distance tag {dist_tag}")
        m = r.varint()
        mu = r.f32_array(d)
        sigma = r.f32_array(d)
        X = r.f32_array(m * d).reshape(m, d)
        y = r.f64_array(m)
        r.done()
        distance = DISTANCES[dist_tag]
        meta = TrainMeta(hyperparams={"k": k, "distance": distance}, seed=0, n_features=d)
        return KnnRegressor(X, y, mu, sigma, k, distance, meta)

    act_tag = r.take(1)[0]
    if act_tag >= len(ACTIVATIONS):
        raise ParseError(f"unknown activation tag {act_tag}")
    n_layers = r.varint()
    if n_layers < 1:
        raise ParseError("MLP with no layers")
    sizes = [r.varint() for _ in range(n_layers + 1)]
    if sizes[0] != d:
        raise ParseError(f"input width {sizes[0]} disagrees with n_features {d}")
    params32 = []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        W = r.f32_array(fan_in * fan_out).reshape(fan_in, fan_out)
        b = r.f32_array(fan_out)
        params32.append((W, b))
    x_mu = r.f32_array(d)
    x_sigma = r.f32_array(d)
    y_mu = r.f64()
    y_sigma = r.f64()
    r.done()
    activation = ACTIVATIONS[act_tag]
    meta = TrainMeta(
        hyperparams={"hidden_layers": tuple(sizes[1:-1]), "activation": activation},
        seed=0,
        n_features=d,
    )
    return MlpRegressor(params32, activation, x_mu, x_sigma, y_mu, y_sigma, meta)


def serialized_size(model: TrainedModel) -> int:
    """Byte length of the encoded model."""
    return len(encode(model))


def save_model(model: TrainedModel, path) -> None:
    with open(path, "wb") as fh:
        fh.write(encode(model))


def load_model(path) -> TrainedModel:
    with open(path, "rb") as fh:
        return decode(fh.read())
