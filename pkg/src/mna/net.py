"""Multiplicative networks: data model, evaluation, composition, serialization.

A hidden neuron computes ``<w, y_prev> + a * y_prev[j1] * y_prev[j2] + b``;
there is no activation function anywhere. Layers are stored as sparse
weight matrices plus per-neuron product coefficients, pairs and biases so
that networks with millions of neurons (the Sobolev pipeline) stay cheap.
The affine head may have several outputs; parallel composition exposes one
output per sub-network until a linear head collapses them.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import sparse

FORMAT_VERSION = 1

# Cap on width * batch for one evaluation chunk.
_CHUNK_ELEMENTS = 4_000_000


class NetworkError(ValueError):
    """Malformed network or rejected input."""


class CompositionError(NetworkError):
    pass


class NumericalOverflow(ArithmeticError):
    def __init__(self, layer: int, message: str = ""):
        self.layer = layer
        super().__init__(message or f"non-finite value produced in layer {layer}")


class FormatError(ValueError):
    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


class VersionError(FormatError):
    pass


@dataclass(frozen=True)
class NeuronSpec:
    linear_weights: tuple[float, ...]
    product_coeff: float = 0.0
    product_pair: tuple[int, int] = (0, 0)
    bias: float = 0.0


def _frozen(arr, dtype=float) -> np.ndarray:
    out = np.array(arr, dtype=dtype)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class Layer:
    """One hidden layer; ``weights`` has shape (width, in_width)."""

    weights: sparse.csr_matrix
    product_coeff: np.ndarray
    product_pair: np.ndarray
    bias: np.ndarray

    def __post_init__(self):
        w = sparse.csr_matrix(self.weights, dtype=float)
        w.sum_duplicates()
        w.eliminate_zeros()
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "product_coeff", _frozen(self.product_coeff))
        object.__setattr__(self, "product_pair", _frozen(self.product_pair, np.int64).reshape(-1, 2))
        object.__setattr__(self, "bias", _frozen(self.bias))
        width, in_width = w.shape
        if not (len(self.product_coeff) == len(self.bias) == len(self.product_pair) == width):
            raise NetworkError("layer arrays disagree on width")
        if width and (self.product_pair.min() < 0 or self.product_pair.max() >= in_width):
            raise NetworkError(f"product pair index outside previous width {in_width}")
        if not (np.all(np.isfinite(w.data)) and np.all(np.isfinite(self.product_coeff))
                and np.all(np.isfinite(self.bias))):
            raise NetworkError("non-finite weight in layer")

    @property
    def width(self) -> int:
        return self.weights.shape[0]

    @property
    def in_width(self) -> int:
        return self.weights.shape[1]

    @property
    def n_gates(self) -> int:
        return int(np.count_nonzero(self.product_coeff))

    @classmethod
    def from_neurons(cls, neurons: Sequence[NeuronSpec], in_width: int) -> "Layer":
        rows = []
        for j, nrn in enumerate(neurons):
            if len(nrn.linear_weights) != in_width:
                raise NetworkError(
                    f"neuron {j}: {len(nrn.linear_weights)} linear weights, previous width {in_width}"
                )
            rows.append(nrn.linear_weights)
        w = np.array(rows, dtype=float).reshape(len(neurons), in_width)
        return cls(
            weights=sparse.csr_matrix(w),
            product_coeff=[n.product_coeff for n in neurons],
            product_pair=np.array([n.product_pair for n in neurons], dtype=np.int64).reshape(-1, 2),
            bias=[n.bias for n in neurons],
        )

    @classmethod
    def passthrough(cls, width: int) -> "Layer":
        return cls(
            weights=sparse.identity(width, format="csr"),
            product_coeff=np.zeros(width),
            product_pair=np.zeros((width, 2), dtype=np.int64),
            bias=np.zeros(width),
        )

    def neuron(self, j: int) -> NeuronSpec:
        return NeuronSpec(
            linear_weights=tuple(self.weights.getrow(j).toarray().ravel().tolist()),
            product_coeff=float(self.product_coeff[j]),
            product_pair=(int(self.product_pair[j, 0]), int(self.product_pair[j, 1])),
            bias=float(self.bias[j]),
        )

    def neurons(self) -> list[NeuronSpec]:
        return [self.neuron(j) for j in range(self.width)]

    def apply(self, y: np.ndarray) -> np.ndarray:
        # y has shape (in_width, batch)
        out = self.weights @ y
        out += self.bias[:, None]
        gated = np.flatnonzero(self.product_coeff)
        if gated.size:
            j1 = self.product_pair[gated, 0]
            j2 = self.product_pair[gated, 1]
            out[gated] += self.product_coeff[gated, None] * y[j1] * y[j2]
        return out

    def same_as(self, other: "Layer") -> bool:
        return (
            self.weights.shape == other.weights.shape
            and (self.weights != other.weights).nnz == 0
            and np.array_equal(self.product_coeff, other.product_coeff)
            and np.array_equal(self.product_pair[self.product_coeff != 0],
                               other.product_pair[other.product_coeff != 0])
            and np.array_equal(self.bias, other.bias)
        )


@dataclass(frozen=True, eq=False)
class MultiplicativeNetwork:
    """Layered multiplicative network with an affine head.

    ``head_weights`` has shape (n_outputs, last_width) where ``last_width``
    is the width of the final hidden layer (or ``input_dim`` without hidden
    layers).
    """

    input_dim: int
    layers: tuple[Layer, ...]
    head_weights: np.ndarray
    head_bias: np.ndarray

    def __post_init__(self):
        if self.input_dim < 1:
            raise NetworkError("input_dim must be positive")
        object.__setattr__(self, "layers", tuple(self.layers))
        hw = np.array(self.head_weights, dtype=float)
        if hw.ndim == 1:
            hw = hw[None, :]
        object.__setattr__(self, "head_weights", _frozen(hw))
        object.__setattr__(self, "head_bias", _frozen(np.atleast_1d(self.head_bias)))
        width = self.input_dim
        for i, layer in enumerate(self.layers):
            if layer.in_width != width:
                raise NetworkError(
                    f"layer {i + 1} expects width {layer.in_width}, previous layer has {width}"
                )
            width = layer.width
        if self.head_weights.shape[1] != width:
            raise NetworkError(f"head has {self.head_weights.shape[1]} weights, last width is {width}")
        if self.head_bias.shape != (self.head_weights.shape[0],):
            raise NetworkError("head bias does not match the number of outputs")
        if not (np.all(np.isfinite(self.head_weights)) and np.all(np.isfinite(self.head_bias))):
            raise NetworkError("non-finite weight in head")

    @property
    def depth(self) -> int:
        return len(self.layers) + 1

    @property
    def neurons(self) -> int:
        return sum(layer.width for layer in self.layers)

    @property
    def n_outputs(self) -> int:
        return self.head_weights.shape[0]

    @property
    def last_width(self) -> int:
        return self.layers[-1].width if self.layers else self.input_dim

    @property
    def widths(self) -> list[int]:
        return [layer.width for layer in self.layers]

    @property
    def n_gates(self) -> int:
        return sum(layer.n_gates for layer in self.layers)

    def parameter_count(self) -> int:
        """Informational: p_i*p_{i-1} linear weights + product coeff + bias per neuron, plus head."""
        count, prev = 0, self.input_dim
        for layer in self.layers:
            count += layer.width * prev + 2 * layer.width
            prev = layer.width
        return count + self.head_weights.size + self.head_bias.size

    def __eq__(self, other):
        if not isinstance(other, MultiplicativeNetwork):
            return NotImplemented
        return (
            self.input_dim == other.input_dim
            and len(self.layers) == len(other.layers)
            and all(a.same_as(b) for a, b in zip(self.layers, other.layers))
            and np.array_equal(self.head_weights, other.head_weights)
            and np.array_equal(self.head_bias, other.head_bias)
        )

    __hash__ = None

    def __call__(self, x):
        return evaluate(self, x)


def _forward(net: MultiplicativeNetwork, xb: np.ndarray, keep_hidden: bool):
    y = xb.T.copy()
    hidden = []
    for i, layer in enumerate(net.layers, start=1):
        with np.errstate(over="ignore", invalid="ignore"):
            y = layer.apply(y)
        if not np.all(np.isfinite(y)):
            raise NumericalOverflow(i)
        if keep_hidden:
            hidden.append(y.T.copy())
    out = (net.head_weights @ y + net.head_bias[:, None]).T
    if not np.all(np.isfinite(out)):
        raise NumericalOverflow(net.depth)
    return out, hidden


def evaluate_batch(net: MultiplicativeNetwork, X) -> np.ndarray:
    """Evaluate at the rows of ``X``; returns shape (N,) or (N, n_outputs)."""
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X.reshape(-1, 1) if net.input_dim == 1 else X.reshape(1, -1)
    if X.shape[1] != net.input_dim:
        raise NetworkError(f"input has dimension {X.shape[1]}, network expects {net.input_dim}")
    widest = max([net.input_dim, *net.widths])
    chunk = max(1, _CHUNK_ELEMENTS // widest)
    parts = [_forward(net, X[i:i + chunk], False)[0] for i in range(0, len(X), chunk)]
    out = np.concatenate(parts, axis=0) if parts else np.zeros((0, net.n_outputs))
    return out[:, 0] if net.n_outputs == 1 else out


def evaluate(net: MultiplicativeNetwork, x):
    """Evaluate at a single point; returns a float for single-output networks."""
    arr = np.atleast_1d(np.asarray(x, dtype=float))
    if arr.ndim != 1 or arr.size != net.input_dim:
        raise NetworkError(f"input has dimension {arr.size}, network expects {net.input_dim}")
    out, _ = _forward(net, arr[None, :], False)
    return float(out[0, 0]) if net.n_outputs == 1 else out[0]


def hidden_states(net: MultiplicativeNetwork, X) -> list[np.ndarray]:
    """Per hidden layer, the (N, width) array of neuron values at the rows of ``X``."""
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X.reshape(-1, 1) if net.input_dim == 1 else X.reshape(1, -1)
    return _forward(net, X, True)[1]


def count_resources(net: MultiplicativeNetwork) -> tuple[int, int]:
    return net.depth, net.neurons


def affine_network(weights, bias: float, input_dim: int | None = None) -> MultiplicativeNetwork:
    w = np.atleast_1d(np.asarray(weights, dtype=float))
    return MultiplicativeNetwork(input_dim or len(w), (), w[None, :], [float(bias)])


def append_linear_head(net: MultiplicativeNetwork, weights, bias: float) -> MultiplicativeNetwork:
    """Set the affine head.

    For a multi-output network the weights combine its outputs; otherwise
    they replace the head over the last hidden layer.
    """
    w = np.atleast_1d(np.asarray(weights, dtype=float))
    if net.n_outputs > 1:
        if len(w) != net.n_outputs:
            raise NetworkError(f"{len(w)} head weights for {net.n_outputs} sub-outputs")
        return MultiplicativeNetwork(
            net.input_dim, net.layers, (w @ net.head_weights)[None, :], [float(w @ net.head_bias + bias)]
        )
    if len(w) != net.last_width:
        raise NetworkError(f"{len(w)} head weights for last width {net.last_width}")
    return MultiplicativeNetwork(net.input_dim, net.layers, w[None, :], [float(bias)])


def scale_output(net: MultiplicativeNetwork, factor: float) -> MultiplicativeNetwork:
    return MultiplicativeNetwork(net.input_dim, net.layers, factor * net.head_weights, factor * net.head_bias)


def pad_to_depth(net: MultiplicativeNetwork, depth: int) -> MultiplicativeNetwork:
    """Append identity pass-through layers until ``net.depth == depth``."""
    if depth < net.depth:
        raise CompositionError(f"cannot pad depth {net.depth} down to {depth}")
    extra = [Layer.passthrough(net.last_width) for _ in range(depth - net.depth)]
    return MultiplicativeNetwork(net.input_dim, net.layers + tuple(extra), net.head_weights, net.head_bias)


# ---------------------------------------------------------------- composition


def _normalize_map(m, input_dim: int):
    if m is None:
        return np.eye(input_dim), np.zeros(input_dim)
    if isinstance(m, tuple):
        A, c = m
    else:
        A, c = m, None
    A = np.atleast_2d(np.asarray(A, dtype=float))
    c = np.zeros(A.shape[0]) if c is None else np.atleast_1d(np.asarray(c, dtype=float))
    if A.shape[1] != input_dim or c.shape != (A.shape[0],):
        raise CompositionError(f"input map of shape {A.shape} does not act on dimension {input_dim}")
    return A, c


def _single_coordinate(row: np.ndarray):
    nz = np.flatnonzero(row)
    if nz.size == 0:
        return None, 0.0
    if nz.size == 1:
        return int(nz[0]), float(row[nz[0]])
    return -1, 0.0


def _absorb_first_layer(layer: Layer, A: np.ndarray, c: np.ndarray):
    """Rewrite ``layer`` to read x directly instead of t = A x + c, if possible.

    Returns (dense linear weights, product coeffs, pairs, bias) or None when
    a product gate touches a map row that mixes several input coordinates.
    """
    W = layer.weights.toarray()
    lin = W @ A
    bias = layer.bias + W @ c
    coeff = np.zeros(layer.width)
    pairs = np.zeros((layer.width, 2), dtype=np.int64)
    for j in np.flatnonzero(layer.product_coeff):
        a = layer.product_coeff[j]
        j1, j2 = layer.product_pair[j]
        p, alpha = _single_coordinate(A[j1])
        q, gamma = _single_coordinate(A[j2])
        beta, delta = c[j1], c[j2]
        if p is None:
            lin[j] += a * beta * A[j2]
            bias[j] += a * beta * delta
        elif q is None:
            lin[j] += a * delta * A[j1]
            bias[j] += a * beta * delta
        elif p < 0 or q < 0:
            return None
        else:
            coeff[j] = a * alpha * gamma
            pairs[j] = (p, q)
            lin[j, p] += a * alpha * delta
            lin[j, q] += a * beta * gamma
            bias[j] += a * beta * delta
    return lin, coeff, pairs, bias


def _block_layer(blocks: list[Layer], in_offsets, out_offsets, in_width: int, out_width: int) -> Layer:
    rows, cols, vals = [], [], []
    coeff = np.zeros(out_width)
    pairs = np.zeros((out_width, 2), dtype=np.int64)
    bias = np.zeros(out_width)
    coo_cache: dict[int, sparse.coo_matrix] = {}
    for layer, io, oo in zip(blocks, in_offsets, out_offsets):
        coo = coo_cache.get(id(layer))
        if coo is None:
            coo = coo_cache[id(layer)] = layer.weights.tocoo()
        rows.append(coo.row + oo)
        cols.append(coo.col + io)
        vals.append(coo.data)
        sl = slice(oo, oo + layer.width)
        coeff[sl] = layer.product_coeff
        pairs[sl] = layer.product_pair + io
        bias[sl] = layer.bias
    w = sparse.csr_matrix(
        (np.concatenate(vals) if vals else [], (np.concatenate(rows) if rows else [], np.concatenate(cols) if cols else [])),
        shape=(out_width, in_width),
    )
    return Layer(w, coeff, pairs, bias)


def compose_parallel(
    nets: Sequence[MultiplicativeNetwork],
    input_maps: Sequence | None = None,
    pad: bool = True,
) -> MultiplicativeNetwork:
    """Run sub-networks side by side on affine images of a shared input.

    ``input_maps[k]`` is ``(A, c)`` (or a bare matrix, or None for the
    identity) so that sub-network k sees ``A @ x + c``. The maps are
    absorbed into the first hidden layer. When a product gate in a first
    layer would have to multiply two mixed coordinates (e.g. (w.x)^2 with
    d >= 2), no single neuron can express it; in that case one shared affine
    layer computing the distinct map outputs is prepended instead.

    The result has one output per sub-network output, in order.
    """
    nets = list(nets)
    if not nets:
        raise CompositionError("nothing to compose")
    if input_maps is None:
        input_maps = [None] * len(nets)
    if len(input_maps) != len(nets):
        raise CompositionError("one input map per network is required")
    d = None
    maps = []
    for net, m in zip(nets, input_maps):
        if m is None:
            d_k = net.input_dim
        else:
            d_k = np.atleast_2d(np.asarray(m[0] if isinstance(m, tuple) else m)).shape[1]
        if d is None:
            d = d_k
        elif d != d_k:
            raise CompositionError("input maps disagree on the shared input dimension")
        A, c = _normalize_map(m, d)
        if A.shape[0] != net.input_dim:
            raise CompositionError(f"input map yields {A.shape[0]} values, network expects {net.input_dim}")
        maps.append((A, c))

    depth = max(net.depth for net in nets)
    if any(net.depth != depth for net in nets):
        if not pad:
            raise CompositionError(f"depths {sorted({n.depth for n in nets})} differ and padding is off")
        nets = [pad_to_depth(net, depth) for net in nets]
    if depth == 1:
        # Pure affine sub-networks: fold the maps into the heads.
        hw = np.vstack([net.head_weights @ A for net, (A, _) in zip(nets, maps)])
        hb = np.concatenate([net.head_weights @ c + net.head_bias for net, (_, c) in zip(nets, maps)])
        return MultiplicativeNetwork(d, (), hw, hb)

    absorbed = [_absorb_first_layer(net.layers[0], A, c) for net, (A, c) in zip(nets, maps)]
    prefix: list[Layer] = []
    if any(a is None for a in absorbed):
        # Shared input layer holding each distinct map output once.
        index: dict[bytes, int] = {}
        rows_A, rows_c, offsets = [], [], []
        for A, c in maps:
            key = A.tobytes() + c.tobytes()
            if key not in index:
                index[key] = sum(len(r) for r in rows_c)
                rows_A.append(A)
                rows_c.append(c)
            offsets.append(index[key])
        width0 = sum(len(r) for r in rows_c)
        prefix = [Layer(sparse.csr_matrix(np.vstack(rows_A)), np.zeros(width0),
                        np.zeros((width0, 2), dtype=np.int64), np.concatenate(rows_c))]
        first_blocks = [net.layers[0] for net in nets]
        in_offsets = offsets
        in_width = width0
    else:
        first_blocks = [Layer(sparse.csr_matrix(lin), co, pr, bi) for lin, co, pr, bi in absorbed]
        in_offsets = [0] * len(nets)
        in_width = d

    def build(blocks, in_off, in_w):
        out_off = np.concatenate([[0], np.cumsum([b.width for b in blocks])[:-1]]).astype(int)
        out_w = int(sum(b.width for b in blocks))
        return _block_layer(blocks, in_off, out_off, in_w, out_w), out_off, out_w

    layer, out_off, out_w = build(first_blocks, in_offsets, in_width)
    layers = prefix + [layer]
    for i in range(1, depth - 1):
        layer, new_off, new_w = build([net.layers[i] for net in nets], out_off, out_w)
        layers.append(layer)
        out_off, out_w = new_off, new_w
    n_out = sum(net.n_outputs for net in nets)
    hw = np.zeros((n_out, out_w))
    hb = np.zeros(n_out)
    r = 0
    for net, off in zip(nets, out_off):
        k = net.n_outputs
        hw[r:r + k, off:off + net.last_width] = net.head_weights
        hb[r:r + k] = net.head_bias
        r += k
    return MultiplicativeNetwork(d, tuple(layers), hw, hb)


# -------------------------------------------------------------- serialization


def _encode_row(row: sparse.csr_matrix, width: int):
    if row.nnz * 2 < width:
        return {"idx": row.indices.tolist(), "val": row.data.tolist()}
    return row.toarray().ravel().tolist()


def _decode_row(obj, width: int, path: str) -> np.ndarray:
    out = np.zeros(width)
    if isinstance(obj, dict):
        try:
            idx, val = obj["idx"], obj["val"]
        except KeyError as exc:
            raise FormatError(path, f"sparse weights need 'idx' and 'val', missing {exc}") from None
        if len(idx) != len(val):
            raise FormatError(path, "'idx' and 'val' lengths differ")
        for k, (i, v) in enumerate(zip(idx, val)):
            if not isinstance(i, int) or not 0 <= i < width:
                raise FormatError(f"{path}.idx[{k}]", f"index {i!r} outside width {width}")
            out[i] = _number(v, f"{path}.val[{k}]")
        return out
    if not isinstance(obj, list):
        raise FormatError(path, "weights must be a list or a sparse object")
    if len(obj) != width:
        raise FormatError(path, f"expected {width} weights, got {len(obj)}")
    for k, v in enumerate(obj):
        out[k] = _number(v, f"{path}[{k}]")
    return out


def _number(v, path: str) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise FormatError(path, f"expected a number, got {v!r}")
    return float(v)


def to_document(net: MultiplicativeNetwork) -> dict:
    layers = []
    for layer in net.layers:
        neurons = []
        for j in range(layer.width):
            neurons.append({
                "w": _encode_row(layer.weights.getrow(j), layer.in_width),
                "a": float(layer.product_coeff[j]),
                "pair": [int(p) for p in layer.product_pair[j]],
                "b": float(layer.bias[j]),
            })
        layers.append(neurons)
    if net.n_outputs == 1:
        head = {"w": net.head_weights[0].tolist(), "b": float(net.head_bias[0])}
    else:
        head = {"w": net.head_weights.tolist(), "b": net.head_bias.tolist()}
    return {"version": FORMAT_VERSION, "input_dim": net.input_dim, "layers": layers, "head": head}


def from_document(doc) -> MultiplicativeNetwork:
    if not isinstance(doc, dict):
        raise FormatError("$", "document must be an object")
    if "version" not in doc:
        raise FormatError("$.version", "missing")
    if doc["version"] != FORMAT_VERSION:
        raise VersionError("$.version", f"unsupported version {doc['version']!r}, expected {FORMAT_VERSION}")
    kind = doc.get("kind", "multiplicative")
    if kind != "multiplicative":
        raise FormatError("$.kind", f"expected a multiplicative network, got {kind!r}")
    for key in ("input_dim", "layers", "head"):
        if key not in doc:
            raise FormatError(f"$.{key}", "missing")
    d = doc["input_dim"]
    if not isinstance(d, int) or isinstance(d, bool) or d < 1:
        raise FormatError("$.input_dim", "must be a positive integer")
    if not isinstance(doc["layers"], list):
        raise FormatError("$.layers", "must be a list")
    layers = []
    width = d
    for i, neurons in enumerate(doc["layers"]):
        lp = f"$.layers[{i}]"
        if not isinstance(neurons, list):
            raise FormatError(lp, "layer must be a list of neurons")
        W = np.zeros((len(neurons), width))
        a = np.zeros(len(neurons))
        pairs = np.zeros((len(neurons), 2), dtype=np.int64)
        b = np.zeros(len(neurons))
        for j, nrn in enumerate(neurons):
            np_ = f"{lp}[{j}]"
            if not isinstance(nrn, dict):
                raise FormatError(np_, "neuron must be an object")
            for key in ("w", "a", "pair", "b"):
                if key not in nrn:
                    raise FormatError(f"{np_}.{key}", "missing")
            W[j] = _decode_row(nrn["w"], width, f"{np_}.w")
            a[j] = _number(nrn["a"], f"{np_}.a")
            b[j] = _number(nrn["b"], f"{np_}.b")
            pair = nrn["pair"]
            if (not isinstance(pair, list) or len(pair) != 2
                    or not all(isinstance(p, int) and 0 <= p < width for p in pair)):
                raise FormatError(f"{np_}.pair", f"must be two indices below {width}")
            pairs[j] = pair
        layers.append(Layer(sparse.csr_matrix(W), a, pairs, b))
        width = len(neurons)
    head = doc["head"]
    if not isinstance(head, dict) or "w" not in head or "b" not in head:
        raise FormatError("$.head", "must be an object with 'w' and 'b'")
    if isinstance(head["b"], list):
        if not isinstance(head["w"], list) or len(head["w"]) != len(head["b"]):
            raise FormatError("$.head.w", "one weight row per output is required")
        hw = np.array([_decode_row(r, width, f"$.head.w[{k}]") for k, r in enumerate(head["w"])])
        hb = np.array([_number(v, f"$.head.b[{k}]") for k, v in enumerate(head["b"])])
    else:
        hw = _decode_row(head["w"], width, "$.head.w")[None, :]
        hb = np.array([_number(head["b"], "$.head.b")])
    return MultiplicativeNetwork(d, tuple(layers), hw, hb)


def serialize(net: MultiplicativeNetwork) -> bytes:
    # json writes floats with repr(), the shortest round-trip decimal.
    return json.dumps(to_document(net), separators=(",", ":")).encode()


def deserialize(data: bytes | str) -> MultiplicativeNetwork:
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise FormatError("$", f"invalid JSON: {exc}") from None
    return from_document(doc)
