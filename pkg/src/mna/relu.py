"""ReLU networks and a lowering pass from multiplicative networks.

Each product gate u*v is replaced by a ReLU gadget built on the
polarization identity uv = ((u+v)^2 - u^2 - v^2)/2, every square being the
depth-k sawtooth approximation z^2 ~ z - sum_{s<=k} g_s(z)/4^s on [0, 1]
after scaling by 2R. This is a baseline instrument for comparing resource
counts; it is not the construction behind the published ReLU rates.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse

from .net import (FORMAT_VERSION, FormatError, MultiplicativeNetwork, NetworkError, VersionError,
                  _decode_row, _encode_row, _number)

GADGET_BOUND_FACTOR = 6.0


def _canonical(w) -> sparse.csr_matrix:
    # Fixed storage order makes evaluation bit-identical across serialization round trips.
    w = sparse.csr_matrix(w, dtype=float, copy=True)
    w.sum_duplicates()
    w.eliminate_zeros()
    w.sort_indices()
    return w


@dataclass(frozen=True, eq=False)
class ReLUNetwork:
    input_dim: int
    weights: tuple[sparse.csr_matrix, ...]
    biases: tuple[np.ndarray, ...]
    head_weights: np.ndarray
    head_bias: np.ndarray

    def __post_init__(self):
        ws = tuple(_canonical(w) for w in self.weights)
        bs = tuple(np.asarray(b, dtype=float).ravel() for b in self.biases)
        object.__setattr__(self, "weights", ws)
        object.__setattr__(self, "biases", bs)
        hw = np.atleast_2d(np.asarray(self.head_weights, dtype=float))
        object.__setattr__(self, "head_weights", hw)
        object.__setattr__(self, "head_bias", np.atleast_1d(np.asarray(self.head_bias, dtype=float)))
        if len(ws) != len(bs):
            raise NetworkError("one bias vector per layer is required")
        width = self.input_dim
        for i, (w, b) in enumerate(zip(ws, bs), start=1):
            if w.shape[1] != width or b.shape != (w.shape[0],):
                raise NetworkError(f"layer {i} does not chain onto width {width}")
            width = w.shape[0]
        if hw.shape[1] != width or self.head_bias.shape != (hw.shape[0],):
            raise NetworkError(f"head does not match last width {width}")

    @property
    def depth(self) -> int:
        return len(self.weights) + 1

    @property
    def neurons(self) -> int:
        return sum(w.shape[0] for w in self.weights)

    @property
    def widths(self) -> list[int]:
        return [w.shape[0] for w in self.weights]

    @property
    def n_outputs(self) -> int:
        return self.head_weights.shape[0]

    def __call__(self, x):
        return relu_eval(self, x)


def relu_eval_batch(net: ReLUNetwork, X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X.reshape(-1, 1) if net.input_dim == 1 else X.reshape(1, -1)
    if X.shape[1] != net.input_dim:
        raise NetworkError(f"input has dimension {X.shape[1]}, network expects {net.input_dim}")
    widest = max([net.input_dim, *net.widths])
    chunk = max(1, 4_000_000 // widest)
    outs = []
    for i in range(0, len(X), chunk):
        y = X[i:i + chunk].T
        for w, b in zip(net.weights, net.biases):
            y = np.maximum(w @ y + b[:, None], 0.0)
        outs.append((net.head_weights @ y + net.head_bias[:, None]).T)
    out = np.concatenate(outs) if outs else np.zeros((0, net.n_outputs))
    return out[:, 0] if net.n_outputs == 1 else out


def relu_eval(net: ReLUNetwork, x):
    arr = np.atleast_1d(np.asarray(x, dtype=float))
    if arr.ndim != 1 or arr.size != net.input_dim:
        raise NetworkError(f"input has dimension {arr.size}, network expects {net.input_dim}")
    out = relu_eval_batch(net, arr[None, :])
    return float(out[0]) if net.n_outputs == 1 else out[0]


# ------------------------------------------------------------------- gadget


def gadget_size(k: int) -> int:
    """Hidden neurons of one product gadget: 6 absolute-value units plus 9 per sawtooth level."""
    return 6 + 9 * k


def gadget_bound(k: int, R: float) -> float:
    return GADGET_BOUND_FACTOR * R * R * 2.0 ** (-2 * k)


def _gadget_level(s: int, R: float) -> np.ndarray:
    """Dense local map for sawtooth level s of one gadget.

    Level 1 reads the six absolute-value units (s+, s-, u+, u-, v+, v-);
    later levels read the nine units (h1, h2, acc) x 3 squares.
    Returns an array of shape (9, 6 or 9) plus a bias column appended.
    """
    if s == 1:
        W = np.zeros((9, 7))
        for q in range(3):
            cols = (2 * q, 2 * q + 1)
            for r, bias in ((0, 0.0), (1, -0.5), (2, 0.0)):
                W[3 * q + r, cols[0]] = W[3 * q + r, cols[1]] = 1.0 / (2 * R)
                W[3 * q + r, 6] = bias
        return W
    W = np.zeros((9, 10))
    scale = 4.0 ** (-(s - 1))
    for q in range(3):
        h1, h2, acc = 3 * q, 3 * q + 1, 3 * q + 2
        W[h1, h1], W[h1, h2] = 2.0, -4.0
        W[h2, h1], W[h2, h2], W[h2, 9] = 2.0, -4.0, -0.5
        W[acc, acc], W[acc, h1], W[acc, h2] = 1.0, -2.0 * scale, 4.0 * scale
    return W


def _gadget_readout(k: int, R: float) -> np.ndarray:
    """Local weights over the last level giving the product estimate."""
    out = np.zeros(9)
    scale = 4.0 ** (-k)
    sign = (1.0, -1.0, -1.0)
    for q in range(3):
        c = sign[q] * (2 * R) ** 2 / 2
        out[3 * q] += -2.0 * scale * c
        out[3 * q + 1] += 4.0 * scale * c
        out[3 * q + 2] += c
    return out


def _gadget_first_rows(U, u0, V, v0):
    """Rows (over the current layer) for s+, s-, u+, u-, v+, v- of each gate."""
    S, s0 = U + V, u0 + v0
    blocks = [S, -S, U, -U, V, -V]
    consts = [s0, -s0, u0, -u0, v0, -v0]
    m = U.shape[0]
    rows = sparse.vstack(blocks, format="csr")
    # Interleave so that gate g owns rows 6g .. 6g+5.
    perm = np.arange(6 * m).reshape(6, m).T.ravel()
    return rows[perm], np.concatenate(consts)[perm]


def build_product_gadget(k: int, R: float) -> ReLUNetwork:
    """Two-input ReLU network approximating x*y on [-R, R]^2 within 6 R^2 4^-k."""
    if k < 1:
        raise ValueError("refinement depth k must be at least 1")
    if not R > 0:
        raise ValueError("range bound must be positive")
    U = sparse.csr_matrix([[1.0, 0.0]])
    V = sparse.csr_matrix([[0.0, 1.0]])
    first, b0 = _gadget_first_rows(U, np.zeros(1), V, np.zeros(1))
    weights, biases = [first], [b0]
    for s in range(1, k + 1):
        G = _gadget_level(s, R)
        weights.append(sparse.csr_matrix(G[:, :-1]))
        biases.append(G[:, -1])
    return ReLUNetwork(2, tuple(weights), tuple(biases), _gadget_readout(k, R)[None, :], [0.0])


# ------------------------------------------------------------------ intervals


def interval_bounds(net: MultiplicativeNetwork, lo, hi) -> list[tuple[np.ndarray, np.ndarray]]:
    """Interval enclosure of every neuron, layer by layer, for inputs in the box [lo, hi].

    Entry 0 is the input box; entry i the i-th hidden layer.
    """
    lo = np.broadcast_to(np.asarray(lo, dtype=float), (net.input_dim,)).copy()
    hi = np.broadcast_to(np.asarray(hi, dtype=float), (net.input_dim,)).copy()
    out = [(lo, hi)]
    for layer in net.layers:
        c, r = (lo + hi) / 2, (hi - lo) / 2
        absW = abs(layer.weights)
        mid = layer.weights @ c + layer.bias
        rad = absW @ r
        nlo, nhi = mid - rad, mid + rad
        g = np.flatnonzero(layer.product_coeff)
        if g.size:
            j1, j2 = layer.product_pair[g, 0], layer.product_pair[g, 1]
            cands = np.stack([lo[j1] * lo[j2], lo[j1] * hi[j2], hi[j1] * lo[j2], hi[j1] * hi[j2]])
            plo, phi = cands.min(axis=0), cands.max(axis=0)
            a = layer.product_coeff[g]
            nlo[g] += np.where(a > 0, a * plo, a * phi)
            nhi[g] += np.where(a > 0, a * phi, a * plo)
        lo, hi = nlo, nhi
        out.append((lo, hi))
    return out


def product_range_bound(net: MultiplicativeNetwork, lo, hi) -> float:
    """Smallest R with every product-gate input inside [-R, R] (by interval propagation)."""
    bounds = interval_bounds(net, lo, hi)
    R = 0.0
    for i, layer in enumerate(net.layers):
        g = np.flatnonzero(layer.product_coeff)
        if g.size:
            plo, phi = bounds[i]
            idx = np.unique(layer.product_pair[g].ravel())
            R = max(R, float(np.max(np.maximum(np.abs(plo[idx]), np.abs(phi[idx])))))
    return R


def error_budget(net: MultiplicativeNetwork, k: int, R: float, bounds=None, lo=None, hi=None) -> float:
    """Worst-case output error after replacing every gate by a gadget.

    Per neuron: |dy| <= sum |w| |dy_prev| + |a| (B1 |dv| + B2 |du| + |du||dv| + gadget bound),
    with B the interval magnitude bounds of the true values; the head sums
    absolute row weights.
    """
    if bounds is None:
        bounds = interval_bounds(net, lo, hi)
    gb = gadget_bound(k, R)
    delta = np.zeros(net.input_dim)
    for i, layer in enumerate(net.layers):
        plo, phi = bounds[i]
        mag = np.maximum(np.abs(plo), np.abs(phi))
        new = abs(layer.weights) @ delta
        g = np.flatnonzero(layer.product_coeff)
        if g.size:
            j1, j2 = layer.product_pair[g, 0], layer.product_pair[g, 1]
            d1, d2 = delta[j1], delta[j2]
            new[g] += np.abs(layer.product_coeff[g]) * (mag[j1] * d2 + mag[j2] * d1 + d1 * d2 + gb)
        delta = new
    return float(np.max(np.abs(net.head_weights) @ delta))


def choose_refinement(net: MultiplicativeNetwork, R: float, target: float, lo, hi, k_max: int = 40) -> int:
    bounds = interval_bounds(net, lo, hi)
    for k in range(1, k_max + 1):
        if error_budget(net, k, R, bounds) <= target:
            return k
    return k_max


# ------------------------------------------------------------------- lowering


@dataclass
class LoweringReport:
    depth: int
    neurons: int
    gates: int
    k: int
    R: float
    gadget_bound: float
    error_budget: float | None
    block_depths: list[int] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "depth": self.depth, "neurons": self.neurons, "gates": self.gates, "k": self.k,
            "R": self.R, "gadget_bound": self.gadget_bound, "error_budget": self.error_budget,
        }


def lowered_neuron_count(net: MultiplicativeNetwork, k: int) -> int:
    """Neurons of :func:`lower_to_relu`: 2 per carried value per ReLU layer, plus gadgets."""
    total = 0
    for layer in net.layers:
        depth = k + 1 if layer.n_gates else 1
        total += 2 * layer.width * depth + layer.n_gates * gadget_size(k)
    return total


def lower_to_relu(net: MultiplicativeNetwork, k: int, R: float, input_box=None) -> tuple[ReLUNetwork, LoweringReport]:
    """Replace each product gate by a gadget; affine parts are carried exactly as (v+, v-) pairs.

    A multiplicative layer with gates becomes k + 1 ReLU layers, one
    without gates a single layer. Inputs to every gate must stay within
    [-R, R] for the gadget certificate to apply. When ``input_box``
    (lo, hi) is given, the report includes the certified error budget.
    """
    if k < 1:
        raise ValueError("refinement depth k must be at least 1")
    if not R > 0:
        raise ValueError("range bound must be positive")
    d = net.input_dim
    E = sparse.identity(d, format="csr")     # neuron values as affine maps of the current ReLU layer
    e = np.zeros(d)
    weights, biases, block_depths = [], [], []
    for layer in net.layers:
        p = layer.width
        Lmat = (layer.weights @ E).tocsr()
        lvec = layer.weights @ e + layer.bias
        g = np.flatnonzero(layer.product_coeff)
        m = g.size
        rows = [Lmat, -Lmat]
        consts = [lvec, -lvec]
        if m:
            j1, j2 = layer.product_pair[g, 0], layer.product_pair[g, 1]
            gr, gc = _gadget_first_rows(E[j1], e[j1], E[j2], e[j2])
            rows.append(gr)
            consts.append(gc)
        weights.append(sparse.vstack(rows, format="csr"))
        biases.append(np.concatenate(consts))
        if not m:
            E = sparse.hstack([sparse.identity(p), -sparse.identity(p)], format="csr")
            e = np.zeros(p)
            block_depths.append(1)
            continue
        for s in range(1, k + 1):
            G = _gadget_level(s, R)
            Gw = sparse.kron(sparse.identity(m), sparse.csr_matrix(G[:, :-1]))
            weights.append(sparse.block_diag([sparse.identity(2 * p), Gw], format="csr"))
            biases.append(np.concatenate([np.zeros(2 * p), np.tile(G[:, -1], m)]))
        readout = _gadget_readout(k, R)
        gadget_cols = sparse.csr_matrix(
            (np.tile(readout, m) * np.repeat(layer.product_coeff[g], 9),
             (np.repeat(g, 9), np.arange(9 * m))),
            shape=(p, 9 * m),
        )
        E = sparse.hstack([sparse.identity(p), -sparse.identity(p), gadget_cols], format="csr")
        e = np.zeros(p)
        block_depths.append(k + 1)
    hw = net.head_weights @ E
    hb = net.head_weights @ e + net.head_bias
    hw = hw.toarray() if sparse.issparse(hw) else np.asarray(hw)
    relu_net = ReLUNetwork(d, tuple(weights), tuple(biases), hw, hb)
    budget = None
    if input_box is not None:
        budget = error_budget(net, k, R, lo=input_box[0], hi=input_box[1])
    report = LoweringReport(relu_net.depth, relu_net.neurons, net.n_gates, k, R, gadget_bound(k, R),
                            budget, block_depths)
    return relu_net, report


# -------------------------------------------------------------- serialization


def to_document(net: ReLUNetwork) -> dict:
    layers = []
    for w, b in zip(net.weights, net.biases):
        layers.append([{"w": _encode_row(w.getrow(j), w.shape[1]), "b": float(b[j])} for j in range(w.shape[0])])
    if net.n_outputs == 1:
        head = {"w": net.head_weights[0].tolist(), "b": float(net.head_bias[0])}
    else:
        head = {"w": net.head_weights.tolist(), "b": net.head_bias.tolist()}
    return {"version": FORMAT_VERSION, "kind": "relu", "input_dim": net.input_dim, "layers": layers, "head": head}


def from_document(doc) -> ReLUNetwork:
    if not isinstance(doc, dict):
        raise FormatError("$", "document must be an object")
    if doc.get("version") != FORMAT_VERSION:
        raise VersionError("$.version", f"unsupported version {doc.get('version')!r}, expected {FORMAT_VERSION}")
    if doc.get("kind") != "relu":
        raise FormatError("$.kind", "expected 'relu'")
    d = doc.get("input_dim")
    if not isinstance(d, int) or isinstance(d, bool) or d < 1:
        raise FormatError("$.input_dim", "must be a positive integer")
    if not isinstance(doc.get("layers"), list):
        raise FormatError("$.layers", "must be a list")
    weights, biases, width = [], [], d
    for i, neurons in enumerate(doc["layers"]):
        if not isinstance(neurons, list):
            raise FormatError(f"$.layers[{i}]", "layer must be a list of neurons")
        W = np.zeros((len(neurons), width))
        b = np.zeros(len(neurons))
        for j, nrn in enumerate(neurons):
            path = f"$.layers[{i}][{j}]"
            if not isinstance(nrn, dict) or "w" not in nrn or "b" not in nrn:
                raise FormatError(path, "neuron must be an object with 'w' and 'b'")
            W[j] = _decode_row(nrn["w"], width, f"{path}.w")
            b[j] = _number(nrn["b"], f"{path}.b")
        weights.append(sparse.csr_matrix(W))
        biases.append(b)
        width = len(neurons)
    head = doc.get("head")
    if not isinstance(head, dict) or "w" not in head or "b" not in head:
        raise FormatError("$.head", "must be an object with 'w' and 'b'")
    if isinstance(head["b"], list):
        hw = np.array([_decode_row(r, width, f"$.head.w[{k}]") for k, r in enumerate(head["w"])])
        hb = np.array([_number(v, f"$.head.b[{k}]") for k, v in enumerate(head["b"])])
    else:
        hw = _decode_row(head["w"], width, "$.head.w")[None, :]
        hb = np.array([_number(head["b"], "$.head.b")])
    return ReLUNetwork(d, tuple(weights), tuple(biases), hw, hb)


def serialize(net: ReLUNetwork) -> bytes:
    return json.dumps(to_document(net), separators=(",", ":")).encode()


def deserialize(data: bytes | str) -> ReLUNetwork:
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise FormatError("$", f"invalid JSON: {exc}") from None
    return from_document(doc)
