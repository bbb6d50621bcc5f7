"""Exact realization of univariate polynomials as multiplicative networks."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np
from numpy.polynomial import chebyshev as C

from .net import Layer, MultiplicativeNetwork, NeuronSpec, affine_network

# Above this nominal degree higher modules realize Chebyshev series directly.
CHEBYSHEV_DEGREE_THRESHOLD = 12


@dataclass(frozen=True)
class Polynomial:
    coeffs: tuple[float, ...]
    basis: Literal["monomial", "chebyshev"] = "monomial"
    M: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(float(c) for c in np.atleast_1d(self.coeffs)))
        if not self.coeffs:
            raise ValueError("a polynomial needs at least one coefficient")
        if self.basis not in ("monomial", "chebyshev"):
            raise ValueError(f"unknown basis {self.basis!r}")
        if self.basis == "chebyshev" and not self.M > 0:
            raise ValueError("Chebyshev basis requires M > 0")
        if not np.all(np.isfinite(self.coeffs)):
            raise ValueError("coefficients must be finite")

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if self.basis == "monomial":
            return horner_eval(self, x)
        return C.chebval(x / self.M, self.coeffs)

    def truncated(self, i: int) -> "Polynomial":
        return Polynomial(self.coeffs[: i + 1], self.basis, self.M)


def horner_eval(p: Polynomial, x):
    """Horner evaluation of a monomial-basis polynomial; works on arrays."""
    if p.basis != "monomial":
        raise ValueError("horner_eval needs the monomial basis")
    acc = np.zeros_like(np.asarray(x, dtype=float))
    for c in reversed(p.coeffs):
        acc = acc * x + c
    return acc if np.ndim(acc) else float(acc)


def chebyshev_to_monomial(p: Polynomial) -> Polynomial:
    """Monomial coefficients in x of sum a_k T_k(x/M). Ill-conditioned for large degree."""
    if p.basis != "chebyshev":
        raise ValueError("expected a Chebyshev-basis polynomial")
    mono = C.cheb2poly(np.array(p.coeffs))
    mono = mono / p.M ** np.arange(len(mono))
    # cheb2poly drops nothing, but keep the nominal degree regardless.
    out = np.zeros(len(p.coeffs))
    out[: len(mono)] = mono
    return Polynomial(tuple(out), "monomial")


def realize_monomial_poly(p: Polynomial) -> MultiplicativeNetwork:
    """Network with hidden layer i holding (x, x^(i+1), c_0 + ... + c_i x^i).

    The three-input form POL(x, x, c_0) is folded into the first layer so
    the network takes the scalar x. Depth n + 1, 3n hidden neurons.
    """
    if p.basis != "monomial":
        raise ValueError("realize_monomial_poly needs the monomial basis")
    c = p.coeffs
    n = p.degree
    if n == 0:
        return affine_network([0.0], c[0])
    layers = [Layer.from_neurons([
        NeuronSpec((1.0,)),
        NeuronSpec((0.0,), product_coeff=1.0, product_pair=(0, 0)),
        NeuronSpec((c[1],), bias=c[0]),
    ], in_width=1)]
    for i in range(2, n + 1):
        layers.append(Layer.from_neurons([
            NeuronSpec((1.0, 0.0, 0.0)),
            NeuronSpec((0.0, 0.0, 0.0), product_coeff=1.0, product_pair=(0, 1)),
            NeuronSpec((0.0, c[i], 1.0)),
        ], in_width=3))
    return MultiplicativeNetwork(1, tuple(layers), [[0.0, 0.0, 1.0]], [0.0])


def realize_chebyshev_poly(p: Polynomial) -> MultiplicativeNetwork:
    """Network for sum a_k T_k(x/M) via T_{k+1} = 2u T_k - T_{k-1}.

    Hidden layer k holds (u, T_k(u), T_{k-1}(u), a_0 T_0 + ... + a_{k-1} T_{k-1})
    with u = x/M; the head adds the last term a_n T_n. One product gate per
    layer, depth n + 1, 4n hidden neurons. The first layer is product-free.
    """
    if p.basis != "chebyshev":
        raise ValueError("realize_chebyshev_poly needs the Chebyshev basis")
    a = p.coeffs
    n = p.degree
    if n == 0:
        return affine_network([0.0], a[0])
    inv = 1.0 / p.M
    layers = [Layer.from_neurons([
        NeuronSpec((inv,)),
        NeuronSpec((inv,)),
        NeuronSpec((0.0,), bias=1.0),
        NeuronSpec((0.0,), bias=a[0]),
    ], in_width=1)]
    for k in range(1, n):
        layers.append(Layer.from_neurons([
            NeuronSpec((1.0, 0.0, 0.0, 0.0)),
            NeuronSpec((0.0, 0.0, -1.0, 0.0), product_coeff=2.0, product_pair=(0, 1)),
            NeuronSpec((0.0, 1.0, 0.0, 0.0)),
            NeuronSpec((0.0, a[k], 0.0, 1.0)),
        ], in_width=4))
    return MultiplicativeNetwork(1, tuple(layers), [[0.0, a[n], 0.0, 1.0]], [0.0])


def realize(p: Polynomial, prefer_chebyshev: bool | None = None) -> MultiplicativeNetwork:
    """Pick a realization; Chebyshev series above the degree threshold stay in that basis."""
    if p.basis == "monomial":
        return realize_monomial_poly(p)
    if prefer_chebyshev is None:
        prefer_chebyshev = p.degree > CHEBYSHEV_DEGREE_THRESHOLD
    if prefer_chebyshev:
        return realize_chebyshev_poly(p)
    return realize_monomial_poly(chebyshev_to_monomial(p))
