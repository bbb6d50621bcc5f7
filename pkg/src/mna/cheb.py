"""Bernstein ellipses, certified degree selection, Chebyshev interpolation of
analytic kernels, and kernel networks."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .net import MultiplicativeNetwork, affine_network
from .poly import Polynomial, realize

ScalarFn = Callable[[np.ndarray], np.ndarray]


def _zero(t):
    return np.zeros_like(np.asarray(t, dtype=float))


@dataclass(frozen=True)
class BernsteinEllipse:
    s: float
    M: float
    semi_major: float
    semi_minor: float


def ellipse_axes(s: float, M: float) -> BernsteinEllipse:
    if not s > 1:
        raise ValueError(f"ellipse parameter s must exceed 1, got {s}")
    if not M >= 1:
        raise ValueError(f"band M must be at least 1, got {M}")
    return BernsteinEllipse(s, M, M * (s + 1 / s) / 2, M * (s - 1 / s) / 2)


def certified_bound(C_K: float, s: float, n: int) -> float:
    """Sup-norm bound 2 C_K s^-n / (s - 1) for the degree-n approximant."""
    return 2.0 * C_K * s ** (-n) / (s - 1)


def select_degree(C_K: float, s: float, eps: float) -> int:
    """Smallest admissible degree (at least 2) whose certified bound is <= eps.

    Starts from the closed form n = log2(C_K / (eps (s-1))) / log2(s) and
    raises n until the factor-2 bound actually holds.
    """
    if not 0 < eps < 1:
        raise ValueError(f"eps must lie in (0, 1), got {eps}")
    if not s > 2:
        raise ValueError(f"s must exceed 2, got {s}")
    if not C_K > 0:
        raise ValueError(f"C_K must be positive, got {C_K}")
    closed = math.log2(C_K / (eps * (s - 1))) / math.log2(s)
    n = max(2, math.ceil(closed))
    while certified_bound(C_K, s, n) > eps:
        n += 1
    return n


def chebyshev_points(M: float, n: int) -> np.ndarray:
    """The n + 1 Chebyshev points of the first kind on [-M, M]."""
    theta = np.pi * (np.arange(n + 1) + 0.5) / (n + 1)
    return M * np.cos(theta)


def chebyshev_interpolate(K: ScalarFn, M: float, n: int) -> Polynomial:
    """Degree-n interpolant of K at the Chebyshev points of [-M, M].

    Coefficients come from the discrete cosine sum
    a_k = (2/(n+1)) sum_j K(x_j) cos(k theta_j), with a_0 halved.
    """
    if n < 0:
        raise ValueError("degree must be non-negative")
    theta = np.pi * (np.arange(n + 1) + 0.5) / (n + 1)
    nodes = M * np.cos(theta)
    values = np.asarray(K(nodes), dtype=float)
    bad = np.flatnonzero(~np.isfinite(values))
    if bad.size:
        j = int(bad[0])
        raise ValueError(f"kernel is not finite at node {j} (x = {nodes[j]!r})")
    basis = np.cos(np.outer(np.arange(n + 1), theta))
    coeffs = (2.0 / (n + 1)) * basis @ values
    coeffs[0] /= 2
    return Polynomial(tuple(coeffs), "chebyshev", M)


@dataclass(frozen=True)
class KernelSpec:
    """Analytic kernel K = K_R + i K_I on [-M, M] with its ellipse data.

    ``line_bound`` is D_K, a bound on |K| over the real interval; None when
    unknown (it is only required for bandlimited approximation).
    """

    real_part: ScalarFn
    imag_part: ScalarFn | None = _zero
    band: float = 1.0
    s: float = 4.0
    C_K: float = 1.0
    line_bound: float | None = 1.0
    name: str = "custom"
    check_grid: int = field(default=2001, repr=False)

    def __post_init__(self):
        if self.imag_part is None:
            object.__setattr__(self, "imag_part", _zero)
        if not self.band >= 1:
            raise ValueError(f"band must be at least 1, got {self.band}")
        if not self.s > 2:
            raise ValueError(f"s must exceed 2, got {self.s}")
        if not self.C_K > 0:
            raise ValueError("C_K must be positive")
        if self.line_bound is not None and not 0 < self.line_bound <= 1:
            raise ValueError(f"D_K must lie in (0, 1], got {self.line_bound}")
        t = np.linspace(-self.band, self.band, self.check_grid)
        mag = np.hypot(self.real_part(t), self.imag_part(t))
        if not np.all(np.isfinite(mag)):
            raise ValueError("kernel is not finite on its band")
        if mag.max() > self.C_K * (1 + 1e-12):
            raise ValueError(f"C_K = {self.C_K} is below sup |K| = {mag.max()} on [-M, M]")
        if self.line_bound is not None and mag.max() > self.line_bound * (1 + 1e-12):
            raise ValueError(f"D_K = {self.line_bound} is below sup |K| = {mag.max()}")

    @property
    def is_real(self) -> bool:
        return self.imag_part is _zero

    def __call__(self, t):
        return self.real_part(t) + 1j * self.imag_part(t)


@dataclass(frozen=True)
class KernelNets:
    net_R: MultiplicativeNetwork
    net_I: MultiplicativeNetwork
    degree: int
    certified_bound: float
    poly_R: Polynomial
    poly_I: Polynomial | None


def zero_network() -> MultiplicativeNetwork:
    return affine_network([0.0], 0.0)


def build_kernel_net(spec: KernelSpec, eps: float, prefer_chebyshev: bool | None = None) -> KernelNets:
    """Networks for K_R and K_I within the certified sup bound on [-band, band].

    Degree comes from :func:`select_degree`. Chebyshev series above degree 12
    are realized directly; lower degrees go through the monomial network.
    A real kernel yields the zero network for the imaginary part.
    """
    n = select_degree(spec.C_K, spec.s, eps)
    poly_R = chebyshev_interpolate(spec.real_part, spec.band, n)
    net_R = realize(poly_R, prefer_chebyshev)
    if spec.is_real:
        poly_I, net_I = None, zero_network()
    else:
        poly_I = chebyshev_interpolate(spec.imag_part, spec.band, n)
        net_I = realize(poly_I, prefer_chebyshev)
    return KernelNets(net_R, net_I, n, certified_bound(spec.C_K, spec.s, n), poly_R, poly_I)


# ------------------------------------------------------------ builtin kernels
# Each entry: (K_R, K_I or None, sup |K| on the ellipse E_s^M, sup |K| on the real line or None).


def _sinc(t):
    return np.sinc(t)


def _ck_sinc(s, M):
    b = ellipse_axes(s, M).semi_minor
    return max(1.0, math.cosh(math.pi * b) / (math.pi * b))


KERNELS: dict[str, tuple] = {
    # e^{it} = cos t + i sin t; |e^{iz}| <= e^{|Im z|} <= e^{a}, as in the Sobolev proof.
    "exp_i": (np.cos, np.sin, lambda s, M: math.exp(ellipse_axes(s, M).semi_major), lambda M: 1.0),
    "exp": (np.exp, None, lambda s, M: math.exp(ellipse_axes(s, M).semi_major), lambda M: None),
    "cos": (np.cos, None, lambda s, M: math.cosh(ellipse_axes(s, M).semi_minor), lambda M: 1.0),
    "sinc": (_sinc, None, _ck_sinc, lambda M: 1.0),
    "gauss": (lambda t: np.exp(-np.square(t)), None,
              lambda s, M: math.exp(ellipse_axes(s, M).semi_minor ** 2), lambda M: 1.0),
}


def builtin_kernel(name: str, band: float, s: float = 4.0, C_K: float | None = None) -> KernelSpec:
    try:
        kr, ki, ck, dk = KERNELS[name]
    except KeyError:
        raise ValueError(f"unknown kernel {name!r}; builtins are {sorted(KERNELS)}") from None
    return KernelSpec(
        real_part=kr,
        imag_part=ki if ki is not None else _zero,
        band=band,
        s=s,
        C_K=ck(s, band) if C_K is None else C_K,
        line_bound=dk(band),
        name=name,
    )
