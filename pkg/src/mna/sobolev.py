"""Sobolev-ball approximation: band selection, tail accounting and the assembled network.

A target is given on the frequency side by F = (2 pi)^-d Ff. Truncating to
[-M, M]^d with M = (2/eps)^(1/r) costs at most M^-r = eps/2 in L2 for
members of the ball {int |Ff| / (2 pi)^d <= 1, int |w|^2r |Ff|^2 / (2 pi)^d <= 1};
the truncated function is then bandlimited for K(t) = e^{it} and is built
to accuracy eps/2.
"""
from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from .cheb import KernelSpec
from .maurey import FourierProfile, build_bandlimited_net, ensure_mass, quadrature_target
from .relu import choose_refinement, lower_to_relu, product_range_bound

EXP_KERNEL_S = 4.0
# |e^{iz}| <= exp(a) on the ellipse with semi-major axis a = dM (s + 1/s)/2 = 2.125 dM.
EXP_KERNEL_GROWTH = (EXP_KERNEL_S + 1 / EXP_KERNEL_S) / 2
RELU_MAX_REFINEMENT = 26


def select_band(eps: float, r: int) -> float:
    if not 0 < eps < 1:
        raise ValueError(f"eps must lie in (0, 1), got {eps}")
    if r < 1:
        raise ValueError(f"smoothness r must be at least 1, got {r}")
    return (2.0 / eps) ** (1.0 / r)


@dataclass(frozen=True)
class TailBound:
    certified: float
    measured: float | None = None


def tail_bound(M: float, r: int, outside_l2: Callable[[float], float] | None = None, d: int | None = None) -> TailBound:
    """Certified tail M^-r; with ``outside_l2`` (M -> int_{outside [-M,M]^d} |Ff|^2) also the measured tail."""
    if not M > 1:
        raise ValueError(f"M must exceed 1, got {M}")
    measured = None
    if outside_l2 is not None:
        if d is None:
            raise ValueError("the measured tail needs the dimension d")
        measured = math.sqrt(max(outside_l2(M), 0.0) / (2 * math.pi) ** d)
    return TailBound(float(M) ** (-r), measured)


def exp_kernel_spec(d: int, M: float) -> KernelSpec:
    """K(t) = e^{it} on [-dM, dM] with s = 4, C_K = exp(2.125 d M) and D_K = 1."""
    if d < 1:
        raise ValueError("dimension must be positive")
    if not M >= 1:
        raise ValueError(f"M must be at least 1, got {M}")
    return KernelSpec(
        real_part=np.cos, imag_part=np.sin, band=d * M, s=EXP_KERNEL_S,
        C_K=math.exp(EXP_KERNEL_GROWTH * d * M), line_bound=1.0, name="exp_i",
    )


@dataclass
class SobolevTarget:
    """Frequency-side description of f.

    ``profile(M)`` returns F = (2 pi)^-d Ff restricted to [-M, M]^d.
    ``exact`` optionally evaluates f itself on an (N, d) array and
    ``outside_l2(M)`` the energy of Ff outside the box; both serve as
    oracles. ``certificates`` asserts the two ball conditions.
    """

    d: int
    r: int
    profile: Callable[[float], FourierProfile]
    certificates: tuple[bool, bool] = (False, False)
    name: str = "custom"
    params: dict = field(default_factory=dict)
    exact: Callable[[np.ndarray], np.ndarray] | None = None
    outside_l2: Callable[[float], float] | None = None

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("dimension must be positive")
        if self.r < 1:
            raise ValueError("smoothness r must be at least 1")
        if isinstance(self.certificates, bool):
            self.certificates = (self.certificates, self.certificates)
        self.certificates = tuple(bool(c) for c in self.certificates)

    @property
    def certified(self) -> bool:
        return all(self.certificates)

    @property
    def within_hypotheses(self) -> bool:
        return self.d >= 2 and self.r >= 1

    def reference(self, M: float, points_per_dim: int = 48) -> Callable:
        """Ground-truth f: the closed form if known, else quadrature of the band-M profile."""
        if self.exact is not None:
            return self.exact
        return quadrature_target(self.profile(M), exp_kernel_spec(self.d, M), points_per_dim)


def _moment_on_box(d: int, r: int, a: float) -> float:
    """int_{[-a,a]^d} |w|^{2r} dw via the multinomial expansion of (sum w_i^2)^r."""
    total = 0.0
    for alpha in itertools.product(range(r + 1), repeat=d):
        if sum(alpha) != r:
            continue
        coef = math.factorial(r) / math.prod(math.factorial(k) for k in alpha)
        total += coef * math.prod(2 * a ** (2 * k + 1) / (2 * k + 1) for k in alpha)
    return total


def indicator_normalization(d: int, r: int, half_width: float = 1.0) -> float:
    """Largest c such that Ff = c on [-a, a]^d satisfies both ball conditions."""
    two_pi_d = (2 * math.pi) ** d
    by_mass = two_pi_d / (2 * half_width) ** d
    by_energy = math.sqrt(two_pi_d / _moment_on_box(d, r, half_width))
    return min(by_mass, by_energy)


def gaussian_normalization(d: int, r: int, sigma: float = 1.0) -> float:
    """Largest c such that Ff = c exp(-|w|^2 / (2 sigma^2)) satisfies both ball conditions."""
    two_pi_d = (2 * math.pi) ** d
    by_mass = two_pi_d / (2 * math.pi * sigma ** 2) ** (d / 2)
    # int |w|^{2r} exp(-|w|^2/sigma^2) dw = sigma^{2r+d} pi^{d/2} Gamma(r + d/2) / Gamma(d/2)
    moment = sigma ** (2 * r + d) * math.pi ** (d / 2) * math.gamma(r + d / 2) / math.gamma(d / 2)
    by_energy = math.sqrt(two_pi_d / moment)
    return min(by_mass, by_energy)


def normalized_indicator(d: int = 2, r: int = 2, half_width: float = 1.0, scale: float = 1.0) -> SobolevTarget:
    """Ff = c 1_{[-a,a]^d}; f(x) = c (2 pi)^-d prod_i 2 sin(a x_i) / x_i.

    ``scale`` multiplies the largest admissible c; certificates hold for scale <= 1.
    """
    c = scale * indicator_normalization(d, r, half_width)
    level = c / (2 * math.pi) ** d
    a = float(half_width)

    def profile(M: float) -> FourierProfile:
        return FourierProfile(
            d, M,
            magnitude=lambda w: level * np.all(np.abs(np.atleast_2d(w)) <= a, axis=1).astype(float),
            phase=lambda w: np.zeros(len(np.atleast_2d(w))),
            support=(-a * np.ones(d), a * np.ones(d)),
            sup_magnitude=level,
            name="indicator",
            params=dict(d=d, half_width=a, level=level),
        )

    def exact(X):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        # 2 sin(a t) / t = 2a sinc(a t / pi)
        return level * np.prod(2 * a * np.sinc(a * X / math.pi), axis=1)

    def outside(M: float) -> float:
        if M >= a:
            return 0.0
        return c * c * ((2 * a) ** d - (2 * M) ** d)

    ok = scale <= 1
    return SobolevTarget(d, r, profile, (ok, ok), "indicator",
                         dict(d=d, r=r, half_width=a, scale=scale, c=c), exact, outside)


def gaussian_target(d: int = 2, r: int = 2, sigma: float = 1.0, scale: float = 1.0) -> SobolevTarget:
    """Ff = c exp(-|w|^2 / (2 sigma^2)); f(x) = c (2 pi)^-d (2 pi sigma^2)^{d/2} exp(-sigma^2 |x|^2 / 2)."""
    c = scale * gaussian_normalization(d, r, sigma)
    level = c / (2 * math.pi) ** d

    def profile(M: float) -> FourierProfile:
        return FourierProfile(
            d, M,
            magnitude=lambda w: level * np.exp(-np.sum(np.square(np.atleast_2d(w)), axis=1) / (2 * sigma ** 2)),
            phase=lambda w: np.zeros(len(np.atleast_2d(w))),
            sup_magnitude=level,
            name="gaussian",
            params=dict(d=d, sigma=sigma, level=level),
        )

    def exact(X):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        peak = level * (2 * math.pi * sigma ** 2) ** (d / 2)
        return peak * np.exp(-sigma ** 2 * np.sum(X * X, axis=1) / 2)

    def outside(M: float) -> float:
        # |Ff|^2 = c^2 exp(-|w|^2 / sigma^2) factorizes over coordinates.
        # full^d - inside^d with inside = full (1 - erfc), kept accurate when erfc is tiny.
        full = math.sqrt(math.pi) * sigma
        return c * c * full ** d * -math.expm1(d * math.log1p(-math.erfc(M / sigma)))

    ok = scale <= 1
    return SobolevTarget(d, r, profile, (ok, ok), "gaussian",
                         dict(d=d, r=r, sigma=sigma, scale=scale, c=c), exact, outside)


def zero_target(d: int = 2, r: int = 1) -> SobolevTarget:
    def profile(M: float) -> FourierProfile:
        return FourierProfile(d, M, magnitude=lambda w: np.zeros(len(np.atleast_2d(w))),
                              phase=lambda w: np.zeros(len(np.atleast_2d(w))),
                              sup_magnitude=0.0, C_F=0.0, name="zero")

    return SobolevTarget(d, r, profile, (True, True), "zero", dict(d=d, r=r),
                         exact=lambda X: np.zeros(len(np.atleast_2d(X))), outside_l2=lambda M: 0.0)


TARGETS = {"indicator": normalized_indicator, "gaussian": gaussian_target, "zero": zero_target}


def make_target(name: str, **params) -> SobolevTarget:
    try:
        factory = TARGETS[name]
    except KeyError:
        raise ValueError(f"unknown target {name!r}; builtins are {sorted(TARGETS)}") from None
    return factory(**params)


@dataclass
class SobolevReport:
    backend: str
    d: int
    r: int
    eps: float
    seed: int
    M: float
    C_F: float
    C_K: float
    n_atoms: int
    degree: int
    depth: int
    neurons: int
    tail_bound: float
    band_bound: float
    certified_bound: float | None
    within_hypotheses: bool
    relu_k: int | None = None
    relu_range: float | None = None
    relu_budget: float | None = None
    multiplicative_depth: int | None = None
    multiplicative_neurons: int | None = None

    def to_dict(self) -> dict:
        return asdict(self)


def build_sobolev_net(target: SobolevTarget, eps: float, seed: int = 0, backend: str = "multiplicative"):
    """Network within eps of f in L2([0,1]^d): tail M^-r = eps/2 plus a bandlimited build at eps/2.

    With ``backend="relu"`` the multiplicative network (Chebyshev kernel
    realization) is lowered with refinement chosen so the gadget budget
    stays below eps/4; the certified bound then includes that budget.
    Returns (network, SobolevReport).
    """
    if backend not in ("multiplicative", "relu"):
        raise ValueError(f"unknown backend {backend!r}")
    M = select_band(eps, target.r)
    tail = tail_bound(M, target.r).certified
    profile = target.profile(M)
    C_F = ensure_mass(profile)
    if C_F > 1 + 3 * profile.C_F_stderr + 1e-9:
        warnings.warn(f"C_F = {C_F:.4g} exceeds 1; the ball certificate does not hold for this target",
                      RuntimeWarning, stacklevel=2)
    if not target.within_hypotheses:
        warnings.warn(f"d = {target.d} is outside the proven regime (d >= 2)", RuntimeWarning, stacklevel=2)
    spec = exp_kernel_spec(target.d, M)
    net, band = build_bandlimited_net(profile, spec, eps / 2, seed,
                                      prefer_chebyshev=True if backend == "relu" else None)
    certified = tail + eps / 2 if target.certified else None
    report = SobolevReport(
        backend=backend, d=target.d, r=target.r, eps=eps, seed=seed, M=M, C_F=C_F, C_K=spec.C_K,
        n_atoms=band.n_atoms, degree=band.degree, depth=net.depth, neurons=net.neurons,
        tail_bound=tail, band_bound=eps / 2, certified_bound=certified,
        within_hypotheses=target.within_hypotheses,
    )
    if backend == "multiplicative":
        return net, report

    report.multiplicative_depth, report.multiplicative_neurons = net.depth, net.neurons
    lo, hi = np.zeros(target.d), np.ones(target.d)
    R = max(product_range_bound(net, lo, hi), 1.0)
    k = choose_refinement(net, R, eps / 4, lo, hi, k_max=RELU_MAX_REFINEMENT)
    relu_net, lowering = lower_to_relu(net, k, R, input_box=(lo, hi))
    report.depth, report.neurons = relu_net.depth, relu_net.neurons
    report.relu_k, report.relu_range, report.relu_budget = k, R, lowering.error_budget
    if certified is not None:
        report.certified_bound = certified + lowering.error_budget
    return relu_net, report
