"""Fourier profiles, Maurey atom sampling, and bandlimited-function networks.

A generalized bandlimited function is f(x) = Re int F(w) K(w.x) dw over
[-M, M]^d. Writing F = |F| exp(i theta) and C_F = int |F|, f is the mean of
C_F [cos(theta(w)) K_R(w.x) - sin(theta(w)) K_I(w.x)] under the density
|F|/C_F. Drawing n frequencies from that density gives an n-term convex
combination with L2 error of order C_F / sqrt(n); replacing K_R and K_I by
kernel networks gives the network.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np
from numpy.polynomial.legendre import leggauss

from .cheb import KernelSpec, build_kernel_net
from .net import MultiplicativeNetwork, affine_network, append_linear_head, compose_parallel

ProfileFn = Callable[[np.ndarray], np.ndarray]

GRID_MAX_DIM = 4
_SUP_SAFETY = 1.01


@dataclass
class FourierProfile:
    """|F| and arg F on [-M, M]^d.

    ``support`` optionally narrows the box (lo, hi) outside which |F| is
    zero; quadrature and sampling then work on that box. ``sup_magnitude``
    may be given when known, otherwise it is estimated on a grid.
    ``C_F`` is filled in by :func:`total_mass`.
    """

    d: int
    M: float
    magnitude: ProfileFn
    phase: ProfileFn
    support: tuple[np.ndarray, np.ndarray] | None = None
    sup_magnitude: float | None = None
    C_F: float | None = None
    C_F_stderr: float = 0.0
    name: str = "custom"
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("dimension must be positive")
        if not self.M >= 1:
            raise ValueError(f"band M must be at least 1, got {self.M}")
        if self.support is None:
            lo, hi = -self.M * np.ones(self.d), self.M * np.ones(self.d)
        else:
            lo = np.broadcast_to(np.asarray(self.support[0], dtype=float), (self.d,)).copy()
            hi = np.broadcast_to(np.asarray(self.support[1], dtype=float), (self.d,)).copy()
            lo, hi = np.maximum(lo, -self.M), np.minimum(hi, self.M)
            if np.any(hi <= lo):
                raise ValueError("support box is empty inside [-M, M]^d")
        self.support = (lo, hi)

    @property
    def box_volume(self) -> float:
        lo, hi = self.support
        return float(np.prod(hi - lo))

    def __call__(self, w: np.ndarray) -> np.ndarray:
        return self.magnitude(w) * np.exp(1j * self.phase(w))


@dataclass(frozen=True)
class MaureyAtom:
    weight: float
    phase: float
    frequency: tuple[float, ...]


def _check_magnitude(values: np.ndarray, points: np.ndarray):
    bad = np.flatnonzero(~np.isfinite(values) | (values < 0))
    if bad.size:
        raise ValueError(f"|F| must be finite and non-negative; got {values[bad[0]]} at {points[bad[0]].tolist()}")


def _midpoint_grid(lo, hi, q: int):
    axes = [lo[i] + (np.arange(q) + 0.5) * (hi[i] - lo[i]) / q for i in range(len(lo))]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def total_mass(profile: FourierProfile, quad_points_per_dim: int = 64, method: str = "grid",
               n_samples: int = 1_000_000, seed: int = 0) -> float:
    """C_F = int |F| by tensor midpoint rule (d <= 4) or Monte-Carlo; cached on the profile."""
    lo, hi = profile.support
    vol = profile.box_volume
    if method == "grid":
        if profile.d > GRID_MAX_DIM:
            raise ValueError(f"grid quadrature supports d <= {GRID_MAX_DIM}; use method='mc' for d = {profile.d}")
        if quad_points_per_dim < 8:
            raise ValueError("quad_points_per_dim must be at least 8")
        pts = _midpoint_grid(lo, hi, quad_points_per_dim)
        total = 0.0
        for i in range(0, len(pts), 1 << 20):
            chunk = pts[i:i + (1 << 20)]
            vals = np.asarray(profile.magnitude(chunk), dtype=float)
            _check_magnitude(vals, chunk)
            total += float(vals.sum())
        mass, stderr = total * vol / len(pts), 0.0
    elif method == "mc":
        rng = np.random.default_rng(seed)
        pts = lo + (hi - lo) * rng.random((n_samples, profile.d))
        vals = np.asarray(profile.magnitude(pts), dtype=float)
        _check_magnitude(vals, pts)
        mass = float(vals.mean()) * vol
        stderr = float(vals.std(ddof=1)) * vol / math.sqrt(n_samples)
    else:
        raise ValueError(f"unknown quadrature method {method!r}")
    profile.C_F = mass
    profile.C_F_stderr = stderr
    return mass


def default_quad_points(profile: FourierProfile) -> int:
    """Midpoint resolution of about 1/16 per unit frequency, capped by the dimension."""
    lo, hi = profile.support
    q = int(math.ceil(16 * float(np.max(hi - lo))))
    cap = {1: 1 << 16, 2: 1024, 3: 96, 4: 32}.get(profile.d, 8)
    return int(min(max(q, 64 if profile.d <= 2 else 16), cap))


def ensure_mass(profile: FourierProfile) -> float:
    if profile.C_F is None:
        if profile.d <= GRID_MAX_DIM:
            total_mass(profile, default_quad_points(profile))
        else:
            total_mass(profile, method="mc")
    return profile.C_F


def estimate_sup(profile: FourierProfile, per_dim: int | None = None) -> float:
    if profile.sup_magnitude is not None:
        return float(profile.sup_magnitude)
    lo, hi = profile.support
    if per_dim is None:
        per_dim = max(8, int(round((1 << 20) ** (1 / profile.d))))
    pts = _midpoint_grid(lo, hi, per_dim)
    vals = np.asarray(profile.magnitude(pts), dtype=float)
    _check_magnitude(vals, pts)
    return float(vals.max())


def sample_atoms(profile: FourierProfile, n: int, seed: int) -> list[MaureyAtom]:
    """n i.i.d. frequencies from |F|/C_F by rejection against a uniform envelope.

    Every atom gets weight C_F/n and phase theta(w_j), so sum |b_j| = C_F.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    C_F = ensure_mass(profile)
    if C_F == 0:
        return []
    omegas = _rejection_sample(profile, n, seed)
    phases = np.asarray(profile.phase(omegas), dtype=float)
    b = C_F / n
    return [MaureyAtom(b, float(p), tuple(w.tolist())) for p, w in zip(phases, omegas)]


def _rejection_sample(profile: FourierProfile, n: int, seed: int, max_proposals: int = 200_000_000):
    envelope = estimate_sup(profile) * _SUP_SAFETY
    if envelope <= 0:
        raise ValueError("|F| vanishes on the sampling grid; supply sup_magnitude")
    lo, hi = profile.support
    rng = np.random.default_rng(seed)
    accepted: list[np.ndarray] = []
    have, proposed = 0, 0
    rate = min(1.0, (profile.C_F / profile.box_volume) / envelope) or 1e-6
    while have < n:
        batch = int(min(max(4096, 1.2 * (n - have) / rate), 1 << 22))
        w = lo + (hi - lo) * rng.random((batch, profile.d))
        u = rng.random(batch) * envelope
        mag = np.asarray(profile.magnitude(w), dtype=float)
        _check_magnitude(mag, w)
        over = np.flatnonzero(mag > envelope)
        if over.size:
            j = over[0]
            raise ValueError(
                f"|F| = {mag[j]} exceeds the rejection envelope {envelope} at {w[j].tolist()}; "
                "the sup estimate is too low"
            )
        keep = w[u < mag]
        accepted.append(keep)
        have += len(keep)
        proposed += batch
        if proposed > max_proposals:
            raise ArithmeticError(f"rejection sampling accepted {have} of {proposed} proposals; giving up")
    return np.concatenate(accepted)[:n]


def atoms_to_arrays(atoms: list[MaureyAtom]) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    if not atoms:
        return np.zeros(0), np.zeros(0), np.zeros((0, 0))
    b = np.array([a.weight for a in atoms])
    beta = np.array([a.phase for a in atoms])
    W = np.array([a.frequency for a in atoms])
    return b, beta, W


def atom_eval(atom: MaureyAtom, spec: KernelSpec, x) -> float:
    t = float(np.dot(atom.frequency, np.asarray(x, dtype=float)))
    return float(atom.weight * (math.cos(atom.phase) * spec.real_part(np.array(t))
                                - math.sin(atom.phase) * spec.imag_part(np.array(t))))


def atoms_eval(atoms: list[MaureyAtom], spec: KernelSpec, X: np.ndarray, batch: int = 256) -> np.ndarray:
    """Sum of atom_eval over all atoms at the rows of X, with the exact kernel."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    out = np.zeros(len(X))
    if not atoms:
        return out
    b, beta, W = atoms_to_arrays(atoms)
    cr, ci = b * np.cos(beta), b * np.sin(beta)
    for i in range(0, len(atoms), batch):
        T = X @ W[i:i + batch].T
        out += spec.real_part(T) @ cr[i:i + batch] - spec.imag_part(T) @ ci[i:i + batch]
    return out


def maurey_error_bound(C_F: float, n: int) -> float:
    if n < 1:
        raise ValueError("n must be at least 1")
    return 2.0 * C_F / math.sqrt(n)


def quadrature_target(profile: FourierProfile, spec: KernelSpec, points_per_dim: int = 48) -> Callable:
    """Direct evaluation of f(x) = Re int F(w) K(w.x) dw by tensor Gauss-Legendre on the support box.

    Returns a function of an (N, d) array. Independent of the sampling and
    network paths, so it serves as ground truth for error measurement.
    """
    lo, hi = profile.support
    nodes, weights = leggauss(points_per_dim)
    axes = [(lo[i] + hi[i]) / 2 + (hi[i] - lo[i]) / 2 * nodes for i in range(profile.d)]
    wax = [(hi[i] - lo[i]) / 2 * weights for i in range(profile.d)]
    W = np.stack([m.ravel() for m in np.meshgrid(*axes, indexing="ij")], axis=1)
    qw = np.prod(np.stack([m.ravel() for m in np.meshgrid(*wax, indexing="ij")], axis=1), axis=1)
    mag = np.asarray(profile.magnitude(W), dtype=float) * qw
    th = np.asarray(profile.phase(W), dtype=float)
    cr, ci = mag * np.cos(th), mag * np.sin(th)
    keep = mag != 0
    W, cr, ci = W[keep], cr[keep], ci[keep]

    def f(X):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        out = np.empty(len(X))
        step = max(1, 4_000_000 // max(1, len(W)))
        for i in range(0, len(X), step):
            T = X[i:i + step] @ W.T
            out[i:i + step] = spec.real_part(T) @ cr - spec.imag_part(T) @ ci
        return out

    return f


@dataclass
class BandReport:
    depth: int = 1
    neurons: int = 0
    n_atoms: int = 0
    degree: int = 0
    C_F: float = 0.0
    C_K: float = 0.0
    eps: float = 0.0
    eps0: float = 0.0
    kernel_tolerance: float = 0.0
    kernel_bound: float = 0.0
    maurey_bound: float = 0.0
    certified_bound: float = 0.0
    input_layer: bool = False
    seed: int = 0

    def to_dict(self) -> dict:
        return asdict(self)


def required_band(profile: FourierProfile) -> float:
    lo, hi = profile.support
    return float(np.sum(np.maximum(np.abs(lo), np.abs(hi))))


def build_bandlimited_net(profile: FourierProfile, spec: KernelSpec, eps: float, seed: int = 0,
                          prefer_chebyshev: bool | None = None,
                          atoms: list[MaureyAtom] | None = None):
    """Network sum_j b_j [cos(beta_j) K_R-net(w_j.x) - sin(beta_j) K_I-net(w_j.x)].

    eps0 = eps / (4 C_F) sets both the atom count ceil(1/eps0^2) and the
    kernel tolerance, so the Maurey error 2 C_F eps0 and the kernel
    substitution error 2 C_F eps0 add up to eps. One kernel network pair is
    shared by every atom. Returns (network, BandReport).
    """
    if not 0 < eps < 1:
        raise ValueError(f"eps must lie in (0, 1), got {eps}")
    if spec.line_bound is None:
        raise ValueError("bandlimited approximation needs a kernel bounded by D_K <= 1 on the real line")
    need = required_band(profile)
    if spec.band < need * (1 - 1e-12):
        raise ValueError(f"kernel band {spec.band} does not cover w.x up to {need} on [0,1]^{profile.d}")
    C_F = ensure_mass(profile)
    report = BandReport(eps=eps, C_F=C_F, C_K=spec.C_K, seed=seed)
    if C_F == 0:
        return affine_network(np.zeros(profile.d), 0.0), report

    eps0 = eps / (4 * C_F)
    n_atoms = math.ceil(1 / eps0 ** 2)
    # select_degree needs a tolerance below 1; a tighter kernel only helps.
    kernel_tol = min(eps0, 0.5)
    kernel = build_kernel_net(spec, kernel_tol, prefer_chebyshev)
    if atoms is None:
        atoms = sample_atoms(profile, n_atoms, seed)
    b, beta, W = atoms_to_arrays(atoms)

    nets, maps, head = [], [], []
    for j in range(len(atoms)):
        A = W[j][None, :]
        nets.append(kernel.net_R)
        maps.append(A)
        head.append(b[j] * math.cos(beta[j]))
        if not spec.is_real:
            nets.append(kernel.net_I)
            maps.append(A)
            head.append(-b[j] * math.sin(beta[j]))
    composed = compose_parallel(nets, maps)
    net = append_linear_head(composed, head, 0.0) if len(nets) > 1 else \
        MultiplicativeNetwork(composed.input_dim, composed.layers,
                              head[0] * composed.head_weights, head[0] * composed.head_bias)

    report.depth, report.neurons = net.depth, net.neurons
    report.n_atoms = len(atoms)
    report.degree = kernel.degree
    report.eps0 = eps0
    report.kernel_tolerance = kernel_tol
    report.kernel_bound = kernel.certified_bound
    report.maurey_bound = 2 * C_F * eps0
    report.certified_bound = 4 * C_F * eps0
    report.input_layer = net.depth > kernel.net_R.depth
    return net, report


# ------------------------------------------------------------ builtin profiles


def _box_indicator(center, half_width):
    center = np.asarray(center, dtype=float)

    def mag(w):
        return np.all(np.abs(np.atleast_2d(w) - center) <= half_width, axis=1).astype(float)

    return mag


def _linear_phase(vec, offset=0.0):
    vec = np.asarray(vec, dtype=float)

    def ph(w):
        return np.atleast_2d(w) @ vec + offset

    return ph


def uniform_box(d: int = 2, M: float = 1.0, amplitude: float = 1.0, phase_vector=None,
                phase_offset: float = 0.0) -> FourierProfile:
    """|F| = amplitude on all of [-M, M]^d with phase offset + v.w (v = 0 by default)."""
    v = np.zeros(d) if phase_vector is None else np.asarray(phase_vector, dtype=float)
    return FourierProfile(
        d, M,
        magnitude=lambda w: amplitude * np.ones(len(np.atleast_2d(w))),
        phase=_linear_phase(v, phase_offset),
        sup_magnitude=amplitude,
        name="uniform_box",
        params=dict(d=d, M=M, amplitude=amplitude, phase_vector=v.tolist(), phase_offset=phase_offset),
    )


def gaussian_bump(d: int = 2, M: float = 3.0, amplitude: float = 1.0, sigma: float = 1.0 / math.sqrt(2),
                  phase_offset: float = 0.0) -> FourierProfile:
    """|F| = amplitude exp(-|w|^2 / (2 sigma^2)); the default sigma gives exp(-|w|^2)."""
    return FourierProfile(
        d, M,
        magnitude=lambda w: amplitude * np.exp(-np.sum(np.square(np.atleast_2d(w)), axis=1) / (2 * sigma ** 2)),
        phase=lambda w: np.full(len(np.atleast_2d(w)), float(phase_offset)),
        sup_magnitude=amplitude,
        name="gaussian_bump",
        params=dict(d=d, M=M, amplitude=amplitude, sigma=sigma, phase_offset=phase_offset),
    )


def narrow_box(d: int = 2, M: float = 1.0, center=None, half_width: float = 0.01, mass: float = 1.0,
               phase: float = 0.0) -> FourierProfile:
    """Constant |F| of total ``mass`` on a small cube around ``center``, constant phase.

    With K = e^{it} the target is close to mass * cos(phase + center.x).
    """
    c = np.full(d, 0.5) if center is None else np.asarray(center, dtype=float)
    amp = mass / (2 * half_width) ** d
    return FourierProfile(
        d, M,
        magnitude=lambda w: amp * _box_indicator(c, half_width)(w),
        phase=lambda w: np.full(len(np.atleast_2d(w)), float(phase)),
        support=(c - half_width, c + half_width),
        sup_magnitude=amp,
        name="narrow_box",
        params=dict(d=d, M=M, center=c.tolist(), half_width=half_width, mass=mass, phase=phase),
    )


PROFILES = {"uniform_box": uniform_box, "gaussian_bump": gaussian_bump, "narrow_box": narrow_box}


def make_profile(name: str, **params) -> FourierProfile:
    try:
        factory = PROFILES[name]
    except KeyError:
        raise ValueError(f"unknown profile {name!r}; builtins are {sorted(PROFILES)}") from None
    return factory(**params)
