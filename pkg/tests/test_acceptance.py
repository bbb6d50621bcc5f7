"""Acceptance gate: ten end-to-end criteria, each printing one PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -s`` or ``python tests/test_acceptance.py``.
"""
import json
import math
import sys
import time

import numpy as np

from mna.bench import strip_runtime
from mna.cheb import build_kernel_net, certified_bound, chebyshev_interpolate, KernelSpec, select_degree
from mna.cli import main as cli_main
from mna.maurey import atoms_eval, quadrature_target, sample_atoms, total_mass, uniform_box
from mna.metrics import mc_l2_error, sinc_reconstruct, sinc_truncation_error
from mna.net import evaluate_batch, hidden_states
from mna.poly import Polynomial, horner_eval, realize_monomial_poly
from mna.relu import build_product_gadget, lower_to_relu, relu_eval_batch
from mna.sobolev import build_sobolev_net, exp_kernel_spec, normalized_indicator
from test_net import random_net

RESULTS: dict[int, str] = {}


def report(n: int, name: str, ok: bool, elapsed: float, limit: float, detail: str) -> None:
    within = elapsed < limit
    status = "PASS" if ok and within else "FAIL"
    line = f"criterion {n:2d} {status}  {name}: {detail}; {elapsed:.2f}s (limit {limit:g}s)"
    RESULTS[n] = line
    print(line)
    assert ok, line
    assert within, line


def test_criterion_01_polynomial_exactness():
    t0 = time.perf_counter()
    rng = np.random.default_rng(101)
    x = np.linspace(-1, 1, 10_000)
    worst = 0.0
    for _ in range(100):
        p = Polynomial(rng.uniform(-1, 1, int(rng.integers(0, 21)) + 1))
        ref = horner_eval(p, x)
        got = evaluate_batch(realize_monomial_poly(p), x)
        worst = max(worst, float(np.max(np.abs(got - ref) / (1 + np.abs(ref)))))
    report(1, "polynomial exactness", worst <= 1e-10, time.perf_counter() - t0, 5,
           f"max scaled deviation {worst:.2e} (tol 1e-10)")


def test_criterion_02_layer_state_invariant():
    t0 = time.perf_counter()
    rng = np.random.default_rng(102)
    worst = 0.0
    for _ in range(10):
        p = Polynomial(rng.uniform(-1, 1, 11))
        x = rng.uniform(-1, 1, 50)
        for i, h in enumerate(hidden_states(realize_monomial_poly(p), x), start=1):
            expect = np.stack([x, x ** (i + 1), horner_eval(p.truncated(i), x)], axis=1)
            rel = np.abs(h - expect) / np.maximum(np.abs(expect), 1e-300)
            rel[expect == 0] = np.abs(h - expect)[expect == 0]
            worst = max(worst, float(rel.max()))
    report(2, "layer-state invariant", worst <= 1e-10, time.perf_counter() - t0, 1,
           f"max relative deviation {worst:.2e} (tol 1e-10)")


def test_criterion_03_certified_kernel_bound():
    t0 = time.perf_counter()
    ok, slopes, notes = True, [], []
    for M in (1.0, 2.0):
        C_K = math.exp(2.125 * M)
        spec = KernelSpec(np.exp, band=M, s=4.0, C_K=C_K, line_bound=None)
        t = np.linspace(-M, M, 10_000)
        errs = {}
        for n in range(2, 21):
            bound = certified_bound(C_K, 4.0, n)
            eps = bound * (1 + 1e-9)
            if eps < 1:
                kn = build_kernel_net(spec, eps)
                assert kn.degree == n
                poly = kn.poly_R
            else:
                poly = chebyshev_interpolate(np.exp, M, n)  # the selector only accepts eps < 1
            # Interpolant errors near machine precision are floored so the log is defined.
            errs[n] = max(float(np.max(np.abs(poly(t) - np.exp(t)))), 1e-300)
            ok &= errs[n] <= bound
        ns = np.arange(4, 17)
        slope = float(np.polyfit(ns, np.log([errs[n] for n in ns]), 1)[0])
        slopes.append(slope)
        ok &= slope <= -math.log(4) + 0.2
        notes.append(f"M={M:g} slope {slope:.2f}")
    report(3, "certified kernel bound", bool(ok), time.perf_counter() - t0, 10,
           f"all n in 2..20 within 2 C_K 4^-n / 3; {', '.join(notes)} (need <= {-math.log(4) + 0.2:.2f})")


def test_criterion_04_degree_selector():
    t0 = time.perf_counter()
    rng = np.random.default_rng(104)
    bad = 0
    for _ in range(1000):
        C_K, s = rng.uniform(1, 100), max(rng.uniform(2, 8), np.nextafter(2.0, 3.0))
        eps = rng.uniform(1e-4, 0.5)
        n = select_degree(C_K, s, eps)
        bad += 2 * C_K * s ** (-n) / (s - 1) > eps
    report(4, "degree selector soundness", bad == 0, time.perf_counter() - t0, 1,
           f"{bad} of 1000 triples violate the bound")


def test_criterion_05_maurey_rate():
    t0 = time.perf_counter()
    prof = uniform_box(2, 1.0, amplitude=1.0, phase_vector=[1.0, 0.0])
    C_F = total_mass(prof, 64)
    spec = exp_kernel_spec(2, 1.0)
    target = quadrature_target(prof, spec)
    ns = [25, 100, 400, 1600]
    medians, means, ok = [], [], True
    for n in ns:
        errs = []
        for seed in range(20):
            atoms = sample_atoms(prof, n, seed)
            est = mc_l2_error(lambda X: atoms_eval(atoms, spec, X), target, 2, 4000, 1000 + seed)
            errs.append(est.value)
        medians.append(float(np.median(errs)))
        means.append(float(np.mean(errs)))
        ok &= means[-1] <= 2 * (2 * C_F / math.sqrt(n))
    slope = float(np.polyfit(np.log(ns), np.log(medians), 1)[0])
    ok &= -0.65 <= slope <= -0.35
    report(5, "Maurey rate", bool(ok), time.perf_counter() - t0, 120,
           f"log-log slope {slope:.3f} (need [-0.65, -0.35]); mean/(4 C_F/sqrt n) = "
           + ", ".join(f"{m / (4 * C_F / math.sqrt(n)):.3f}" for m, n in zip(means, ns)))


def test_criterion_06_end_to_end_sobolev():
    t0 = time.perf_counter()
    target = normalized_indicator(2, 2)
    eps, ok, notes = 0.25, True, []
    for seed in range(3):
        net, rep = build_sobolev_net(target, eps, seed)
        est = mc_l2_error(lambda X: evaluate_batch(net, X), target.reference(rep.M), 2, 10_000, seed)
        ok &= est.value <= eps + 3 * est.std_error
        ok &= rep.certified_bound is not None and math.isclose(rep.certified_bound, eps, rel_tol=1e-12)
        notes.append(f"{est.value:.4f}")
    report(6, "end-to-end Sobolev approximation", bool(ok), time.perf_counter() - t0, 300,
           f"L2 errors {', '.join(notes)} vs eps 0.25; certified bound = eps")


def test_criterion_07_resource_scaling():
    t0 = time.perf_counter()
    ok, notes = True, []
    for r in (1, 2):
        target = normalized_indicator(2, r)
        coarse = build_sobolev_net(target, 0.125, 0)[1]
        fine = build_sobolev_net(target, 0.0625, 0)[1]
        dr, nr = fine.depth / coarse.depth, fine.neurons / coarse.neurons
        dlo, dhi = 2 ** (1 / r) * 0.7, 2 ** (1 / r) * 1.4
        nlo, nhi = 2 ** (2 + 1 / r) * 0.6, 2 ** (2 + 1 / r) * 1.5
        ok &= dlo <= dr <= dhi and nlo <= nr <= nhi
        notes.append(f"r={r} depth ratio {dr:.3f} in [{dlo:.2f}, {dhi:.2f}], "
                     f"neuron ratio {nr:.3f} in [{nlo:.2f}, {nhi:.2f}]")
    report(7, "resource scaling", bool(ok), time.perf_counter() - t0, 600, "; ".join(notes))


def test_criterion_08_relu_gadget():
    t0 = time.perf_counter()
    ok, worst_ratio = True, []
    for R in (1.0, 2.0):
        grid = np.linspace(-R, R, 200)
        X, Y = np.meshgrid(grid, grid)
        P = np.c_[X.ravel(), Y.ravel()]
        errs = [float(np.max(np.abs(relu_eval_batch(build_product_gadget(k, R), P) - P[:, 0] * P[:, 1])))
                for k in range(3, 10)]
        ratios = np.array(errs[:-1]) / np.array(errs[1:])
        ok &= bool(np.all((ratios >= 3.5) & (ratios <= 4.5)))
        worst_ratio.append(f"R={R:g} ratios in [{ratios.min():.3f}, {ratios.max():.3f}]")
    rng = np.random.default_rng(108)
    affine = random_net(rng, 3, [5, 4, 3], gate_prob=0.0)
    lowered, _ = lower_to_relu(affine, 4, 1.0)
    Xr = rng.uniform(-2, 2, (1000, 3))
    gap = float(np.max(np.abs(relu_eval_batch(lowered, Xr) - evaluate_batch(affine, Xr))))
    ok &= gap <= 1e-12
    report(8, "ReLU gadget refinement", bool(ok), time.perf_counter() - t0, 30,
           f"{'; '.join(worst_ratio)}; product-free lowering gap {gap:.1e}")


def test_criterion_09_sinc_reconstruction():
    t0 = time.perf_counter()

    def f(x):
        return np.cos(np.pi * np.asarray(x, dtype=float) / 2)

    e8, e64 = sinc_truncation_error(f, 8), sinc_truncation_error(f, 64)
    exact = all(np.array_equal(sinc_reconstruct(f, R, np.arange(-R, R + 1.0)), f(np.arange(-R, R + 1)))
                for R in (8, 64))
    report(9, "sinc reconstruction", e64 <= e8 / 4 and exact, time.perf_counter() - t0, 5,
           f"L2 error R=8 {e8:.3e}, R=64 {e64:.3e} (ratio {e64 / e8:.3f}); cardinal property exact: {exact}")


def test_criterion_10_bench_determinism(tmp_path):
    t0 = time.perf_counter()
    cfg = tmp_path / "bench.json"
    cfg.write_text(json.dumps({"seed": 7, "n_samples": 1000, "experiments": [
        {"target": {"profile": "indicator", "d": 2, "r": [1, 2]}, "eps": [0.5, 0.25], "seed": [0, 1]},
        {"target": {"profile": "indicator", "d": 2, "r": 2}, "eps": 0.5, "backend": "relu"},
    ]}))
    outs = []
    for k in range(2):
        path = tmp_path / f"run{k}.csv"
        assert cli_main(["bench", "--config", str(cfg), "--out", str(path)]) == 0
        outs.append(path.read_text())
    same = strip_runtime(outs[0]) == strip_runtime(outs[1])
    rows = len(outs[0].splitlines()) - 1
    report(10, "benchmark determinism", same and rows == 9, time.perf_counter() - t0, 120,
           f"{rows} rows, identical modulo runtime_ms: {same}")


if __name__ == "__main__":
    import pytest

    sys.exit(pytest.main([__file__, "-q", "-s"]))
