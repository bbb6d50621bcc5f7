"""Command line entry point: ``mna <subcommand>``.

Exit codes: 0 success, 2 bad configuration or input, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import relu as relu_mod
from .bench import BenchConfig, parse_profile, rows_to_csv, run_benchmark
from .cheb import builtin_kernel, build_kernel_net
from .maurey import build_bandlimited_net, make_profile, quadrature_target, required_band
from .metrics import mc_l2_error, sinc_reconstruct, sinc_truncation_error
from .net import compose_parallel, deserialize, evaluate, evaluate_batch, serialize
from .poly import Polynomial, realize
from .sobolev import build_sobolev_net, make_target

EXIT_CONFIG = 2
EXIT_NUMERIC = 3


def _read_coeffs(text: str) -> list[float]:
    path = Path(text)
    if path.is_file():
        text = path.read_text()
    text = text.strip()
    if text.startswith("["):
        vals = json.loads(text)
    else:
        vals = [float(t) for t in text.replace(",", " ").split()]
    if not vals:
        raise ValueError("no coefficients given")
    return [float(v) for v in vals]


def _write(path: str | None, data: bytes | str):
    if path is None or path == "-":
        sys.stdout.write(data.decode() if isinstance(data, bytes) else data)
        sys.stdout.write("\n")
    else:
        Path(path).write_bytes(data if isinstance(data, bytes) else data.encode())


def _write_report(path: str | None, report: dict):
    text = json.dumps(report, indent=2, sort_keys=True)
    if path:
        Path(path).write_text(text + "\n")
    else:
        print(text)


def _summary(net) -> str:
    return f"depth={net.depth} neurons={net.neurons}"


def cmd_realize_poly(args) -> int:
    p = Polynomial(_read_coeffs(args.coeffs), args.basis, args.M)
    net = realize(p, None if args.basis == "monomial" else True)
    _write(args.out, serialize(net))
    print(_summary(net), file=sys.stderr)
    return 0


def cmd_approx_kernel(args) -> int:
    spec = builtin_kernel(args.kernel, args.band, args.s, args.ck)
    kn = build_kernel_net(spec, args.eps)
    net = kn.net_R if spec.is_real else compose_parallel([kn.net_R, kn.net_I])
    _write(args.out, serialize(net))
    print(f"degree={kn.degree} certified={kn.certified_bound:.6g} {_summary(net)}", file=sys.stderr)
    return 0


def _attach_error(report: dict, net_eval, reference, d: int, samples: int, seed: int):
    if samples:
        est = mc_l2_error(net_eval, reference, d, samples, seed)
        report.update(l2_error=est.value, l2_stderr=est.std_error, l2_samples=samples)


def cmd_approx_band(args) -> int:
    name, params = parse_profile(args.profile)
    profile = make_profile(name, **params)
    band = args.band if args.band is not None else max(1.0, required_band(profile))
    spec = builtin_kernel(args.kernel, band, args.s, args.ck)
    net, rep = build_bandlimited_net(profile, spec, args.eps, args.seed)
    report = rep.to_dict()
    _attach_error(report, lambda X: evaluate_batch(net, X), quadrature_target(profile, spec), profile.d,
                  args.samples, args.seed)
    _write(args.out, serialize(net))
    _write_report(args.report, report)
    return 0


def cmd_approx_sobolev(args) -> int:
    name, params = parse_profile(args.profile)
    params.update(d=args.d, r=args.r)
    target = make_target(name, **params)
    net, rep = build_sobolev_net(target, args.eps, args.seed, backend=args.backend)
    report = rep.to_dict()
    run = relu_mod.relu_eval_batch if args.backend == "relu" else evaluate_batch
    _attach_error(report, lambda X: run(net, X), target.reference(rep.M), args.d, args.samples, args.seed)
    data = relu_mod.serialize(net) if args.backend == "relu" else serialize(net)
    _write(args.out, data)
    _write_report(args.report, report)
    return 0


def load_network(path: str):
    raw = Path(path).read_bytes()
    try:
        kind = json.loads(raw).get("kind", "multiplicative")
    except (json.JSONDecodeError, AttributeError):
        kind = "multiplicative"
    if kind == "relu":
        return relu_mod.deserialize(raw)
    return deserialize(raw)


def cmd_eval(args) -> int:
    net = load_network(args.net)
    x = [float(t) for t in args.x.replace(",", " ").split()]
    out = relu_mod.relu_eval(net, x) if isinstance(net, relu_mod.ReLUNetwork) else evaluate(net, x)
    if isinstance(out, float):
        print(repr(out))
    else:
        print(",".join(repr(float(v)) for v in out))
    return 0


def cmd_bench(args) -> int:
    doc = json.loads(Path(args.config).read_text())
    rows = run_benchmark(BenchConfig.from_document(doc))
    _write(args.out, rows_to_csv(rows).rstrip("\n"))
    failed = sum(1 for r in rows if r.get("error"))
    print(f"{len(rows)} cells, {failed} failed", file=sys.stderr)
    return 0


def _half_cosine(x):
    return np.cos(np.pi * np.asarray(x, dtype=float) / 2)


def cmd_sinc_demo(args) -> int:
    x = np.linspace(args.lo, args.hi, args.points)
    rec = sinc_reconstruct(_half_cosine, args.radius, x)
    exact = _half_cosine(x)
    out = sys.stdout if args.out in (None, "-") else open(args.out, "w", newline="")
    try:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["x", "f", "reconstruction", "error"])
        for xi, fi, ri in zip(x, exact, rec):
            w.writerow([repr(float(xi)), repr(float(fi)), repr(float(ri)), repr(float(ri - fi))])
    finally:
        if out is not sys.stdout:
            out.close()
    err = sinc_truncation_error(_half_cosine, args.radius, (args.lo, args.hi), args.points)
    print(f"radius={args.radius} l2_error={err:.6g}", file=sys.stderr)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="mna", description="Constructive multiplicative network approximation.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("realize-poly", help="exact network for a polynomial")
    p.add_argument("--coeffs", required=True, help="inline list '1,2,3' or a file; lowest degree first")
    p.add_argument("--basis", choices=["monomial", "chebyshev"], default="monomial")
    p.add_argument("--M", type=float, default=1.0, help="interval half-width for the Chebyshev basis")
    p.add_argument("--out")
    p.set_defaults(func=cmd_realize_poly)

    p = sub.add_parser("approx-kernel", help="network for an analytic kernel on [-band, band]")
    p.add_argument("--kernel", required=True)
    p.add_argument("--band", type=float, required=True)
    p.add_argument("--s", type=float, default=4.0)
    p.add_argument("--ck", type=float, default=None, help="override the ellipse bound C_K")
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_approx_kernel)

    p = sub.add_parser("approx-band", help="network for a bandlimited function given by its profile")
    p.add_argument("--profile", required=True, help="name:key=val,... e.g. narrow_box:half_width=0.02")
    p.add_argument("--kernel", default="exp_i")
    p.add_argument("--band", type=float, default=None, help="kernel band (default: what the profile needs)")
    p.add_argument("--s", type=float, default=4.0)
    p.add_argument("--ck", type=float, default=None)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=0, help="Monte-Carlo samples for a measured error (0 skips)")
    p.add_argument("--out")
    p.add_argument("--report")
    p.set_defaults(func=cmd_approx_band)

    p = sub.add_parser("approx-sobolev", help="network for a Sobolev-ball target")
    p.add_argument("--profile", default="indicator", help="indicator, gaussian or zero, with key=val params")
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--r", type=int, default=1)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--backend", choices=["multiplicative", "relu"], default="multiplicative")
    p.add_argument("--samples", type=int, default=0, help="Monte-Carlo samples for a measured error (0 skips)")
    p.add_argument("--out")
    p.add_argument("--report")
    p.set_defaults(func=cmd_approx_sobolev)

    p = sub.add_parser("eval", help="evaluate a saved network at one point")
    p.add_argument("--net", required=True)
    p.add_argument("--x", required=True, help="comma separated coordinates")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("bench", help="run a benchmark config and write CSV")
    p.add_argument("--config", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("sinc-demo", help="cardinal series reconstruction of cos(pi x / 2)")
    p.add_argument("--radius", type=int, default=8)
    p.add_argument("--lo", type=float, default=-2.0)
    p.add_argument("--hi", type=float, default=2.0)
    p.add_argument("--points", type=int, default=401)
    p.add_argument("--out")
    p.set_defaults(func=cmd_sinc_demo)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ArithmeticError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, KeyError, TypeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
