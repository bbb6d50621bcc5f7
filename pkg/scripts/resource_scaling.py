"""Depth and neuron counts of Sobolev networks as eps halves.

    python scripts/resource_scaling.py --r 1 2 --eps 0.5 0.25 0.125 0.0625
    python scripts/resource_scaling.py --r 2 --eps 0.5 0.25 --backend relu
"""
import argparse

from mna.sobolev import build_sobolev_net, make_target


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--d", type=int, default=2)
    ap.add_argument("--r", type=int, nargs="+", default=[1, 2])
    ap.add_argument("--eps", type=float, nargs="+", default=[0.5, 0.25, 0.125, 0.0625])
    ap.add_argument("--profile", default="indicator")
    ap.add_argument("--backend", choices=["multiplicative", "relu"], default="multiplicative")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    print("r,eps,M,degree,atoms,depth,neurons,depth_ratio,neuron_ratio")
    for r in args.r:
        prev = None
        for eps in args.eps:
            _, rep = build_sobolev_net(make_target(args.profile, d=args.d, r=r), eps, args.seed, args.backend)
            ratios = ("", "") if prev is None else (f"{rep.depth / prev.depth:.3f}", f"{rep.neurons / prev.neurons:.3f}")
            print(f"{r},{eps},{rep.M:.4g},{rep.degree},{rep.n_atoms},{rep.depth},{rep.neurons},{ratios[0]},{ratios[1]}")
            prev = rep


if __name__ == "__main__":
    main()
