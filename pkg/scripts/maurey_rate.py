"""Sweep the atom count and print median/mean L2 error of the sampled atom sum.

    python scripts/maurey_rate.py --seeds 20 --n 25 100 400 1600
"""
import argparse
import math

import numpy as np

from mna.maurey import atoms_eval, quadrature_target, sample_atoms, total_mass, uniform_box
from mna.metrics import mc_l2_error
from mna.sobolev import exp_kernel_spec


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, nargs="+", default=[25, 100, 400, 1600])
    ap.add_argument("--seeds", type=int, default=20)
    ap.add_argument("--samples", type=int, default=4000)
    args = ap.parse_args()

    prof = uniform_box(2, 1.0, phase_vector=[1.0, 0.0])
    C_F = total_mass(prof, 64)
    spec = exp_kernel_spec(2, 1.0)
    target = quadrature_target(prof, spec)
    print("n,median_l2,mean_l2,bound_2CF_over_sqrt_n")
    medians = []
    for n in args.n:
        errs = []
        for seed in range(args.seeds):
            atoms = sample_atoms(prof, n, seed)
            errs.append(mc_l2_error(lambda X: atoms_eval(atoms, spec, X), target, 2, args.samples, 1000 + seed).value)
        medians.append(np.median(errs))
        print(f"{n},{medians[-1]:.6g},{np.mean(errs):.6g},{2 * C_F / math.sqrt(n):.6g}")
    if len(args.n) > 1:
        slope = np.polyfit(np.log(args.n), np.log(medians), 1)[0]
        print(f"# log-log slope {slope:.3f}")


if __name__ == "__main__":
    main()
