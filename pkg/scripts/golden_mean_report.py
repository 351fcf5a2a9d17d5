#!/usr/bin/env python3
"""Full classical-side walkthrough on the golden-mean shift.

Prints the RPF eigendata, the Parry measure, the variational optimum, and
the quantum-classical diagonal bridge gap as the volume grows.
"""

import argparse

import numpy as np

from spinpressure.sft import (OptimizeOptions, classical_pressure,
                              diagonal_bridge, gibbs_markov_measure,
                              golden_mean_shift, markov_entropy, rpf_eigendata,
                              transfer_matrix, variational_optimize)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--beta", type=float, default=1.0)
    ap.add_argument("--n-max", type=int, default=12)
    args = ap.parse_args()

    sft = golden_mean_shift()
    phi = (1 + np.sqrt(5)) / 2
    rpf = rpf_eigendata(transfer_matrix(sft, args.beta))
    print(f"leading eigenvalue  {rpf.eigenvalue:.15f}")
    print(f"golden ratio        {phi:.15f}")
    print(f"pressure            {classical_pressure(sft, args.beta):.15f}")
    print(f"log(golden ratio)   {np.log(phi):.15f}")

    mu = gibbs_markov_measure(sft, args.beta)
    print("\nParry kernel:")
    print(np.array_str(mu.kernel, precision=12))
    print(f"stationary          {np.array_str(mu.stationary, precision=12)}")
    print(f"entropy             {markov_entropy(mu):.15f}")

    res = variational_optimize(sft, args.beta, opts=OptimizeOptions(restarts=8))
    print(f"\nvariational value   {res.value:.15f} "
          f"(converged={res.converged}, iters={res.iterations})")
    print(f"kernel deviation    "
          f"{np.max(np.abs(res.measure.kernel - mu.kernel)):.2e}")

    print("\ndiagonal bridge (penalized quantum chain vs word sum):")
    for n in range(4, args.n_max + 1, 2):
        out = diagonal_bridge(sft, args.beta, n)
        print(f"  n={n:2d}  pressure_gap={out['pressure_gap']:.2e}  "
              f"tv_distance={out['tv_distance']:.2e}")


if __name__ == "__main__":
    main()
