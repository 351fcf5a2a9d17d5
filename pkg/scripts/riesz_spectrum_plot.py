#!/usr/bin/env python3
"""Fourier spectrum of a lacunary Riesz product prefix.

Tabulates mu_hat(n) over a frequency window, marks which integers carry a
signed representation, and cross-checks the closed formula against
quadrature of the partial density.
"""

import argparse
from pathlib import Path

from spinpressure.errors import UndecidablePrefixError
from spinpressure.modelio import parse_model, write_csv
from spinpressure.riesz import (RieszSpec, decompose, fourier_coefficient,
                                verify_coefficients)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--model", help="riesz model file; default (4,16,64) a=0.5")
    ap.add_argument("--n-max", type=int, default=100)
    ap.add_argument("--out", default=".")
    args = ap.parse_args()

    if args.model:
        spec = parse_model(args.model).payload
    else:
        spec = RieszSpec((4, 16, 64), (0.5, 0.5, 0.5), 4.0)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    rows = []
    for n in range(args.n_max + 1):
        try:
            eps = decompose(spec, n)
        except UndecidablePrefixError:
            print(f"n={n}: beyond the decidable window of the stored prefix")
            break
        coeff = fourier_coefficient(spec, n)
        rows.append([n, coeff, "" if eps is None else
                     " ".join(f"{e:+d}*{spec.frequencies[k]}"
                              for k, e in sorted(eps.items()))])
        if coeff:
            print(f"mu_hat({n:3d}) = {coeff:10.6f}   {rows[-1][2]}")
    write_csv(out / "riesz_spectrum.csv", ["n", "mu_hat", "representation"],
              rows)

    err = verify_coefficients(spec, len(spec), args.n_max)
    print(f"\nquadrature cross-check max error: {err:.2e}")
    d = spec.diagnostics()
    print(f"amplitude trend decreasing: {d['amplitude_trend_decreasing']}")
    print(f"partial sums of a_k^2:      {d['sum_of_squares_partial']}")


if __name__ == "__main__":
    main()
