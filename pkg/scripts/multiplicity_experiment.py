#!/usr/bin/env python3
"""Multiplicity experiment: certified lambda-intervals versus the number of
critical points the deflated solver actually finds.

Runs two fixtures on the unit interval with the p = 2 power potential:

  * bounded: g(t) = 1/(1+t^2) + 1.  The dedicated 1D certificate gives a
    nonempty interval near lambda ~ 0.27, but the fixed-point map there is a
    contraction (lambda * ||K||_inf * Lip(g) << 1), so the solver finds one
    solution per lambda.  The sweep table documents this.
  * ridge: g(t) = 0.05 + 40 exp(-((|t|-1)/0.05)^2).  The full certificate
    is feasible near lambda ~ 23..126 and the deflated solver finds three
    distinct solutions at part of the interval (the count at a given
    lambda depends on how many starts reach the saddle branch).

Writes artifacts/multiplicity_bounded.csv and artifacts/multiplicity_ridge.csv.
"""

import argparse
import csv
import os
import sys

import numpy as np
from scipy.integrate import quad

sys.path.insert(0, os.path.join(os.path.dirname(__file__), os.pardir, "src"))

from pxbiharm.certificate import certify, dim1_certificate  # noqa: E402
from pxbiharm.energy import ProblemInstance  # noqa: E402
from pxbiharm.exponents import constant_exponent  # noqa: E402
from pxbiharm.grids import Domain, build_grid  # noqa: E402
from pxbiharm.potentials import builtin_nonlinearity, make_power_family  # noqa: E402
from pxbiharm.solver import deflate_and_search  # noqa: E402

ARTIFACTS = os.path.join(os.path.dirname(__file__), os.pardir, "artifacts")


def bounded_g(t):
    return 1.0 / (1.0 + np.asarray(t, float) ** 2) + 1.0


def bounded_G(t):
    return np.arctan(t) + np.asarray(t, float)


def ridge_g(t):
    t = np.asarray(t, float)
    return 0.05 + 40.0 * np.exp(-(((np.abs(t) - 1.0) / 0.05) ** 2))


ridge_G = np.vectorize(
    lambda t: np.sign(t) * quad(ridge_g, 0.0, abs(t), limit=200)[0])


def run_sweep(inst_factory, interval, m, vbar_scale, n_starts, seed):
    rows = []
    for lam in np.geomspace(interval[0], interval[1], m):
        inst = inst_factory(float(lam))
        sols = deflate_and_search(inst, k_max=5, n_starts=n_starts,
                                  seed=seed, vbar_scale=vbar_scale)
        rows.append({
            "lambda": float(lam),
            "n_solutions": len(sols.points),
            "energies": [p.energy for p in sols.points],
        })
        print(f"  lambda={lam:10.6f}  solutions={len(sols.points)}  "
              f"energies={['%.4g' % p.energy for p in sols.points]}")
    return rows


def write_rows(path, rows):
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(["lambda", "n_solutions", "energies"])
        for r in rows:
            wr.writerow([repr(r["lambda"]), r["n_solutions"],
                         ";".join(repr(e) for e in r["energies"])])
    print(f"  wrote {path}")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--grid-n", type=int, default=101)
    ap.add_argument("--sweep-m", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    os.makedirs(ARTIFACTS, exist_ok=True)
    grid = build_grid(Domain("interval"), args.grid_n)
    p = constant_exponent(grid, 2.0)
    spec = make_power_family(1.0, p)
    q = constant_exponent(grid, 1.5)

    print("bounded fixture: g = 1/(1+t^2) + 1")
    cert = dim1_certificate(bounded_g, 1.0, p, l=1.0, h=0.15, c3=spec.c3,
                            G=bounded_G, grid=grid)
    print(f"  certified interval: {cert.lambda_interval}")
    nl = builtin_nonlinearity("rational_bump", grid, q)
    rows = run_sweep(
        lambda lam: ProblemInstance(grid, p, spec, nl, lam),
        cert.lambda_interval, args.sweep_m, vbar_scale=0.15,
        n_starts=3, seed=args.seed)
    write_rows(os.path.join(ARTIFACTS, "multiplicity_bounded.csv"), rows)

    print("ridge fixture: g = 0.05 + 40 exp(-((|t|-1)/0.05)^2)")
    nl2 = builtin_nonlinearity("separable", grid, q, alpha=1.0,
                               g=ridge_g, G=ridge_G)
    inst0 = ProblemInstance(grid, p, spec, nl2, 1.0)
    cert2 = certify(inst0, r=5.0, h=1.2, check_convergence=False)
    print(f"  certified interval: {cert2.lambda_interval}")
    rows2 = run_sweep(
        lambda lam: ProblemInstance(grid, p, spec, nl2, lam),
        cert2.lambda_interval, args.sweep_m, vbar_scale=1.2,
        n_starts=8, seed=args.seed)
    write_rows(os.path.join(ARTIFACTS, "multiplicity_ridge.csv"), rows2)

    best = max(r["n_solutions"] for r in rows2)
    print(f"ridge fixture best count inside the interval: {best}")


if __name__ == "__main__":
    main()
