"""Multistart BRF solving on M_{p,q}: how many runs land on the solution ray.

    python3 demos/brf_multistart.py --p 3 --q 2 --runs 40
"""

import argparse

import numpy as np

from grf_homog import multistart, mpq


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--p", type=int, default=2)
    ap.add_argument("--q", type=int, default=1)
    ap.add_argument("--runs", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    M = mpq(args.p, args.q)
    if M.p == M.q:
        raise SystemExit("use the p = q chart via `grf-homog brf --p 1 --q 1`")
    chart = M.diagonal_chart()
    target = M.brf_params()
    xs = M.random_initials(args.runs, np.random.default_rng(args.seed))
    runs = multistart(chart, xs, workers=4, fix={"mu": 1.0})

    print(f"ray representative (mu, a, b, lam) = {np.round(target, 12).tolist()}")
    print(f"{'a0':>9} {'b0':>9} {'lam0':>9}  {'iters':>5}  distance")
    on_ray = 0
    for x0, r in zip(xs, runs):
        if isinstance(r, Exception):
            print(f"{x0[1]:9.3g} {x0[2]:9.3g} {x0[3]:9.3g}  {type(r).__name__}")
            continue
        dist = np.abs(chart.representative(r.params) - target).max()
        on_ray += dist < 1e-8
        print(f"{x0[1]:9.3g} {x0[2]:9.3g} {x0[3]:9.3g}  {r.iterations:5d}  {dist:.1e}")
    print(f"{on_ray}/{args.runs} runs on the ray")


if __name__ == "__main__":
    main()
