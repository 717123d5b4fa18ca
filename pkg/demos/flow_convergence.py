"""Generalized Ricci flow of diagonal metrics on M_{p,q}: distance to the fixed point over time.

    python3 demos/flow_convergence.py --p 2 --q 1 --init 1,0.3,2
"""

import argparse

import numpy as np

from grf_homog import MpqODE, integrate, jacobian_eigen, mpq


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--p", type=int, default=2)
    ap.add_argument("--q", type=int, default=1)
    ap.add_argument("--lambda", dest="lam", type=float, default=1.0)
    ap.add_argument("--init", default="1,0.3,2", help="M,A,B")
    ap.add_argument("--tmax", type=float, default=40.0)
    args = ap.parse_args()

    system = MpqODE(mpq(args.p, args.q), args.lam)
    fp = system.fixed_point
    rep = jacobian_eigen(system, fp)
    print(f"fixed point (M, A, B) = {fp.tolist()}")
    print(f"eigenvalues {np.round(rep.eigenvalues.real, 8).tolist()}: {rep.classification}")

    x0 = np.array([float(v) for v in args.init.split(",")])
    tr = integrate(system, x0, args.tmax, samples=21)
    print(f"{'t':>6} {'M':>12} {'A':>12} {'B':>12} {'distance':>10} {'residual':>10}")
    for s, d in zip(tr.states, tr.diagnostics):
        dist = np.linalg.norm(s.metric_params - fp)
        M, A, B = s.metric_params
        print(f"{s.t:6.1f} {M:12.8f} {A:12.8f} {B:12.8f} {dist:10.2e} {d.residual_norm:10.2e}")
    print(tr.message)


if __name__ == "__main__":
    main()
