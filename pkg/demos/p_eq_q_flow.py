"""Flow on M_{1,1} with the full invariant metric: spectrum at the diagonal fixed point
and a trajectory started off the diagonal.

    python3 demos/p_eq_q_flow.py --c 0.01 --tmax 2
"""

import argparse

import numpy as np

from grf_homog import integrate, jacobian_eigen, mpq, mpq_flow_system
from grf_homog.errors import GeometryError


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--c", type=float, default=0.01, help="initial off-diagonal metric entry")
    ap.add_argument("--tmax", type=float, default=2.0)
    args = ap.parse_args()

    system = mpq_flow_system(mpq(1, 1), 1.0)
    fp = np.array([4.0, 0.5, 0.5, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0])
    rep = jacobian_eigen(system, fp)
    names = system.metric_names + system.b_names
    print(f"state variables {list(names)}")
    print(f"eigenvalues at {fp[:3].tolist()}: {np.round(rep.eigenvalues.real, 6).tolist()} ({rep.classification})")

    y0 = fp.copy()
    y0[3] = args.c
    try:
        tr = integrate(system, y0, args.tmax, samples=11)
    except GeometryError as exc:
        print(f"integration stopped: {type(exc).__name__}: {exc}")
        return
    print(f"{'t':>6} {'M':>10} {'A':>10} {'B':>10} {'c':>10} {'sqrt(AB)-|c|':>13}")
    for s in tr.states:
        M, A, B, c, _ = s.metric_params
        print(f"{s.t:6.2f} {M:10.5f} {A:10.5f} {B:10.5f} {c:10.5f} {np.sqrt(A * B) - abs(c):13.3e}")


if __name__ == "__main__":
    main()
