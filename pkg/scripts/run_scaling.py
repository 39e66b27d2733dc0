#!/usr/bin/env python3
"""Runtime-scaling experiment: synthesized schedule time and integrated
fidelity over a range of qubit counts.

    python3 scripts/run_scaling.py --n-min 8 --n-max 14 --out scaling.csv
"""

import argparse
import functools

from aqolab import grover, scaling_experiment


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n-min", type=int, default=8)
    ap.add_argument("--n-max", type=int, default=14)
    ap.add_argument("--d0", type=int, default=1)
    ap.add_argument("--eps", type=float, default=0.2)
    ap.add_argument("--p", type=float, default=1.5)
    ap.add_argument("--time-cap", type=float, default=1e4)
    ap.add_argument("--c", type=float, default=0.07)
    ap.add_argument("--out", default="scaling.csv")
    args = ap.parse_args()

    family = functools.partial(grover, d0=args.d0)
    table = scaling_experiment(
        family,
        range(args.n_min, args.n_max + 1),
        eps=args.eps,
        p=args.p,
        condition_c=args.c,
        time_cap=args.time_cap,
    )
    with open(args.out, "w") as fh:
        fh.write("\n".join(table.csv_lines()) + "\n")
    for row in table.rows:
        print(
            f"n={row.n:2d}  T={row.T:.4e}  run at T={row.T_run:.3e}  "
            f"fidelity={row.fidelity:.6f}  g_min={row.g_min:.4e}"
        )
    print(f"fitted slope of log2 T vs n: {table.slope:.4f}")


if __name__ == "__main__":
    main()
