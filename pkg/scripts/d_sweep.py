"""Ratio lambda0 / sqrt(delta) against the normalized diameter for the two-mass family.

Prints the table and the fitted log-log slope for N = 2 and 3, and
optionally saves a plot if matplotlib is available.
"""

import argparse

from baryiso.harness import d_sweep, parse_eps_grid


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--eps", default="1e-1:1e-4:log:8")
    ap.add_argument("--dims", type=int, nargs="+", default=[2, 3])
    ap.add_argument("--plot", help="save a log-log plot here")
    args = ap.parse_args()

    grid = parse_eps_grid(args.eps)
    results = [d_sweep(n, grid) for n in args.dims]
    for res in results:
        print(f"N = {res.n}: slope {res.slope:.4f}, expected {res.expected_slope:.4f}")
        print(f"  {'eps':>10} {'D':>12} {'lambda0':>9} {'delta':>11} {'ratio':>9}")
        for r in res.rows:
            print(f"  {r.eps:10.3e} {r.D:12.4f} {r.lambda0:9.6f} {r.delta:11.4e} {r.ratio:9.4f}")

    if args.plot:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
        import numpy as np

        fig, ax = plt.subplots(figsize=(5, 4))
        for res in results:
            d = np.array([r.D for r in res.rows])
            ax.loglog(d, [r.ratio for r in res.rows], "o", label=f"N={res.n}")
            ax.loglog(d, np.exp(res.intercept) * d**res.slope, "-", lw=0.8)
        ax.set_xlabel("D")
        ax.set_ylabel("lambda0 / sqrt(delta)")
        ax.legend()
        fig.tight_layout()
        fig.savefig(args.plot, dpi=150)
        print(f"saved {args.plot}")


if __name__ == "__main__":
    main()
