"""Measured (delta, lambda0, lambda) for the unbounded-diameter obstructions.

Two balls drifting apart, the two-mass family and a thin-necked dumbbell in
R^3: the deficit stays bounded or shrinks while the barycentric asymmetry
approaches 2, so no diameter-free constant can exist.
"""

import warnings

from baryiso.asymmetry import FraenkelOptions, barycentric_asymmetry, deficit, fraenkel_asymmetry
from baryiso.corpus import dependance_closed_form, dumbbell, gen_dependance_family, gen_two_ball
from baryiso.harness import prepared
from baryiso.measures import diameter


def row(label, s, fraenkel=True):
    s = prepared(s)
    lam = fraenkel_asymmetry(s, FraenkelOptions(grid=9)).value if fraenkel else float("nan")
    print(f"{label:<32} D={diameter(s):10.3f}  delta={deficit(s):.6f}  "
          f"lambda0={barycentric_asymmetry(s):.6f}  lambda={lam:.6f}")


def main() -> None:
    warnings.simplefilter("ignore")
    print("two balls, r = 0.1")
    for d in (5, 20, 200, 203, 400, 2000):
        row(f"  N=2 d={d}", gen_two_ball(2, 0.1, d))
    print("two-mass family (closed-form delta in brackets)")
    for n in (2, 3):
        for eps in (1e-1, 1e-2, 1e-3):
            cf = dependance_closed_form(n, eps)
            row(f"  N={n} eps={eps:g} [{cf['delta']:.6f}]", gen_dependance_family(n, eps))
    print("dumbbell in R^3 (grid quadrature)")
    for r, d in ((0.3, 6.0), (0.5, 10.0), (0.5, 30.0)):
        row(f"  r_small={r} d={d}", dumbbell(3, r, d, 0.02), fraenkel=False)


if __name__ == "__main__":
    main()
