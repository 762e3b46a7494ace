"""Compare the jump of the summed connection forms across a near-cocyclic flip with its prediction.

Both conventions for the edge f_+ are tried while the quad approaches
cocyclicity.  A fitted scale of 1 with a small residual means the
prediction holds for that convention.
"""

import argparse

from delmeasure.configs import cocyclic_quad_config
from delmeasure.forms import flip_discontinuity
from delmeasure.tri import delaunay


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--offsets", type=float, nargs="+", default=[1e-7, 1e-8, 1e-9])
    args = ap.parse_args()

    print(f"{'offset':>8} {'theta':>10} {'convention':>10} {'scale':>12} {'residual':>10}")
    for s in args.offsets:
        t = delaunay(cocyclic_quad_config(s))
        e = (3, 5) if t.has_edge(3, 5) else (4, 6)
        for plus in ("left", "right"):
            fd = flip_discontinuity(t, e, plus=plus)
            print(f"{s:>8.0e} {t.theta(*e):>10.2e} {plus:>10} {fd.scale:>12.9f} {fd.residual:>10.2e}")


if __name__ == "__main__":
    main()
