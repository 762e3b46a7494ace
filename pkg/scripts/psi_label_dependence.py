"""How much the vertex form psi_v depends on where the ccw edge labelling starts.

psi_v sums dtheta(e_i) ^ dtheta(e_j) over pairs i > j.  A cyclic shift
of the start adds dtheta(e_0) ^ (sum of the other dtheta), which vanishes
because the angles at v sum to 2 pi; the spread should sit at the
finite-difference noise level.  For each interior vertex we try every
cyclic start and report the spread relative to the largest entry.
"""

import argparse
import math

import numpy as np

from delmeasure.configs import random_configs
from delmeasure.forms import dtheta, wedge, zero_two_form
from delmeasure.tri import delaunay


def psi(t, v, start):
    star = t.star(v)
    star = star[start:] + star[:start]
    dth = [dtheta(t, v, w) for w in star]
    out = zero_two_form(t.config.free_ids)
    for i in range(len(dth)):
        for j in range(i):
            out = out + wedge(dth[i], dth[j])
    return out.scale(1.0 / (2 * math.pi) ** 2).matrix


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--configs", type=int, default=3)
    ap.add_argument("--n", type=int, default=6)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    for k, config in enumerate(random_configs(args.seed, args.configs, args.n, min_theta=0.05)):
        t = delaunay(config)
        for v in config.free_ids:
            if any(not t.is_bounded(f) for f in t.faces_around(v)):
                continue
            mats = [psi(t, v, s) for s in range(len(t.star(v)))]
            scale = max(np.abs(m).max() for m in mats)
            spread = max(np.abs(m - mats[0]).max() for m in mats)
            print(f"config {k} vertex {v:>2} degree {len(mats)}: relative spread {spread / scale:.3e}")


if __name__ == "__main__":
    main()
