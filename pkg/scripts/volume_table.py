"""Print V_N, Z_N = V_N / N! and the ratios V_N / (N V_{N-1}) against pi^2/8."""

import argparse
import json

from delmeasure.mc import growth_chain


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n-max", type=int, default=2)
    ap.add_argument("--samples", type=int, default=20000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--json", action="store_true")
    args = ap.parse_args()

    rows = growth_chain(args.n_max, args.samples, args.seed, workers=args.workers)
    if args.json:
        print(json.dumps([r.to_json() for r in rows], indent=2))
        return
    print(f"{'N':>2} {'V_N':>12} {'stderr':>10} {'Z_N':>12} {'ratio':>8} {'+-':>7}  ok")
    for r in rows:
        d = r.to_json()
        print(f"{d['N']:>2} {d['V']:>12.5g} {d['V_stderr']:>10.3g} {d['Z']:>12.5g} "
              f"{d['ratio']:>8.4f} {d['ratio_stderr']:>7.4f}  {d['pass']}")
    print(f"bound pi^2/8 = {rows[0].bound:.6f}")


if __name__ == "__main__":
    main()
