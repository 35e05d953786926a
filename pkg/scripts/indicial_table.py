"""Indicial roots per CP^{n-1} eigenmode, kappa and the Fredholm index.

    python3 scripts/indicial_table.py [--n 2 3 4] [--j-max 6] [--out DIR]
"""

import argparse
from pathlib import Path

from sfkcusp.cylinder import fredholm_index, smallest_positive_root, write_spectrum_table


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, nargs="+", default=[2, 3, 4])
    ap.add_argument("--j-max", type=int, default=6)
    ap.add_argument("--out", type=Path)
    args = ap.parse_args()

    for n in args.n:
        rep = smallest_positive_root(n, args.j_max)
        print(f"n={n}: kappa={rep.kappa:.12g} min Re>0={rep.min_positive_real_part:.12g} "
              f"index={fredholm_index(n, 0.5, 0.5).index} monotone={rep.monotone}")
        for j, lam, mu, roots, _ in rep.rows:
            print(f"   j={j} lambda={lam:g} mu={mu:g} roots=" + ", ".join(f"{r.real:.6g}{r.imag:+.6g}i" for r in roots))
        if args.out:
            args.out.mkdir(parents=True, exist_ok=True)
            write_spectrum_table(args.out / f"indicial_n{n}.csv", rep)


if __name__ == "__main__":
    main()
