"""AE and cusp fits of the cuspidal profiles for a range of dimensions.

    python3 scripts/asymptotic_fits.py [--n 2 3 4 5] [--json fits.json]
"""

import argparse
import json

from sfkcusp.asymptotics import (
    ae_constant,
    fit_ae_remainder,
    fit_cusp_coefficient,
    leading_ae_coefficient,
    next_order_exponent,
    window_drift,
)
from sfkcusp.momentum import profile_cp1, profile_cpn


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, nargs="+", default=[2, 3, 4, 5])
    ap.add_argument("--k", type=int, default=1)
    ap.add_argument("--json")
    args = ap.parse_args()

    out = []
    for n in args.n:
        p = profile_cp1(args.k, 0) if n == 2 else profile_cpn(n, -args.k)
        ae = fit_ae_remainder(p)
        cu = fit_cusp_coefficient(p)
        rec = {
            "profile": p.label,
            "ae_exponent": ae.exponent,
            "ae_r2": ae.r_squared,
            "ae_constant": float(ae_constant(p)),
            "leading_coefficient": leading_ae_coefficient(p),
            "next_order_exponent": next_order_exponent(p).exponent,
            "window_drift": window_drift(p),
            "cusp_coefficient": cu.coefficient,
            "cusp_a": cu.extra["a"],
            "cusp_expected": cu.extra["expected"],
        }
        out.append(rec)
        print(json.dumps(rec))
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(out, fh, indent=2)


if __name__ == "__main__":
    main()
