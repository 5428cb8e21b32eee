"""How close each transform's normal-fit quantile lands to the true 0.75 quantile.

    python3 scripts/run_wh_experiment.py [--samples 100000] [--pmax 20]
"""

import argparse

import numpy as np

from gsscm.coga import EIGEN_SETTINGS, TRANSFORM_POWERS, wh_experiment
from gsscm.io import records_to_csv, write_text


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--samples", type=int, default=100_000)
    ap.add_argument("--pmax", type=int, default=20)
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--output", default=None, help="CSV path for the full table")
    args = ap.parse_args()

    rows = wh_experiment(range(1, args.pmax + 1), EIGEN_SETTINGS, n_samples=args.samples, threads=args.threads)
    if args.output:
        write_text(args.output, records_to_csv(rows))
    for setting in EIGEN_SETTINGS:
        print(f"{setting}:  p  " + "  ".join(f"{t:>15s}" for t in TRANSFORM_POWERS))
        for p in range(1, args.pmax + 1):
            v = {r["transform"]: r["f_coga_at_q3sq"] for r in rows if r["setting"] == setting and r["p"] == p}
            best = min(v, key=lambda t: abs(v[t] - 0.75))
            cells = "  ".join(f"{v[t]:15.4f}" + ("*" if t == best else " ") for t in TRANSFORM_POWERS)
            print(f"{'':{len(setting) + 1}s} {p:3d}  {cells}")
    wh = np.array([r["f_coga_at_q3sq"] for r in rows if r["transform"] == "wilson_hilferty"])
    print(f"wilson_hilferty range: [{wh.min():.4f}, {wh.max():.4f}]  (* = closest to 0.75)")


if __name__ == "__main__":
    main()
