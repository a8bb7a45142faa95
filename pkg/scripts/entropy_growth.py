#!/usr/bin/env python3
"""Half-chain entanglement growth in the unperturbed model (100 trajectories).

Produces the time series for L = 6..12 plus the exact and asymptotic
steady-state predictions for comparison.  Runtime is dominated by the L = 12
trajectories (a few minutes single-threaded; use --threads or ASSB_THREADS).
"""

import pathlib
import sys

from assb.cli import main

OUT = pathlib.Path(__file__).resolve().parent.parent / "results"

if __name__ == "__main__":
    OUT.mkdir(exist_ok=True)
    args = sys.argv[1:]
    rc = main(["--preset", "baseline-entropy", "--out", str(OUT / "entropy_growth.csv"), *args])
    cfg = OUT / "entropy_exact.cfg"
    cfg.write_text("kind = entanglement-exact\nl = 6,8,10,12,16,32,64,128,256\n")
    rc |= main(["--config", str(cfg), "--out", str(OUT / "entropy_exact.csv")])
    sys.exit(rc)
