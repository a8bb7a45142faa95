#!/usr/bin/env python3
"""Channel gap versus system size in the half-filled sector.

Runs the baseline preset (L = 4..9) and, optionally, dephased variants; the
circuit-step gap should fit a power law with exponent close to 2 (diffusive
relaxation).  Expect a few minutes of runtime.
"""

import pathlib
import sys

from assb.cli import main

OUT = pathlib.Path(__file__).resolve().parent.parent / "results"

if __name__ == "__main__":
    OUT.mkdir(exist_ok=True)
    rc = main(["--preset", "baseline-gap", "--out", str(OUT / "baseline_gap.csv")])
    for p_z in (0.2, 0.5):
        cfg = OUT / f"gap_pz{p_z}.cfg"
        cfg.write_text(f"kind = channel-gap\nl = 4..8\np_s = {1 - p_z}\np_z = {p_z}\nq = 0\n")
        rc |= main(["--config", str(cfg), "--out", str(OUT / f"gap_pz{p_z}.csv")])
    sys.exit(rc)
