#!/usr/bin/env python3
"""Steady-state order of the unperturbed dynamics: chi, <S1.SL>, purity.

Writes results/steady_order.csv; chi should read (L+2)/4 and the long-range
correlation 1/4 in every half-filled sector.
"""

import pathlib
import sys

from assb.cli import main

OUT = pathlib.Path(__file__).resolve().parent.parent / "results"
CONFIG = """
kind = channel-steady
l = 4,6,8
p_s = 1.0
q = 0
"""

if __name__ == "__main__":
    OUT.mkdir(exist_ok=True)
    cfg = OUT / "steady_order.cfg"
    cfg.write_text(CONFIG.strip() + "\n")
    sys.exit(main(["--config", str(cfg), "--out", str(OUT / "steady_order.csv")]))
