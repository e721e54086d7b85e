#!/usr/bin/env python3
"""Asymptotic-preserving sweep: plateau of the macro H^-1 distance vs epsilon.

Runs the shifted-Maxwellian datum across three decades of epsilon to t = 3
and writes the sweep summary (layer rate, plateau, long-time rate, decade
ratios).  The plateau column scaling ~ epsilon is the first-order AP
signature.

Usage: python scripts/sweep_ap.py [OUT_DIR]
"""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from vfp_hermite.experiments import apply_overrides, cmd_sweep, preset


def main() -> int:
    out = sys.argv[1] if len(sys.argv) > 1 else "out/sweep_ap"
    config = apply_overrides(
        preset("test2"),
        [
            "scheme.epsilon_list=1e-2,1e-3,1e-4",
            "scheme.n_h=100",
            "run.n_steps=3000",
        ],
    )
    return cmd_sweep(config, out_dir=out)


if __name__ == "__main__":
    sys.exit(main())
