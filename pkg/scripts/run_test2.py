#!/usr/bin/env python3
"""Shifted-Maxwellian experiment: initial layer, diffusive phase, long-time decay.

Runs the far-from-equilibrium datum (bulk velocity 1) to t = 30 across the
epsilon sweep, with the drift-diffusion trajectory attached so the macro
H^-1 distance is recorded.

Usage: python scripts/run_test2.py [OUT_DIR] [--fast]
"""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from vfp_hermite.experiments import apply_overrides, cmd_run, preset


def main() -> int:
    args = [a for a in sys.argv[1:] if a != "--fast"]
    fast = "--fast" in sys.argv[1:]
    out = args[0] if args else "out/test2"
    config = preset("test2")
    if fast:
        config = apply_overrides(config, ["scheme.n_h=100", "run.n_steps=10000"])
    return cmd_run(config, out_dir=out)


if __name__ == "__main__":
    sys.exit(main())
