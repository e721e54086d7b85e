#!/usr/bin/env python3
"""Centered-Maxwellian relaxation experiment at full resolution.

Runs the epsilon sweep of the centered initial datum (density
1 + 0.5 cos(2 pi x / 10), Maxwellian in velocity) to t = 20 with 200
Hermite modes, writing one diagnostics CSV per epsilon plus checkpoints
at the snapshot times used by the figure tool.

Usage: python scripts/run_test1.py [OUT_DIR] [--fast]
  --fast drops to 100 modes and t = 10 for a quicker turnaround.
"""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from vfp_hermite.experiments import apply_overrides, cmd_run, preset


def main() -> int:
    args = [a for a in sys.argv[1:] if a != "--fast"]
    fast = "--fast" in sys.argv[1:]
    out = args[0] if args else "out/test1"
    config = preset("test1")
    snapshot_steps = "0,500,1500,3000,5000,20000"
    overrides = [f"run.checkpoint_steps={snapshot_steps}"]
    if fast:
        overrides += ["scheme.n_h=100", "run.n_steps=10000"]
    config = apply_overrides(config, overrides)
    return cmd_run(config, out_dir=out)


if __name__ == "__main__":
    sys.exit(main())
