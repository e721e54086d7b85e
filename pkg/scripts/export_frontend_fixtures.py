#!/usr/bin/env python3
"""Generate the shared fixtures consumed by the figure tool's test suite.

Produces a reduced-resolution centered-Maxwellian run (60 modes, t = 20)
with checkpoints at the six snapshot times, plus a reference phase-space
reconstruction of one checkpoint so the TypeScript reconstruction can be
compared value by value against this implementation.
"""

import json
import sys
from pathlib import Path

import numpy as np

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from vfp_hermite.experiments import apply_overrides, cmd_run, preset, prepare
from vfp_hermite.io import read_csv
from vfp_hermite.kinetic import load_checkpoint
from vfp_hermite.hermite import reconstruct_f

SNAPSHOT_STEPS = (0, 500, 1500, 3000, 5000, 20000)


def main() -> int:
    out = ROOT / "frontend" / "test" / "fixtures" / "run"
    config = apply_overrides(
        preset("test1"),
        [
            "scheme.n_h=60",
            "scheme.epsilon_list=1.0,0.1",
            "run.diag_every=20",
            "run.checkpoint_steps=" + ",".join(str(s) for s in SNAPSHOT_STEPS),
        ],
    )
    code = cmd_run(config, out_dir=out)
    if code != 0:
        return code

    columns = read_csv(out / "eps_1.0" / "diagnostics.csv")
    dperp = np.array(columns["dperp"], dtype=float)
    maxima = int(np.sum((dperp[1:-1] > dperp[:-2]) & (dperp[1:-1] > dperp[2:])))
    if maxima < 3:
        print(f"fixture run lost its oscillations ({maxima} maxima)", file=sys.stderr)
        return 1

    prep = prepare(config)
    ckpt = out / "eps_1.0" / "step_00005000.ckpt"
    coeffs = load_checkpoint(ckpt, prep.field)
    v_grid = np.linspace(-5.0, 5.0, 96)
    f = reconstruct_f(coeffs, v_grid)
    reference = {
        "checkpoint": "run/eps_1.0/step_00005000.ckpt",
        "v_grid": v_grid.tolist(),
        "f": f.tolist(),
    }
    ref_path = out.parent / "reconstruction.json"
    ref_path.write_text(json.dumps(reference) + "\n", encoding="ascii")
    print(f"fixtures written under {out.parent} ({maxima} interior maxima in dperp)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
