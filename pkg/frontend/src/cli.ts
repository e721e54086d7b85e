/** CLI: plot-decay / plot-snapshots, each driven by a JSON spec file. */

import { readFileSync } from "node:fs";

import { plotDecay, plotSnapshots, type DecaySpec, type SnapshotSpec } from "./plots.js";

function loadSpec(args: string[]): unknown {
  const flag = args.indexOf("--spec");
  if (flag === -1 || flag + 1 >= args.length) {
    throw new Error("usage: plot-decay|plot-snapshots --spec FILE.json");
  }
  return JSON.parse(readFileSync(args[flag + 1], "utf8"));
}

export function main(argv: string[]): number {
  const [command, ...rest] = argv;
  try {
    if (command === "plot-decay") {
      const out = plotDecay(loadSpec(rest) as DecaySpec);
      console.log(out);
      return 0;
    }
    if (command === "plot-snapshots") {
      const written = plotSnapshots(loadSpec(rest) as SnapshotSpec);
      for (const path of written) console.log(path);
      return 0;
    }
    console.error("usage: cli.js plot-decay|plot-snapshots --spec FILE.json");
    return 2;
  } catch (error) {
    console.error(`error: ${error instanceof Error ? error.message : error}`);
    return 1;
  }
}

process.exit(main(process.argv.slice(2)));
