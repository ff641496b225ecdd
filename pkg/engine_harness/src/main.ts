// CLI: validate a synthetic Parquet twin against DuckDB.
//
//   node dist/src/main.js --original a.parquet --synthetic b.parquet \
//       --report report.csv [--filter-col value] [--repeats 5]
//
// The report CSV comes from the generator package's `eval` (or `sweep`)
// command and supplies the workload plus the simulator's predicted scan
// counts. Exit code 0 when scan sets agree and timing is within the noise
// floor, 1 otherwise.

import { parseArgs } from "node:util";
import { readWorkloadCsv } from "./report";
import { runWorkload } from "./runner";
import { compareTimings, scanMismatches } from "./compare";

function main(): number {
  const { values } = parseArgs({
    options: {
      original: { type: "string" },
      synthetic: { type: "string" },
      report: { type: "string" },
      "filter-col": { type: "string", default: "value" },
      repeats: { type: "string", default: "5" },
    },
  });
  if (!values.original || !values.synthetic || !values.report) {
    console.error("usage: main --original F --synthetic F --report F.csv");
    return 1;
  }
  const queries = readWorkloadCsv(values.report);
  const cutoffs = queries.map((q) => q.cutoff);
  const column = values["filter-col"]!;
  const repeats = Number(values.repeats);

  const origA = runWorkload(values.original, column, cutoffs, repeats);
  const origB = runWorkload(values.original, column, cutoffs, repeats);
  const synth = runWorkload(values.synthetic, column, cutoffs, repeats);

  console.log("cutoff  sim-orig eng-orig  sim-synth eng-synth");
  queries.forEach((q, i) => {
    console.log(
      `${String(q.cutoff).padStart(6)}  ${String(q.origRgs).padStart(8)} ` +
        `${String(origA.measurements[i].rgsScanned).padStart(8)}  ` +
        `${String(q.synthRgs).padStart(9)} ` +
        `${String(synth.measurements[i].rgsScanned).padStart(9)}`,
    );
  });

  const origBad = scanMismatches(queries, origA.measurements, "origRgs");
  const synthBad = scanMismatches(queries, synth.measurements, "synthRgs");
  const timing = compareTimings(
    queries, origA.measurements, origB.measurements, synth.measurements,
  );

  console.log(`\nscan agreement: original ${queries.length - origBad.length}/${queries.length}, ` +
    `synthetic ${queries.length - synthBad.length}/${queries.length}`);
  for (const band of ["low", "mid", "high"] as const) {
    console.log(
      `timing ${band}: diff ${timing.diffPct[band].toFixed(1)}% ` +
        `(noise floor ${timing.noisePct[band].toFixed(1)}%)`,
    );
  }
  const ok = origBad.length === 0 && synthBad.length === 0 && timing.withinNoise;
  console.log(ok ? "AGREE" : "DISAGREE");
  return ok ? 0 : 1;
}

process.exit(main());
