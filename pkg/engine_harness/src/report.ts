// Reads the per-query CSV report emitted by the `pqmirror eval`/`sweep`
// commands. That CSV is the contract between the two packages: it carries the
// workload (selectivity, cutoff) and the simulator's predicted row-group scan
// counts for the original and the synthetic file.

import * as fs from "node:fs";

export interface WorkloadQuery {
  seed: number;
  selectivity: number;
  cutoff: number;
  origRgs: number;
  synthRgs: number;
}

export type Band = "low" | "mid" | "high";

export const LOW_BAND_MAX = 0.05;
export const HIGH_BAND_MIN = 0.3;

export function bandOf(selectivity: number): Band {
  if (selectivity < LOW_BAND_MAX) return "low";
  if (selectivity > HIGH_BAND_MIN) return "high";
  return "mid";
}

export function readWorkloadCsv(path: string): WorkloadQuery[] {
  const lines = fs.readFileSync(path, "utf8").trim().split("\n");
  const header = lines[0].split(",");
  const col = (name: string) => {
    const i = header.indexOf(name);
    if (i < 0) throw new Error(`column ${name} missing from ${path}`);
    return i;
  };
  const [iSeed, iSel, iCut, iOrig, iSynth] = [
    col("seed"), col("selectivity"), col("cutoff"), col("orig_rgs"), col("synth_rgs"),
  ];
  const rows = lines.slice(1).map((line) => {
    const f = line.split(",");
    return {
      seed: Number(f[iSeed]),
      selectivity: Number(f[iSel]),
      cutoff: Number(f[iCut]),
      origRgs: Number(f[iOrig]),
      synthRgs: Number(f[iSynth]),
    };
  });
  // One workload is enough; the cutoffs are identical across seeds.
  const first = rows[0].seed;
  return rows.filter((r) => r.seed === first);
}

export function median(values: number[]): number {
  if (values.length === 0) throw new Error("median of empty list");
  const sorted = [...values].sort((a, b) => a - b);
  const mid = sorted.length >> 1;
  return sorted.length % 2 ? sorted[mid] : (sorted[mid - 1] + sorted[mid]) / 2;
}

/** Median per band of a per-query metric, keyed by the query's selectivity. */
export function bandMedians(
  queries: WorkloadQuery[],
  metric: number[],
): Record<Band, number> {
  const buckets: Record<Band, number[]> = { low: [], mid: [], high: [] };
  queries.forEach((q, i) => buckets[bandOf(q.selectivity)].push(metric[i]));
  return {
    low: median(buckets.low),
    mid: median(buckets.mid),
    high: median(buckets.high),
  };
}

/** Absolute relative difference of band medians, in percent of `base`. */
export function bandDiffPct(
  base: Record<Band, number>,
  other: Record<Band, number>,
): Record<Band, number> {
  const out = {} as Record<Band, number>;
  for (const band of ["low", "mid", "high"] as Band[]) {
    out[band] = (100 * Math.abs(other[band] - base[band])) / base[band];
  }
  return out;
}
