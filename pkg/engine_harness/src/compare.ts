// Agreement checks between the simulator's predictions and DuckDB's measured
// behaviour.

import { Measurement } from "./runner";
import { Band, WorkloadQuery, bandDiffPct, bandMedians } from "./report";

export interface ScanMismatch {
  cutoff: number;
  predicted: number;
  measured: number;
}

/** Queries where the engine's scan count differs from the simulator's. */
export function scanMismatches(
  queries: WorkloadQuery[],
  measured: Measurement[],
  side: "origRgs" | "synthRgs",
): ScanMismatch[] {
  const byCutoff = new Map(measured.map((m) => [m.cutoff, m]));
  const out: ScanMismatch[] = [];
  for (const q of queries) {
    const m = byCutoff.get(q.cutoff);
    if (!m) throw new Error(`no measurement for cutoff ${q.cutoff}`);
    if (m.rgsScanned !== q[side]) {
      out.push({ cutoff: q.cutoff, predicted: q[side], measured: m.rgsScanned });
    }
  }
  return out;
}

export interface TimingComparison {
  /** |synthetic - original| band-median timing diff, percent of original. */
  diffPct: Record<Band, number>;
  /** Self-vs-self diff of two original runs: the measurement noise floor. */
  noisePct: Record<Band, number>;
  /** diff <= noise + marginPct in every band. */
  withinNoise: boolean;
}

export function compareTimings(
  queries: WorkloadQuery[],
  originalA: Measurement[],
  originalB: Measurement[],
  synthetic: Measurement[],
  marginPct = 5,
): TimingComparison {
  const ms = (runs: Measurement[]) => runs.map((m) => m.medianMs);
  const base = bandMedians(queries, ms(originalA));
  const noisePct = bandDiffPct(base, bandMedians(queries, ms(originalB)));
  const diffPct = bandDiffPct(base, bandMedians(queries, ms(synthetic)));
  const withinNoise = (["low", "mid", "high"] as Band[]).every(
    (band) => diffPct[band] <= noisePct[band] + marginPct,
  );
  return { diffPct, noisePct, withinNoise };
}
