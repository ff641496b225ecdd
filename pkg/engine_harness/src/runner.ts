// Spawns the measurement worker under the LD_PRELOAD shim and collects its
// JSON output. Each run gets a fresh trace file and a fresh DuckDB process,
// so measurements never share caches or trace state.

import { execFileSync } from "node:child_process";
import * as fs from "node:fs";
import * as os from "node:os";
import * as path from "node:path";

export interface Measurement {
  cutoff: number;
  rgsScanned: number;
  medianMs: number;
  matches: number;
}

export interface RunResult {
  nRowGroups: number;
  measurements: Measurement[];
}

const SHIM = path.join(__dirname, "..", "..", "shim", "io_trace.so");
const WORKER = path.join(__dirname, "worker.js");

export function runWorkload(
  file: string,
  filterColumn: string,
  cutoffs: number[],
  repeats = 5,
): RunResult {
  if (!fs.existsSync(SHIM)) {
    throw new Error(`shim not built: ${SHIM} (run: npm run build:shim)`);
  }
  const trace = path.join(fs.mkdtempSync(path.join(os.tmpdir(), "iotrace_")), "trace.log");
  const job = JSON.stringify({ file, filterColumn, cutoffs, repeats });
  const stdout = execFileSync(process.execPath, [WORKER, job], {
    env: { ...process.env, LD_PRELOAD: SHIM, IO_TRACE_OUT: trace },
    encoding: "utf8",
    maxBuffer: 64 * 1024 * 1024,
  });
  fs.rmSync(path.dirname(trace), { recursive: true, force: true });
  return JSON.parse(stdout) as RunResult;
}
