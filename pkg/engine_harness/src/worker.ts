// Measurement child process. Launched by the runner with LD_PRELOAD pointing
// at the pread-logging shim, so every byte range DuckDB reads from the
// Parquet file lands in IO_TRACE_OUT. Mapping those ranges onto the filter
// column's chunk extents recovers the engine's real row-group scan set,
// which DuckDB's profiling output does not expose.
//
// Usage: node worker.js '<job json>'
// Job: { file, filterColumn, cutoffs, repeats }
// Output: one JSON document on stdout.

import * as fs from "node:fs";
import { DuckDBInstance } from "@duckdb/node-api";

interface Job {
  file: string;
  filterColumn: string;
  cutoffs: number[];
  repeats: number;
}

interface Measurement {
  cutoff: number;
  rgsScanned: number;
  medianMs: number;
  matches: number;
}

function mark(tracePath: string): number {
  return fs.existsSync(tracePath) ? fs.statSync(tracePath).size : 0;
}

function readsSince(tracePath: string, offset: number, file: string): Array<[number, number]> {
  if (!fs.existsSync(tracePath)) return [];
  const text = fs.readFileSync(tracePath, "utf8").slice(offset);
  const reads: Array<[number, number]> = [];
  for (const line of text.split("\n")) {
    const parts = line.split(" ");
    if (parts.length !== 3 || parts[0] !== file) continue;
    const start = Number(parts[1]);
    reads.push([start, start + Number(parts[2])]);
  }
  return reads;
}

function median(values: number[]): number {
  const s = [...values].sort((a, b) => a - b);
  const mid = s.length >> 1;
  return s.length % 2 ? s[mid] : (s[mid - 1] + s[mid]) / 2;
}

async function main() {
  const job: Job = JSON.parse(process.argv[2]);
  const trace = process.env.IO_TRACE_OUT ?? "";
  const file = fs.realpathSync(job.file);

  const instance = await DuckDBInstance.create(":memory:", {
    threads: "1",
    memory_limit: "4GB",
  });
  const conn = await instance.connect();
  // The cross-query file cache would hide reads from the trace.
  await conn.run("SET enable_external_file_cache=false");

  const metaResult = await conn.runAndReadAll(
    `SELECT data_page_offset, total_compressed_size
     FROM parquet_metadata('${file}')
     WHERE path_in_schema = '${job.filterColumn}'
     ORDER BY row_group_id`,
  );
  const extents = metaResult
    .getRows()
    .map((r) => [Number(r[0]), Number(r[0]) + Number(r[1])] as [number, number]);

  const measurements: Measurement[] = [];
  for (const cutoff of job.cutoffs) {
    const sql = `SELECT sum(${job.filterColumn}), count(*)
                 FROM read_parquet('${file}')
                 WHERE ${job.filterColumn} <= ${cutoff}`;
    // Untimed first run records the scan set and warms the OS page cache.
    const start = mark(trace);
    const result = await conn.runAndReadAll(sql);
    const reads = readsSince(trace, start, file);
    const rgsScanned = extents.filter(([s, e]) =>
      reads.some(([a, b]) => a < e && b > s),
    ).length;
    const matches = Number(result.getRows()[0][1]);

    const timings: number[] = [];
    for (let i = 0; i < job.repeats; i++) {
      const t0 = process.hrtime.bigint();
      await conn.runAndReadAll(sql);
      timings.push(Number(process.hrtime.bigint() - t0) / 1e6);
    }
    measurements.push({ cutoff, rgsScanned, medianMs: median(timings), matches });
  }

  process.stdout.write(
    JSON.stringify({ nRowGroups: extents.length, measurements }) + "\n",
  );
}

main().catch((err) => {
  console.error(err);
  process.exit(1);
});
