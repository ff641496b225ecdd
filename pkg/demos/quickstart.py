#!/usr/bin/env python3
"""Walk the whole pipeline once at desk scale.

Generates a skewed original, extracts its footer sketch, releases the sketch
exactly (epsilon = inf), writes the synthetic twin, and compares pruning and
per-row-group I/O for a 20-query threshold workload.
"""

import argparse
import math
import tempfile
from pathlib import Path

import numpy as np

from pqmirror import (
    BaselineKind,
    Domain,
    ReleaseParams,
    banded_report,
    extract_sketch,
    generate_baseline,
    generate_dataset,
    make_workload,
    prune_profile,
    read_filter_values,
    read_footer_layout,
    release_sketch,
)

parser = argparse.ArgumentParser(description=__doc__)
parser.add_argument("--rows", type=int, default=500_000)
parser.add_argument("--rg", type=int, default=10_000, help="rows per row group")
parser.add_argument("--epsilon", type=float, default=math.inf)
parser.add_argument("--workdir", default=None)
args = parser.parse_args()

workdir = Path(args.workdir or tempfile.mkdtemp(prefix="quickstart_"))
domain = Domain(10957, 13510)  # dates 2000-01-01 .. 2036-12-27 as days

# 1. A skewed "original" we would not be allowed to ship.
info = generate_dataset(
    "tpch-like", args.rows, args.rg, domain,
    workdir / "original.parquet", np.random.default_rng(0),
)
print(f"original: {info.n_rows} rows, max value multiplicity {info.max_multiplicity}")

# 2. Footer-only sketch. No data pages are read here.
sketch = extract_sketch(info.path, "value")
print(f"sketch: {sketch.num_row_groups} row groups, "
      f"{sketch.uncompressed_row_size} uncompressed bytes/row")

# 3. Release under the privacy budget. epsilon = inf keeps it exact.
noisy = release_sketch(sketch, ReleaseParams(
    epsilon=args.epsilon,
    max_multiplicity=info.max_multiplicity,
    domain=domain,
    rng_seed=42,
))
print(f"release: epsilon={args.epsilon:g}, boundary noise scale b*={noisy.noise_scale_beta:g}")

# 4. Synthesize from the noisy sketch alone (trust boundary is here).
synth_path = workdir / "synthetic.parquet"
generate_baseline(BaselineKind.FULL, noisy, synth_path,
                  np.random.default_rng([42, 0x53594E]))

# 5. Compare pruning behaviour query by query.
values = read_filter_values(info.path, "value")
workload = make_workload(values)
orig = [prune_profile(sketch, q) for q in workload]
synth_layout = read_footer_layout(synth_path, "value")
synth = [prune_profile(synth_layout, q) for q in workload]

print(f"\n{'sel':>6} {'cutoff':>7} {'orig RGs':>9} {'synth RGs':>10} {'orig MB':>8} {'synth MB':>9}")
for q, a, b in zip(workload, orig, synth):
    print(f"{q.target_selectivity:6.3f} {q.cutoff:7d} {a.rgs_scanned:9d} "
          f"{b.rgs_scanned:10d} {a.bytes_read / 1e6:8.2f} {b.bytes_read / 1e6:9.2f}")

report = banded_report(orig, synth, workload)
bands = report.band_mape_rg()
print(f"\nMAPE-RG {report.mape_rg:.2f}%  MAPE-Bytes {report.mape_bytes:.2f}%  "
      f"(low {bands['low']:.2f}%, mid {bands['mid']:.2f}%, high {bands['high']:.2f}%)")
print(f"files in {workdir}")
