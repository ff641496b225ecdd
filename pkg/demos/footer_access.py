#!/usr/bin/env python3
"""Prove the sketch reads only the footer, never the data pages.

Extracts a sketch while recording every byte range touched, then prints the
ranges next to the file's data region.
"""

import tempfile
from pathlib import Path

import numpy as np

from pqmirror import Domain, generate_dataset
from pqmirror.sketch import extract_sketch_recording

workdir = Path(tempfile.mkdtemp(prefix="footer_"))
info = generate_dataset("uniform", 100_000, 10_000, Domain(10957, 13510),
                        workdir / "data.parquet", np.random.default_rng(0))
file_size = Path(info.path).stat().st_size

sketch, access = extract_sketch_recording(info.path, "value")

print(f"file size {file_size} bytes, data pages span "
      f"[{access['data_start']}, {access['data_end']})")
total = 0
for offset, length in access["reads"]:
    overlap = "OVERLAPS DATA" if offset < access["data_end"] else "footer only"
    print(f"  read [{offset:>9}, {offset + length:>9})  {length:>6} bytes  {overlap}")
    total += length
print(f"total read: {total} bytes ({100 * total / file_size:.3f}% of the file)")
print(f"sketch covers {sketch.num_row_groups} row groups, {sketch.total_rows} rows")
