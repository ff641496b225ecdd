"""Footer-only extraction of the execution-relevant sketch of a Parquet file.

Reads per-row-group min/max statistics of the filter column and compressed
sizes from the file footer without touching any data page.
"""

from __future__ import annotations

import datetime
import json
import math
import os
from dataclasses import dataclass, field

import pyarrow as pa
import pyarrow.parquet as pq

from .errors import MissingStatistics, NotSorted, UnsupportedType

_EPOCH = datetime.date(1970, 1, 1)


@dataclass(frozen=True)
class Domain:
    """Public closed domain [lower, upper] of the filter column."""

    lower: int
    upper: int

    def __post_init__(self):
        if self.lower >= self.upper:
            raise ValueError(f"domain lower {self.lower} must be < upper {self.upper}")

    @property
    def width(self) -> int:
        return self.upper - self.lower

    @staticmethod
    def parse(text: str) -> "Domain":
        """Parse a 'LO:HI' string."""
        lo, _, hi = text.partition(":")
        return Domain(int(lo), int(hi))


@dataclass(frozen=True)
class RowGroupMeta:
    """Per-row-group (min, max, compressed size) triple plus its row count."""

    index: int
    min_val: int
    max_val: int
    compressed_size: int
    num_rows: int

    def __post_init__(self):
        if self.min_val > self.max_val:
            raise ValueError(f"RG {self.index}: min {self.min_val} > max {self.max_val}")
        if self.compressed_size <= 0:
            raise ValueError(f"RG {self.index}: non-positive compressed size")


@dataclass(frozen=True)
class Sketch:
    """File-level counts plus the ordered per-RG metadata list."""

    total_rows: int
    num_row_groups: int
    rows_per_group: int
    column_count: int
    codec: str
    filter_column: str
    uncompressed_row_size: int
    row_groups: tuple[RowGroupMeta, ...] = field(default_factory=tuple)

    @property
    def row_counts(self) -> tuple[int, ...]:
        return tuple(rg.num_rows for rg in self.row_groups)

    @property
    def total_compressed_size(self) -> int:
        return sum(rg.compressed_size for rg in self.row_groups)

    def to_json(self) -> str:
        return json.dumps(
            {
                "n_rows": self.total_rows,
                "n_row_groups": self.num_row_groups,
                "rows_per_group": self.rows_per_group,
                "column_count": self.column_count,
                "codec": self.codec,
                "filter_column": self.filter_column,
                "uncompressed_row_size": self.uncompressed_row_size,
                "row_groups": [
                    {"min": rg.min_val, "max": rg.max_val, "size": rg.compressed_size}
                    for rg in self.row_groups
                ],
                "row_counts": list(self.row_counts),
            },
            indent=2,
        )

    @staticmethod
    def from_json(text: str) -> "Sketch":
        doc = json.loads(text)
        counts = doc.get("row_counts")
        if counts is None:
            counts = [doc["rows_per_group"]] * doc["n_row_groups"]
        groups = tuple(
            RowGroupMeta(i, rg["min"], rg["max"], rg["size"], counts[i])
            for i, rg in enumerate(doc["row_groups"])
        )
        return Sketch(
            total_rows=doc["n_rows"],
            num_row_groups=doc["n_row_groups"],
            rows_per_group=doc["rows_per_group"],
            column_count=doc["column_count"],
            codec=doc["codec"],
            filter_column=doc["filter_column"],
            uncompressed_row_size=doc["uncompressed_row_size"],
            row_groups=groups,
        )


class _RangeRecordingFile:
    """Binary file wrapper that records every (offset, length) read.

    Used to assert that sketch extraction touches only the footer region.
    """

    def __init__(self, path):
        self._f = open(path, "rb")
        self.reads: list[tuple[int, int]] = []

    def read(self, nbytes=-1):
        start = self._f.tell()
        data = self._f.read(nbytes)
        self.reads.append((start, len(data)))
        return data

    def seek(self, offset, whence=0):
        return self._f.seek(offset, whence)

    def tell(self):
        return self._f.tell()

    def size(self):
        return os.fstat(self._f.fileno()).st_size

    def readable(self):
        return True

    def seekable(self):
        return True

    def writable(self):
        return False

    @property
    def closed(self):
        return self._f.closed

    def close(self):
        self._f.close()

    def flush(self):
        pass


def _value_to_int(value) -> int:
    if isinstance(value, bool):
        raise UnsupportedType("boolean filter columns are not supported")
    if isinstance(value, int):
        return value
    if isinstance(value, datetime.date) and not isinstance(value, datetime.datetime):
        return (value - _EPOCH).days
    raise UnsupportedType(f"cannot represent {value!r} as an integer filter value")


def _filter_column_index(metadata, filter_column: str) -> int:
    names = [metadata.schema.column(i).name for i in range(metadata.num_columns)]
    if filter_column not in names:
        raise MissingStatistics(
            f"column {filter_column!r} not found (have {names})"
        )
    return names.index(filter_column)


def read_footer_layout(parquet_path, filter_column: str) -> list[RowGroupMeta]:
    """Read the per-RG layout from the footer without sortedness checks.

    Works on unsorted files too (used when profiling baseline files).
    """
    meta = pq.ParquetFile(parquet_path).metadata
    return _layout_from_metadata(meta, filter_column)


def _layout_from_metadata(meta, filter_column: str) -> list[RowGroupMeta]:
    col_idx = _filter_column_index(meta, filter_column)
    groups = []
    for i in range(meta.num_row_groups):
        rg = meta.row_group(i)
        stats = rg.column(col_idx).statistics
        if stats is None or not stats.has_min_max:
            raise MissingStatistics(f"RG {i} has no min/max for {filter_column!r}")
        size = sum(rg.column(c).total_compressed_size for c in range(rg.num_columns))
        groups.append(
            RowGroupMeta(
                index=i,
                min_val=_value_to_int(stats.min),
                max_val=_value_to_int(stats.max),
                compressed_size=size,
                num_rows=rg.num_rows,
            )
        )
    return groups


def _uncompressed_row_size_from_metadata(meta) -> int:
    total = 0
    for i in range(meta.num_row_groups):
        rg = meta.row_group(i)
        total += sum(rg.column(c).total_uncompressed_size for c in range(rg.num_columns))
    return math.ceil(total / meta.num_rows)


def _sketch_from_metadata(meta, filter_column: str) -> Sketch:
    groups = _layout_from_metadata(meta, filter_column)
    for prev, cur in zip(groups, groups[1:]):
        if cur.min_val < prev.max_val:
            raise NotSorted(
                f"RG {cur.index} min {cur.min_val} < RG {prev.index} max {prev.max_val}"
            )
    codec = meta.row_group(0).column(0).compression
    return Sketch(
        total_rows=meta.num_rows,
        num_row_groups=meta.num_row_groups,
        rows_per_group=groups[0].num_rows,
        column_count=meta.num_columns,
        codec=codec,
        filter_column=filter_column,
        uncompressed_row_size=_uncompressed_row_size_from_metadata(meta),
        row_groups=tuple(groups),
    )


def extract_sketch(parquet_path, filter_column: str) -> Sketch:
    """Extract the sketch from a sorted Parquet file, reading only the footer."""
    sketch, _ = extract_sketch_recording(parquet_path, filter_column)
    return sketch


def extract_sketch_recording(parquet_path, filter_column: str):
    """As extract_sketch, but also return the byte ranges that were read
    and the start of the earliest data page, for footer-only verification.
    """
    recorder = _RangeRecordingFile(parquet_path)
    try:
        meta = _read_metadata_footer_only(recorder)
        sketch = _sketch_from_metadata(meta, filter_column)
    finally:
        reads = list(recorder.reads)
        recorder.close()
    first_data_offset = min(
        _chunk_start(meta.row_group(i).column(c))
        for i in range(meta.num_row_groups)
        for c in range(meta.row_group(i).num_columns)
    )
    last_data_end = max(
        _chunk_start(meta.row_group(i).column(c)) + meta.row_group(i).column(c).total_compressed_size
        for i in range(meta.num_row_groups)
        for c in range(meta.row_group(i).num_columns)
    )
    return sketch, {"reads": reads, "data_start": first_data_offset, "data_end": last_data_end}


def _read_metadata_footer_only(fileobj):
    """Parse the footer with exactly two reads: the 8-byte trailer (length +
    magic), then the footer thrift itself. Never touches data pages, unlike
    the default reader's fixed-size tail prefetch.
    """
    size = fileobj.size()
    if size < 12:
        raise pa.ArrowInvalid(f"file too small to be Parquet ({size} bytes)")
    fileobj.seek(size - 8)
    trailer = fileobj.read(8)
    if trailer[4:] != b"PAR1":
        raise pa.ArrowInvalid("missing Parquet magic trailer")
    footer_len = int.from_bytes(trailer[:4], "little")
    if footer_len > size - 12:
        raise pa.ArrowInvalid(f"footer length {footer_len} exceeds file size")
    fileobj.seek(size - 8 - footer_len)
    footer = fileobj.read(footer_len)
    # Offsets inside the footer are plain integers, so parsing works on a
    # buffer holding just footer + trailer.
    return pq.read_metadata(pa.BufferReader(footer + trailer))


def _chunk_start(col) -> int:
    offsets = [col.data_page_offset]
    if col.has_dictionary_page:
        offsets.append(col.dictionary_page_offset)
    return min(offsets)


def uncompressed_row_size(parquet_path) -> int:
    """Bytes of one uncompressed row: footer uncompressed sizes summed over
    all columns, divided by the row count, rounded up."""
    meta = pq.ParquetFile(parquet_path).metadata
    return _uncompressed_row_size_from_metadata(meta)
