"""Synthetic Parquet generation from a noisy sketch, plus the comparison
baselines and the desk-scale dataset generator.

The synthetic file reproduces the original's zone-map pruning decisions
(per-RG value intervals from the noisy boundaries) and per-RG compressed
sizes (padding columns of random bytes, calibrated in two passes plus one
multiplicative correction).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
import pyarrow as pa
import pyarrow.parquet as pq

from .dp import NoisySketch
from .errors import InvalidProfile, WriteFailure
from .sketch import Domain, read_footer_layout


class BaselineKind(str, Enum):
    RANDOM = "random"
    MARGINAL = "marginal"
    SORTED_GLOBAL = "sorted-global"
    MINMAX = "minmax"
    FULL = "full"


@dataclass(frozen=True)
class CalibrationResult:
    """Outcome of the padding calibration for one written file."""

    path: str
    base_sizes: tuple[int, ...]      # filter-column-only per-RG sizes
    target_sizes: tuple[int, ...]
    achieved_sizes: tuple[int, ...]
    shortfall_rgs: tuple[int, ...]   # RGs where the target is below base
    n_writes: int

    @property
    def max_relative_error(self) -> float:
        errs = [
            abs(a - t) / t
            for i, (a, t) in enumerate(zip(self.achieved_sizes, self.target_sizes))
            if t > 0 and i not in self.shortfall_rgs
        ]
        return max(errs) if errs else 0.0


@dataclass(frozen=True)
class DatasetInfo:
    path: str
    profile: str
    n_rows: int
    rows_per_group: int
    domain: Domain
    skew: float
    max_multiplicity: int
    column_count: int


def generate_filter_column(noisy: NoisySketch, rng) -> list[np.ndarray]:
    """Per-RG sorted uniform draws from the noisy boundary intervals.

    Adjacent intervals share their endpoint, so the concatenation is
    globally non-decreasing.
    """
    out = []
    for i, count in enumerate(noisy.row_counts):
        lo, hi = noisy.betas.interval(i)
        vals = rng.integers(lo, hi + 1, size=count, dtype=np.int64)
        vals.sort()
        out.append(vals)
    return out


def _random_binary_array(rng, lengths: np.ndarray) -> pa.Array:
    """Binary column whose i-th row is lengths[i] high-entropy bytes."""
    total = int(lengths.sum())
    data = rng.bytes(total)
    offsets = np.zeros(len(lengths) + 1, dtype=np.int32)
    np.cumsum(lengths, out=offsets[1:])
    return pa.Array.from_buffers(
        pa.binary(), len(lengths), [None, pa.py_buffer(offsets), pa.py_buffer(data)]
    )


def _pad_lengths(total_bytes: int, n_rows: int) -> np.ndarray:
    """Put the whole byte budget in the first row. Spreading it across rows
    interleaves 4-byte length prefixes with the random payload, which makes
    the compressed size respond nonlinearly (and content-dependently) to the
    budget; a single value per RG compresses to budget + constant framing.
    """
    lengths = np.zeros(n_rows, dtype=np.int64)
    lengths[0] = int(total_bytes)
    return lengths


def _write_row_groups(path, schema: pa.schema, rg_tables, codec: str):
    try:
        # Dictionary encoding inflates high-entropy binary columns (dict page
        # plus indices), which would break the linear padding calibration.
        with pq.ParquetWriter(
            path, schema, compression=codec.lower(), use_dictionary=False
        ) as writer:
            for table in rg_tables:
                writer.write_table(table)
    except OSError as exc:
        raise WriteFailure(f"cannot write {path}: {exc}") from exc


def _rg_sizes(path, filter_column: str) -> tuple[int, ...]:
    return tuple(rg.compressed_size for rg in read_footer_layout(path, filter_column))


def _write_filter_only(path, filter_column, values_per_rg, codec):
    schema = pa.schema([(filter_column, pa.int64())])
    tables = (pa.table({filter_column: vals}, schema=schema) for vals in values_per_rg)
    _write_row_groups(path, schema, tables, codec)


def _write_padded(path, filter_column, values_per_rg, pads, n_pad_cols, codec, rng):
    """Write filter column plus n_pad_cols random-byte columns; pads[i] is the
    total padding byte budget of RG i, split evenly across the columns."""
    pad_names = [f"pad_{j}" for j in range(n_pad_cols)]
    schema = pa.schema(
        [(filter_column, pa.int64())] + [(name, pa.binary()) for name in pad_names]
    )

    def tables():
        for vals, pad in zip(values_per_rg, pads):
            cols = {filter_column: pa.array(vals, type=pa.int64())}
            per_col = max(0, int(pad)) // n_pad_cols if n_pad_cols else 0
            for name in pad_names:
                cols[name] = _random_binary_array(rng, _pad_lengths(per_col, len(vals)))
            yield pa.table(cols, schema=schema)

    _write_row_groups(path, schema, tables(), codec)


def calibrate_and_write(noisy: NoisySketch, out_path, rng) -> CalibrationResult:
    """Write the synthetic file with per-RG sizes calibrated to the noisy
    targets.

    Pass 1 writes the filter column alone and measures the per-RG base
    size; padding is the target minus base, clipped at zero. Pass 2 writes
    the padded file and measures it; one multiplicative correction per RG
    then produces the final file. Targets below base are reported as
    shortfall, not an error.
    """
    out_path = str(out_path)
    filter_column = noisy.filter_column
    values = generate_filter_column(noisy, rng)
    targets = tuple(int(round(s)) for s in noisy.sizes)
    n_pad = noisy.column_count - 1

    base_path = out_path + ".base"
    _write_filter_only(base_path, filter_column, values, noisy.codec)
    base = _rg_sizes(base_path, filter_column)

    pads = [max(0, t - b) for t, b in zip(targets, base)]
    shortfall = tuple(i for i, (t, b) in enumerate(zip(targets, base)) if t < b)

    _write_padded(out_path, filter_column, values, pads, n_pad, noisy.codec, rng)
    achieved = _rg_sizes(out_path, filter_column)

    corrected = [
        max(0, int(round(p * t / a))) if a > 0 else p
        for p, t, a in zip(pads, targets, achieved)
    ]
    _write_padded(out_path, filter_column, values, corrected, n_pad, noisy.codec, rng)
    achieved = _rg_sizes(out_path, filter_column)

    return CalibrationResult(
        path=out_path,
        base_sizes=base,
        target_sizes=targets,
        achieved_sizes=achieved,
        shortfall_rgs=shortfall,
        n_writes=3,
    )


def _split_by_counts(values: np.ndarray, counts) -> list[np.ndarray]:
    return np.split(values, np.cumsum(counts)[:-1])


def _uniform_padding_write(out_path, noisy, values_per_rg, rng) -> CalibrationResult:
    """Single-pass write with the total true size split evenly across RGs."""
    out_path = str(out_path)
    filter_column = noisy.filter_column
    total = sum(noisy.sizes)
    per_rg_target = int(round(total / noisy.num_row_groups))

    base_path = out_path + ".base"
    _write_filter_only(base_path, filter_column, values_per_rg, noisy.codec)
    base = _rg_sizes(base_path, filter_column)

    pads = [max(0, per_rg_target - b) for b in base]
    shortfall = tuple(i for i, b in enumerate(base) if per_rg_target < b)
    _write_padded(
        out_path, filter_column, values_per_rg, pads, noisy.column_count - 1, noisy.codec, rng
    )
    achieved = _rg_sizes(out_path, filter_column)
    return CalibrationResult(
        path=out_path,
        base_sizes=base,
        target_sizes=(per_rg_target,) * noisy.num_row_groups,
        achieved_sizes=achieved,
        shortfall_rgs=shortfall,
        n_writes=2,
    )


def generate_baseline(
    kind: BaselineKind,
    noisy: NoisySketch,
    out_path,
    rng,
    original_values: np.ndarray | None = None,
) -> CalibrationResult:
    """Write one of the comparison files. All baselines share the original's
    schema shape, row counts, RG size, and codec; only `full` calibrates
    per-RG sizes, the rest pad uniformly.
    """
    kind = BaselineKind(kind)
    domain = noisy.params.domain
    n = noisy.total_rows

    if kind is BaselineKind.FULL:
        return calibrate_and_write(noisy, out_path, rng)
    if kind is BaselineKind.MINMAX:
        values = generate_filter_column(noisy, rng)
        return _uniform_padding_write(out_path, noisy, values, rng)

    if kind is BaselineKind.RANDOM:
        flat = rng.integers(domain.lower, domain.upper + 1, size=n, dtype=np.int64)
    elif kind is BaselineKind.SORTED_GLOBAL:
        flat = rng.integers(domain.lower, domain.upper + 1, size=n, dtype=np.int64)
        flat.sort()
    elif kind is BaselineKind.MARGINAL:
        if original_values is None:
            raise ValueError("marginal baseline needs the original filter values")
        counts, edges = np.histogram(original_values, bins=256)
        bins = rng.choice(256, size=n, p=counts / counts.sum())
        flat = np.floor(edges[bins] + rng.random(n) * (edges[bins + 1] - edges[bins]))
        flat = flat.astype(np.int64)
    else:  # pragma: no cover
        raise ValueError(f"unhandled baseline {kind}")

    values = _split_by_counts(flat, noisy.row_counts)
    return _uniform_padding_write(out_path, noisy, values, rng)


def _sample_sine_skewed(rng, n: int, domain: Domain, amplitude: float) -> np.ndarray:
    """Inverse-CDF sampling from density proportional to
    1 + amplitude*sin(2*pi*x/width) over the domain, floored to integers.
    Produces smoothly varying local density, hence variable boundary spacing.
    """
    width = domain.width
    u = rng.random(n) * width
    # Solve y + a*W/(2pi) * (1 - cos(2pi y/W)) = u for y by bisection.
    lo = np.zeros(n)
    hi = np.full(n, float(width))
    c = amplitude * width / (2.0 * math.pi)
    for _ in range(50):
        mid = 0.5 * (lo + hi)
        f = mid + c * (1.0 - np.cos(2.0 * math.pi * mid / width))
        too_low = f < u
        lo = np.where(too_low, mid, lo)
        hi = np.where(too_low, hi, mid)
    y = 0.5 * (lo + hi)
    vals = domain.lower + np.floor(y).astype(np.int64)
    return np.clip(vals, domain.lower, domain.upper)


def _comment_lengths(values: np.ndarray, domain: Domain, variable: bool) -> np.ndarray:
    if not variable:
        return np.full(len(values), 24, dtype=np.int64)
    phase = 2.0 * math.pi * (values - domain.lower) / domain.width
    return (12 + 12.0 * (1.0 + np.sin(phase))).astype(np.int64)


def generate_dataset(
    profile: str,
    n_rows: int,
    rows_per_group: int,
    domain: Domain,
    out_path,
    rng,
    skew: float = 0.34,
    column_count: int = 4,
) -> DatasetInfo:
    """Write a sorted original-stand-in Parquet file.

    Profiles: `uniform` and `ssb-like` draw the filter column uniformly over
    the domain; `tpch-like` draws from a smoothly non-uniform density so the
    per-RG boundary spacing varies (coefficient of variation around 0.25).
    Payload columns carry random numbers plus a variable-length byte column;
    for tpch-like the byte length tracks the filter value, so per-RG
    compressed sizes vary too.

    The realized maximum multiplicity of the filter column is recorded in a
    `<out>.meta.json` sidecar.
    """
    if n_rows < rows_per_group:
        raise ValueError("n_rows must be >= rows_per_group")
    if column_count < 2:
        raise ValueError("need at least the filter column and one payload column")
    out_path = str(out_path)

    if profile in ("uniform", "ssb-like"):
        values = rng.integers(domain.lower, domain.upper + 1, size=n_rows, dtype=np.int64)
        variable_comments = False
    elif profile == "tpch-like":
        values = _sample_sine_skewed(rng, n_rows, domain, skew)
        variable_comments = True
    else:
        raise InvalidProfile(f"unknown profile {profile!r}")

    values.sort()
    max_multiplicity = int(np.bincount(values - domain.lower).max())

    comment = _random_binary_array(rng, _comment_lengths(values, domain, variable_comments))
    payload = {"comment": comment}
    for j in range(column_count - 2):
        if j % 2 == 0:
            payload[f"payload_i{j}"] = pa.array(
                rng.integers(0, 2**62, size=n_rows, dtype=np.int64)
            )
        else:
            payload[f"payload_f{j}"] = pa.array(rng.random(n_rows))

    schema = pa.schema(
        [("value", pa.int64())] + [(name, arr.type) for name, arr in payload.items()]
    )
    table = pa.table({"value": pa.array(values), **payload}, schema=schema)

    starts = list(range(0, n_rows, rows_per_group))
    rg_tables = (table.slice(s, rows_per_group) for s in starts)
    _write_row_groups(out_path, schema, rg_tables, "zstd")

    info = DatasetInfo(
        path=out_path,
        profile=profile,
        n_rows=n_rows,
        rows_per_group=rows_per_group,
        domain=domain,
        skew=skew if profile == "tpch-like" else 0.0,
        max_multiplicity=max_multiplicity,
        column_count=column_count,
    )
    with open(out_path + ".meta.json", "w") as fh:
        json.dump(
            {
                "profile": info.profile,
                "n_rows": info.n_rows,
                "rows_per_group": info.rows_per_group,
                "domain": [domain.lower, domain.upper],
                "skew": info.skew,
                "max_multiplicity": info.max_multiplicity,
                "column_count": info.column_count,
                "filter_column": "value",
            },
            fh,
            indent=2,
        )
    return info
