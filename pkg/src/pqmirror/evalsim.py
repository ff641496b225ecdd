"""Zone-map pruning simulation and fidelity metrics.

Builds the `col <= cutoff` workload from empirical quantiles, simulates
skip-or-scan decisions from footer metadata, and aggregates MAPE-RG /
MAPE-Bytes overall and per selectivity band, across seeds.
"""

from __future__ import annotations

import io
import json
import math
import statistics
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pyarrow as pa
import pyarrow.parquet as pq

from .dp import ReleaseParams, release_sketch
from .errors import DivisionByZero, EmptyData
from .sketch import Domain, Sketch, extract_sketch, read_footer_layout
from .synth import BaselineKind, generate_baseline

DEFAULT_SELECTIVITIES = tuple(np.geomspace(0.001, 0.95, 20))
DEFAULT_SEEDS = (42, 7, 2025, 777, 867)

LOW_BAND_MAX = 0.05   # exclusive
HIGH_BAND_MIN = 0.30  # exclusive


@dataclass(frozen=True)
class QuerySpec:
    cutoff: int
    target_selectivity: float

    @property
    def band(self) -> str:
        if self.target_selectivity < LOW_BAND_MAX:
            return "low"
        if self.target_selectivity <= HIGH_BAND_MIN:
            return "mid"
        return "high"


@dataclass(frozen=True)
class PruneProfile:
    rgs_scanned: int
    bytes_read: int
    scanned_indices: tuple[int, ...] = ()


@dataclass(frozen=True)
class QueryResult:
    selectivity: float
    cutoff: int
    orig_rgs: int
    synth_rgs: int
    orig_bytes: int
    synth_bytes: int
    ape_rg: float
    ape_bytes: float


@dataclass(frozen=True)
class FidelityReport:
    rows: tuple[QueryResult, ...]

    @property
    def mape_rg(self) -> float:
        return 100.0 * statistics.fmean(r.ape_rg for r in self.rows)

    @property
    def mape_bytes(self) -> float:
        return 100.0 * statistics.fmean(r.ape_bytes for r in self.rows)

    def band_mape_rg(self) -> dict[str, float]:
        out = {}
        for band in ("low", "mid", "high"):
            apes = [
                r.ape_rg
                for r in self.rows
                if QuerySpec(r.cutoff, r.selectivity).band == band
            ]
            out[band] = 100.0 * statistics.fmean(apes) if apes else float("nan")
        return out


@dataclass(frozen=True)
class MultiSeedReport:
    per_seed: dict[int, FidelityReport]

    def _agg(self, values: list[float]) -> tuple[float, float]:
        return statistics.fmean(values), statistics.pstdev(values)

    def overall_mape_rg(self) -> tuple[float, float]:
        return self._agg([r.mape_rg for r in self.per_seed.values()])

    def overall_mape_bytes(self) -> tuple[float, float]:
        return self._agg([r.mape_bytes for r in self.per_seed.values()])

    def band_mape_rg(self) -> dict[str, tuple[float, float]]:
        return {
            band: self._agg([r.band_mape_rg()[band] for r in self.per_seed.values()])
            for band in ("low", "mid", "high")
        }

    def to_summary_json(self) -> str:
        bands = self.band_mape_rg()
        rg = self.overall_mape_rg()
        by = self.overall_mape_bytes()
        return json.dumps(
            {
                "seeds": sorted(self.per_seed),
                "mape_rg": {"mean": rg[0], "std": rg[1]},
                "mape_bytes": {"mean": by[0], "std": by[1]},
                "band_mape_rg": {
                    band: {"mean": m, "std": s} for band, (m, s) in bands.items()
                },
            },
            indent=2,
        )

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(
            "seed,selectivity,cutoff,orig_rgs,synth_rgs,orig_bytes,synth_bytes,"
            "ape_rg,ape_bytes\n"
        )
        for seed in sorted(self.per_seed):
            for r in self.per_seed[seed].rows:
                buf.write(
                    f"{seed},{r.selectivity!r},{r.cutoff},{r.orig_rgs},{r.synth_rgs},"
                    f"{r.orig_bytes},{r.synth_bytes},{r.ape_rg!r},{r.ape_bytes!r}\n"
                )
        return buf.getvalue()


def read_filter_values(parquet_path, column: str) -> np.ndarray:
    """Read the filter column values as int64 (dates become days-since-epoch).
    Unlike sketch extraction this reads data pages; it runs on the trusted
    side (workload construction, marginal baseline, oracles)."""
    arr = pq.read_table(parquet_path, columns=[column]).column(column)
    if pa.types.is_date(arr.type):
        arr = arr.cast(pa.date32()).cast(pa.int32())
    return arr.cast(pa.int64()).to_numpy()


def make_workload(values, selectivities=None) -> list[QuerySpec]:
    """One `col <= cutoff` query per selectivity; the cutoff is the smallest
    value whose empirical CDF reaches the target."""
    values = np.asarray(values)
    if len(values) == 0:
        raise EmptyData("cannot build a workload from no values")
    if selectivities is None:
        selectivities = DEFAULT_SELECTIVITIES
    n = len(values)
    queries = []
    for s in selectivities:
        if not (0.0 < s <= 1.0):
            raise ValueError(f"selectivity must be in (0, 1], got {s}")
        rank = min(n - 1, max(0, math.ceil(s * n) - 1))
        queries.append(QuerySpec(cutoff=int(values[rank]), target_selectivity=float(s)))
    return queries


def _layout_of(layout) -> list:
    if isinstance(layout, Sketch):
        return list(layout.row_groups)
    return list(layout)


def prune_profile(layout, q: QuerySpec) -> PruneProfile:
    """Zone-map decision for `col <= cutoff`: RG i is scanned iff its min
    does not exceed the cutoff."""
    groups = _layout_of(layout)
    scanned = [rg for rg in groups if rg.min_val <= q.cutoff]
    return PruneProfile(
        rgs_scanned=len(scanned),
        bytes_read=sum(rg.compressed_size for rg in scanned),
        scanned_indices=tuple(rg.index for rg in scanned),
    )


def mape(orig_profiles, synth_profiles, field: str) -> float:
    """100 * mean over queries of |synth - orig| / orig."""
    if len(orig_profiles) != len(synth_profiles):
        raise ValueError("profile lists must have equal lengths")
    attr = {"rgs": "rgs_scanned", "bytes": "bytes_read"}[field]
    apes = []
    for o, s in zip(orig_profiles, synth_profiles):
        ov, sv = getattr(o, attr), getattr(s, attr)
        if ov == 0:
            raise DivisionByZero(f"original profile has zero {field}; malformed workload")
        apes.append(abs(sv - ov) / ov)
    return 100.0 * statistics.fmean(apes)


def banded_report(orig_profiles, synth_profiles, workload) -> FidelityReport:
    if not (len(orig_profiles) == len(synth_profiles) == len(workload)):
        raise ValueError("profiles and workload must have equal lengths")
    rows = []
    for o, s, q in zip(orig_profiles, synth_profiles, workload):
        if o.rgs_scanned == 0 or o.bytes_read == 0:
            raise DivisionByZero("original profile is zero; malformed workload")
        rows.append(
            QueryResult(
                selectivity=q.target_selectivity,
                cutoff=q.cutoff,
                orig_rgs=o.rgs_scanned,
                synth_rgs=s.rgs_scanned,
                orig_bytes=o.bytes_read,
                synth_bytes=s.bytes_read,
                ape_rg=abs(s.rgs_scanned - o.rgs_scanned) / o.rgs_scanned,
                ape_bytes=abs(s.bytes_read - o.bytes_read) / o.bytes_read,
            )
        )
    return FidelityReport(rows=tuple(rows))


@dataclass(frozen=True)
class RunConfig:
    """One experiment cell: a dataset, a release setting, and a baseline."""

    original_path: str
    filter_column: str
    domain: Domain
    epsilon: float
    m: int
    baseline: BaselineKind
    workdir: str
    selectivities: tuple[float, ...] = DEFAULT_SELECTIVITIES


def _synth_rng(seed: int):
    # Independent stream from the release RNG (which is seeded with `seed`).
    return np.random.default_rng([seed, 0x53594E])


def run_cell(config: RunConfig, seed: int, sketch=None, orig_values=None) -> FidelityReport:
    """Release + synthesize + evaluate for one seed."""
    if sketch is None:
        sketch = extract_sketch(config.original_path, config.filter_column)
    if orig_values is None:
        orig_values = read_filter_values(config.original_path, config.filter_column)
    workload = make_workload(orig_values, config.selectivities)
    orig_profiles = [prune_profile(sketch, q) for q in workload]

    params = ReleaseParams(
        epsilon=config.epsilon,
        max_multiplicity=config.m,
        domain=config.domain,
        rng_seed=seed,
    )
    noisy = release_sketch(sketch, params)

    eps_tag = "inf" if params.epsilon == float("inf") else f"{params.epsilon:g}"
    name = f"{config.baseline.value}_eps{eps_tag}_m{config.m}_seed{seed}.parquet"
    Path(config.workdir).mkdir(parents=True, exist_ok=True)
    out = str(Path(config.workdir) / name)
    generate_baseline(
        config.baseline, noisy, out, _synth_rng(seed), original_values=orig_values
    )

    synth_layout = read_footer_layout(out, config.filter_column)
    synth_profiles = [prune_profile(synth_layout, q) for q in workload]
    return banded_report(orig_profiles, synth_profiles, workload)


def multi_seed_run(config: RunConfig, seeds=DEFAULT_SEEDS) -> MultiSeedReport:
    if not seeds:
        raise ValueError("need at least one seed")
    sketch = extract_sketch(config.original_path, config.filter_column)
    orig_values = read_filter_values(config.original_path, config.filter_column)
    reports = {
        seed: run_cell(config, seed, sketch=sketch, orig_values=orig_values)
        for seed in seeds
    }
    return MultiSeedReport(per_seed=reports)
