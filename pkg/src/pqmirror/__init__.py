"""pqmirror: privacy-protected Parquet footer sketches and synthetic files
that reproduce zone-map pruning decisions and per-row-group I/O volume."""

from .dp import (
    BoundarySet,
    NoisySketch,
    ReleaseParams,
    bounded_laplace_sample,
    fixed_point_scale,
    release_sketch,
    sensitivity_boundary,
    to_boundaries,
)
from .evalsim import (
    FidelityReport,
    MultiSeedReport,
    PruneProfile,
    QuerySpec,
    RunConfig,
    banded_report,
    make_workload,
    mape,
    multi_seed_run,
    prune_profile,
    read_filter_values,
)
from .sketch import (
    Domain,
    RowGroupMeta,
    Sketch,
    extract_sketch,
    read_footer_layout,
    uncompressed_row_size,
)
from .synth import (
    BaselineKind,
    CalibrationResult,
    calibrate_and_write,
    generate_baseline,
    generate_dataset,
    generate_filter_column,
)

__all__ = [
    "BoundarySet",
    "BaselineKind",
    "CalibrationResult",
    "Domain",
    "FidelityReport",
    "MultiSeedReport",
    "NoisySketch",
    "PruneProfile",
    "QuerySpec",
    "ReleaseParams",
    "RowGroupMeta",
    "RunConfig",
    "Sketch",
    "banded_report",
    "bounded_laplace_sample",
    "calibrate_and_write",
    "extract_sketch",
    "fixed_point_scale",
    "generate_baseline",
    "generate_dataset",
    "generate_filter_column",
    "make_workload",
    "mape",
    "multi_seed_run",
    "prune_profile",
    "read_filter_values",
    "read_footer_layout",
    "release_sketch",
    "sensitivity_boundary",
    "to_boundaries",
    "uncompressed_row_size",
]
