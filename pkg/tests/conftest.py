import numpy as np
import pyarrow as pa
import pyarrow.parquet as pq
import pytest

from pqmirror.sketch import Domain
from pqmirror.synth import generate_dataset

DESK_DOMAIN = Domain(10957, 13510)  # 2000-01-01 .. 2036-12-27 as days, width 2553
DESK_ROWS = 500_000
DESK_RG = 10_000


def write_plain(path, arrays, row_group_size=None, **kwargs):
    """Reference writer for hand-built fixtures: plain encoding, stats on."""
    fields = []
    for name, arr in arrays.items():
        arr = pa.array(arr) if not isinstance(arr, pa.Array) else arr
        fields.append(pa.field(name, arr.type, nullable=False))
    table = pa.table(arrays, schema=pa.schema(fields))
    kwargs.setdefault("use_dictionary", False)
    kwargs.setdefault("compression", "zstd")
    pq.write_table(table, path, row_group_size=row_group_size, **kwargs)
    return path


@pytest.fixture(scope="session")
def desk_dir(tmp_path_factory):
    return tmp_path_factory.mktemp("desk")


@pytest.fixture(scope="session")
def desk_tpch(desk_dir):
    path = desk_dir / "tpch_like.parquet"
    info = generate_dataset(
        "tpch-like", DESK_ROWS, DESK_RG, DESK_DOMAIN, path, np.random.default_rng(0)
    )
    return info


@pytest.fixture(scope="session")
def desk_uniform(desk_dir):
    path = desk_dir / "uniform.parquet"
    info = generate_dataset(
        "uniform", DESK_ROWS, DESK_RG, DESK_DOMAIN, path, np.random.default_rng(0)
    )
    return info


@pytest.fixture(scope="session")
def small_original(tmp_path_factory):
    """30K-row stand-in used by unit tests that need a full pipeline cheaply."""
    path = tmp_path_factory.mktemp("small") / "small.parquet"
    info = generate_dataset(
        "tpch-like", 30_000, 3_000, DESK_DOMAIN, path, np.random.default_rng(3)
    )
    return info
