import hashlib
import math

import numpy as np
import pyarrow as pa
import pytest
from scipy import stats

from pqmirror.dp import BoundarySet, NoisySketch, ReleaseParams, release_sketch
from pqmirror.errors import InvalidProfile
from pqmirror.sketch import Domain, extract_sketch
from pqmirror.synth import (
    BaselineKind,
    calibrate_and_write,
    generate_baseline,
    generate_dataset,
    generate_filter_column,
)

DOMAIN = Domain(10957, 13510)


def make_noisy(betas, sizes, row_counts, epsilon=math.inf, column_count=4):
    params = ReleaseParams(
        epsilon=epsilon, max_multiplicity=10, domain=Domain(betas[0], betas[-1]), rng_seed=42
    )
    return NoisySketch(
        betas=BoundarySet(tuple(betas)),
        sizes=tuple(float(s) for s in sizes),
        rows_per_group=row_counts[0],
        row_counts=tuple(row_counts),
        column_count=column_count,
        codec="ZSTD",
        filter_column="value",
        params=params,
        noise_scale_beta=0.0,
        noise_scale_size=0.0,
    )


class TestGenerateFilterColumn:
    def test_zero_width_interval(self):
        noisy = make_noisy([0, 7, 7, 100], [1000] * 3, [5, 5, 5])
        vals = generate_filter_column(noisy, np.random.default_rng(0))
        assert vals[1].tolist() == [7, 7, 7, 7, 7]

    def test_uniformity(self):
        # Jittering integer draws by U[0,1) makes them exactly U[lo, hi+1),
        # so a plain KS test applies.
        noisy = make_noisy([0, 10, 20], [1000] * 2, [10_000, 10_000])
        rng = np.random.default_rng(1)
        vals = generate_filter_column(noisy, rng)[0]
        assert vals.min() >= 0 and vals.max() <= 10
        jittered = vals + np.random.default_rng(2).random(len(vals))
        res = stats.kstest(jittered, stats.uniform(loc=0, scale=11).cdf)
        assert res.pvalue > 0.01

    def test_globally_non_decreasing(self):
        noisy = make_noisy([0, 10, 10, 35, 100], [1000] * 4, [100] * 4)
        vals = generate_filter_column(noisy, np.random.default_rng(3))
        flat = np.concatenate(vals)
        assert (np.diff(flat) >= 0).all()
        for i, v in enumerate(vals):
            lo, hi = noisy.betas.interval(i)
            assert v.min() >= lo and v.max() <= hi


class TestCalibrateAndWrite:
    def test_exact_release_hits_targets(self, small_original, tmp_path):
        sk = extract_sketch(small_original.path, "value")
        noisy = release_sketch(
            sk,
            ReleaseParams(
                epsilon=math.inf,
                max_multiplicity=small_original.max_multiplicity,
                domain=DOMAIN,
                rng_seed=42,
            ),
        )
        res = calibrate_and_write(noisy, tmp_path / "s.parquet", np.random.default_rng(0))
        assert res.shortfall_rgs == ()
        assert res.max_relative_error <= 0.02
        total_t, total_a = sum(res.target_sizes), sum(res.achieved_sizes)
        assert abs(total_a - total_t) / total_t <= 0.01

    def test_target_below_base_clips_to_zero(self, tmp_path):
        noisy = make_noisy([0, 50, 100], [10, 50_000], [1000, 1000])
        res = calibrate_and_write(noisy, tmp_path / "s.parquet", np.random.default_rng(0))
        assert res.shortfall_rgs == (0,)
        # The short RG still gets written at its base size, plus the framing
        # of the (empty) padding column chunks.
        assert res.base_sizes[0] <= res.achieved_sizes[0] <= res.base_sizes[0] + 1000
        assert res.achieved_sizes[1] == pytest.approx(50_000, rel=0.02)

    def test_random_bytes_nearly_incompressible(self):
        # Codec-ratio oracle: ZSTD on high-entropy bytes stays within 2% of raw.
        raw = np.random.default_rng(0).bytes(200_000)
        compressed = pa.Codec("zstd").compress(raw)
        assert len(compressed) <= 1.02 * len(raw)
        assert len(compressed) >= 0.98 * len(raw)

    def test_deterministic_output(self, tmp_path):
        noisy = make_noisy([0, 40, 70, 100], [40_000, 60_000, 30_000], [1000] * 3)
        digests = []
        for name in ("a.parquet", "b.parquet"):
            calibrate_and_write(noisy, tmp_path / name, np.random.default_rng([7, 1]))
            digests.append(hashlib.sha256((tmp_path / name).read_bytes()).hexdigest())
        assert digests[0] == digests[1]

    def test_round_trip_layout(self, tmp_path):
        noisy = make_noisy([0, 40, 70, 100], [40_000, 60_000, 30_000], [1000] * 3)
        rng = np.random.default_rng(9)
        intended = generate_filter_column(noisy, np.random.default_rng(9))
        calibrate_and_write(noisy, tmp_path / "s.parquet", rng)
        sk = extract_sketch(tmp_path / "s.parquet", "value")
        assert sk.num_row_groups == 3
        assert sk.row_counts == (1000, 1000, 1000)
        for rg, vals in zip(sk.row_groups, intended):
            assert rg.min_val == vals.min()
            assert rg.max_val == vals.max()


@pytest.fixture(scope="module")
def noisy(small_original):
    sk = extract_sketch(small_original.path, "value")
    return release_sketch(
        sk,
        ReleaseParams(
            epsilon=math.inf,
            max_multiplicity=small_original.max_multiplicity,
            domain=DOMAIN,
            rng_seed=42,
        ),
    )


class TestBaselines:

    def test_random_is_unsorted_full_range(self, noisy, tmp_path):
        res = generate_baseline(
            BaselineKind.RANDOM, noisy, tmp_path / "r.parquet", np.random.default_rng(0)
        )
        from pqmirror.sketch import read_footer_layout

        layout = read_footer_layout(res.path, "value")
        assert len(layout) == noisy.num_row_groups
        # Unsorted: every RG spans nearly the whole domain.
        assert all(rg.min_val < DOMAIN.lower + 30 for rg in layout)
        assert all(rg.max_val > DOMAIN.upper - 30 for rg in layout)

    def test_sorted_global_is_sorted(self, noisy, tmp_path):
        from pqmirror.evalsim import read_filter_values

        res = generate_baseline(
            BaselineKind.SORTED_GLOBAL, noisy, tmp_path / "g.parquet", np.random.default_rng(0)
        )
        vals = read_filter_values(res.path, "value")
        assert (np.diff(vals) >= 0).all()

    def test_marginal_matches_histogram(self, noisy, small_original, tmp_path):
        from pqmirror.evalsim import read_filter_values

        orig = read_filter_values(small_original.path, "value")
        res = generate_baseline(
            BaselineKind.MARGINAL,
            noisy,
            tmp_path / "m.parquet",
            np.random.default_rng(0),
            original_values=orig,
        )
        vals = read_filter_values(res.path, "value")
        assert len(vals) == len(orig)
        # Same coarse shape: total variation over 16 bins is small.
        h1, edges = np.histogram(orig, bins=16, density=True)
        h2, _ = np.histogram(vals, bins=edges, density=True)
        tv = 0.5 * np.abs(h1 - h2).sum() * (edges[1] - edges[0])
        assert tv < 0.05

    def test_marginal_requires_values(self, noisy, tmp_path):
        with pytest.raises(ValueError):
            generate_baseline(
                BaselineKind.MARGINAL, noisy, tmp_path / "m.parquet", np.random.default_rng(0)
            )

    def test_minmax_uniform_padding(self, noisy, tmp_path):
        res = generate_baseline(
            BaselineKind.MINMAX, noisy, tmp_path / "mm.parquet", np.random.default_rng(0)
        )
        totals = set(res.target_sizes)
        assert len(totals) == 1  # even split of the true total
        assert sum(res.target_sizes) == pytest.approx(sum(noisy.sizes), abs=noisy.num_row_groups)


class TestGenerateDataset:
    def test_uniform_shape(self, tmp_path):
        info = generate_dataset(
            "uniform", 100_000, 10_000, DOMAIN, tmp_path / "u.parquet", np.random.default_rng(0)
        )
        sk = extract_sketch(info.path, "value")
        assert sk.num_row_groups == 10
        spacings = np.diff([DOMAIN.lower] + [rg.max_val for rg in sk.row_groups])
        assert np.std(spacings) / np.mean(spacings) < 0.1

    def test_tpch_like_boundary_spacing_cv(self, desk_tpch):
        sk = extract_sketch(desk_tpch.path, "value")
        spacings = np.diff([DOMAIN.lower] + [rg.max_val for rg in sk.row_groups])
        cv = np.std(spacings) / np.mean(spacings)
        assert 0.2 <= cv <= 0.3

    def test_multiplicity_matches_brute_force(self, tmp_path):
        from pqmirror.evalsim import read_filter_values

        info = generate_dataset(
            "tpch-like", 50_000, 5_000, DOMAIN, tmp_path / "t.parquet", np.random.default_rng(5)
        )
        vals = read_filter_values(info.path, "value")
        _, counts = np.unique(vals, return_counts=True)
        assert info.max_multiplicity == counts.max()

    def test_invalid_profile(self, tmp_path):
        with pytest.raises(InvalidProfile):
            generate_dataset(
                "zipf", 1000, 100, DOMAIN, tmp_path / "z.parquet", np.random.default_rng(0)
            )
