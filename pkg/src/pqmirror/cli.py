"""Batch command-line surface: gen, sketch, release, synth, eval, sweep.

Stages communicate only through files (Parquet, sketch JSON, report CSV),
so each stage is independently runnable and the trust boundary falls
between `release` and `synth`.

Exit codes: 0 success, 1 usage error, 2 data/validation error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import dp, evalsim, sketch as sketch_mod, synth as synth_mod
from .errors import InvalidConfig, PqMirrorError
from .sketch import Domain

OUTPUT_ROOT_ENV = "PQMIRROR_OUT"


class _UsageExit(SystemExit):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise _UsageExit(1)


def _out_root() -> Path:
    return Path(os.environ.get(OUTPUT_ROOT_ENV, "."))


def _resolve_out(path_arg, default_name: str) -> Path:
    if path_arg:
        return Path(path_arg)
    root = _out_root()
    root.mkdir(parents=True, exist_ok=True)
    return root / default_name


def _parse_epsilon(text: str) -> float:
    if text.lower() in ("inf", "infinity"):
        return math.inf
    return float(text)


def cmd_gen(args) -> int:
    out = _resolve_out(args.output, f"{args.profile}.parquet")
    rng = np.random.default_rng(args.seed)
    info = synth_mod.generate_dataset(
        profile=args.profile,
        n_rows=args.rows,
        rows_per_group=args.rg,
        domain=Domain.parse(args.domain),
        out_path=out,
        rng=rng,
        skew=args.skew,
        column_count=args.columns,
    )
    print(f"wrote {info.path} ({info.n_rows} rows, max multiplicity {info.max_multiplicity})")
    return 0


def cmd_sketch(args) -> int:
    sk = sketch_mod.extract_sketch(args.input, args.filter_col)
    out = _resolve_out(args.output, Path(args.input).stem + ".sketch.json")
    out.write_text(sk.to_json())
    print(f"wrote {out} ({sk.num_row_groups} row groups, {sk.total_rows} rows)")
    return 0


def cmd_release(args) -> int:
    sk = sketch_mod.Sketch.from_json(Path(args.input).read_text())
    m = args.m if args.m is not None else sk.rows_per_group
    params = dp.ReleaseParams(
        epsilon=_parse_epsilon(args.epsilon),
        max_multiplicity=m,
        domain=Domain.parse(args.domain),
        rng_seed=args.seed,
    )
    noisy = dp.release_sketch(sk, params)
    out = _resolve_out(args.output, Path(args.input).stem + ".noisy.json")
    out.write_text(noisy.to_json())
    print(f"wrote {out} (epsilon={args.epsilon}, m={m}, b*={noisy.noise_scale_beta:g})")
    return 0


def cmd_synth(args) -> int:
    noisy = dp.NoisySketch.from_json(Path(args.input).read_text())
    kind = synth_mod.BaselineKind(args.baseline)
    orig_values = None
    if kind is synth_mod.BaselineKind.MARGINAL:
        if not args.original:
            raise InvalidConfig("the marginal baseline needs --original")
        orig_values = evalsim.read_filter_values(args.original, noisy.filter_column)
    out = _resolve_out(args.output, f"synthetic_{kind.value}.parquet")
    rng = np.random.default_rng([args.seed, 0x53594E])
    result = synth_mod.generate_baseline(kind, noisy, out, rng, original_values=orig_values)
    msg = f"wrote {result.path} ({result.n_writes} writes"
    if result.shortfall_rgs:
        msg += f", {len(result.shortfall_rgs)} RGs below base size"
    print(msg + ")")
    return 0


def cmd_eval(args) -> int:
    orig_values = evalsim.read_filter_values(args.original, args.filter_col)
    workload = evalsim.make_workload(orig_values)
    orig_layout = sketch_mod.read_footer_layout(args.original, args.filter_col)
    synth_layout = sketch_mod.read_footer_layout(args.synthetic, args.filter_col)
    orig_profiles = [evalsim.prune_profile(orig_layout, q) for q in workload]
    synth_profiles = [evalsim.prune_profile(synth_layout, q) for q in workload]
    report = evalsim.banded_report(orig_profiles, synth_profiles, workload)
    multi = evalsim.MultiSeedReport(per_seed={args.seed: report})
    prefix = _resolve_out(args.output, "report")
    Path(str(prefix) + ".csv").write_text(multi.to_csv())
    Path(str(prefix) + ".json").write_text(multi.to_summary_json())
    bands = report.band_mape_rg()
    print(
        f"MAPE-RG {report.mape_rg:.2f}% MAPE-Bytes {report.mape_bytes:.2f}% "
        f"(low {bands['low']:.2f}% mid {bands['mid']:.2f}% high {bands['high']:.2f}%)"
    )
    return 0


def _resolve_m(spec, sk, domain: Domain) -> int:
    if spec == "n":
        return sk.rows_per_group
    if spec == "width":
        return domain.width
    return int(spec)


def cmd_sweep(args) -> int:
    config = json.loads(Path(args.config).read_text())
    out_dir = Path(config.get("out_dir") or _out_root() / "sweep")
    out_dir.mkdir(parents=True, exist_ok=True)

    filter_col = config.get("filter_column", "value")
    domain = Domain(*config["domain"])
    seeds = tuple(config.get("seeds", evalsim.DEFAULT_SEEDS))
    selectivities = tuple(config.get("selectivities", evalsim.DEFAULT_SELECTIVITIES))
    baselines = [synth_mod.BaselineKind(b) for b in config.get("baselines", ["full"])]
    epsilons = [_parse_epsilon(str(e)) for e in config.get("epsilons", ["inf"])]

    original = config["original"]
    if isinstance(original, dict):
        orig_path = out_dir / "original.parquet"
        synth_mod.generate_dataset(
            profile=original["profile"],
            n_rows=original["rows"],
            rows_per_group=original["rows_per_group"],
            domain=domain,
            out_path=orig_path,
            rng=np.random.default_rng(original.get("seed", 0)),
            skew=original.get("skew", 0.34),
            column_count=original.get("columns", 4),
        )
        original = str(orig_path)

    sk = sketch_mod.extract_sketch(original, filter_col)
    ms = [_resolve_m(m, sk, domain) for m in config.get("ms", ["n"])]

    effective = dict(config)
    effective.update(
        {
            "original": original,
            "filter_column": filter_col,
            "domain": [domain.lower, domain.upper],
            "seeds": list(seeds),
            "selectivities": list(selectivities),
            "baselines": [b.value for b in baselines],
            "epsilons": ["inf" if math.isinf(e) else e for e in epsilons],
            "ms": ms,
            "out_dir": str(out_dir),
        }
    )
    (out_dir / "config.effective.json").write_text(json.dumps(effective, indent=2))

    cells = []
    for baseline in baselines:
        if baseline is synth_mod.BaselineKind.FULL:
            cells.extend((baseline, e, m) for e in epsilons for m in ms)
        else:
            # Layout-agnostic baselines and minmax are no-privacy comparisons.
            cells.append((baseline, math.inf, ms[0]))

    reports_dir = out_dir / "reports"
    reports_dir.mkdir(exist_ok=True)
    summary = {}
    for baseline, eps, m in cells:
        eps_tag = "inf" if math.isinf(eps) else f"{eps:g}"
        cell_name = f"{baseline.value}_eps{eps_tag}_m{m}"
        workdir = out_dir / "cells" / cell_name
        workdir.mkdir(parents=True, exist_ok=True)
        rc = evalsim.RunConfig(
            original_path=original,
            filter_column=filter_col,
            domain=domain,
            epsilon=eps,
            m=m,
            baseline=baseline,
            workdir=str(workdir),
            selectivities=selectivities,
        )
        report = evalsim.multi_seed_run(rc, seeds)
        (reports_dir / f"{cell_name}.csv").write_text(report.to_csv())
        (reports_dir / f"{cell_name}.json").write_text(report.to_summary_json())
        mean_rg, std_rg = report.overall_mape_rg()
        mean_by, _ = report.overall_mape_bytes()
        summary[cell_name] = {
            "mape_rg_mean": mean_rg,
            "mape_rg_std": std_rg,
            "mape_bytes_mean": mean_by,
        }
        print(f"{cell_name}: MAPE-RG {mean_rg:.2f}% +/- {std_rg:.2f}, MAPE-Bytes {mean_by:.2f}%")
    (out_dir / "summary.json").write_text(json.dumps(summary, indent=2))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pqmirror", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a desk-scale original dataset")
    p.add_argument("--profile", choices=["uniform", "ssb-like", "tpch-like"], required=True)
    p.add_argument("--rows", type=int, required=True)
    p.add_argument("--rg", type=int, required=True, help="rows per row group")
    p.add_argument("--domain", default="10957:13510", help="LO:HI (days since epoch)")
    p.add_argument("--skew", type=float, default=0.34)
    p.add_argument("--columns", type=int, default=4)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("sketch", help="extract the footer sketch to JSON")
    p.add_argument("--input", required=True)
    p.add_argument("--filter-col", default="value")
    p.add_argument("--output")
    p.set_defaults(func=cmd_sketch)

    p = sub.add_parser("release", help="release a sketch under epsilon-DP")
    p.add_argument("--input", required=True, help="sketch JSON")
    p.add_argument("--epsilon", required=True, help='number or "inf"')
    p.add_argument("--m", type=int, help="max multiplicity (default: rows per RG)")
    p.add_argument("--domain", required=True, help="LO:HI")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--output")
    p.set_defaults(func=cmd_release)

    p = sub.add_parser("synth", help="write a synthetic file from a noisy sketch")
    p.add_argument("--input", required=True, help="noisy sketch JSON")
    p.add_argument("--baseline", default="full", choices=[k.value for k in synth_mod.BaselineKind])
    p.add_argument("--original", help="original Parquet (marginal baseline only)")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--output")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("eval", help="compare pruning profiles of two files")
    p.add_argument("--original", required=True)
    p.add_argument("--synthetic", required=True)
    p.add_argument("--filter-col", default="value")
    p.add_argument("--seed", type=int, default=0, help="seed label for the CSV rows")
    p.add_argument("--output", help="report path prefix")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("sweep", help="run a full epsilon x m x seed x baseline grid")
    p.add_argument("--config", required=True, help="JSON experiment config")
    p.set_defaults(func=cmd_sweep)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageExit:
        return 1
    try:
        return args.func(args)
    except PqMirrorError as exc:
        print(f"pqmirror: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"pqmirror: missing file: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
