"""Command-line front end: evolve, extract, sweep, benchmark.

All subcommands are deterministic for fixed flags and seed, and output
files are written atomically (temp file then rename) so an artifact
exists exactly when the exit code is 0.
"""

from __future__ import annotations

import argparse
import os
import sys
import tempfile
from dataclasses import replace

import numpy as np

from . import crawler, descriptors, ml
from .errors import CrawltexError, ParameterError
from .imgio import LabeledDataset, load_dataset, read_image

ACRAWLER_METHODS = ("acrawler-max", "acrawler-min", "acrawler-both")
METHODS = ACRAWLER_METHODS + ("glcm", "gabor", "fourier")
SWEEP_AXES = ("t_max", "n_agents")
SWEEP_VARIANTS = ("max", "min", "both")


def write_atomic(path, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp_path = tempfile.mkstemp(dir=directory, prefix=".crawltex-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp_path, path)
    except BaseException:
        if os.path.exists(tmp_path):
            os.unlink(tmp_path)
        raise


def crawler_digest(config: crawler.CrawlerConfig, normalize: bool) -> str:
    return (
        f"n={config.n_agents}|tmax={config.t_max}|eps={config.initial_energy:g}"
        f"|emin={config.e_min:g}|emax={config.e_max:g}|eunity={config.e_unity:g}"
        f"|absorption={config.absorption:g}|placement={config.placement}"
        f"|seed={config.seed}|normalized={int(normalize)}"
    )


def acrawler_vector(image, config, normalize, curve_cache=None, cache_key=None):
    """Signature as a FeatureVector, optionally reusing cached curves."""
    directions = crawler.DIRECTIONS if config.kernel == "both" else (config.kernel,)
    counts = []
    for direction in directions:
        if curve_cache is None:
            counts.append(crawler.evolve(image, config, direction)[0].counts)
            continue
        key = (cache_key, direction, config.n_agents, config.t_max,
               config.initial_energy, config.e_min, config.e_max, config.e_unity,
               config.absorption, config.placement, config.seed)
        if key not in curve_cache:
            curve_cache[key] = crawler.evolve(image, config, direction)[0].counts
        counts.append(curve_cache[key])
    values = np.concatenate(counts).astype(np.float64)
    if normalize:
        values /= float(counts[0][0])
    return descriptors.FeatureVector(
        values, f"acrawler-{config.kernel}", crawler_digest(config, normalize)
    )


def extract_features(
    dataset: LabeledDataset,
    method: str,
    config: crawler.CrawlerConfig,
    *,
    normalize: bool = True,
    glcm_distances=(1, 2),
    glcm_levels: int = 64,
    gabor_scales: int = 4,
    gabor_orientations: int = 6,
    fourier_rings: int = 32,
    curve_cache=None,
):
    """Per-sample feature vectors for one method; returns (labels, vectors)."""
    if method not in METHODS:
        raise ParameterError(f"unknown method {method!r}; choose from {METHODS}")
    labels = []
    vectors = []
    for i, (source, label) in enumerate(dataset.samples):
        image = dataset.image(i)
        try:
            if method in ACRAWLER_METHODS:
                cfg = replace(config, kernel=method.split("-", 1)[1])
                vec = acrawler_vector(image, cfg, normalize, curve_cache, cache_key=i)
            elif method == "glcm":
                vec = descriptors.glcm_features(image, glcm_distances, glcm_levels)
            elif method == "gabor":
                vec = descriptors.gabor_features(image, gabor_scales, gabor_orientations)
            else:
                vec = descriptors.fourier_features(image, fourier_rings)
        except CrawltexError as exc:
            raise type(exc)(f"{source}: {exc}") from exc
        labels.append(label)
        vectors.append(vec)
    return labels, vectors


def run_sweep(
    dataset: LabeledDataset,
    axis: str,
    values,
    config: crawler.CrawlerConfig,
    *,
    folds: int = 10,
    seed: int = 0,
    shrinkage: float = ml.DEFAULT_SHRINKAGE,
    normalize: bool = True,
):
    """Cross-validated accuracy per (axis value, kernel variant).

    Rows are dicts with axis, value, variant, mean_accuracy, std_accuracy,
    and status ("ok" or the failure message). Curves are cached per
    (sample, direction, full parameter set) within the sweep, so the
    ``both`` variant reuses the single-kernel runs of the same value.
    """
    if axis not in SWEEP_AXES:
        raise ParameterError(f"sweep axis must be one of {SWEEP_AXES}, got {axis!r}")
    if not values:
        raise ParameterError("sweep needs at least one axis value")
    rows = []
    curve_cache = {}
    for value in values:
        try:
            swept = replace(config, **{axis: value})
        except ParameterError as exc:
            for variant in SWEEP_VARIANTS:
                rows.append(
                    dict(axis=axis, value=value, variant=variant,
                         mean_accuracy=None, std_accuracy=None, status=f"invalid: {exc}")
                )
            continue
        for variant in SWEEP_VARIANTS:
            try:
                labels, vectors = extract_features(
                    dataset, f"acrawler-{variant}", swept,
                    normalize=normalize, curve_cache=curve_cache,
                )
                report = ml.cross_validate(
                    vectors, labels, folds=folds, seed=seed, shrinkage=shrinkage
                )
                rows.append(
                    dict(axis=axis, value=value, variant=variant,
                         mean_accuracy=report.mean_accuracy,
                         std_accuracy=report.std_accuracy, status="ok")
                )
            except CrawltexError as exc:
                rows.append(
                    dict(axis=axis, value=value, variant=variant,
                         mean_accuracy=None, std_accuracy=None, status=f"error: {exc}")
                )
    return rows


def sweep_csv(rows) -> str:
    lines = ["axis,value,variant,mean_accuracy,std_accuracy,status"]
    for r in rows:
        mean = "" if r["mean_accuracy"] is None else str(float(r["mean_accuracy"]))
        std = "" if r["std_accuracy"] is None else str(float(r["std_accuracy"]))
        status = r["status"].replace(",", ";")
        lines.append(f"{r['axis']},{r['value']},{r['variant']},{mean},{std},{status}")
    return "\n".join(lines) + "\n"


def run_benchmark(
    dataset: LabeledDataset,
    methods,
    config: crawler.CrawlerConfig,
    *,
    folds: int = 10,
    seed: int = 0,
    shrinkage: float = ml.DEFAULT_SHRINKAGE,
    normalize: bool = True,
    **descriptor_params,
):
    """Cross-validated comparison rows, sorted by mean accuracy (best first).

    Each row is (method, correct, total, mean, std, status); failures keep
    their message in status and sort last.
    """
    if not methods:
        raise ParameterError("benchmark needs at least one method")
    rows = []
    curve_cache = {}
    for method in methods:
        try:
            labels, vectors = extract_features(
                dataset, method, config,
                normalize=normalize, curve_cache=curve_cache, **descriptor_params,
            )
            report = ml.cross_validate(
                vectors, labels, folds=folds, seed=seed, shrinkage=shrinkage
            )
            rows.append(
                (method, report.correct, report.total,
                 report.mean_accuracy, report.std_accuracy, "ok")
            )
        except CrawltexError as exc:
            rows.append((method, None, None, None, None, f"error: {exc}"))
    rows.sort(key=lambda r: (r[3] is None, -(r[3] or 0.0), r[0]))
    return rows


def benchmark_csv(rows) -> str:
    lines = ["method,correct,total,mean_accuracy,std_accuracy,status"]
    for method, correct, total, mean, std, status in rows:
        cells = [
            method,
            "" if correct is None else str(correct),
            "" if total is None else str(total),
            "" if mean is None else str(float(mean)),
            "" if std is None else str(float(std)),
            status.replace(",", ";"),
        ]
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def _add_crawler_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("crawler parameters")
    group.add_argument("--initial-energy", type=float, default=10.0)
    group.add_argument("--e-min", type=float, default=1.0)
    group.add_argument("--e-max", type=float, default=12.0)
    group.add_argument("--e-unity", type=float, default=1.0)
    group.add_argument("--absorption", type=float, default=0.01,
                       help="energy gained per intensity unit of the occupied pixel")
    group.add_argument("--agents", type=int, default=1000, dest="agents")
    group.add_argument("--t-max", type=int, default=41)
    group.add_argument("--placement", choices=crawler.PLACEMENTS,
                       default="random_without_replacement")


def _add_descriptor_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("descriptor parameters")
    group.add_argument("--glcm-distances", default="1,2",
                       help="comma-separated pixel distances")
    group.add_argument("--glcm-levels", type=int, default=64)
    group.add_argument("--gabor-scales", type=int, default=4)
    group.add_argument("--gabor-orientations", type=int, default=6)
    group.add_argument("--fourier-rings", type=int, default=32)


def _config_from_args(args, kernel: str = "both") -> crawler.CrawlerConfig:
    return crawler.CrawlerConfig(
        initial_energy=args.initial_energy,
        e_min=args.e_min,
        e_max=args.e_max,
        e_unity=args.e_unity,
        absorption=args.absorption,
        n_agents=args.agents,
        t_max=args.t_max,
        kernel=kernel,
        placement=args.placement,
        seed=args.seed,
    )


def _descriptor_params(args) -> dict:
    try:
        distances = tuple(int(d) for d in args.glcm_distances.split(",") if d.strip())
    except ValueError as exc:
        raise ParameterError(f"bad --glcm-distances {args.glcm_distances!r}") from exc
    return dict(
        glcm_distances=distances,
        glcm_levels=args.glcm_levels,
        gabor_scales=args.gabor_scales,
        gabor_orientations=args.gabor_orientations,
        fourier_rings=args.fourier_rings,
    )


def _warn_dataset(dataset: LabeledDataset) -> None:
    for message in dataset.warnings:
        print(f"warning: {message}", file=sys.stderr)


def _check_cv_flags(args) -> None:
    if args.folds < 2:
        raise ParameterError(f"--folds must be >= 2, got {args.folds}")
    if not 0 <= args.shrinkage <= 1:
        raise ParameterError(f"--shrinkage must be in [0, 1], got {args.shrinkage}")


def cmd_evolve(args) -> int:
    config = _config_from_args(args, kernel=args.kernel)
    image = read_image(args.image)
    directions = crawler.DIRECTIONS if args.kernel == "both" else (args.kernel,)
    curves = {d: crawler.evolve(image, config, d)[0].counts for d in directions}
    write_atomic(args.out, crawler.curves_to_csv(curves))
    return 0


def cmd_extract(args) -> int:
    config = _config_from_args(args)
    params = _descriptor_params(args)
    dataset = load_dataset(args.data)
    _warn_dataset(dataset)
    labels, vectors = extract_features(
        dataset, args.method, config, normalize=args.normalize, **params,
    )
    write_atomic(args.out, descriptors.features_to_csv(labels, vectors))
    return 0


def cmd_sweep(args) -> int:
    config = _config_from_args(args)
    _check_cv_flags(args)
    try:
        values = [int(v) for v in args.values.split(",") if v.strip()]
    except ValueError as exc:
        raise ParameterError(f"bad --values {args.values!r}") from exc
    dataset = load_dataset(args.data)
    _warn_dataset(dataset)
    rows = run_sweep(
        dataset, args.axis, values, config,
        folds=args.folds, seed=args.seed,
        shrinkage=args.shrinkage, normalize=args.normalize,
    )
    write_atomic(args.out, sweep_csv(rows))
    return 0


def cmd_benchmark(args) -> int:
    config = _config_from_args(args)
    _check_cv_flags(args)
    params = _descriptor_params(args)
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    dataset = load_dataset(args.data)
    _warn_dataset(dataset)
    rows = run_benchmark(
        dataset, methods, config,
        folds=args.folds, seed=args.seed,
        shrinkage=args.shrinkage, normalize=args.normalize,
        **params,
    )
    table_rows = [
        (method, correct, total, mean, std if mean is not None else status)
        for method, correct, total, mean, std, status in rows
    ]
    print(ml.benchmark_table(table_rows), end="")
    if args.out:
        write_atomic(args.out, benchmark_csv(rows))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="crawltex",
        description="Swarm-crawler texture signatures, baselines, and benchmarks",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_evolve = sub.add_parser("evolve", help="dump live-agent curves for one image")
    p_evolve.add_argument("image", help="PGM or grayscale PNG file")
    p_evolve.add_argument("--kernel", choices=crawler.KERNELS, default="both")
    p_evolve.add_argument("--seed", type=int, default=0)
    p_evolve.add_argument("--out", required=True)
    _add_crawler_flags(p_evolve)
    p_evolve.set_defaults(func=cmd_evolve)

    p_extract = sub.add_parser("extract", help="write per-sample feature vectors")
    p_extract.add_argument("data", help="dataset root (one subdirectory per class)")
    p_extract.add_argument("--method", choices=METHODS, default="acrawler-both")
    p_extract.add_argument("--seed", type=int, default=0)
    p_extract.add_argument("--out", required=True)
    p_extract.add_argument("--normalize", dest="normalize", action="store_true", default=True)
    p_extract.add_argument("--raw-counts", dest="normalize", action="store_false",
                           help="keep raw live-agent counts instead of fractions")
    _add_crawler_flags(p_extract)
    _add_descriptor_flags(p_extract)
    p_extract.set_defaults(func=cmd_extract)

    p_sweep = sub.add_parser("sweep", help="accuracy vs one crawler parameter")
    p_sweep.add_argument("data")
    p_sweep.add_argument("--axis", choices=SWEEP_AXES, required=True)
    p_sweep.add_argument("--values", required=True, help="comma-separated integers")
    p_sweep.add_argument("--folds", type=int, default=10)
    p_sweep.add_argument("--seed", type=int, default=0)
    p_sweep.add_argument("--shrinkage", type=float, default=ml.DEFAULT_SHRINKAGE)
    p_sweep.add_argument("--out", required=True)
    p_sweep.add_argument("--normalize", dest="normalize", action="store_true", default=True)
    p_sweep.add_argument("--raw-counts", dest="normalize", action="store_false")
    _add_crawler_flags(p_sweep)
    p_sweep.set_defaults(func=cmd_sweep)

    p_bench = sub.add_parser("benchmark", help="compare methods on one dataset")
    p_bench.add_argument("data")
    p_bench.add_argument("--methods", default="acrawler-both,glcm,gabor,fourier",
                         help="comma-separated subset of " + ",".join(METHODS))
    p_bench.add_argument("--folds", type=int, default=10)
    p_bench.add_argument("--seed", type=int, default=0)
    p_bench.add_argument("--shrinkage", type=float, default=ml.DEFAULT_SHRINKAGE)
    p_bench.add_argument("--out", default=None, help="also write the report as CSV")
    p_bench.add_argument("--normalize", dest="normalize", action="store_true", default=True)
    p_bench.add_argument("--raw-counts", dest="normalize", action="store_false")
    _add_crawler_flags(p_bench)
    _add_descriptor_flags(p_bench)
    p_bench.set_defaults(func=cmd_benchmark)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CrawltexError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
