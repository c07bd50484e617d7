"""Command-line pipeline: detect features, analyze gradients, generate scenes.

Subcommands
-----------
detect
    Read a PGM image, run the windowed boundary/interior detector, and write
    a posterior PGM, float CSV, heatmap PNG, and run manifest.
analyze-gradient
    Build or load a noise matrix, check gradient monotonicity, evaluate the
    strict-inequality condition, and emit the gradient-to-probability lookup
    table with a profile PNG.
generate
    Paint a seeded rectangle scene; write noiseless, noisy, and truth PGMs.
deconvolve-histogram
    Estimate the pre-noise color distribution behind an image's histogram.

Exit codes: 0 success, 1 usage or configuration error, 2 I/O error,
3 numeric or model error.  Everything is controlled by long-form flags; no
environment variables.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from typing import Optional

import numpy as np

from .bayes import (
    PriorVector,
    posterior_map,
    probability_map_to_pgm_samples,
    save_probability_map_csv,
)
from .errors import ImpossibleObservationError, PgmFormatError, SingularNoiseMatrixError
from .figures import render_lookup_profile, render_probability_map
from .gradient import build_lookup_table, check_monotonicity, check_monotonicity_condition
from .image import GrayImage
from .manifest import write_manifest
from .noise import (
    GaussianAdditive,
    Mixture,
    NoiseMatrix,
    Replacement,
    build_noise_matrix,
    load_noise_matrix_csv,
)
from .oracle import SceneSpec, apply_noise, generate_scene
from .pgm import quantize_levels, read_pgm, write_pgm
from .priors import (
    deconvolve_histogram,
    observed_histogram,
    save_distribution_csv,
    uniform_distribution,
)
from .windows import DetectorConfig, scan_image

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_IO = 2
EXIT_NUMERIC = 3


def _add_noise_flags(sub: argparse.ArgumentParser, with_mixture: bool = False) -> None:
    sub.add_argument("--sigma", type=float, default=None, help="gaussian additive noise sigma")
    sub.add_argument("--noise-matrix", default=None, help="noise matrix CSV path")
    sub.add_argument(
        "--boundary-mode",
        choices=("renormalize", "wraparound"),
        default="renormalize",
        help="how additive kernels treat the gray-range ends",
    )
    if with_mixture:
        sub.add_argument(
            "--mixture-weight",
            type=float,
            default=None,
            help="weight of the gaussian part; remainder is replacement noise",
        )
        sub.add_argument(
            "--replacement-color",
            type=int,
            default=None,
            help="concentrate the replacement part on this color (default: uniform)",
        )


def _noise_from_args(args: argparse.Namespace, num_colors: int) -> NoiseMatrix:
    if args.noise_matrix is not None:
        m = load_noise_matrix_csv(args.noise_matrix)
        if m.num_colors != num_colors:
            raise ValueError(
                f"noise matrix is {m.num_colors} colors but --colors is {num_colors}"
            )
        return m
    if args.sigma is None:
        raise ValueError("provide either --sigma or --noise-matrix")
    additive = GaussianAdditive(sigma=args.sigma)
    weight = getattr(args, "mixture_weight", None)
    if weight is None:
        spec = additive
    else:
        color = getattr(args, "replacement_color", None)
        if color is None:
            dist = np.full(num_colors, 1.0 / num_colors)
        else:
            if not 0 <= color < num_colors:
                raise ValueError(f"--replacement-color {color} outside [0, {num_colors})")
            dist = np.zeros(num_colors)
            dist[color] = 1.0
        spec = Mixture(weight=weight, additive_part=additive, replacement_part=Replacement(dist=dist))
    return build_noise_matrix(spec, num_colors, args.boundary_mode)


def _read_image(path: str, num_colors: int) -> tuple[GrayImage, int]:
    samples, maxval = read_pgm(path)
    levels = quantize_levels(samples, maxval, num_colors)
    return GrayImage(pixels=levels, num_colors=num_colors), maxval


def _run_detect(args: argparse.Namespace) -> int:
    t0 = time.perf_counter()
    img, maxval = _read_image(args.input, args.colors)
    noise = _noise_from_args(args, args.colors)
    if args.prior == "uniform":
        prior_dist = uniform_distribution(args.colors)
    else:
        prior_dist = deconvolve_histogram(observed_histogram(img, args.colors), noise)
    cfg = DetectorConfig(
        noise=noise,
        color_prior=prior_dist,
        window_size=args.window_size,
        prune_eps=args.prune_eps,
        boundary_model=args.boundary_detector,
    )
    feature_scan = "boundary_vs_not" if args.feature == "boundary" else "interior_vs_exterior"
    t1 = time.perf_counter()
    lik_map = scan_image(img, cfg, feature_scan)
    p = args.p_feature_prior
    pmap = posterior_map(lik_map, PriorVector(probs=np.array([p, 1.0 - p])))
    t2 = time.perf_counter()

    os.makedirs(args.output_dir, exist_ok=True)
    pgm_path = os.path.join(args.output_dir, "posterior.pgm")
    csv_path = os.path.join(args.output_dir, "posterior.csv")
    png_path = os.path.join(args.output_dir, "posterior.png")
    write_pgm(pgm_path, probability_map_to_pgm_samples(pmap), 255)
    save_probability_map_csv(pmap, csv_path)
    render_probability_map(pmap, pmap.features.labels[0], png_path)
    t3 = time.perf_counter()
    write_manifest(
        os.path.join(args.output_dir, "manifest.json"),
        "detect",
        {
            "input": args.input,
            "input_maxval": maxval,
            "colors": args.colors,
            "sigma": args.sigma,
            "noise_matrix": args.noise_matrix,
            "boundary_mode": args.boundary_mode,
            "prior": args.prior,
            "feature": args.feature,
            "boundary_detector": args.boundary_detector,
            "p_feature_prior": args.p_feature_prior,
            "prune_eps": args.prune_eps,
            "window_size": args.window_size,
        },
        [pgm_path, csv_path, png_path],
        {"load": t1 - t0, "compute": t2 - t1, "write": t3 - t2},
    )
    print(f"wrote {pgm_path}, {csv_path}, {png_path}")
    return EXIT_OK


def _run_analyze_gradient(args: argparse.Namespace) -> int:
    t0 = time.perf_counter()
    noise = _noise_from_args(args, args.colors)
    report = check_monotonicity(noise, args.tolerance)
    violations = check_monotonicity_condition(noise, args.tolerance)
    table = build_lookup_table(noise, args.p_b)
    t1 = time.perf_counter()

    os.makedirs(args.output_dir, exist_ok=True)
    report_path = os.path.join(args.output_dir, "monotonicity.txt")
    condition_path = os.path.join(args.output_dir, "condition.csv")
    lookup_path = os.path.join(args.output_dir, "lookup.csv")
    png_path = os.path.join(args.output_dir, "lookup.png")

    checks_agree = report.passed == (len(violations) == 0)
    with open(report_path, "w", encoding="ascii") as fh:
        fh.write(report.to_text())
        fh.write(f"strict-inequality condition violations: {len(violations)}\n")
        fh.write(
            "definitional and condition checks "
            + ("agree" if checks_agree else "disagree (ties or boundary effects; see condition.csv)")
            + "\n"
        )
    with open(condition_path, "w", encoding="ascii") as fh:
        fh.write("o,o_prime,o_double_prime\n")
        for o, o_pri, o_dbl in violations:
            fh.write(f"{o},{o_pri},{o_dbl}\n")
    with open(lookup_path, "w", encoding="ascii") as fh:
        fh.write(table.to_csv_text())
    render_lookup_profile(table, png_path)
    t2 = time.perf_counter()
    write_manifest(
        os.path.join(args.output_dir, "manifest.json"),
        "analyze-gradient",
        {
            "colors": args.colors,
            "sigma": args.sigma,
            "noise_matrix": args.noise_matrix,
            "boundary_mode": args.boundary_mode,
            "mixture_weight": args.mixture_weight,
            "replacement_color": args.replacement_color,
            "p_b": args.p_b,
            "tolerance": args.tolerance,
        },
        [report_path, condition_path, lookup_path, png_path],
        {"compute": t1 - t0, "write": t2 - t1},
    )
    print(f"monotonicity {'passed' if report.passed else 'failed'}; wrote {report_path}")
    return EXIT_OK


def _run_generate(args: argparse.Namespace) -> int:
    t0 = time.perf_counter()
    spec = SceneSpec(
        width=args.width,
        height=args.height,
        num_rects=args.rects,
        color_range=args.colors,
        rng_seed=args.seed,
        noise=GaussianAdditive(sigma=args.sigma),
        min_rect_size=args.min_rect_size,
        max_rect_size=args.max_rect_size,
    )
    noiseless, truth = generate_scene(spec)
    noise = build_noise_matrix(spec.noise, args.colors, args.boundary_mode)
    # The noisy view gets its own stream so scene geometry and corruption
    # stay independently reproducible.
    noisy = apply_noise(noiseless, noise, args.seed + 1)
    t1 = time.perf_counter()

    os.makedirs(args.output_dir, exist_ok=True)
    noiseless_path = os.path.join(args.output_dir, "noiseless.pgm")
    noisy_path = os.path.join(args.output_dir, "noisy.pgm")
    truth_path = os.path.join(args.output_dir, "truth.pgm")
    write_pgm(noiseless_path, noiseless.pixels, args.colors - 1)
    write_pgm(noisy_path, noisy.pixels, args.colors - 1)
    write_pgm(truth_path, np.where(truth, 255, 0), 255)
    t2 = time.perf_counter()
    write_manifest(
        os.path.join(args.output_dir, "manifest.json"),
        "generate",
        {
            "width": args.width,
            "height": args.height,
            "rects": args.rects,
            "colors": args.colors,
            "sigma": args.sigma,
            "boundary_mode": args.boundary_mode,
            "seed": args.seed,
            "min_rect_size": args.min_rect_size,
            "max_rect_size": args.max_rect_size,
        },
        [noiseless_path, noisy_path, truth_path],
        {"compute": t1 - t0, "write": t2 - t1},
    )
    print(f"wrote {noiseless_path}, {noisy_path}, {truth_path}")
    return EXIT_OK


def _run_deconvolve(args: argparse.Namespace) -> int:
    t0 = time.perf_counter()
    img, _ = _read_image(args.input, args.colors)
    noise = _noise_from_args(args, args.colors)
    observed = observed_histogram(img, args.colors)
    estimated = deconvolve_histogram(observed, noise, args.condition_threshold)
    t1 = time.perf_counter()

    os.makedirs(args.output_dir, exist_ok=True)
    observed_path = os.path.join(args.output_dir, "observed.csv")
    estimated_path = os.path.join(args.output_dir, "deconvolved.csv")
    save_distribution_csv(observed, observed_path)
    save_distribution_csv(estimated, estimated_path)
    t2 = time.perf_counter()
    write_manifest(
        os.path.join(args.output_dir, "manifest.json"),
        "deconvolve-histogram",
        {
            "input": args.input,
            "colors": args.colors,
            "sigma": args.sigma,
            "noise_matrix": args.noise_matrix,
            "boundary_mode": args.boundary_mode,
            "condition_threshold": args.condition_threshold,
        },
        [observed_path, estimated_path],
        {"compute": t1 - t0, "write": t2 - t1},
    )
    print(f"wrote {observed_path}, {estimated_path}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="graybayes",
        description="Bayesian boundary/interior detection on gray-level images",
    )
    subs = parser.add_subparsers(dest="subcommand")

    detect = subs.add_parser("detect", help="run the windowed detector on a PGM image")
    detect.add_argument("--input", required=True, help="input PGM (P5 or P2)")
    detect.add_argument("--output-dir", required=True)
    detect.add_argument("--colors", type=int, required=True, help="gray-level count N")
    _add_noise_flags(detect)
    detect.add_argument("--prior", choices=("uniform", "histogram-deconvolved"), default="uniform")
    detect.add_argument("--feature", choices=("boundary", "interior"), default="boundary")
    detect.add_argument(
        "--boundary-detector",
        choices=("constant_approx", "exact_bimodal"),
        default="constant_approx",
    )
    detect.add_argument("--p-feature-prior", type=float, default=0.5)
    detect.add_argument("--prune-eps", type=float, default=0.0)
    detect.add_argument("--window-size", type=int, default=3)
    detect.set_defaults(func=_run_detect)

    analyze = subs.add_parser(
        "analyze-gradient", help="monotonicity, condition check, and lookup table"
    )
    analyze.add_argument("--colors", type=int, required=True)
    _add_noise_flags(analyze, with_mixture=True)
    analyze.add_argument("--p-b", type=float, default=0.5, help="boundary prior for the table")
    analyze.add_argument("--tolerance", type=float, default=1e-9)
    analyze.add_argument("--output-dir", required=True)
    analyze.set_defaults(func=_run_analyze_gradient)

    generate = subs.add_parser("generate", help="seeded rectangle scene with ground truth")
    generate.add_argument("--width", type=int, default=64)
    generate.add_argument("--height", type=int, default=64)
    generate.add_argument("--rects", type=int, required=True)
    generate.add_argument("--colors", type=int, required=True)
    generate.add_argument("--sigma", type=float, default=4.0)
    generate.add_argument(
        "--boundary-mode",
        choices=("renormalize", "wraparound"),
        default="renormalize",
    )
    generate.add_argument("--seed", type=int, required=True)
    generate.add_argument("--min-rect-size", type=int, default=8)
    generate.add_argument("--max-rect-size", type=int, default=None)
    generate.add_argument("--output-dir", required=True)
    generate.set_defaults(func=_run_generate)

    deconv = subs.add_parser(
        "deconvolve-histogram", help="estimate the pre-noise color distribution"
    )
    deconv.add_argument("--input", required=True, help="input PGM (P5 or P2)")
    deconv.add_argument("--colors", type=int, required=True)
    _add_noise_flags(deconv)
    deconv.add_argument("--condition-threshold", type=float, default=1e12)
    deconv.add_argument("--output-dir", required=True)
    deconv.set_defaults(func=_run_deconvolve)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    if not hasattr(args, "func"):
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except PgmFormatError as exc:
        print(f"graybayes: invalid image: {exc}", file=sys.stderr)
        return EXIT_IO
    except (SingularNoiseMatrixError, ImpossibleObservationError) as exc:
        print(f"graybayes: model error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except FileNotFoundError as exc:
        print(f"graybayes: missing file: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"graybayes: i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"graybayes: configuration error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
