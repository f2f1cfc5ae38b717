"""Command-line front end: ``genstereo match|eval|baseline|fitness``.

Exit codes: 0 success, 1 usage error, 2 I/O or parse error,
3 dimension or configuration error.
"""

from __future__ import annotations

import argparse
import logging
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .evaluation import GroundTruth, bad_pixel_rate, sad_block_match
from .evolution import GaConfig, evolve
from .fitness import FitnessContext, fitness
from .fuzzy import ConfigError, MembershipParams
from .imaging import DimensionError, GrayImage, PgmError, StereoPair, read_pgm, write_pgm

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_CONFIG = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass(frozen=True)
class RunManifest:
    config: GaConfig
    ref: Path
    tgt: Path
    out: Path
    log: Path | None = None
    gt: Path | None = None
    scale: int = 4
    log_timing: bool = False


def _add_pair(p):
    p.add_argument("--ref", required=True, type=Path, help="reference (right) image, PGM")
    p.add_argument("--tgt", required=True, type=Path, help="target (left) image, PGM")


def _add_fitness_flags(p):
    p.add_argument("--dmax", type=int, required=True, help="maximum disparity (inclusive)")
    p.add_argument("--radius", type=int, default=1, help="fitness neighbourhood radius (default 1)")
    p.add_argument("--sigma", type=float, default=42.5, help="grey-class sigma (default 42.5)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="genstereo", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-v", "--verbose", action="store_true", help="progress messages on stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    m = sub.add_parser("match", parents=[common], help="evolve a disparity map")
    m.add_argument("--config", type=Path, help="key=value file of flag defaults; flags override it")
    _add_pair(m)
    _add_fitness_flags(m)
    m.add_argument("--gt", type=Path, help="optional ground truth; prints the bad-pixel rate")
    m.add_argument("--gt-scale", type=float, default=1.0)
    m.add_argument("--unknown", type=int, default=None, help="ground-truth value marking unknown pixels")
    m.add_argument("--threshold", type=float, default=1.0)
    m.add_argument("--pop", type=int, default=70, help="population size (default 70)")
    m.add_argument("--gens", type=int, default=100, help="maximum generations (default 100)")
    m.add_argument("--offspring", type=int, default=None, help="children per generation (default: --pop)")
    m.add_argument("--mutation-rate", type=float, default=0.40)
    m.add_argument("--elite-frac", type=float, default=0.40)
    m.add_argument("--patch-radius", type=int, default=1, help="mutation patch radius (default 1)")
    m.add_argument("--seed", type=int, default=0)
    m.add_argument("--stagnation-window", type=int, default=15)
    m.add_argument("--stagnation-eps", type=float, default=1e-4)
    m.add_argument("--workers", type=int, default=1, help="threads for child evaluation")
    m.add_argument("--out", type=Path, required=True, help="output disparity PGM")
    m.add_argument("--log", type=Path, help="convergence log CSV")
    m.add_argument("--log-timing", action="store_true", help="record wall time in the log's millis column")
    m.add_argument("--scale", type=int, default=4, help="stored value = disparity * scale (default 4)")
    m.set_defaults(func=cmd_match)

    e = sub.add_parser("eval", parents=[common], help="bad-pixel rate of a disparity map")
    e.add_argument("--est", required=True, type=Path)
    e.add_argument("--gt", required=True, type=Path)
    e.add_argument("--scale", type=float, default=1.0, help="ground-truth scale")
    e.add_argument("--est-scale", type=float, default=None, help="estimate scale (default: --scale)")
    e.add_argument("--unknown", type=int, default=None)
    e.add_argument("--threshold", type=float, default=1.0, help="bad if |error| > threshold (default 1)")
    e.set_defaults(func=cmd_eval)

    b = sub.add_parser("baseline", parents=[common], help="SAD winner-take-all block matching")
    _add_pair(b)
    b.add_argument("--dmax", type=int, required=True)
    b.add_argument("--window", type=int, default=2, help="SAD window radius (default 2)")
    b.add_argument("--out", type=Path, required=True)
    b.add_argument("--scale", type=int, default=4)
    b.set_defaults(func=cmd_baseline)

    f = sub.add_parser("fitness", parents=[common], help="print the fuzzy fitness of a disparity map")
    f.add_argument("--chrom", required=True, type=Path, help="disparity PGM")
    _add_pair(f)
    _add_fitness_flags(f)
    f.add_argument("--scale", type=int, default=4, help="stored value = disparity * scale")
    f.set_defaults(func=cmd_fitness)
    return parser


def _read(path: Path) -> GrayImage:
    try:
        return read_pgm(path)
    except FileNotFoundError:
        raise OSError(f"no such file: {path}") from None
    except PgmError as exc:
        raise PgmError(f"{path}: {exc}") from None


def _read_pair(args) -> StereoPair:
    return StereoPair(_read(args.ref), _read(args.tgt))


def encode_disparity(disp: np.ndarray, scale: int) -> GrayImage:
    return GrayImage(np.clip(disp.astype(np.int64) * scale, 0, 255).astype(np.uint8))


def decode_disparity(img: GrayImage, scale: int) -> np.ndarray:
    stored = img.pixels.astype(np.int64)
    if np.any(stored % scale):
        raise ConfigError(f"stored values are not multiples of scale {scale}")
    return (stored // scale).astype(np.int32)


def manifest_from_args(args) -> RunManifest:
    config = GaConfig(
        d_max=args.dmax,
        population_size=args.pop,
        offspring_count=args.offspring,
        max_generations=args.gens,
        mutation_rate=args.mutation_rate,
        elite_fraction=args.elite_frac,
        neighborhood_radius=args.radius,
        patch_radius=args.patch_radius,
        sigma=args.sigma,
        seed=args.seed,
        stagnation_window=args.stagnation_window,
        stagnation_epsilon=args.stagnation_eps,
        workers=args.workers,
    )
    if args.scale < 1:
        raise ConfigError("--scale must be >= 1")
    return RunManifest(config, args.ref, args.tgt, args.out, args.log, args.gt, args.scale, args.log_timing)


def cmd_match(args) -> int:
    manifest = manifest_from_args(args)
    pair = _read_pair(args)
    gt = _read(manifest.gt) if manifest.gt else None

    def progress(stats):
        if args.verbose:
            print(f"gen {stats.generation} best {stats.best_fitness:.6g} mean {stats.mean_fitness:.6g}", file=sys.stderr)

    t0 = time.perf_counter()
    best, evo_log = evolve(pair, manifest.config, on_generation=progress)
    elapsed = time.perf_counter() - t0

    write_pgm(manifest.out, encode_disparity(best, manifest.scale))
    if manifest.log:
        header = f"# output_scale={manifest.scale}\n"
        manifest.log.write_text(header + evo_log.to_csv(timing=manifest.log_timing))
    print(f"best_fitness={evo_log.best_fitness[-1]!r}")
    print(f"generations={len(evo_log) - 1} elapsed={elapsed:.3f}s")
    if gt is not None:
        report = bad_pixel_rate(best, GroundTruth(gt.pixels, args.gt_scale, args.unknown), args.threshold)
        print(f"bad_pixel_rate={report.bad_pixel_rate!r}")
    return EXIT_OK


def cmd_eval(args) -> int:
    est_img, gt_img = _read(args.est), _read(args.gt)
    if est_img.shape != gt_img.shape:
        raise DimensionError(f"estimate {est_img.shape} and ground truth {gt_img.shape} differ in size")
    est_scale = args.scale if args.est_scale is None else args.est_scale
    est = est_img.pixels.astype(np.float64) / est_scale
    report = bad_pixel_rate(est, GroundTruth(gt_img.pixels, args.scale, args.unknown), args.threshold)
    print(report.to_csv_line())
    return EXIT_OK


def cmd_baseline(args) -> int:
    pair = _read_pair(args)
    if not 0 <= args.dmax < pair.shape[1]:
        raise ConfigError(f"--dmax must lie in [0, {pair.shape[1] - 1}]")
    if args.window < 0 or args.scale < 1:
        raise ConfigError("--window must be >= 0 and --scale >= 1")
    disp = sad_block_match(pair, args.dmax, args.window)
    write_pgm(args.out, encode_disparity(disp, args.scale))
    return EXIT_OK


def cmd_fitness(args) -> int:
    pair = _read_pair(args)
    chrom = decode_disparity(_read(args.chrom), args.scale)
    if chrom.shape != pair.shape:
        raise DimensionError(f"map {chrom.shape} and images {pair.shape} differ in size")
    if chrom.max() > args.dmax:
        raise ConfigError(f"map holds disparity {chrom.max()} > --dmax {args.dmax}")
    ctx = FitnessContext.from_pair(pair, args.dmax, args.radius, MembershipParams.with_sigma(args.sigma))
    print(repr(fitness(chrom, ctx)))
    return EXIT_OK


def _config_defaults(path: Path, parser: argparse.ArgumentParser) -> dict:
    dests = {a.dest: a for a in parser._actions}
    out = {}
    for lineno, raw in enumerate(path.read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        dest = key.strip().lstrip("-").replace("-", "_")
        if not sep or dest not in dests or dest in ("help", "config"):
            raise UsageError(f"{path}:{lineno}: unknown setting {key.strip()!r}")
        value = value.strip()
        if isinstance(dests[dest], argparse._StoreTrueAction):
            out[dest] = value.lower() in ("1", "true", "yes", "on")
        else:
            out[dest] = value
    return out


def main(argv=None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        if argv and argv[0] == "match" and "--config" in argv:
            pre = argparse.ArgumentParser(add_help=False)
            pre.add_argument("--config", type=Path)
            known, _ = pre.parse_known_args(argv[1:])
            match_parser = parser._subparsers._group_actions[0].choices["match"]
            defaults = _config_defaults(known.config, match_parser)
            for action in match_parser._actions:
                if action.dest in defaults:
                    action.required = False
            match_parser.set_defaults(**defaults)
    except UsageError as exc:
        print(f"genstereo: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"genstereo: error: {exc}", file=sys.stderr)
        return EXIT_IO

    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except (OSError, PgmError) as exc:
        print(f"genstereo: error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (DimensionError, ConfigError, ValueError) as exc:
        print(f"genstereo: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
