"""Command line interface: ``primewalk run | stats | raster | checkpoint | config``.

Exit codes: 0 success, 1 runtime or I/O failure, 2 usage or precondition failure.
Flags override environment variables (and .env), which override defaults.
"""

import argparse
import json
import logging
import sys
import time
from contextlib import contextmanager
from pathlib import Path
from typing import IO, Iterator, Optional, Sequence

from pydantic import ValidationError

from . import __version__
from .checkpoint import VERSION, load_checkpoint, save_checkpoint
from .config import Settings
from .exceptions import (
    AlignmentError,
    CheckpointError,
    ConfigurationError,
    EmptyInputError,
    FitError,
    SchemaError,
)
from .export import (
    read_intervals,
    read_snapshots,
    write_areafit,
    write_benford,
    write_boxdim,
    write_gaps,
    write_intervals,
    write_pairs,
    write_pi,
    write_ratios,
    write_snapshots,
    write_zhist,
)
from .grid import VisitGrid
from .models import Move, RunConfig, RunManifest
from .primes import (
    gap_histogram,
    n_over_ln_n,
    pair_matrix,
    pair_matrix_up_to,
    prime_count,
)
from .raster import SCALINGS, grid_to_array, write_pgm
from .stats import area_slope_fit, box_count, grid_benford, ratio_series, z_histogram
from .utils import _atomic_open
from .walk import Walker, arrival_count_mode

logger = logging.getLogger(__name__)

__all__ = ["main", "build_parser", "cmd_run", "cmd_stats", "cmd_export_raster"]

USAGE_ERRORS = (
    ValidationError,
    ConfigurationError,
    EmptyInputError,
    SchemaError,
    AlignmentError,
)
RUNTIME_ERRORS = (OSError, CheckpointError)


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        settings = Settings()
    except ValidationError as e:
        print(f"primewalk: invalid PRIMEWALK_* environment: {e}", file=sys.stderr)
        return 2
    parser = build_parser(settings)
    args = parser.parse_args(argv)
    _configure_logging(args.verbose, args.quiet, settings.primewalk_log_level)
    try:
        return args.func(args, settings)
    except USAGE_ERRORS as e:
        logger.error("%s", e)
        return 2
    except RUNTIME_ERRORS as e:
        logger.error("%s", e)
        return 1


def _configure_logging(verbose: int, quiet: bool, default: str) -> None:
    if quiet:
        level = logging.ERROR
    elif verbose:
        level = logging.DEBUG if verbose > 1 else logging.INFO
    else:
        level = getattr(logging, default.upper(), logging.WARNING)
    logging.basicConfig(
        level=level,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )


def _moves(value: str) -> dict[int, Move]:
    """Parse '1:up,3:down,7:left,9:right'"""
    try:
        pairs = (item.split(":") for item in value.split(","))
        return {int(digit): Move(move.strip()) for digit, move in pairs}
    except ValueError as e:
        raise argparse.ArgumentTypeError(
            f"expected DIGIT:MOVE pairs like '1:up,3:down,7:left,9:right': {e}"
        ) from e


def build_parser(settings: Optional[Settings] = None) -> argparse.ArgumentParser:
    settings = settings or Settings()
    parser = argparse.ArgumentParser(
        prog="primewalk",
        description="Walk the integer lattice steered by the last digits of primes.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument(
        "-v", "--verbose", action="count", default=0, help="-v INFO, -vv DEBUG"
    )
    parser.add_argument("-q", "--quiet", action="store_true", help="Only log errors")
    commands = parser.add_subparsers(dest="command", required=True)

    run = commands.add_parser("run", help="Run a PW or pRW walk")
    run.add_argument("--mode", choices=("pw", "prw"), default="pw")
    run.add_argument("--limit", type=int, required=True, help="Last integer N")
    run.add_argument("--cadence", type=int, help="Snapshot every C integers")
    run.add_argument("--seed", type=int, help="pRW generator seed (required for prw)")
    run.add_argument(
        "--checkpoint", type=Path, help="Resume from this file if it exists"
    )
    run.add_argument("--output-dir", type=Path)
    run.add_argument(
        "--count-mode", choices=("dwell", "arrival", "both"), default="dwell"
    )
    run.add_argument(
        "--interval",
        type=int,
        nargs="?",
        const=settings.primewalk_interval,
        help="Per-interval statistics length; bare flag uses PRIMEWALK_INTERVAL",
    )
    run.add_argument("--segment-size", type=int)
    run.add_argument("--moves", type=_moves, help="PW table, e.g. 1:up,3:down,...")
    run.set_defaults(func=cmd_run)

    stats = commands.add_parser("stats", help="Statistics as CSV")
    kinds = stats.add_subparsers(dest="kind", required=True)

    def stat(name: str, summary: str) -> argparse.ArgumentParser:
        sub = kinds.add_parser(name, help=summary)
        sub.add_argument("-o", "--output", type=Path, help="Write here, not stdout")
        sub.set_defaults(func=cmd_stats)
        return sub

    def grid_source(sub: argparse.ArgumentParser) -> None:
        sub.add_argument("checkpoint", type=Path)
        sub.add_argument("--count-mode", choices=("dwell", "arrival"), default="dwell")

    benford = stat("benford", "Leading digits of the visit counts")
    grid_source(benford)
    benford.add_argument("--population", choices=("all", "axis"), default="all")

    zhist = stat("zhist", "Cells per visit count and exponential fit")
    grid_source(zhist)
    zhist.add_argument("--z-lo", type=int)
    zhist.add_argument("--z-hi", type=int)

    boxdim = stat("boxdim", "Box-counting fractal dimension")
    grid_source(boxdim)
    boxdim.add_argument("--epsilons", type=int, nargs="+")

    ratios = stat("ratios", "PW area against pRW area")
    ratios.add_argument("--pw", type=Path, required=True, help="PW snapshots.csv")
    ratios.add_argument(
        "--prw", type=Path, nargs="+", required=True, help="pRW snapshots.csv files"
    )

    gaps = stat("gaps", "Prime gap histogram")
    gaps.add_argument("--limit", type=int, required=True)
    gaps.add_argument("--segment-size", type=int)

    pairs = stat("pairs", "Consecutive last-digit pair counts")
    group = pairs.add_mutually_exclusive_group(required=True)
    group.add_argument("--first", type=int, help="Over the first M primes")
    group.add_argument("--limit", type=int, help="Over the primes <= N")
    pairs.add_argument("--segment-size", type=int)

    areafit = stat("areafit", "Area against n through the origin")
    areafit.add_argument("snapshots", type=Path)
    areafit.add_argument("--n-lo", type=int)
    areafit.add_argument("--n-hi", type=int)

    pi = stat("pi", "Exact prime counts next to n / ln n")
    pi.add_argument("--limit", type=int, nargs="+", required=True)
    pi.add_argument("--segment-size", type=int)

    raster = commands.add_parser("raster", help="Export a grid as a PGM image")
    raster.add_argument("checkpoint", type=Path)
    raster.add_argument("-o", "--output", type=Path, required=True)
    raster.add_argument("--scaling", choices=SCALINGS, default="binary")
    raster.add_argument("--plain", action="store_true", help="ASCII P2 output")
    raster.add_argument("--count-mode", choices=("dwell", "arrival"), default="dwell")
    raster.set_defaults(func=cmd_export_raster)

    checkpoint = commands.add_parser("checkpoint", help="Checkpoint utilities")
    checkpoint_commands = checkpoint.add_subparsers(dest="action", required=True)
    inspect = checkpoint_commands.add_parser("inspect", help="Print a JSON summary")
    inspect.add_argument("path", type=Path)
    inspect.set_defaults(func=cmd_checkpoint_inspect)

    config = commands.add_parser("config", help="Print the effective settings")
    config.set_defaults(func=cmd_config)

    return parser


@contextmanager
def _output(path: Optional[Path]) -> Iterator[IO[str]]:
    if path is None:
        yield sys.stdout
    else:
        with _atomic_open(path) as f:
            yield f


def _resume(config: RunConfig) -> Optional[Walker]:
    """Walker restored from config.checkpoint_path, if that file exists"""
    if config.checkpoint_path is None or not config.checkpoint_path.exists():
        return None
    walker = load_checkpoint(config.checkpoint_path)
    if walker.mode != config.mode:
        raise ConfigurationError(
            f"Checkpoint holds a {walker.mode} walk but --mode is {config.mode}"
        )
    if walker.prng is not None and walker.prng.seed != config.seed:
        raise ConfigurationError(
            f"Checkpoint was seeded with {walker.prng.seed}, not {config.seed}"
        )
    if config.count_mode != "dwell" and walker.arrivals is None:
        raise ConfigurationError("Checkpoint has no arrival grid to continue")
    if walker.interval != config.interval:
        raise ConfigurationError(
            f"Checkpoint interval {walker.interval} differs from --interval "
            f"{config.interval}"
        )
    if config.moves is not None and walker.moves != config.moves:
        raise ConfigurationError("Checkpoint was written with another move table")
    logger.info("Resuming %s walk from n=%d", walker.mode, walker.n)
    return walker


def cmd_run(args: argparse.Namespace, settings: Settings) -> int:
    """Run a walk and write snapshots.csv, intervals.csv, grid.ckpt, manifest.json"""
    config = RunConfig(
        mode=args.mode,
        limit=args.limit,
        cadence=settings.primewalk_cadence if args.cadence is None else args.cadence,
        seed=args.seed,
        checkpoint_path=args.checkpoint,
        output_dir=args.output_dir or settings.primewalk_out,
        count_mode=args.count_mode,
        interval=args.interval,
        segment_size=(
            settings.primewalk_segment_size
            if args.segment_size is None
            else args.segment_size
        ),
        moves=args.moves,
    )
    out = config.output_dir
    snapshots_path = out / "snapshots.csv"
    intervals_path = out / "intervals.csv"

    start = time.perf_counter()
    walker = _resume(config)
    snapshots = []
    intervals = []
    resumed_from = None
    if walker is not None:
        resumed_from = walker.n
        # Rows after the checkpoint, and a trailing off-cadence row at the checkpoint
        # itself, belong to the earlier leg only
        if snapshots_path.exists():
            snapshots = [
                s
                for s in read_snapshots(snapshots_path)
                if s.n <= walker.n and s.n % config.cadence == 0
            ]
        if intervals_path.exists():
            intervals = [r for r in read_intervals(intervals_path) if r.end <= walker.n]
    else:
        walker = Walker(
            config.prng,
            arrivals=config.count_mode != "dwell",
            interval=config.interval,
            moves=config.moves,
        )

    snapshots += walker.run(
        config.limit,
        config.cadence,
        segment_size=config.segment_size,
        dispatch=settings.primewalk_dispatch_segments,
    )
    intervals += walker.intervals
    wall_time = time.perf_counter() - start

    with _atomic_open(snapshots_path) as f:
        write_snapshots(f, snapshots)
    with _atomic_open(intervals_path) as f:
        write_intervals(f, intervals)
    save_checkpoint(walker, out / "grid.ckpt")
    if config.checkpoint_path is not None:
        save_checkpoint(walker, config.checkpoint_path)

    manifest = RunManifest(
        version=__version__,
        config=config,
        settings=settings.model_dump(mode="json"),
        wall_time_s=wall_time,
        resumed_from=resumed_from,
        summary=walker.snapshot(),
        intervals_closed=len(intervals),
    )
    with _atomic_open(out / "manifest.json") as f:
        f.write(manifest.model_dump_json(indent=2) + "\n")
    logger.info("Wrote run outputs to %s in %.2fs", out, wall_time)
    return 0


def _grid(path: Path, count_mode: str) -> VisitGrid:
    walker = load_checkpoint(path)
    return arrival_count_mode(walker) if count_mode == "arrival" else walker.grid


def cmd_stats(args: argparse.Namespace, settings: Settings) -> int:
    """Compute one statistic and write it as CSV"""
    segment_size = getattr(args, "segment_size", None)
    if segment_size is None:
        segment_size = settings.primewalk_segment_size
    kind = args.kind

    # Inputs are read before the output file is opened so failures leave no file
    if kind == "benford":
        grid = _grid(args.checkpoint, args.count_mode)
        histogram = grid_benford(grid, args.population, args.count_mode)
        with _output(args.output) as f:
            write_benford(f, histogram)

    elif kind == "zhist":
        grid = _grid(args.checkpoint, args.count_mode)
        fit_range = None
        if args.z_lo is not None or args.z_hi is not None:
            values = grid.values()
            fit_range = (
                int(values.min()) if args.z_lo is None else args.z_lo,
                int(values.max()) if args.z_hi is None else args.z_hi,
            )
        fit_error = None
        try:
            zhist = z_histogram(grid, fit_range, args.count_mode)
        except FitError as e:
            logger.warning("z histogram fit unavailable: %s", e)
            zhist, fit_error = e.result, str(e)
        with _output(args.output) as f:
            write_zhist(f, zhist, fit_error)

    elif kind == "boxdim":
        grid = _grid(args.checkpoint, args.count_mode)
        fit_error = None
        try:
            series = box_count(grid, args.epsilons)
        except FitError as e:
            logger.warning("Fractal dimension unavailable: %s", e)
            series, fit_error = e.result, str(e)
        with _output(args.output) as f:
            write_boxdim(f, series, fit_error)

    elif kind == "ratios":
        pw = read_snapshots(args.pw)
        prw_sets = [read_snapshots(path) for path in args.prw]
        with _output(args.output) as f:
            write_ratios(f, ratio_series(pw, prw_sets))

    elif kind == "gaps":
        with _output(args.output) as f:
            write_gaps(f, gap_histogram(args.limit, segment_size))

    elif kind == "pairs":
        if args.first is not None:
            matrix = pair_matrix(args.first, segment_size)
        else:
            matrix = pair_matrix_up_to(args.limit, segment_size)
        with _output(args.output) as f:
            write_pairs(f, matrix)

    elif kind == "areafit":
        n_range = None
        if args.n_lo is not None or args.n_hi is not None:
            n_range = (args.n_lo or 0, args.n_hi if args.n_hi is not None else 2**63)
        fit = area_slope_fit(read_snapshots(args.snapshots), n_range)
        with _output(args.output) as f:
            write_areafit(f, fit, n_range)

    elif kind == "pi":
        rows = [
            (limit, prime_count(limit, segment_size), n_over_ln_n(limit))
            for limit in args.limit
        ]
        with _output(args.output) as f:
            write_pi(f, rows)

    return 0


def cmd_export_raster(args: argparse.Namespace, settings: Settings) -> int:
    """Render a checkpointed grid as a PGM image"""
    grid = _grid(args.checkpoint, args.count_mode)
    image = grid_to_array(grid, args.scaling)
    min_x, max_x, min_y, max_y = grid.bbox
    write_pgm(
        args.output,
        image,
        plain=args.plain,
        comment=(
            f"primewalk {args.count_mode} scaling={args.scaling} "
            f"x={min_x}..{max_x} y={min_y}..{max_y}"
        ),
    )
    return 0


def cmd_checkpoint_inspect(args: argparse.Namespace, settings: Settings) -> int:
    walker = load_checkpoint(args.path)
    summary = {
        "format_version": VERSION,
        "mode": walker.mode,
        "seed": walker.prng.seed if walker.prng is not None else None,
        "moves": {str(d): m.value for d, m in walker.moves.items()},
        "arrivals": walker.arrivals is not None,
        "interval": walker.interval,
        "interval_start": walker.interval_start if walker.interval else None,
        **walker.snapshot().model_dump(),
    }
    print(json.dumps(summary, indent=2))
    return 0


def cmd_config(args: argparse.Namespace, settings: Settings) -> int:
    print(settings.model_dump_json(indent=2))
    return 0


if __name__ == "__main__":
    sys.exit(main())
