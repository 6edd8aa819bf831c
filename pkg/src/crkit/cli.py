"""Command-line interface.

Subcommands:

* ``analyze``           — run the batch pipeline and write the indicator CSV
* ``propose-clusters``  — write merge proposals as CSV for offline review
* ``serve``             — start the curation HTTP service

Exit codes: 0 success, 2 configuration error, 3 format error, 4 I/O error.
"""

from __future__ import annotations

import argparse
import sys

from . import __version__
from .analysis import AnalysisSettings
from .cfa import ClassifierParams
from .dedup import SimilarityConfig, cluster, match_pairs
from .errors import ConfigError, FormatError, IntegrityError, IoError, VersionError
from .export import proposals_csv
from .indicators import NpctConfig
from .ingest import aggregate, parse_refcsv, parse_tagged
from .pipeline import FORMATS, PipelineConfig, run
from .project import load_project

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_FORMAT = 3
EXIT_IO = 4


def _year_range(text: str) -> tuple[int, int]:
    try:
        lo, hi = text.split(":")
        return int(lo), int(hi)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected MIN:MAX (e.g. 1900:2005), got {text!r}"
        ) from None


def _weights(text: str) -> tuple[float, float, float]:
    try:
        title_w, author_w, source_w = (float(part) for part in text.split(","))
        return title_w, author_w, source_w
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected three comma-separated weights (title,author,source), got {text!r}"
        ) from None


def _percentiles(text: str) -> tuple[float, ...]:
    try:
        values = tuple(int(part) for part in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected comma-separated percentages (e.g. 50,25,10), got {text!r}"
        ) from None
    if not values or any(not 0 < value < 100 for value in values):
        raise argparse.ArgumentTypeError("percentages must lie strictly between 0 and 100")
    return tuple(value / 100 for value in values)


def _add_input_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("inputs", nargs="+", metavar="FILE", help="input file(s)")
    parser.add_argument("--format", choices=FORMATS, required=True)
    parser.add_argument("--rpy-range", type=_year_range, metavar="MIN:MAX", default=None,
                        help="keep only cited references published in this range")


def _add_cluster_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--cluster-threshold", type=float, default=0.75, metavar="T",
                        help="similarity required for a variant match (default 0.75)")
    parser.add_argument("--year-tolerance", type=int, default=0, metavar="N",
                        help="allowed publication-year difference inside a match (default 0)")
    parser.add_argument("--weights", type=_weights, default=(0.5, 0.25, 0.25),
                        metavar="T,A,S", help="title,author,source weights (default 0.5,0.25,0.25)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="crkit", description="Cited-reference analytics toolkit")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    analyze = sub.add_parser("analyze", help="run the batch pipeline")
    _add_input_options(analyze)
    _add_cluster_options(analyze)
    analyze.add_argument("--auto-accept", action="store_true",
                         help="merge every cluster proposal without review")
    analyze.add_argument("--npct-range", type=int, default=0, metavar="R",
                         help="citing-year pooling half-width for thresholds (default 0)")
    analyze.add_argument("--percentiles", type=_percentiles, default=(0.50, 0.25, 0.10),
                         metavar="P,P,P", help="top percentages (default 50,25,10)")
    analyze.add_argument("--z-threshold", type=float, default=1.0, metavar="Z")
    analyze.add_argument("--hot-window", type=int, default=3, metavar="E")
    analyze.add_argument("--sleep-years", type=int, default=5, metavar="B")
    analyze.add_argument("--min-seq-len", type=int, default=5, metavar="L")
    analyze.add_argument("--out-csv", metavar="PATH", help="indicator table destination")
    analyze.add_argument("--out-spectrogram", metavar="PATH", help="spectrogram series destination")
    analyze.add_argument("--out-project", metavar="PATH", help="save the processed dataset")
    analyze.add_argument("--proposals-csv", metavar="PATH",
                         help="review-file destination when proposals are not auto-accepted")
    analyze.add_argument("--report", choices=("json", "text"), default="text")

    propose = sub.add_parser("propose-clusters", help="write merge proposals for review")
    _add_input_options(propose)
    _add_cluster_options(propose)
    propose.add_argument("--out", metavar="PATH", required=True)

    serve = sub.add_parser("serve", help="start the curation service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8720)
    return parser


def _similarity_config(args: argparse.Namespace) -> SimilarityConfig:
    title_w, author_w, source_w = args.weights
    return SimilarityConfig(
        threshold=args.cluster_threshold,
        title_weight=title_w,
        author_weight=author_w,
        source_weight=source_w,
        year_tolerance=args.year_tolerance,
    )


def _cmd_analyze(args: argparse.Namespace) -> int:
    config = PipelineConfig(
        inputs=tuple(args.inputs),
        format=args.format,
        rpy_range=args.rpy_range,
        similarity=_similarity_config(args),
        auto_accept=args.auto_accept,
        settings=AnalysisSettings(
            npct=NpctConfig(window=args.npct_range, fractions=args.percentiles),
            z_threshold=args.z_threshold,
            classifier=ClassifierParams(
                hot_window=args.hot_window,
                sleep_years=args.sleep_years,
                min_length=args.min_seq_len,
            ),
        ),
        out_csv=args.out_csv,
        out_spectrogram=args.out_spectrogram,
        out_project=args.out_project,
        proposals_out=args.proposals_csv,
    )
    report = run(config)
    sys.stdout.write(report.to_json() + "\n" if args.report == "json" else report.to_text())
    return EXIT_OK


def _cmd_propose(args: argparse.Namespace) -> int:
    from .pipeline import _read, _write

    if len(args.inputs) > 1:
        raise ConfigError("propose-clusters accepts exactly one input file")
    if args.format == "project":
        dataset = load_project(_read(args.inputs[0]))
    else:
        parse = parse_tagged if args.format == "tagged" else parse_refcsv
        parsed, _ = parse(_read(args.inputs[0]))
        dataset, _ = aggregate(parsed, args.rpy_range)
    cfg = _similarity_config(args)
    proposals = cluster(dataset, match_pairs(dataset, cfg))
    _write(args.out, proposals_csv(dataset, proposals))
    sys.stdout.write(f"wrote {len(proposals)} proposal(s) to {args.out}\n")
    return EXIT_OK


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port, log_level="warning")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {
        "analyze": _cmd_analyze,
        "propose-clusters": _cmd_propose,
        "serve": _cmd_serve,
    }
    try:
        return handlers[args.command](args)
    except ConfigError as exc:
        sys.stderr.write(f"configuration error: {exc}\n")
        return EXIT_CONFIG
    except (FormatError, VersionError, IntegrityError) as exc:
        sys.stderr.write(f"format error: {exc}\n")
        return EXIT_FORMAT
    except IoError as exc:
        sys.stderr.write(f"i/o error: {exc}\n")
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
