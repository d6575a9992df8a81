#!/usr/bin/env python3
"""
Command-line driver for the J-structure verification toolkit.

Loads a fixture document, runs verification suites or construction pipelines and
writes the report or the constructed tables.
"""
import argparse
import sys
from typing import Any, Callable, Dict, List, Optional

from loguru import logger
from tqdm import tqdm

from config.logging_config import setup_logging
from config.settings import CONSTRUCT_FORMAT, VERSION
from core.exceptions import FixtureError, FormalError, MaterializationError
from core.models.documents import FixtureDocument, load_document
from core.output.csv_generator import CSVGenerator
from core.output.json_generator import JSONGenerator
from core.output.text_report import render_text, summary_line
from core.universe.lifting import CLASS_PAIRS, THEOREMS
from core.verification.report import Report
from core.verification.suites import (
    SUITE_CHOICES,
    SuiteOptions,
    VerificationContext,
    canonical_tables,
    derive_j_tables,
    h_of_tables,
    plan,
    resolve_suites,
    run_tasks,
)
from utils.helpers import get_timestamp
from utils.validators import non_negative_int, thread_count, validate_suite_selector

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_INVALID = 2
EXIT_MATERIALIZATION = 3

TARGETS = ("cc", "j-universe", "j-cc", "derive-j", "h-of")


def load_context(args) -> VerificationContext:
    document: FixtureDocument = load_document(args.fixture)
    return VerificationContext(document, skew=args.skew)


def suite_options(ctx: VerificationContext, args) -> SuiteOptions:
    return SuiteOptions.from_document(
        ctx.document,
        bound=args.bound,
        lifting_bound=args.lifting_bound,
        class_pair=args.class_pair,
        theorem=args.theorem,
        skew_seed=args.skew or None,
        threads=getattr(args, "threads", None),
    )


def emit(text: str, out: Optional[str]) -> None:
    if out:
        if not JSONGenerator(out).write(text):
            raise OSError(f"could not write {out}")
    else:
        sys.stdout.write(text)


def run_verify(args) -> int:
    """
    Run the selected suites and write the report.

    Returns:
        EXIT_PASS if every selected check passed, EXIT_FAIL otherwise
    """
    if not validate_suite_selector(args.suite, list(SUITE_CHOICES)):
        raise FixtureError(f"unknown suite {args.suite!r}; expected one of {', '.join(SUITE_CHOICES)}")
    ctx = load_context(args)
    options = suite_options(ctx, args)
    tasks = plan(ctx, resolve_suites(args.suite), options)

    with tqdm(total=len(tasks), desc=f"Verifying {ctx.name}", disable=args.quiet, file=sys.stderr) as pbar:
        report: Report = run_tasks(ctx, tasks, options, args.suite, progress=lambda _: pbar.update(1))

    include_timing = not args.no_timing
    if args.format == "structured":
        emit(JSONGenerator.dumps(report.to_dict(include_timing=include_timing)), args.out)
    elif args.format == "csv":
        if args.out:
            if not CSVGenerator(args.out).generate_csv(report, include_timing):
                raise OSError(f"could not write {args.out}")
        else:
            sys.stdout.write(CSVGenerator().render(report, include_timing))
    else:
        emit(render_text(report, include_timing), args.out)

    if args.out:
        logger.info(summary_line(report))
    return EXIT_PASS if report.passed else EXIT_FAIL


def construct_cc(ctx: VerificationContext, options: SuiteOptions) -> Dict[str, Any]:
    tables = canonical_tables(ctx, options.bound)
    return {"object_counts": tables["object_counts"], "objects": tables["objects"]}


def construct_j_universe(ctx: VerificationContext, options: SuiteOptions) -> Dict[str, Any]:
    fixture = ctx.fixture
    ju, bundle = fixture.ju, fixture.bundle
    fp = ju.fp
    return {
        "bundle": bundle.describe(),
        "omega": ju.omega.describe(),
        "sizes": {
            "U": len(ju.universe.base),
            "Ũ": len(ju.universe.total),
            "EŨ": len(ju.e.total),
            "I_pE(Ũ)": len(fp.i_pe_utilde.obj),
            "Fp": len(fp.apex),
        },
        "jp_count": ju.count_jp(),
        "filler_count": ju.count_fillers(),
    }


def construct_j_cc(ctx: VerificationContext, options: SuiteOptions) -> Dict[str, Any]:
    tables = canonical_tables(ctx, options.bound)
    return {"IdT": tables["IdT"], "J": tables["J"]}


def construct_derive_j(ctx: VerificationContext, options: SuiteOptions) -> Dict[str, Any]:
    return derive_j_tables(ctx, options)


def construct_h_of(ctx: VerificationContext, options: SuiteOptions) -> Dict[str, Any]:
    return h_of_tables(ctx, options.bound)


CONSTRUCTIONS: Dict[str, Callable[[VerificationContext, SuiteOptions], Dict[str, Any]]] = {
    "cc": construct_cc,
    "j-universe": construct_j_universe,
    "j-cc": construct_j_cc,
    "derive-j": construct_derive_j,
    "h-of": construct_h_of,
}


def construction_anchor(target: str, options: SuiteOptions) -> str:
    if target == "derive-j":
        return options.theorem
    return {
        "cc": "2015.04.02.eq2",
        "j-universe": "2015.03.27.def4-6",
        "j-cc": "2015.05.08.rem1",
        "h-of": "2015.05.10.l1",
    }[target]


def run_construct(args) -> int:
    """Build the target tables and write them with a provenance header."""
    ctx = load_context(args)
    options = suite_options(ctx, args)
    logger.info(f"Constructing {args.target} for {ctx.name}")
    tables = CONSTRUCTIONS[args.target](ctx, options)
    provenance = {
        "format": CONSTRUCT_FORMAT,
        "version": VERSION,
        "fixture": ctx.name,
        "target": args.target,
        "anchor": construction_anchor(args.target, options),
        "chooser": ctx.fixture.uc.universe.chooser.name,
        "bounds": {"csystem": options.bound, "lifting": options.lifting_bound},
    }
    if not args.no_timing:
        provenance["generated_at"] = get_timestamp()
    dump = {"provenance": provenance, "tables": tables}
    if args.out:
        if not JSONGenerator(args.out).generate_dump(dump):
            raise OSError(f"could not write {args.out}")
    else:
        sys.stdout.write(JSONGenerator.dumps(dump))
    return EXIT_PASS


def parse_arguments(argv: Optional[List[str]] = None):
    """
    Parse command line arguments.

    Returns:
        Parsed arguments
    """
    parser = argparse.ArgumentParser(description="J-structure verification toolkit for finite universe categories")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--fixture",
        required=True,
        help="Path to a fixture document (JSON)"
    )
    common.add_argument(
        "--bound",
        type=non_negative_int,
        help="Length bound for C-system enumeration (default from the fixture, else 2)"
    )
    common.add_argument(
        "--lifting-bound",
        type=non_negative_int,
        help="Set-size bound for lifting enumeration (default from the fixture, else 4)"
    )
    common.add_argument(
        "--skew",
        type=non_negative_int,
        help="Seed of the skewed chooser, 0 for the normalized squares"
    )
    common.add_argument(
        "--class-pair",
        choices=sorted(CLASS_PAIRS),
        help="Morphism-class pair for the lifting suites"
    )
    common.add_argument(
        "--theorem",
        choices=list(THEOREMS),
        help="Theorem used to derive Jp"
    )
    common.add_argument(
        "--out",
        type=str,
        help="Write the output to this file instead of standard output"
    )
    common.add_argument(
        "--no-timing",
        action="store_true",
        help="Omit timing fields so reruns are byte identical"
    )
    common.add_argument(
        "--log-level",
        default=None,
        help="Log level (overrides LOG_LEVEL)"
    )
    common.add_argument(
        "--quiet",
        action="store_true",
        help="Disable the progress bar"
    )

    subparsers = parser.add_subparsers(dest="command", required=True)

    verify = subparsers.add_parser("verify", parents=[common], help="Run verification suites")
    verify.add_argument(
        "--suite",
        default="all",
        help=f"Suite name, comma separated list or 'all' ({', '.join(SUITE_CHOICES)})"
    )
    verify.add_argument(
        "--format",
        choices=["text", "structured", "csv"],
        default="text",
        help="Report format"
    )
    verify.add_argument(
        "--threads",
        type=thread_count,
        help="Worker threads for independent checks"
    )

    construct = subparsers.add_parser("construct", parents=[common], help="Dump constructed tables")
    construct.add_argument(
        "--target",
        choices=TARGETS,
        required=True,
        help="Construction to run"
    )

    return parser.parse_args(argv)


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point; returns the exit status."""
    args = parse_arguments(argv)

    setup_logging(args.log_level)

    try:
        if args.command == "verify":
            return run_verify(args)
        return run_construct(args)
    except FileNotFoundError as e:
        logger.error(f"Fixture file not found: {e.filename or e}")
        return EXIT_INVALID
    except FixtureError as e:
        logger.error(f"Invalid input: {e}")
        return EXIT_INVALID
    except MaterializationError as e:
        logger.error(f"Bound overflow: {e}")
        return EXIT_MATERIALIZATION
    except FormalError as e:
        logger.error(f"Construction failed: {e}")
        return EXIT_FAIL
    except OSError as e:
        logger.error(f"Output error: {str(e)}")
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
