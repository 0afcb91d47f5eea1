# ==============================================================================
# COMMAND LINE
# ==============================================================================
# Usage:
#   python -m hypstretch check FILE
#   python -m hypstretch stretch FILE --t T --out FILE [--weights FILE]
#   python -m hypstretch lengths FILE --depth N
#   python -m hypstretch distance X Y --depth N [--curves-only]
#   python -m hypstretch verify FILE --t T1,T2,... [--depth N] [--samples N]
#   python -m hypstretch render FILE --out FILE.svg [--foliation] [--clip Y]
#
# Exit codes: 0 success, 1 invalid surface / failed check / mismatch,
# 2 unreadable or unwritable file.
# ==============================================================================

import argparse
import logging
import math
import sys
from pathlib import Path
from typing import List, Optional, Sequence

import pandas as pd

from hypstretch import __version__
from hypstretch.data.surface_io import Surface, file_sha256, load_surface, save_surface
from hypstretch.data.weights_io import save_weights
from hypstretch.services.candidates import arc_distance_estimate, candidate_length, enumerate_candidates
from hypstretch.services.render import RenderOptions, save_render
from hypstretch.services.stretch import epsilon_cocycle, generalized_stretch
from hypstretch.services.surface import ValidationReport, classify, validate
from hypstretch.services.verification import verify_surface
from hypstretch.utils.errors import ErrorCode, HypStretchError
from hypstretch.utils.log_setup import configure_logging

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_IO = 2


def fmt(value: float) -> str:
    return f"{value:.12g}"


def _table(frame: pd.DataFrame) -> str:
    if frame.empty:
        return "(no candidates)"
    return frame.to_string(index=False, float_format=fmt)


def _load_valid(path: str) -> Surface:
    surface = load_surface(path)
    report = validate(surface)
    if not report.valid:
        raise HypStretchError(ErrorCode.INVALID_SURFACE, "; ".join(report.violations), path=path)
    return surface


def _parse_grid(text: str) -> List[float]:
    try:
        grid = [float(part) for part in text.split(",") if part.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"bad t grid {text!r}: {e}") from e
    if not grid:
        raise argparse.ArgumentTypeError("empty t grid")
    return grid


def _non_negative(text: str) -> float:
    try:
        value = float(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from e
    if not math.isfinite(value) or value < 0:
        raise argparse.ArgumentTypeError("t must be a finite number >= 0")
    return value


def _non_negative_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from e
    if value < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return value


# ==============================================================================
# COMMANDS
# ==============================================================================

def describe_check(surface: Surface, report: ValidationReport) -> List[str]:
    """Human-readable lines of the check command."""
    if not report.valid:
        lines = [f"invalid, {report.piece_count} pieces (expected {report.expected_pieces})"]
        lines += [f"  - {v}" for v in report.violations]
        return lines
    decomposition = classify(surface)
    if not decomposition.block:
        block = "B = empty"
    elif not decomposition.complement:
        block = "B = whole surface"
    else:
        block = "B = {" + ", ".join(decomposition.block) + "}"
    lines = [f"valid, {report.piece_count} pieces, {block}"]
    lines.append(f"  punctures: {report.punctures}, boundary components: {report.boundary_components}")
    for length in report.closed_leaf_lengths:
        lines.append(f"  closed leaf of length {fmt(length)}")
    for j, crown in enumerate(decomposition.crowns):
        cases = ",".join(str(sp.case) for sp in crown.spikes)
        lines.append(f"  crown {j}: cycle ({' '.join(crown.quads)}), spike cases {cases}, core {crown.core_word.describe()}")
    return lines


def cmd_check(args) -> int:
    surface = load_surface(args.file)
    report = validate(surface)
    for line in describe_check(surface, report):
        print(line)
    return EXIT_OK if report.valid else EXIT_INVALID


def cmd_stretch(args) -> int:
    surface = _load_valid(args.file)
    stretched = generalized_stretch(surface, args.t)
    stretched = stretched.with_metadata(input_sha256=file_sha256(args.file), t=args.t)
    save_surface(stretched, args.out)
    if args.weights:
        save_weights(epsilon_cocycle(surface, t=args.t).rho_t, args.weights)
    print(f"stretched by t={fmt(args.t)} -> {args.out}")
    return EXIT_OK


def cmd_lengths(args) -> int:
    surface = _load_valid(args.file)
    rows = []
    for cand in enumerate_candidates(surface, args.depth):
        rows.append({"kind": cand.kind, "path": cand.path.describe(), "length": candidate_length(surface, cand)})
    print(_table(pd.DataFrame(rows, columns=["kind", "path", "length"])))
    return EXIT_OK


def cmd_distance(args) -> int:
    x, y = _load_valid(args.x), _load_valid(args.y)
    estimate = arc_distance_estimate(x, y, args.depth, curves_only=args.curves_only)
    print(_table(estimate.table()))
    name = "d_Th" if args.curves_only else "d_A"
    print(f"{name} lower bound at depth {args.depth}: {fmt(estimate.value)} (witness: {estimate.witness.label})")
    return EXIT_OK


def cmd_verify(args) -> int:
    surface = load_surface(args.file)
    report = verify_surface(surface, Path(args.file).stem, args.t, depth=args.depth, samples=args.samples)
    text = report.to_json()
    if args.out:
        try:
            Path(args.out).write_text(text, encoding="utf-8")
        except OSError as e:
            raise HypStretchError(ErrorCode.BAD_FILE, f"cannot write {args.out}: {e}") from e
    else:
        sys.stdout.write(text)
    failed = [c.name for c in report.checks if not c.passed]
    if failed:
        logger.error(f"{len(failed)} checks failed: {', '.join(failed)}")
        return EXIT_INVALID
    return EXIT_OK


def cmd_render(args) -> int:
    surface = _load_valid(args.file)
    options = RenderOptions(clip=args.clip, foliation=args.foliation, marks=not args.no_marks)
    save_render(surface, args.out, options)
    print(f"rendered {len(surface.pieces)} pieces -> {args.out}")
    return EXIT_OK


# ==============================================================================
# PARSER
# ==============================================================================

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hypstretch", description="Generalized stretch lines on hyperbolic surfaces")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="validate a surface file and print its boundary block")
    p.add_argument("file")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("stretch", help="write the surface stretched by t")
    p.add_argument("file")
    p.add_argument("--t", type=_non_negative, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--weights", help="also write the rho^t branch weights")
    p.set_defaults(func=cmd_stretch)

    p = sub.add_parser("lengths", help="lengths of candidate curves and arcs")
    p.add_argument("file")
    p.add_argument("--depth", type=_non_negative_int, default=3)
    p.set_defaults(func=cmd_lengths)

    p = sub.add_parser("distance", help="lower bound of the arc distance from X to Y")
    p.add_argument("x")
    p.add_argument("y")
    p.add_argument("--depth", type=_non_negative_int, default=4)
    p.add_argument("--curves-only", action="store_true", help="closed curves only (Thurston distance)")
    p.set_defaults(func=cmd_distance)

    p = sub.add_parser("verify", help="run every check over a grid of stretch times")
    p.add_argument("file")
    p.add_argument("--t", type=_parse_grid, default=[0.25, 1.0])
    p.add_argument("--depth", type=_non_negative_int, default=4)
    p.add_argument("--samples", type=_non_negative_int, default=None)
    p.add_argument("--out", help="write the JSON report here instead of stdout")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("render", help="draw the developed pieces as SVG")
    p.add_argument("file")
    p.add_argument("--out", required=True)
    p.add_argument("--foliation", action="store_true")
    p.add_argument("--no-marks", action="store_true")
    p.add_argument("--clip", type=float, default=4.0)
    p.set_defaults(func=cmd_render)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging("DEBUG" if args.verbose else None)
    try:
        return args.func(args)
    except HypStretchError as e:
        logger.error(f"{args.command}: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO if e.code is ErrorCode.BAD_FILE else EXIT_INVALID
