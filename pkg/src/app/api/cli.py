"""Command-line front end: one subcommand per construction, reports on stdout."""

import argparse
import logging
import sys
from typing import Callable, Dict, List, Optional, Sequence

from dotenv import load_dotenv
from pydantic import ValidationError

from ..application.workflows.construction_workflow import ConstructionWorkflow
from ..application.workflows.reports import CommandReport
from ..domain.models.errors import BorelDeskError, FormatError
from ..infrastructure.services.event_publishers import LoggingEventPublisher
from ..infrastructure.settings import DeskSettings, configure_logging, load_settings

logger = logging.getLogger(__name__)

EXIT_INPUT_ERROR = 2


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
    return value


def _natural(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError(f"must not be negative: {text!r}")
    return value


def _cuts(text: str) -> List[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"cuts must be comma separated integers: {text!r}") from None


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--output",
        choices=("text", "structured"),
        default="text",
        help="report format (structured is a JSON CommandReport)",
    )
    common.add_argument("--seed", type=int, default=None, help="sampling seed (overrides BOREL_SEED)")
    return common


def _space_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--space", default="2", help="2, 2adic or a lambda-spec such as '(2.3)' or '3.2(2)'")


def _measure_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--measure",
        dest="measures",
        action="append",
        default=[],
        help="uniform or a measure file; repeatable (default uniform)",
    )


def build_parser() -> argparse.ArgumentParser:
    common = _common_options()
    parser = argparse.ArgumentParser(
        prog="borel-desk",
        description="Bratteli diagrams, odometers, towers and the uniform and weak topologies",
    )
    commands = parser.add_subparsers(dest="verb", metavar="COMMAND")
    commands.required = True

    def command(name: str, help_text: str) -> argparse.ArgumentParser:
        return commands.add_parser(name, parents=[common], help=help_text)

    p = command("validate", "check the structural clauses of a BBD1 diagram")
    p.add_argument("diagram")
    p.add_argument("--up-to-level", type=_positive_int, default=None)

    p = command("fmt", "print or store the canonical form of an artifact")
    p.add_argument("artifact")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--write", action="store_true", help="rewrite the file in place")
    mode.add_argument("--check", action="store_true", help="exit 1 when the file is not canonical")

    p = command("telescope", "telescope a diagram along level cuts")
    p.add_argument("diagram")
    p.add_argument("--cuts", type=_cuts, required=True, help="comma separated, strictly increasing from 0")
    p.add_argument("--out", default=None, help="store the result here")

    p = command("split", "insert an intermediate level")
    p.add_argument("diagram")
    p.add_argument("--level", type=_positive_int, required=True)
    p.add_argument("--out", default=None)

    p = command("heights", "vertex heights and incidence matrices")
    p.add_argument("diagram")
    p.add_argument("--levels", type=_positive_int, default=None)

    p = command("rank", "rank of a finite path among the paths to its end vertex")
    p.add_argument("diagram")
    p.add_argument("--path", required=True, help="edge labels, e.g. '1,1,0' or '1,1,0@0.0.1'")

    p = command("successor", "Vershik successor (or predecessor) of a path")
    p.add_argument("diagram")
    p.add_argument("--path", required=True)
    p.add_argument("--steps", type=_positive_int, default=1)
    p.add_argument("--inverse", action="store_true")

    p = command("orbit", "consecutive Vershik images of a path")
    p.add_argument("diagram")
    p.add_argument("--path", required=True)
    p.add_argument("--steps", type=_positive_int, required=True)

    p = command("odometer", "adic arithmetic and the associated Vershik diagram")
    _space_options(p)
    p.add_argument("--x", required=True, help="adic integer, e.g. '1(0)' or '(1)'")
    p.add_argument("--add", dest="addend", default=None, help="second operand for x + b")
    p.add_argument("--levels", type=_positive_int, default=None, help="emit the diagram truncated here")

    p = command("towers", "Kakutani-Rokhlin towers over a set")
    _space_options(p)
    p.add_argument("--map", dest="map_text", default="odometer", help="odometer, identity, P<n> or a .cyl file")
    p.add_argument("--set", dest="set_text", required=True, help="cylinder union, e.g. '[0] [11]'")
    p.add_argument("--depth", type=_natural, default=0)
    p.add_argument("--k", type=_positive_int, default=None, help="also build a k-maximal set")
    p.add_argument("--induced", action="store_true", help="also report the induced map")

    p = command("rokhlin", "search marker levels for a Rokhlin set")
    _space_options(p)
    p.add_argument("--markers", default="zeros", choices=("zeros", "ones"))
    p.add_argument("--levels", type=_positive_int, default=6)
    p.add_argument("--m", type=_positive_int, required=True)
    p.add_argument("--eps", required=True, help="tolerance in (0, 1), e.g. 3/10 or 0.3")
    p.add_argument("--level", type=_positive_int, default=None, help="force this marker level")
    _measure_options(p)

    p = command("approx", "periodic approximant P_n of the marker map")
    _space_options(p)
    p.add_argument("--markers", default="zeros", choices=("zeros", "ones"))
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--depth", type=_natural, default=None)
    p.add_argument("--samples", type=_natural, default=100)
    p.add_argument("--out", default=None, help="store P_n as a .cyl table")
    _measure_options(p)

    p = command("build-diagram", "ordered diagram from the marker towers")
    _space_options(p)
    p.add_argument("--markers", default="zeros", choices=("zeros", "ones"))
    p.add_argument("--levels", type=_positive_int, required=True)
    p.add_argument("--split-bases", action="store_true")
    p.add_argument("--samples", type=_natural, default=100)
    p.add_argument("--out", default=None)

    p = command("rank1", "cutting and stacking diagram and odometer approximation")
    p.add_argument("spec")
    p.add_argument("--levels", type=_positive_int, required=True)
    p.add_argument("--eps", default=None)
    p.add_argument("--out", default=None)
    p.add_argument("--samples", type=_natural, default=100, help="paths compared between S and T")

    p = command("distance", "uniform and weak distances between two maps")
    _space_options(p)
    p.add_argument("--S", dest="S_text", required=True)
    p.add_argument("--T", dest="T_text", required=True)
    p.add_argument("--depth", type=_natural, default=0)
    _measure_options(p)

    p = command("witness", "the pair separating the two topologies")
    p.add_argument("--depth", type=_positive_int, default=4)

    return parser


_COMMANDS: Dict[str, Callable[[ConstructionWorkflow, argparse.Namespace], CommandReport]] = {
    "validate": lambda w, a: w.validate(a.diagram, a.up_to_level),
    "fmt": lambda w, a: w.fmt(a.artifact, write=a.write, check=a.check),
    "telescope": lambda w, a: w.telescope(a.diagram, a.cuts, a.out),
    "split": lambda w, a: w.split(a.diagram, a.level, a.out),
    "heights": lambda w, a: w.heights(a.diagram, a.levels),
    "rank": lambda w, a: w.rank(a.diagram, a.path),
    "successor": lambda w, a: w.successor(a.diagram, a.path, a.steps, a.inverse),
    "orbit": lambda w, a: w.orbit(a.diagram, a.path, a.steps),
    "odometer": lambda w, a: w.odometer_report(a.space, a.x, a.addend, a.levels),
    "towers": lambda w, a: w.towers_report(
        a.space, a.map_text, a.set_text, a.depth, a.k, a.induced
    ),
    "rokhlin": lambda w, a: w.rokhlin(a.space, a.markers, a.levels, a.m, a.eps, a.measures, a.level),
    "approx": lambda w, a: w.approx(
        a.space, a.markers, a.n, a.measures, a.depth, a.samples, a.out
    ),
    "build-diagram": lambda w, a: w.build_diagram(
        a.space, a.markers, a.levels, a.split_bases, a.samples, a.out
    ),
    "rank1": lambda w, a: w.rank1(a.spec, a.levels, a.eps, a.out, a.samples),
    "distance": lambda w, a: w.distance(a.space, a.S_text, a.T_text, a.measures, a.depth),
    "witness": lambda w, a: w.witness(a.depth),
}


def run(
    args: argparse.Namespace,
    workflow: Optional[ConstructionWorkflow] = None,
    settings: Optional[DeskSettings] = None,
) -> int:
    """Run one parsed command; print the report and return the exit code."""
    try:
        if workflow is None:
            settings = settings or load_settings()
            if args.seed is not None:
                settings = settings.model_copy(update={"seed": args.seed})
            workflow = ConstructionWorkflow(settings=settings, event_publisher=LoggingEventPublisher())
        report = _COMMANDS[args.verb](workflow, args)
    except FormatError as e:
        print(e.diagnostic(), file=sys.stderr)
        return EXIT_INPUT_ERROR
    except (BorelDeskError, ValueError) as e:
        logger.debug(f"{args.verb} rejected its input", exc_info=True)
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT_ERROR

    print(report.render(args.output))
    return report.exit_code


def main(argv: Optional[Sequence[str]] = None) -> int:
    load_dotenv()
    args = build_parser().parse_args(argv)
    try:
        settings = load_settings()
    except ValidationError as e:
        print(f"error: invalid environment: {e}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    configure_logging(settings)
    return run(args, settings=settings)


if __name__ == "__main__":
    sys.exit(main())
