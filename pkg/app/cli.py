"""
Command-line front end

    python -m app compile --family parity_prg --param 01
    python -m app learn --instance learn_point_mass_k3 --mode sd
    python -m app owpuzz --instance owpuzz_biased_k4 --trials 500
    python -m app verify --claim probabilistic_argument

Exit codes: 0 success, 1 claim or bound failure, 2 usage or input error.
"""

import argparse
import logging
import sys
from typing import Optional, Sequence

from pydantic import ValidationError

from app import __version__
from app.core.config import settings
from app.core.exceptions import LabError
from app.core.logging_config import setup_logging
from app.models.run_config import LearnMode, OutputFormat, RunConfig
from app.services import runs
from app.utils.reports import summarize, to_data, write_report

logger = logging.getLogger(__name__)

EXIT_OK, EXIT_FAILED, EXIT_USAGE = 0, 1, 2

COMMANDS = {
    "compile": runs.cmd_compile,
    "learn": runs.cmd_learn,
    "owpuzz": runs.cmd_owpuzz,
    "verify": runs.cmd_verify,
}


def _common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=None,
                        help=f"base seed (default {settings.DEFAULT_SEED}, env DEFAULT_SEED)")
    parser.add_argument("--out", help="report path; stdout when omitted")
    parser.add_argument("--format", choices=[f.value for f in OutputFormat], default=OutputFormat.JSON.value)
    parser.add_argument("--log-level", default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="python -m app", description="Likelihood lab: learners, puzzles and claim checks"
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    compile_parser = sub.add_parser("compile", help="validate a circuit family and summarize it")
    compile_parser.add_argument("--family", required=True, help="circuit JSON path or fixture name")
    compile_parser.add_argument("--param", help="also print the exact distribution D(param)")
    _common(compile_parser)

    learn = sub.add_parser("learn", help="run a learner on samples or on an instance")
    learn.add_argument("--family")
    learn.add_argument("--instance")
    learn.add_argument("--samples", help="newline-delimited bit strings")
    learn.add_argument("--mode", choices=[m.value for m in LearnMode], default=LearnMode.SD.value)
    learn.add_argument("--learner", default="agnostic", help="benchmark learner: agnostic, mle, cheating, constant:<h>")
    for flag in ("--eps", "--delta", "--t", "--trials", "--rounds"):
        learn.add_argument(flag, type=int)
    _common(learn)

    owpuzz = sub.add_parser("owpuzz", help="completeness and best attack of the puzzle built from an instance")
    owpuzz.add_argument("--instance", required=True)
    owpuzz.add_argument("--param", help="also compute the useful-sample probability for this parameter")
    for flag in ("--eps", "--delta", "--t", "--trials"):
        owpuzz.add_argument(flag, type=int)
    _common(owpuzz)

    verify = sub.add_parser("verify", help="run the claim suite")
    verify.add_argument("--claim", action="append", default=[], help="claim id; repeat to select several")
    verify.add_argument("--reps", type=int)
    verify.add_argument("--scale", type=float, default=1.0, help="corpus size factor in (0, 1]")
    _common(verify)
    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    values = {k: v for k, v in vars(args).items() if v is not None and k != "log_level"}
    return RunConfig(**values)


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    setup_logging(args.log_level)
    try:
        config = resolve_config(args)
        report = COMMANDS[config.subcommand](config)
        text = write_report(report, config.out, config.format)
    except ValidationError as e:
        first = e.errors()[0]
        print(f"error: {first['loc'][0]}: {first['msg']}", file=sys.stderr)
        return EXIT_USAGE
    except LabError as e:
        logger.debug("Run aborted", exc_info=True)
        print(f"error: {e.detail}", file=sys.stderr)
        return e.exit_code

    if not config.out:
        sys.stdout.write(text)
    data = to_data(report)
    print(summarize(data), file=sys.stderr)
    return EXIT_OK if data["passed"] else EXIT_FAILED
