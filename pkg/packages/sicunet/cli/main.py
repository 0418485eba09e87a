"""``sicunet`` command-line entry point."""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from typing import Any, Sequence

from ..evaluation import EvaluationError, ReportFormatError
from ..models import ModelError
from ..nn import CheckpointError, NnError
from ..pipeline import PipelineError
from ..scenario import InvalidScenarioError, ScenarioError
from ..sic import SicError
from .commands import SPLITS, cmd_evaluate, cmd_generate, cmd_labels, cmd_report, cmd_train
from .config import PROFILES, TRAIN_STAGES, RunConfig, resolve_run_config
from .exceptions import EXIT_CONFIG, EXIT_DATA, EXIT_FAILURE, EXIT_MODEL, EXIT_OK, CliError, ConfigError
from .workspace import resolve_workspace

LOGGER = logging.getLogger("sicunet.cli")

LOG_LEVEL_ENV_VAR = "SICU_LOG_LEVEL"
ORACLE_STAGES: tuple[str, ...] = ("sps", "sir", "method")


def _seed(value: str) -> int:
    seed = int(value, 0)
    if not 0 <= seed < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return seed


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run configuration; flags take precedence over it")
    common.add_argument("--seed", type=_seed, help="Run seed (unsigned 64-bit)")
    common.add_argument("--profile", choices=PROFILES, help="Built-in dataset regime")
    common.add_argument("--workspace", help="Workspace directory (default: $SICU_WORKSPACE or ./sicunet-workspace)")
    common.add_argument("--log-level", help="Logging level (default: $SICU_LOG_LEVEL or INFO)")

    parser = argparse.ArgumentParser(
        prog="sicunet",
        description="Train and evaluate the SIC / U-Net interference-mitigation recommender.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    commands.add_parser("generate", parents=[common], help="Generate the training and test datasets")

    train = commands.add_parser("train", parents=[common], help="Train one stage or the U-Net bank")
    train.add_argument("stage", choices=TRAIN_STAGES)
    train.add_argument("--epochs", type=int)
    train.add_argument("--batch", type=int)
    train.add_argument("--lr", type=float)

    labels = commands.add_parser("labels", parents=[common], help="Build Stage-3 method labels")
    labels.add_argument("--split", choices=SPLITS, default="train")

    evaluate = commands.add_parser("evaluate", parents=[common], help="Evaluate the pipeline and emit a report")
    evaluate.add_argument("--split", choices=SPLITS, default="test")
    evaluate.add_argument(
        "--oracle",
        action="append",
        choices=ORACLE_STAGES,
        default=[],
        help="Replace a stage's prediction with ground truth (repeatable)",
    )

    report = commands.add_parser("report", help="Re-emit CSV and SVG files from a saved report")
    report.add_argument("report_path")
    report.add_argument("--out", help="Output directory (default: the report's directory)")
    report.add_argument("--log-level")
    return parser


def configure_logging(level: str | None) -> None:
    name = (level or os.getenv(LOG_LEVEL_ENV_VAR) or "INFO").upper()
    numeric = logging.getLevelName(name)
    if not isinstance(numeric, int):
        raise ConfigError(f"Unknown log level {name!r}")
    logging.basicConfig(level=numeric, format="%(asctime)s %(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    logging.getLogger("sicunet").setLevel(numeric)


def _run_config(args: argparse.Namespace) -> RunConfig:
    run = resolve_run_config(profile=args.profile, config_path=args.config, seed=args.seed)
    if args.command == "train":
        changes = {
            key: value
            for key, value in (("epochs", args.epochs), ("batch_size", args.batch), ("lr", args.lr))
            if value is not None
        }
        if changes:
            run = run.with_training(args.stage, **changes)
    return run


def _echo(payload: dict[str, Any]) -> None:
    sys.stdout.write(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def exit_code_for(exc: Exception) -> int:
    """Map a failure onto the documented exit codes."""

    if isinstance(exc, CliError):
        return exc.exit_code
    if isinstance(exc, (ModelError, CheckpointError, PipelineError)):
        return EXIT_MODEL
    if isinstance(exc, (InvalidScenarioError, SicError)):
        return EXIT_CONFIG
    if isinstance(exc, (ScenarioError, ReportFormatError)):
        return EXIT_DATA
    return EXIT_FAILURE


def _dispatch(args: argparse.Namespace) -> dict[str, Any]:
    if args.command == "report":
        return cmd_report(args.report_path, args.out)

    run = _run_config(args)
    _echo({"seed": run.seed, "config": run.to_dict()})
    workspace = resolve_workspace(args.workspace)
    with workspace.locked():
        if args.command == "generate":
            return cmd_generate(run, workspace)
        if args.command == "train":
            return cmd_train(args.stage, run, workspace)
        if args.command == "labels":
            return cmd_labels(run, workspace, split=args.split)
        return cmd_evaluate(run, workspace, split=args.split, oracle_stages=frozenset(args.oracle))


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        configure_logging(args.log_level)
        summary = _dispatch(args)
    except (CliError, ScenarioError, ModelError, NnError, PipelineError, SicError, EvaluationError) as exc:
        LOGGER.debug("Command %s failed", args.command, exc_info=True)
        sys.stderr.write(f"sicunet {args.command}: {exc}\n")
        return exit_code_for(exc)
    _echo(summary)
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
