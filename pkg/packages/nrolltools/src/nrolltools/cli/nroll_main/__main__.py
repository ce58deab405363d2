#!/usr/bin/env python3

from __future__ import annotations

import logging
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import click
from rich.console import Console
from rich.markup import escape
from rich.traceback import install

from nroll.errors import ConfigValidationError, DivergedError, NrollError
from nrollpyutils.logging import configure_rich_root_logger
from nrollpyutils.system import THREADS_ENV_VAR

from nrolltools.cli.opts import experiment_opts, verbosity_opts, version_opt
from nrolltools.commands import estimate_noise_impl, evaluate_impl, gen_data_impl, nroll_impl, train_impl
from nrolltools.config import ExperimentConfig, get_env_defaults, load_experiment_config
from nrolltools.constants import (
    EXIT_CONFIG,
    EXIT_DIVERGED,
    EXIT_ERROR,
    EXIT_OK,
    PROGRAM_NAME,
    RUNS_DIR_ENV_VAR,
)
from nrolltools.rundir import RunDir

log = logging.getLogger(__name__)

CONTEXT_SETTINGS = {
    "help_option_names": ["-h", "--help"],
}

err_console = Console(stderr=True)


@dataclass
class NrollContext:
    verbosity: int = 0
    env_file: Optional[str] = None
    console: Console = err_console


@dataclass(frozen=True)
class Run:
    cfg: ExperimentConfig
    rundir: RunDir
    workers: Optional[int]


def start_run(ctx: NrollContext, config_path: Optional[str], overrides: tuple[str, ...]) -> Run:
    """Resolve the config (file, --set, environment), prepare runs/<name>/ and start logging there."""
    env = get_env_defaults(ctx.env_file)
    cfg = load_experiment_config(config_path, overrides)
    if cfg.runs_dir is None:
        cfg = cfg.with_runs_dir(env[RUNS_DIR_ENV_VAR])
    rundir = RunDir.for_config(cfg).prepare()
    configure_rich_root_logger(verbosity=ctx.verbosity, err_console=ctx.console, log_file_path=rundir.run_log)
    rundir.write_config(cfg)
    log.info("run %s in %s", cfg.name, rundir.path)
    return Run(cfg=cfg, rundir=rundir, workers=env[THREADS_ENV_VAR])


@click.group(context_settings=CONTEXT_SETTINGS, no_args_is_help=True)
@verbosity_opts()
@click.option(
    "--env-file", "-e",
    type=click.Path(exists=True, dir_okay=False, readable=True),
    required=False,
    help=f"KEY=VALUE file read after the process environment ({THREADS_ENV_VAR}, {RUNS_DIR_ENV_VAR}).",
)
@version_opt()
@click.pass_context
def nroll_cli(ctx: click.Context, verbosity: int, quiet: bool, env_file: Optional[str]):
    """
    GroupNet training and the NRoLL learn-label loop on noisy labelled data.

    Every command takes an optional JSON or TOML experiment config plus --set overrides and
    writes its artifacts under <runs_dir>/<name>/.
    """
    console = Console(stderr=True, quiet=quiet)
    ctx.obj = NrollContext(verbosity=-1 if quiet else verbosity, env_file=env_file, console=console)


@nroll_cli.command("gen-data", context_settings=CONTEXT_SETTINGS)
@experiment_opts()
@click.pass_obj
def gen_data(obj: NrollContext, config_path: Optional[str], overrides: tuple[str, ...]):
    """Generate (or load), hold out, corrupt and split the dataset; write it as CSV + split manifest."""
    run = start_run(obj, config_path, overrides)
    with run.rundir:
        gen_data_impl(run.cfg, run.rundir, obj.console)


@nroll_cli.command("train", context_settings=CONTEXT_SETTINGS)
@experiment_opts()
@click.option("--baseline", is_flag=True, default=False, help="Train one Arc-softmax agent instead of the group.")
@click.pass_obj
def train(obj: NrollContext, config_path: Optional[str], overrides: tuple[str, ...], baseline: bool):
    """Train a GroupNet (or the single-agent baseline) on the whole noisy training set."""
    run = start_run(obj, config_path, overrides)
    with run.rundir:
        train_impl(run.cfg, run.rundir, obj.console, baseline=baseline, workers=run.workers)


@nroll_cli.command("nroll", context_settings=CONTEXT_SETTINGS)
@experiment_opts()
@click.pass_obj
def nroll(obj: NrollContext, config_path: Optional[str], overrides: tuple[str, ...]):
    """Pretrain on the labelled seed part, then label, merge and retrain part by part."""
    run = start_run(obj, config_path, overrides)
    with run.rundir:
        nroll_impl(run.cfg, run.rundir, obj.console, workers=run.workers)


@nroll_cli.command("estimate-noise", context_settings=CONTEXT_SETTINGS)
@experiment_opts()
@click.option(
    "--checkpoint", "-c",
    type=click.Path(exists=True, path_type=Path),
    required=False,
    help="Checkpoint file or loop_<t>/ directory whose embedding to use; raw features otherwise.",
)
@click.pass_obj
def estimate_noise(obj: NrollContext, config_path: Optional[str], overrides: tuple[str, ...], checkpoint: Optional[Path]):
    """Estimate the label noise rate of the training set from its same-label similarity distribution."""
    run = start_run(obj, config_path, overrides)
    with run.rundir:
        estimate_noise_impl(run.cfg, run.rundir, obj.console, checkpoint=checkpoint)


@nroll_cli.command("evaluate", context_settings=CONTEXT_SETTINGS)
@experiment_opts()
@click.option(
    "--checkpoint", "-c",
    type=click.Path(exists=True, path_type=Path),
    required=True,
    help="Checkpoint file or loop_<t>/ directory to evaluate.",
)
@click.pass_obj
def evaluate(obj: NrollContext, config_path: Optional[str], overrides: tuple[str, ...], checkpoint: Path):
    """Score saved agents on the held-out test set: accuracy, verification and rank-1."""
    run = start_run(obj, config_path, overrides)
    with run.rundir:
        evaluate_impl(run.cfg, run.rundir, obj.console, checkpoint=checkpoint)


def _report(message: str) -> None:
    err_console.print(f"[bold red]error:[/bold red] {escape(message)}", highlight=False)


def main(argv: Optional[list[str]] = None) -> int:
    """
    Entry point for the `nroll` program.

    Exit codes: 0 success, 2 invalid config or usage, 3 training diverged (abort.json
    written), 1 any other error.
    """
    install(show_locals=False, word_wrap=True, suppress=[click])

    if argv is None:
        argv = sys.argv[1:]

    try:
        rc = nroll_cli.main(args=argv, prog_name=PROGRAM_NAME, standalone_mode=False)
    except click.UsageError as e:
        e.show()
        return EXIT_CONFIG
    except click.ClickException as e:
        e.show()
        return e.exit_code
    except click.Abort:
        _report("aborted")
        return EXIT_ERROR
    except ConfigValidationError as e:
        _report(str(e))
        return EXIT_CONFIG
    except DivergedError as e:
        _report(f"{e}; see abort.json in the run directory")
        return EXIT_DIVERGED
    except NrollError as e:
        _report(str(e))
        return EXIT_ERROR
    return rc if isinstance(rc, int) else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
