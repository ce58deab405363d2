from __future__ import annotations

import atexit
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, ClassVar, Optional

from rich.console import Console
from rich.logging import RichHandler
from rich.traceback import install

log = logging.getLogger(__name__)

# width of the run.log console; wide enough that iteration lines never wrap
DEFAULT_LOG_FILE_WIDTH = 160

_open_log_files: list[IO[str]] = []


def close_log_files() -> None:
    """Close every run.log handle opened by configure_rich_root_logger. Registered with atexit."""
    while _open_log_files:
        f = _open_log_files.pop()
        if not f.closed:
            f.flush()
            f.close()


atexit.register(close_log_files)


@dataclass
class LoggingLevels:
    SILENT: ClassVar[int] = logging.CRITICAL + 10
    logging.addLevelName(SILENT, "SILENT")  # type: ignore

    stderr_level: int = field(default=logging.ERROR)
    file_level: int = field(default=logging.DEBUG)

    @classmethod
    def from_verbosity(cls, verbosity: int) -> "LoggingLevels":
        match verbosity:
            case v if v <= -1:
                stderr_level = cls.SILENT
            case 1:
                stderr_level = logging.WARNING
            case 2:
                stderr_level = logging.INFO
            case v if v >= 3:
                stderr_level = logging.DEBUG
            case _:
                stderr_level = logging.ERROR
        return cls(stderr_level=stderr_level)

    @property
    def stderr_level_str(self) -> str:
        return logging.getLevelName(self.stderr_level)

    @property
    def file_level_str(self) -> str:
        return logging.getLevelName(self.file_level)

    @property
    def stderr_quiet(self) -> bool:
        return self.stderr_level >= self.SILENT

    def __str__(self) -> str:
        return f"LoggingLevels(stderr_level={self.stderr_level_str}, file_level={self.file_level_str})"


def _rich_handler(console: Console, level: int, show_path: bool) -> RichHandler:
    import click  # only so click frames can be hidden from tracebacks

    return RichHandler(
        console=console,
        level=level,
        show_level=True,
        show_path=show_path,
        enable_link_path=False,
        rich_tracebacks=True,
        tracebacks_show_locals=False,
        tracebacks_width=120,
        tracebacks_word_wrap=True,
        tracebacks_suppress=[click],
        omit_repeated_times=False,
    )


def configure_rich_root_logger(
    verbosity: int | LoggingLevels = 0,
    err_console: Optional[Console] = None,
    log_file_path: Optional[str | Path] = None,
    log_file_width: int = DEFAULT_LOG_FILE_WIDTH,
) -> Optional[Console]:
    """
    Configure the root logger for an `nroll` command.

    Usage:
        At the top of each module:
        ```python
        import logging
        log = logging.getLogger(__name__)
        ```

        In the CLI, once the run directory is known:
        ```python
        configure_rich_root_logger(verbosity=args.verbosity, log_file_path=run_dir / "run.log")
        ```

    Args:
        verbosity: -1 silent, 0 errors, 1 warnings, 2 info, 3 debug (or a prepared LoggingLevels)
        err_console: console for stderr output; one is created when omitted
        log_file_path: when given, every record at `file_level` and above is appended there
        log_file_width: console width used for the log file

    Returns:
        The console writing the log file, or None when no file was requested.
    """
    if isinstance(verbosity, int):
        levels = LoggingLevels.from_verbosity(verbosity)
    elif isinstance(verbosity, LoggingLevels):
        levels = verbosity
    else:
        raise ValueError(f"Invalid verbosity: {verbosity}")

    if err_console is None:
        err_console = Console(stderr=True)
    if levels.stderr_quiet:
        err_console.quiet = True

    # a reconfigure replaces the handlers, so files from an earlier call are done
    close_log_files()
    file_console: Optional[Console] = None
    if log_file_path is not None:
        Path(log_file_path).parent.mkdir(parents=True, exist_ok=True)
        log_file = open(log_file_path, "a", encoding="utf-8")
        _open_log_files.append(log_file)
        file_console = Console(
            file=log_file,
            width=log_file_width,
            no_color=True,
            force_terminal=False,
        )

    import click
    for c in [err_console] + ([file_console] if file_console is not None else []):
        install(console=c, show_locals=False, suppress=[click], word_wrap=True)

    show_path = err_console.width is not None and err_console.width >= 100
    handlers: list[logging.Handler] = [_rich_handler(err_console, levels.stderr_level, show_path)]
    if file_console is not None:
        handlers.append(_rich_handler(file_console, levels.file_level, True))

    logging.basicConfig(
        force=True,  # in case we're reconfiguring logging
        level=logging.NOTSET,
        format="%(message)s",
        datefmt="[%X]",
        handlers=handlers,
    )
    log.debug("logger configured: %s", levels)
    return file_console
