import logging
from pathlib import Path

import pytest
from rich.console import Console

from nrollpyutils.logging import LoggingLevels, close_log_files, configure_rich_root_logger

pytestmark = [pytest.mark.unit]


class TestLoggingLevels:
    @pytest.mark.parametrize(
        "verbosity,expected",
        [
            (-1, LoggingLevels.SILENT),
            (0, logging.ERROR),
            (1, logging.WARNING),
            (2, logging.INFO),
            (3, logging.DEBUG),
            (5, logging.DEBUG),
        ],
    )
    def test_from_verbosity(self, verbosity, expected):
        assert LoggingLevels.from_verbosity(verbosity).stderr_level == expected

    def test_log_file_gets_debug_records(self, tmp_path: Path):
        log_path = tmp_path / "run" / "run.log"
        console = configure_rich_root_logger(0, err_console=Console(stderr=True, quiet=True), log_file_path=log_path)
        assert console is not None
        logging.getLogger("nroll.test").debug("hello from debug")
        console.file.flush()
        assert "hello from debug" in log_path.read_text(encoding="utf-8")
        logging.basicConfig(force=True, handlers=[logging.NullHandler()])
        close_log_files()

    def test_log_file_handles_are_closed(self, tmp_path: Path):
        quiet = Console(stderr=True, quiet=True)
        first = configure_rich_root_logger(0, err_console=quiet, log_file_path=tmp_path / "a.log")
        second = configure_rich_root_logger(0, err_console=quiet, log_file_path=tmp_path / "b.log")
        assert first.file.closed and not second.file.closed
        logging.getLogger("nroll.test").warning("last words")
        close_log_files()
        assert second.file.closed
        assert "last words" in (tmp_path / "b.log").read_text(encoding="utf-8")
        logging.basicConfig(force=True, handlers=[logging.NullHandler()])

    def test_bad_verbosity(self):
        with pytest.raises(ValueError):
            configure_rich_root_logger("loud")  # type: ignore[arg-type]
