"""Environment defaults: process environment and an optional `-e/--env-file`."""

from __future__ import annotations

from pathlib import Path
from typing import Any, Mapping, Optional

from nroll.errors import ConfigValidationError
from nrollpyutils.envcfg import DefaultValue, load_env_file, resolve_defaults
from nrollpyutils.system import THREADS_ENV_VAR

from ..constants import RUNS_DIR_DEFAULT, RUNS_DIR_ENV_VAR

DEFAULT_ENV_CFG = {
    THREADS_ENV_VAR: DefaultValue(None, int),
    RUNS_DIR_ENV_VAR: DefaultValue(RUNS_DIR_DEFAULT, str),
}


def get_env_defaults(
    env_file: Optional[str | Path] = None, environ: Optional[Mapping[str, str]] = None
) -> dict[str, Any]:
    try:
        file_cfg = load_env_file(env_file, DEFAULT_ENV_CFG) if env_file is not None else None
        return resolve_defaults(DEFAULT_ENV_CFG, file_cfg, environ)
    except (OSError, ValueError) as e:
        raise ConfigValidationError([f"environment: {e}"]) from e
