import logging
import math
import os
from typing import Mapping, Optional

log = logging.getLogger(__name__)

THREADS_ENV_VAR = "COTRAIN_THREADS"


def get_nprocs() -> int:
    """Return an estimate of the effective CPU count for the current process."""

    try:
        return len(os.sched_getaffinity(0))
    except AttributeError:
        pass

    try:
        path_v2 = "/sys/fs/cgroup/cpu.max"
        if os.path.exists(path_v2):
            with open(path_v2, encoding="utf-8") as f:
                quota, period = f.read().split()
            if quota != "max":
                return max(1, math.ceil(int(quota) / int(period)))
    except Exception:  # noqa: BLE001 - cgroup probing is best-effort
        pass

    return os.cpu_count() or 1


def get_worker_count(requested: Optional[int] = None, env: Optional[Mapping[str, str]] = None) -> int:
    """
    Number of worker threads for per-agent phases.

    An explicit `requested` wins, then the COTRAIN_THREADS environment variable, then
    the effective CPU count. The result is always at least 1.
    """
    if requested is not None:
        if requested < 1:
            raise ValueError(f"worker count must be >= 1, got {requested}")
        return requested

    env = os.environ if env is None else env
    raw = env.get(THREADS_ENV_VAR)
    if raw:
        try:
            value = int(raw)
        except ValueError:
            log.warning("ignoring non-integer %s=%r", THREADS_ENV_VAR, raw)
        else:
            if value >= 1:
                return value
            log.warning("ignoring %s=%r (must be >= 1)", THREADS_ENV_VAR, raw)
    return get_nprocs()
