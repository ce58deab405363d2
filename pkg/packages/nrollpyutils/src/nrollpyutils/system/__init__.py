from .nprocs import get_nprocs, get_worker_count, THREADS_ENV_VAR

__all__ = ["get_nprocs", "get_worker_count", "THREADS_ENV_VAR"]
