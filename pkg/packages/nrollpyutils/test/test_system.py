"""Unit tests for nrollpyutils.system."""

import pytest

from nrollpyutils.system import THREADS_ENV_VAR, get_nprocs, get_worker_count

pytestmark = [pytest.mark.unit]


class TestSystem:
    def test_get_nprocs(self):
        assert get_nprocs() > 0

    def test_explicit_request_wins(self):
        assert get_worker_count(3, env={THREADS_ENV_VAR: "7"}) == 3

    def test_env_var(self):
        assert get_worker_count(env={THREADS_ENV_VAR: "2"}) == 2

    def test_bad_env_var_falls_back(self):
        assert get_worker_count(env={THREADS_ENV_VAR: "lots"}) == get_nprocs()
        assert get_worker_count(env={THREADS_ENV_VAR: "0"}) == get_nprocs()

    def test_invalid_request(self):
        with pytest.raises(ValueError):
            get_worker_count(0)
