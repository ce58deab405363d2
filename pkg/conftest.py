import os

import pytest

ACCEPTANCE_ENV_VAR = "NROLL_ACCEPTANCE"


def pytest_collection_modifyitems(config, items):
    if os.environ.get(ACCEPTANCE_ENV_VAR) == "1":
        return
    skip = pytest.mark.skip(reason=f"acceptance experiment; set {ACCEPTANCE_ENV_VAR}=1 to run")
    for item in items:
        if item.get_closest_marker("acceptance"):
            item.add_marker(skip)
