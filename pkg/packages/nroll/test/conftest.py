"""
Ensure local packages are importable when running pytest without editable installs.
"""
import sys
from pathlib import Path

repo_root = Path(__file__).resolve().parents[3]
src_paths = [
    repo_root / "packages" / "nrolltools" / "src",
    repo_root / "packages" / "nrollpyutils" / "src",
    repo_root / "packages" / "nroll" / "src",
]
for p in src_paths:
    ps = str(p)
    if ps not in sys.path:
        sys.path.insert(0, ps)


def pytest_collection_modifyitems(config, items):
    import os

    import pytest

    if os.environ.get("NROLL_ACCEPTANCE") == "1":
        return
    skip = pytest.mark.skip(reason="acceptance experiment; set NROLL_ACCEPTANCE=1 to run")
    for item in items:
        if item.get_closest_marker("acceptance"):
            item.add_marker(skip)
