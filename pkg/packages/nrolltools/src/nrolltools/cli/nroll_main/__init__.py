# Re-export CLI entry for project.scripts
from .__main__ import main, nroll_cli  # noqa: F401
