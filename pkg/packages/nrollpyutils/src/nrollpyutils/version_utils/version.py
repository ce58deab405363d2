"""Version utilities."""

from importlib.metadata import PackageNotFoundError, version


def get_version_str(package: str = "nrollpyutils", short_version: bool = True) -> str:
    """Installed version of `package`, trimmed to major.minor.patch unless `short_version` is False."""
    try:
        full = version(package)
    except PackageNotFoundError:
        full = "0.0.0.dev0+gunknown"
    if not short_version:
        return full
    return ".".join(full.split(".")[:3])
