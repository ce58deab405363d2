try:
    from ._version import __version__
except Exception:
    try:
        from importlib.metadata import version as _v
        __version__ = _v("nrolltools")
    except Exception:
        __version__ = "0.0.0.dev0+gunknown"

from . import constants
from nrollpyutils.version_utils import get_version_str


def get_nrolltools_version_str(short_version: bool = True) -> str:
    return get_version_str("nrolltools", short_version=short_version)


__all__ = [
    "constants",
    "get_nrolltools_version_str",
]
