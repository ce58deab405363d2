from .version import get_version_str

__all__ = [
    "get_version_str",
]
