"""GroupNet and NRoLL at desk scale."""

try:
    from ._version import __version__
except Exception:
    try:
        from importlib.metadata import version as _v
        __version__ = _v("nroll")
    except Exception:
        __version__ = "0.0.0.dev0+gunknown"

__all__ = [
    "baseline",
    "datasets",
    "errors",
    "eval",
    "groupnet",
    "learner",
    "loop",
    "noise",
]
