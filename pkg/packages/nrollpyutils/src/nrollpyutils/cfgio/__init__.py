from .cfgio import dumps, dumpf, loadf, loads, ConfigFormat, format_for_path

__all__ = [
    "dumps",
    "dumpf",
    "loadf",
    "loads",
    "ConfigFormat",
    "format_for_path",
]
