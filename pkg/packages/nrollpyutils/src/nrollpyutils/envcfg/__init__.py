from .envcfg import DefaultValue, load_env_file, resolve_defaults

__all__ = [
    "DefaultValue",
    "load_env_file",
    "resolve_defaults",
]
