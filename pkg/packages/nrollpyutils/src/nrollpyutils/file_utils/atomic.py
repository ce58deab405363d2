from pathlib import Path

from .open_write_iff_change import open_write_iff_change


def write_text_atomic(path: str | Path, text: str) -> bool:
    """Write `text` to `path` through a temp file; returns True when the file changed."""
    cm = open_write_iff_change(path, "w")
    with cm as f:
        f.write(text)
    return bool(cm.changed)


def write_bytes_atomic(path: str | Path, data: bytes) -> bool:
    cm = open_write_iff_change(path, "wb")
    with cm as f:
        f.write(data)
    return bool(cm.changed)
