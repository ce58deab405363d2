from .open_write_iff_change import open_write_iff_change, OpenOverwriteIffChange
from .atomic import write_text_atomic, write_bytes_atomic

__all__ = [
    "open_write_iff_change",
    "OpenOverwriteIffChange",
    "write_text_atomic",
    "write_bytes_atomic",
]
