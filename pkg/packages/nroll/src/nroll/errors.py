"""Exception hierarchy shared by every nroll module."""

from __future__ import annotations

from pathlib import Path
from typing import Any, Iterable, Optional, Sequence


class NrollError(Exception):
    """Base class for all nroll errors."""


class NumericOverflowError(NrollError, ArithmeticError):
    def __init__(self, where: str = ""):
        super().__init__("numeric overflow" + (f" in {where}" if where else ""))


class DivergedError(NrollError, ArithmeticError):
    """Raised when a gradient or parameter stops being finite. `state` carries whatever the caller could save."""

    def __init__(self, detail: str = "", state: Optional[Any] = None):
        super().__init__("diverged" + (f": {detail}" if detail else ""))
        self.state = state


class MarginDomainError(NrollError, ValueError):
    pass


class EmptyBatchError(NrollError, ValueError):
    pass


class EmptyEffectiveBatch(NrollError):
    """HC and MC_ms are both empty; the caller skips the update."""

    def __init__(self, agent: int):
        super().__init__(f"empty effective batch for agent {agent}")
        self.agent = agent


class ExchangeConfigError(NrollError, ValueError):
    pass


class NoPairsError(NrollError, ValueError):
    def __init__(self):
        super().__init__("no pairs: no class has at least 2 members")


class InsufficientDataError(NrollError, ValueError):
    def __init__(self, got: int, need: int):
        super().__init__(f"insufficient data: {got} samples, need at least {need}")
        self.got = got
        self.need = need


class EstimationError(NrollError):
    pass


class DatasetError(NrollError, ValueError):
    pass


class DatasetParseError(DatasetError):
    def __init__(self, path: str | Path, line: int, message: str):
        super().__init__(f"{path}:{line}: {message}")
        self.path = Path(path)
        self.line = line


class ClassTooSmallError(DatasetError):
    def __init__(self, classes: Iterable[int], needed: int):
        self.classes = sorted(int(c) for c in classes)
        super().__init__(f"classes with fewer than {needed} members: {self.classes}")


class IdCollisionError(DatasetError):
    def __init__(self, ids: Iterable[int]):
        self.ids = sorted(int(i) for i in ids)
        shown = self.ids[:10]
        more = "" if len(self.ids) <= 10 else f" (+{len(self.ids) - 10} more)"
        super().__init__(f"id collision with labelled set: {shown}{more}")


class VerificationInputError(NrollError, ValueError):
    pass


class CheckpointError(NrollError):
    pass


class ConfigValidationError(NrollError, ValueError):
    """One or more config problems; `problems` lists each with its dotted key path."""

    def __init__(self, problems: Sequence[str]):
        self.problems = list(problems)
        super().__init__("invalid config:\n  " + "\n  ".join(self.problems))
