from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Tuple

from ..model import Action, BudgetExceeded


@dataclass
class Budget:
    """Cap on explored states plus an optional wall-clock limit; `cancel` is polled by long searches."""

    states: Optional[int] = None
    seconds: Optional[float] = None
    started: float = field(default_factory=time.monotonic)

    def cancelled(self) -> bool:
        return self.seconds is not None and time.monotonic() - self.started > self.seconds

    def check(self, explored: int):
        if self.states is not None and explored > self.states:
            raise BudgetExceeded(f"explored more than {self.states} states", explored)
        if self.cancelled():
            raise BudgetExceeded(f"ran longer than {self.seconds} s", explored)


@dataclass
class Verdict:
    command: str
    answer: bool
    witness: Optional[Tuple[Action, ...]] = None
    k: Optional[int] = None
    states: int = 0
    millis: float = 0.0
    detail: Dict[str, Any] = field(default_factory=dict)

    def __bool__(self):
        return self.answer

    def to_json(self) -> Dict[str, Any]:
        out = {
            "command": self.command,
            "verdict": "yes" if self.answer else "no",
            "witness": [str(a) for a in self.witness] if self.witness is not None else None,
            "stats": {"states": self.states, "millis": round(self.millis, 3)},
        }
        if self.k is not None or self.command in ("infer-k", "check ksync"):
            out["k"] = self.k
        return out


class Timer:
    def __init__(self):
        self.t0 = time.perf_counter()

    @property
    def millis(self) -> float:
        return (time.perf_counter() - self.t0) * 1000.0
