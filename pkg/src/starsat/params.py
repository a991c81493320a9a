"""Edge-probability parameters shared by samplers, bounds, and bands."""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class ProbParams:
    """An edge probability p with its derived quantities.

    q = 1 - p is the non-edge probability and b = 1/q the logarithm base
    that the concentration bands are expressed in.  p must lie strictly
    between 0 and 1: the degenerate endpoints make b meaningless, and the
    samplers accept bare floats for them instead.
    """

    p: float

    def __post_init__(self) -> None:
        if not 0.0 < self.p < 1.0:
            raise ValueError(f"p must satisfy 0 < p < 1, got {self.p}")

    @property
    def q(self) -> float:
        return 1.0 - self.p

    @property
    def b(self) -> float:
        return 1.0 / self.q

    def log_b(self, x: float) -> float:
        """Logarithm of x in base b = 1/(1-p)."""
        if x <= 0.0:
            raise ValueError(f"log_b needs a positive argument, got {x}")
        return math.log(x) / math.log(self.b)
