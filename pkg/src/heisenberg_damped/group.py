"""Structure constants of the Heisenberg group H_n."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = ["GroupParams"]


@dataclass(frozen=True)
class GroupParams:
    """H_n with its homogeneous dimension Q = 2n + 2 and Plancherel constant c_n.

    ``plancherel_constant`` defaults to (2 pi)^-(3n+1). Pass a value to use a
    different normalization of the Plancherel measure c_n |lambda|^n d lambda.
    """

    n: int
    plancherel_constant: float | None = None

    def __post_init__(self):
        if isinstance(self.n, bool) or not (isinstance(self.n, (int, np.integer)) and self.n >= 1):
            raise ValueError(f"n must be a positive integer, got {self.n!r}")
        if self.plancherel_constant is not None and not self.plancherel_constant > 0:
            raise ValueError("plancherel_constant must be positive")

    @property
    def Q(self) -> int:
        return 2 * self.n + 2

    @property
    def c_n(self) -> float:
        if self.plancherel_constant is not None:
            return float(self.plancherel_constant)
        return (2.0 * math.pi) ** -(3 * self.n + 1)
