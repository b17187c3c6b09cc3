"""Enumeration budget shared by the scanning routines."""

from __future__ import annotations

import os
from dataclasses import dataclass

__all__ = ["Budget", "BudgetExceeded", "DEFAULT_BUDGET", "default_budget"]

#: Point evaluations (points x polynomials) allowed per run.
DEFAULT_BUDGET = 5 * 10**9
BUDGET_ENV = "CUTPASTE_BUDGET"


class BudgetExceeded(RuntimeError):
    pass


@dataclass
class Budget:
    cap: int = DEFAULT_BUDGET
    used: int = 0

    def charge(self, n: int, what: str = "") -> None:
        """Reserve ``n`` evaluations before doing the work; never truncates."""
        if self.used + n > self.cap:
            raise BudgetExceeded(
                f"{what or 'enumeration'} needs {n} evaluations, "
                f"{self.cap - self.used} of {self.cap} left"
            )
        self.used += n


def default_budget() -> Budget:
    return Budget(int(float(os.environ.get(BUDGET_ENV, DEFAULT_BUDGET))))
