"""Inequality check records shared by the symmetrization trace and the harness."""

from __future__ import annotations

import math
from dataclasses import dataclass

PASS = "pass"
FAIL = "fail"
NA = "n/a"

ANALYTIC_TOL = 1e-9


def grid_tolerance(err: float) -> float:
    """Tolerance for checks whose sides carry a propagated error estimate."""
    return max(1e-6, 3 * err)


def tolerance_for(err: float) -> float:
    return ANALYTIC_TOL if err == 0 else grid_tolerance(err)


@dataclass(frozen=True)
class Check:
    """One inequality ``lhs <= rhs``; the slack is ``rhs - lhs``.

    Informational checks are evaluated and reported but never fail a run.
    """

    name: str
    anchor: str
    lhs: float
    rhs: float
    tolerance: float = ANALYTIC_TOL
    applicable: bool = True
    informational: bool = False
    note: str = ""

    @property
    def slack(self) -> float:
        return self.rhs - self.lhs

    @property
    def holds(self) -> bool:
        return self.applicable and math.isfinite(self.slack) and self.slack >= -self.tolerance

    @property
    def status(self) -> str:
        if not self.applicable:
            return NA
        return PASS if self.holds else FAIL

    @property
    def blocking_failure(self) -> bool:
        return self.status == FAIL and not self.informational

    def to_dict(self) -> dict:
        d = {
            "name": self.name,
            "anchor": self.anchor,
            "lhs": _num(self.lhs),
            "rhs": _num(self.rhs),
            "slack": _num(self.slack) if self.applicable else None,
            "tolerance": self.tolerance,
            "status": self.status,
            "informational": self.informational,
        }
        if self.note:
            d["note"] = self.note
        return d


def _num(x: float):
    x = float(x)
    return x if math.isfinite(x) else str(x)


def na(name: str, anchor: str, note: str = "", informational: bool = False) -> Check:
    return Check(name, anchor, math.nan, math.nan, applicable=False, informational=informational, note=note)
