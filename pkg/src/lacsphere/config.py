"""Resource limits.

``LACSPHERE_WORK_BUDGET`` overrides the generic work budget (an integer count
of elementary operations); the other caps are fixed.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, replace

from .errors import BudgetError

WORK_ENV = "LACSPHERE_WORK_BUDGET"


@dataclass(frozen=True)
class Limits:
    factor_max: int = 10**12
    direct_ramanujan_q: int = 10**4
    work: int = 10**9
    factorial_mu: int = 5000
    grid_points: int = 2**25


def current_limits() -> Limits:
    lim = Limits()
    raw = os.environ.get(WORK_ENV)
    if raw:
        try:
            lim = replace(lim, work=int(float(raw)))
        except ValueError:
            raise BudgetError(f"{WORK_ENV}={raw!r} is not a number") from None
    return lim


def require_work(cost: int | float, what: str) -> None:
    lim = current_limits().work
    if cost > lim:
        raise BudgetError(f"{what}: estimated cost {int(cost)} exceeds work budget {lim}")
