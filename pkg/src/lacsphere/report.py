from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from .errors import DomainError


@dataclass
class MomentReport:
    """Outcome of a moment, norm or survey computation.

    ``extra`` carries operation-specific side values (bounds, oracle values,
    truncation errors) so that the CLI can serialize them without special cases.
    """

    parameters: dict[str, Any]
    value: float
    fitted_exponent: float | None = None
    oracle_checked: bool = False
    extra: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not (self.value >= 0):
            raise DomainError(f"report value must be nonnegative, got {self.value}")

    def to_dict(self) -> dict[str, Any]:
        return {
            "parameters": _jsonable(self.parameters),
            "value": float(self.value),
            "fitted_exponent": None if self.fitted_exponent is None else float(self.fitted_exponent),
            "oracle_checked": bool(self.oracle_checked),
            "extra": _jsonable(self.extra),
        }


@dataclass(frozen=True)
class LogLogFit:
    slope: float
    intercept: float
    residual: float
    n_points: int


def fit_loglog(x: Sequence[float], y: Sequence[float]) -> LogLogFit:
    """Ordinary least squares of log(y) on log(x).

    ``residual`` is the root-mean-square residual in log space.
    """
    xs = np.asarray(x, dtype=float)
    ys = np.asarray(y, dtype=float)
    if xs.shape != ys.shape or xs.size < 2:
        raise DomainError("need at least two (x, y) pairs of equal length")
    if np.any(xs <= 0) or np.any(ys <= 0):
        raise DomainError("log-log fit requires strictly positive data")
    lx, ly = np.log(xs), np.log(ys)
    slope, intercept = np.polyfit(lx, ly, 1)
    res = ly - (slope * lx + intercept)
    return LogLogFit(float(slope), float(intercept), float(math.sqrt(np.mean(res**2))), int(xs.size))


def _jsonable(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, int) and abs(obj) > 2**53:
        return str(obj)
    return obj
