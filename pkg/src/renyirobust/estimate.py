"""Result container for Monte Carlo and closed-form estimates."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import kernels

# kurtosis of the summed quantity above which its variance estimate is not trusted
HEAVY_TAIL_KURTOSIS = 1e3
LARGE_SE_RATIO = 0.5
LOG_FLOAT_MAX = math.log(np.finfo(np.float64).max)

FLAG_UNRELIABLE = "unreliable-variance"
FLAG_LARGE_SE = "large-std-error"
FLAG_OVERFLOW = "overflow"


class Method(str, enum.Enum):
    MONTE_CARLO = "MonteCarlo"
    CLOSED_FORM = "ClosedForm"


@dataclass(frozen=True)
class Estimate:
    """A point value with its standard error.

    ``log_value`` is set whenever the value was assembled in log space; if the
    value itself overflows double precision it is reported as ``inf`` with the
    ``overflow`` flag and ``log_value`` stays finite.
    """

    value: float
    std_error: float = 0.0
    draws: int = 0
    method: Method = Method.CLOSED_FORM
    seed: Optional[int] = None
    flags: tuple[str, ...] = field(default_factory=tuple)
    log_value: Optional[float] = None

    def __post_init__(self):
        if math.isnan(self.value) or math.isnan(self.std_error):
            raise ValueError("estimates are never NaN")
        if self.method is Method.CLOSED_FORM and self.std_error != 0.0:
            raise ValueError("closed-form estimates carry no standard error")

    @property
    def reliable(self) -> bool:
        return FLAG_UNRELIABLE not in self.flags and FLAG_OVERFLOW not in self.flags

    def within(self, target: float, k: float = 3.0, slack: float = 0.0) -> bool:
        return abs(self.value - target) <= max(k * self.std_error, slack)


@dataclass(frozen=True)
class SampleVariance:
    variance: float
    std_error: float
    kurtosis: float


def sample_variance(x: np.ndarray) -> SampleVariance:
    """Unbiased variance with its delta-method standard error.

    ``SE^2 ~ (mu4 - sigma^4 (n-3)/(n-1)) / n`` from the 2nd and 4th central
    moments, accumulated in one pass by :func:`kernels.central_moments`.
    """
    n, _, m2, _, m4 = kernels.central_moments(np.ascontiguousarray(x, dtype=np.float64))
    if n < 2:
        raise ValueError("need at least two values for a variance")
    var = m2 / (n - 1)
    mu2 = m2 / n
    mu4 = m4 / n
    se2 = (mu4 - mu2 * mu2 * (n - 3) / (n - 1)) / n
    # divide twice: mu2 * mu2 underflows for tiny spreads
    kurt = (mu4 / mu2) / mu2 if mu2 > 0.0 else 0.0
    return SampleVariance(var, math.sqrt(max(se2, 0.0)), kurt)
