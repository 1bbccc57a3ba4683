"""Calibration of a divergence against a biased coin.

``d0`` is mapped to the probability ``p`` in [0.5, 1] of a coin whose order-a
divergence from a fair coin equals ``d0``. For ``a != 1`` this solves
``2^(1-a) exp((a-1) d0) = p^a + (1-p)^a`` by bisection; for ``a = 1`` the
closed form ``p = 0.5 + 0.5 sqrt(1 - exp(-2 d0))`` is used.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import CalibrationSaturatedError, InfiniteDivergenceError, InvalidParameterError
from .models import RenyiOrder

LN2 = math.log(2.0)
MAX_ITER = 200
BRACKET_TOL = 1e-12


@dataclass(frozen=True)
class Calibration:
    p: float
    d0: float
    order: RenyiOrder
    solver_iterations: int = 0


def _order(order) -> RenyiOrder:
    return order if isinstance(order, RenyiOrder) else RenyiOrder(order)


def coin_power_sum(p: float, a: float) -> float:
    """``p^a + (1-p)^a``."""
    return p**a + (1.0 - p) ** a


def calibration_residual(p: float, d0: float, order) -> float:
    a = _order(order).a
    return abs(2.0 ** (1.0 - a) * math.exp((a - 1.0) * d0) - coin_power_sum(p, a))


def calibrate(d0: float, order) -> Calibration:
    order = _order(order)
    a = order.a
    d0 = float(d0)
    if not d0 >= 0.0:
        raise InvalidParameterError(f"d0 must be non-negative, got {d0!r}")
    if d0 == 0.0:
        return Calibration(0.5, 0.0, order)
    if order.is_kl_limit:
        return Calibration(0.5 + 0.5 * math.sqrt(-math.expm1(-2.0 * d0)), d0, order)
    if d0 > LN2:
        raise CalibrationSaturatedError(f"d0 = {d0} exceeds ln 2; calibration saturates at p = 1")

    target = 2.0 ** (1.0 - a) * math.exp((a - 1.0) * d0)
    # g(p) = p^a + (1-p)^a is increasing on [0.5, 1] for a > 1, decreasing for a < 1
    sign = 1.0 if a > 1.0 else -1.0
    lo, hi = 0.5, 1.0
    iterations = 0
    while iterations < MAX_ITER:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        iterations += 1
        if sign * (coin_power_sum(mid, a) - target) < 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo < BRACKET_TOL and calibration_residual(mid, d0, a) <= 1e-13:
            break
    p = lo if calibration_residual(lo, d0, a) <= calibration_residual(hi, d0, a) else hi
    return Calibration(p, d0, order, iterations)


def calibration_inverse(p: float, order) -> float:
    """Divergence between a fair coin and a ``p``-coin: the inverse of :func:`calibrate`."""
    order = _order(order)
    a = order.a
    p = float(p)
    if not 0.5 <= p <= 1.0:
        raise InvalidParameterError(f"p must lie in [0.5, 1], got {p!r}")
    if order.is_kl_limit:
        if p == 1.0:
            raise InfiniteDivergenceError("p = 1 corresponds to an infinite divergence at a = 1")
        q = 2.0 * p - 1.0
        return -0.5 * math.log1p(-q * q)
    return math.log(2.0 ** (a - 1.0) * coin_power_sum(p, a)) / (a - 1.0)
