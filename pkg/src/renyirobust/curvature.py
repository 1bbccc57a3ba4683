"""Local curvature of the Renyi divergence at zero contamination.

For the epsilon-contaminated class the curvature is ``a * Var[q/pi0]`` and for
the geometric class ``a * Var[log(q/pi0)]``, both under the base posterior.
The Monte Carlo estimators sample the base posterior; the closed forms cover
the location Normal and, as independent oracles, the Beta/Dirichlet families.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np
from scipy.special import polygamma

from .errors import FamilyMismatchError, InvalidParameterError, MomentDoesNotExistError
from .estimate import (
    FLAG_LARGE_SE,
    FLAG_OVERFLOW,
    FLAG_UNRELIABLE,
    HEAVY_TAIL_KURTOSIS,
    LARGE_SE_RATIO,
    LOG_FLOAT_MAX,
    Estimate,
    Method,
    sample_variance,
)
from .models import (
    Beta,
    ContaminationClass,
    Dirichlet,
    Normal,
    NormalStats,
    RenyiOrder,
    base_posterior,
    contaminant_of,
    log_density_ratio,
    log_multivariate_beta,
)
from .samplers import SeededStream, sample_posterior

DEFAULT_DRAWS = 10**6
MIN_DRAWS = 100


def _order(order) -> RenyiOrder:
    return order if isinstance(order, RenyiOrder) else RenyiOrder(order)


@dataclass(frozen=True)
class CurvatureRequest:
    prior: Union[Beta, Dirichlet, Normal]
    c: float
    order: RenyiOrder
    class_tag: ContaminationClass
    stats: object
    mc_draws: int = DEFAULT_DRAWS
    stream: SeededStream = field(default_factory=lambda: SeededStream(0))

    def __post_init__(self):
        object.__setattr__(self, "order", _order(self.order))
        object.__setattr__(self, "class_tag", ContaminationClass.parse(self.class_tag))
        if int(self.mc_draws) != self.mc_draws or self.mc_draws < MIN_DRAWS:
            raise InvalidParameterError(f"mc_draws must be an integer >= {MIN_DRAWS}")
        object.__setattr__(self, "mc_draws", int(self.mc_draws))
        if not float(self.c) > 0.0:
            raise InvalidParameterError("contaminant scale c must be positive")

    @property
    def contaminant(self):
        return contaminant_of(self.prior, self.c)


def _base_draws(req: CurvatureRequest) -> np.ndarray:
    return sample_posterior(base_posterior(req.prior, req.stats), req.stream, req.mc_draws)


def _mc_flags(value, se, kurtosis):
    flags = []
    if kurtosis > HEAVY_TAIL_KURTOSIS:
        flags.append(FLAG_UNRELIABLE)
    if value > 0.0 and se > LARGE_SE_RATIO * value:
        flags.append(FLAG_LARGE_SE)
    return flags


def _zero_mc(req):
    return Estimate(0.0, 0.0, req.mc_draws, Method.MONTE_CARLO, req.stream.seed)


def curvature_epsilon_mc(req: CurvatureRequest) -> Estimate:
    """``a * Var[q(theta)/pi0(theta)]`` over base-posterior draws."""
    if req.contaminant == req.prior:
        return _zero_mc(req)
    a = req.order.a
    lr = log_density_ratio(req.prior, req.contaminant, _base_draws(req))
    # Var[exp(lr)] = exp(2 M) Var[exp(lr - M)] keeps the moments representable
    shift = float(lr.max())
    sv = sample_variance(np.exp(lr - shift))
    flags = _mc_flags(sv.variance, sv.std_error, sv.kurtosis)
    if sv.variance <= 0.0:
        return Estimate(0.0, 0.0, req.mc_draws, Method.MONTE_CARLO, req.stream.seed, tuple(flags))
    log_value = math.log(a) + 2.0 * shift + math.log(sv.variance)
    if log_value >= LOG_FLOAT_MAX:
        flags.append(FLAG_OVERFLOW)
        value = se = math.inf
    else:
        log_scale = math.log(a) + 2.0 * shift
        value = math.exp(log_value)
        se = math.exp(log_scale + math.log(sv.std_error)) if sv.std_error > 0.0 else 0.0
        if math.isinf(se):
            flags.append(FLAG_OVERFLOW)
    return Estimate(value, se, req.mc_draws, Method.MONTE_CARLO, req.stream.seed, tuple(flags), log_value)


def curvature_geometric_mc(req: CurvatureRequest) -> Estimate:
    """``a * Var[log(q(theta)/pi0(theta))]`` over base-posterior draws."""
    if req.contaminant == req.prior:
        return _zero_mc(req)
    a = req.order.a
    lr = log_density_ratio(req.prior, req.contaminant, _base_draws(req))
    sv = sample_variance(lr)
    value, se = a * sv.variance, a * sv.std_error
    flags = _mc_flags(value, se, sv.kurtosis)
    return Estimate(value, se, req.mc_draws, Method.MONTE_CARLO, req.stream.seed, tuple(flags))


def curvature_mc(req: CurvatureRequest) -> Estimate:
    if req.class_tag is ContaminationClass.GEOMETRIC:
        return curvature_geometric_mc(req)
    return curvature_epsilon_mc(req)


# --------------------------------------------------------------------------
# closed forms
# --------------------------------------------------------------------------


def curvature_normal_geometric_closed(prior: Normal, c: float, a, n: int) -> Estimate:
    """``a * theta0^2 (c-1)^2 / sigma0^4 * (1/sigma0^2 + n)^-1``; free of the sample mean."""
    if not isinstance(prior, Normal):
        raise FamilyMismatchError("closed form needs a Normal location prior")
    a = _order(a).a
    if n < 1:
        raise InvalidParameterError("sample size must be >= 1")
    s2 = prior.variance
    post_var = 1.0 / (1.0 / s2 + n)
    slope = prior.mean * (c - 1.0) / s2
    return Estimate(a * slope * slope * post_var)


def curvature_normal_epsilon_closed(prior: Normal, c: float, a, stats: NormalStats) -> Estimate:
    """``a * Var[q/pi0]`` from the posterior moment generating function.

    With ``k = theta0 (c-1) / sigma0^2`` the ratio is ``exp(k theta + b)`` and
    its variance is ``exp(2b + 2k mu + k^2 s^2) * expm1(k^2 s^2)``, evaluated in
    log space.
    """
    if not isinstance(prior, Normal):
        raise FamilyMismatchError("closed form needs a Normal location prior")
    a = _order(a).a
    post = base_posterior(prior, stats)
    s2 = prior.variance
    k = prior.mean * (c - 1.0) / s2
    b = 0.5 * prior.mean**2 * (1.0 - c * c) / s2
    kk = k * k * post.variance
    if kk == 0.0:
        return Estimate(0.0, log_value=-math.inf)
    # log(expm1(x)) without overflow for large x
    log_expm1 = kk + math.log1p(-math.exp(-kk)) if kk > 1.0 else math.log(math.expm1(kk))
    log_value = math.log(a) + 2.0 * b + 2.0 * k * post.mean + kk + log_expm1
    if log_value >= LOG_FLOAT_MAX:
        return Estimate(math.inf, flags=(FLAG_OVERFLOW,), log_value=log_value)
    return Estimate(math.exp(log_value), log_value=log_value)


def _simplex_params(prior, stats, c):
    if not isinstance(prior, (Beta, Dirichlet)):
        raise FamilyMismatchError("closed form needs a Beta or Dirichlet prior")
    post = np.asarray(base_posterior(prior, stats).params, dtype=np.float64)
    base = np.asarray(prior.params, dtype=np.float64)
    delta = (c - 1.0) * base
    const = log_multivariate_beta(base) - log_multivariate_beta(c * base)
    return post, delta, const


def _log_ratio_moment(post, delta, const, m):
    shifted = post + m * delta
    if np.any(shifted <= 0.0):
        raise MomentDoesNotExistError(
            f"E[r^{m}] needs positive Beta-function arguments, got {shifted.tolist()}"
        )
    return m * const + log_multivariate_beta(shifted) - log_multivariate_beta(post)


def curvature_beta_epsilon_closed(prior, c: float, a, stats) -> Estimate:
    """Exact ``a * Var[q/pi0]`` through Beta-function moments of the ratio.

    ``E[r^m] = [B(alpha)/B(c alpha)]^m B(alpha' + m (c-1) alpha) / B(alpha')``
    with ``alpha'`` the posterior parameters. Works for Dirichlet priors too.
    """
    a = _order(a).a
    c = float(c)
    if c == 1.0:
        return Estimate(0.0)
    post, delta, const = _simplex_params(prior, stats, c)
    log_e1 = _log_ratio_moment(post, delta, const, 1)
    log_e2 = _log_ratio_moment(post, delta, const, 2)
    gap = 2.0 * log_e1 - log_e2  # <= 0 by Jensen
    if gap >= 0.0:
        return Estimate(0.0, log_value=-math.inf)
    log_value = math.log(a) + log_e2 + math.log(-math.expm1(gap))
    if log_value >= LOG_FLOAT_MAX:
        return Estimate(math.inf, flags=(FLAG_OVERFLOW,), log_value=log_value)
    return Estimate(math.exp(log_value), log_value=log_value)


def curvature_beta_geometric_closed(prior, c: float, a, stats) -> Estimate:
    """Exact ``a * Var[log(q/pi0)]`` via trigamma covariances of ``log theta``."""
    a = _order(a).a
    c = float(c)
    if c == 1.0:
        return Estimate(0.0)
    post, delta, _ = _simplex_params(prior, stats, c)
    # Cov(log th_i, log th_j) = psi1(a_i) delta_ij - psi1(a_0)
    var = float(np.dot(delta * delta, polygamma(1, post)) - delta.sum() ** 2 * polygamma(1, post.sum()))
    return Estimate(a * max(var, 0.0))


def curvature_closed(req: CurvatureRequest) -> Estimate:
    """Closed-form curvature for any supported family and class."""
    a = req.order.a
    if isinstance(req.prior, Normal):
        if req.class_tag is ContaminationClass.GEOMETRIC:
            return curvature_normal_geometric_closed(req.prior, req.c, a, req.stats.n)
        return curvature_normal_epsilon_closed(req.prior, req.c, a, req.stats)
    if req.class_tag is ContaminationClass.GEOMETRIC:
        return curvature_beta_geometric_closed(req.prior, req.c, a, req.stats)
    return curvature_beta_epsilon_closed(req.prior, req.c, a, req.stats)


# --------------------------------------------------------------------------
# second-order relation between divergence and curvature
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class TaylorReport:
    divergence: float
    predicted: float
    abs_gap: float
    rel_gap: float


def taylor_consistency(dist: float, curvature, epsilon: float, floor: float = 1e-8) -> TaylorReport:
    """Compare a divergence with its quadratic prediction ``eps^2 C / 2``."""
    value = curvature.value if isinstance(curvature, Estimate) else float(curvature)
    predicted = 0.5 * epsilon * epsilon * value
    gap = abs(float(dist) - predicted)
    return TaylorReport(float(dist), predicted, gap, gap / max(float(dist), floor))
