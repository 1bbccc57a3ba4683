"""Renyi divergence between the contaminated and the base posterior.

Monte Carlo estimates draw from the base posterior and reweight by the
posterior density ratio ``w = pi(theta|x) / pi0(theta|x)``. The estimators are
self-normalised,

    d_a = [log mean(w^a) - a log mean(w)] / (a - 1),
    d_1 = mean(w log w) / mean(w) - log mean(w),

which is the exact divergence of the reweighted sample from the unweighted one.
It is therefore never negative, is monotone in ``a`` on shared draws, and
converges to the same limit as the plain ``log mean(w^a)`` form because
``E[w] = 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np
from scipy import integrate
from scipy.special import digamma

from . import kernels
from .curvature import DEFAULT_DRAWS, MIN_DRAWS
from .errors import (
    DegenerateWeightsError,
    FamilyMismatchError,
    InvalidParameterError,
    QuadratureError,
    UndefinedOrderError,
)
from .estimate import FLAG_LARGE_SE, LARGE_SE_RATIO, Estimate, Method
from .models import (
    Beta,
    ContaminationClass,
    Dirichlet,
    Mixture,
    Normal,
    RenyiOrder,
    base_posterior,
    contaminant_of,
    contaminated_posterior,
    log_multivariate_beta,
)
from .samplers import SeededStream, sample_posterior


@dataclass(frozen=True)
class DivergenceRequest:
    prior: Union[Beta, Dirichlet, Normal]
    c: float
    order: RenyiOrder
    class_tag: ContaminationClass
    epsilon: float
    stats: object
    mc_draws: int = DEFAULT_DRAWS
    stream: SeededStream = field(default_factory=lambda: SeededStream(0))

    def __post_init__(self):
        if not isinstance(self.order, RenyiOrder):
            object.__setattr__(self, "order", RenyiOrder(self.order))
        object.__setattr__(self, "class_tag", ContaminationClass.parse(self.class_tag))
        eps = float(self.epsilon)
        if not 0.0 <= eps <= 1.0:
            raise InvalidParameterError(f"epsilon must lie in [0, 1], got {eps!r}")
        object.__setattr__(self, "epsilon", eps)
        if int(self.mc_draws) != self.mc_draws or self.mc_draws < MIN_DRAWS:
            raise InvalidParameterError(f"mc_draws must be an integer >= {MIN_DRAWS}")
        object.__setattr__(self, "mc_draws", int(self.mc_draws))
        if not float(self.c) > 0.0:
            raise InvalidParameterError("contaminant scale c must be positive")

    @property
    def contaminant(self):
        return contaminant_of(self.prior, self.c)

    def posteriors(self):
        """``(contaminated posterior, base posterior)``."""
        post0 = base_posterior(self.prior, self.stats)
        post = contaminated_posterior(self.prior, self.contaminant, self.epsilon, self.stats, self.class_tag)
        return post, post0


def _log_weights(req: DivergenceRequest):
    post, post0 = req.posteriors()
    if post == post0:
        return None
    theta = sample_posterior(post0, req.stream, req.mc_draws)
    lr = np.asarray(post.logpdf(theta), dtype=np.float64) - post0.logpdf(theta)
    if not np.any(np.isfinite(lr)) or np.all(lr == -np.inf):
        raise DegenerateWeightsError("every posterior density ratio is zero on the sample")
    return np.ascontiguousarray(lr)


def _mc_estimate(req, value, se):
    flags = (FLAG_LARGE_SE,) if value > 0.0 and se > LARGE_SE_RATIO * value else ()
    return Estimate(value, se, req.mc_draws, Method.MONTE_CARLO, req.stream.seed, flags)


def renyi_mc(req: DivergenceRequest) -> Estimate:
    """Order-``a`` divergence (``a != 1``) by self-normalised importance sampling."""
    a = req.order.a
    if req.order.is_kl_limit:
        raise InvalidParameterError("renyi_mc needs a != 1; use kl_mc for the KL limit")
    lr = _log_weights(req)
    if lr is None:
        return _mc_estimate(req, 0.0, 0.0)
    term, se = kernels.selfnorm_renyi(lr, a)
    value = term / (a - 1.0)
    return _mc_estimate(req, max(value, 0.0), se / abs(a - 1.0))


def kl_mc(req: DivergenceRequest) -> Estimate:
    """Kullback-Leibler divergence ``E_pi0[w log w]`` by self-normalised sampling."""
    if not req.order.is_kl_limit:
        raise InvalidParameterError("kl_mc is the a = 1 estimator")
    lr = _log_weights(req)
    if lr is None:
        return _mc_estimate(req, 0.0, 0.0)
    value, se = kernels.selfnorm_kl(lr)
    return _mc_estimate(req, max(value, 0.0), se)


def divergence_mc(req: DivergenceRequest) -> Estimate:
    return kl_mc(req) if req.order.is_kl_limit else renyi_mc(req)


# --------------------------------------------------------------------------
# closed forms
# --------------------------------------------------------------------------


def _kl_closed(post1, post0) -> float:
    if isinstance(post1, Normal):
        v1, v0 = post1.variance, post0.variance
        return 0.5 * (math.log(v0 / v1) + (v1 + (post1.mean - post0.mean) ** 2) / v0 - 1.0)
    a1 = np.asarray(post1.params, dtype=np.float64)
    a0 = np.asarray(post0.params, dtype=np.float64)
    return float(
        log_multivariate_beta(a0) - log_multivariate_beta(a1)
        + np.dot(a1 - a0, digamma(a1) - digamma(a1.sum()))
    )


def renyi_closed_conjugate(post1, post0, a) -> float:
    """Exact ``1/(a-1) log int p1^a p0^(1-a)`` for two members of one conjugate family.

    ``a == 1`` returns the closed-form KL divergence ``KL(p1 || p0)``.
    """
    order = a if isinstance(a, RenyiOrder) else RenyiOrder(a)
    a = order.a
    if isinstance(post1, Mixture) or isinstance(post0, Mixture):
        raise FamilyMismatchError("closed form needs two conjugate members, not a mixture")
    if type(post1) is not type(post0):
        raise FamilyMismatchError(f"{type(post1).__name__} vs {type(post0).__name__}")
    if post1 == post0:
        return 0.0
    if order.is_kl_limit:
        return max(_kl_closed(post1, post0), 0.0)
    if isinstance(post1, Normal):
        v1, v0 = post1.variance, post0.variance
        blend = a * v0 + (1.0 - a) * v1
        if blend <= 0.0:
            raise UndefinedOrderError(f"Renyi order {a} too large for this pair: blended variance {blend} <= 0")
        value = (
            0.5 * math.log(v0 / v1)
            + math.log(v0 / blend) / (2.0 * (a - 1.0))
            + a * (post1.mean - post0.mean) ** 2 / (2.0 * blend)
        )
        return max(value, 0.0)
    if isinstance(post1, Dirichlet) and post1.k != post0.k:
        raise FamilyMismatchError("Dirichlet dimensions differ")
    p1 = np.asarray(post1.params, dtype=np.float64)
    p0 = np.asarray(post0.params, dtype=np.float64)
    blend = a * p1 + (1.0 - a) * p0
    if np.any(blend <= 0.0):
        raise UndefinedOrderError(
            f"Renyi order {a} too large for this pair: blended parameters {blend.tolist()}"
        )
    log_int = log_multivariate_beta(blend) - a * log_multivariate_beta(p1) - (1.0 - a) * log_multivariate_beta(p0)
    return max(log_int / (a - 1.0), 0.0)


def divergence_closed(req: DivergenceRequest) -> Estimate:
    """Closed form whenever the contaminated posterior is itself conjugate."""
    post, post0 = req.posteriors()
    if isinstance(post, Mixture):
        raise FamilyMismatchError("no closed form for the mixture posterior; use quadrature_oracle")
    return Estimate(renyi_closed_conjugate(post, post0, req.order))


def quadrature_oracle(req: DivergenceRequest, tol: float = 1e-10) -> float:
    """Divergence by adaptive quadrature over (0, 1); Beta family only.

    For ``a != 1`` the integrand is ``p^a p0^(1-a) - p0`` so that the result
    ``J = I - 1`` keeps relative precision for tiny divergences, and
    ``d = log1p(J) / (a - 1)``.
    """
    if not isinstance(req.prior, Beta):
        raise FamilyMismatchError("quadrature oracle supports the Beta family only")
    post, post0 = req.posteriors()
    if post == post0:
        return 0.0
    a = req.order.a

    def logs(x):
        lp = post.logpdf(np.array([x]))
        l0 = post0.logpdf(np.array([x]))
        return float(np.asarray(lp).ravel()[0]), float(np.asarray(l0).ravel()[0])

    if req.order.is_kl_limit:
        def integrand(x):
            lp, l0 = logs(x)
            return math.exp(lp) * (lp - l0) if math.isfinite(lp) and lp > -745.0 else 0.0
    else:
        def integrand(x):
            lp, l0 = logs(x)
            v = a * lp + (1.0 - a) * l0
            return (math.exp(v) if math.isfinite(v) else 0.0) - math.exp(l0)

    centres = sorted({float(post0.mean()), *(
        [float(post.first.mean()), float(post.second.mean())] if isinstance(post, Mixture) else [float(post.mean())]
    )})
    value, abserr, info = integrate.quad(
        integrand, 0.0, 1.0, epsabs=tol, epsrel=tol, limit=500, points=centres, full_output=1
    )[:3]
    if abserr > max(tol, tol * abs(value)) * 10.0 or not math.isfinite(value):
        raise QuadratureError(
            f"quadrature did not converge (estimate {value}, error {abserr})",
            {"neval": info.get("neval"), "intervals": info.get("last"), "abserr": abserr},
        )
    if req.order.is_kl_limit:
        return max(value, 0.0)
    return max(math.log1p(value) / (a - 1.0), 0.0)
