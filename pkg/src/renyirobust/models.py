"""Conjugate model families, contamination and posterior algebra.

Three conjugate pairs are supported: Bernoulli-Beta, Multinomial-Dirichlet and
the known-variance location Normal. The same frozen dataclasses (:class:`Beta`,
:class:`Dirichlet`, :class:`Normal`) describe priors, contaminants and
conjugate posteriors; :class:`Mixture` is the two-component posterior of the
epsilon-contaminated class.

All normalising constants are evaluated in log space through
:func:`scipy.special.gammaln`, so data sets with thousands of observations do
not overflow.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy.special import gammaln

from . import kernels
from .errors import FamilyMismatchError, InvalidParameterError, SupportError

LOG_2PI = math.log(2.0 * math.pi)


def _positive(name: str, value: float) -> float:
    value = float(value)
    if not (value > 0.0 and math.isfinite(value)):
        raise InvalidParameterError(f"{name} must be a positive finite number, got {value!r}")
    return value


def log_multivariate_beta(alphas) -> float:
    """``log B(alpha) = sum(lgamma(alpha_i)) - lgamma(sum(alpha_i))``."""
    alphas = np.asarray(alphas, dtype=np.float64)
    return float(gammaln(alphas).sum() - gammaln(alphas.sum()))


# --------------------------------------------------------------------------
# orders, classes, setups
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class RenyiOrder:
    """Order ``a > 0`` of the Renyi divergence; ``a == 1`` is the KL limit."""

    a: float

    def __post_init__(self):
        object.__setattr__(self, "a", _positive("Renyi order a", self.a))

    @property
    def is_kl_limit(self) -> bool:
        return self.a == 1.0


class ContaminationClass(str, enum.Enum):
    EPSILON = "epsilon"
    GEOMETRIC = "geometric"

    @classmethod
    def parse(cls, text) -> "ContaminationClass":
        if isinstance(text, cls):
            return text
        key = str(text).strip().lower()
        aliases = {
            "epsilon": cls.EPSILON,
            "eps": cls.EPSILON,
            "linear": cls.EPSILON,
            "epsilonlinear": cls.EPSILON,
            "gamma_a": cls.EPSILON,
            "geometric": cls.GEOMETRIC,
            "geo": cls.GEOMETRIC,
            "gamma_g": cls.GEOMETRIC,
        }
        try:
            return aliases[key]
        except KeyError:
            raise InvalidParameterError(f"unknown contamination class {text!r}") from None


def _check_epsilon(epsilon: float) -> float:
    epsilon = float(epsilon)
    if not 0.0 <= epsilon <= 1.0:
        raise InvalidParameterError(f"epsilon must lie in [0, 1], got {epsilon!r}")
    return epsilon


@dataclass(frozen=True)
class ContaminationSetup:
    c: float
    class_tag: ContaminationClass
    epsilon: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "c", _positive("contaminant scale c", self.c))
        object.__setattr__(self, "class_tag", ContaminationClass.parse(self.class_tag))
        object.__setattr__(self, "epsilon", _check_epsilon(self.epsilon))


# --------------------------------------------------------------------------
# distribution families
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Beta:
    alpha: float
    beta: float

    def __post_init__(self):
        object.__setattr__(self, "alpha", _positive("alpha", self.alpha))
        object.__setattr__(self, "beta", _positive("beta", self.beta))

    family = "beta"

    @property
    def params(self) -> tuple[float, float]:
        return (self.alpha, self.beta)

    def log_normalizer(self) -> float:
        return log_multivariate_beta(self.params)

    def logpdf(self, theta):
        theta = _check_unit_interval(theta)
        out = kernels.beta_log_kernel(
            np.atleast_1d(theta), self.alpha - 1.0, self.beta - 1.0, -self.log_normalizer()
        )
        return out if np.ndim(theta) else float(out[0])

    def mean(self):
        return self.alpha / (self.alpha + self.beta)


@dataclass(frozen=True)
class Dirichlet:
    alphas: tuple[float, ...]

    def __post_init__(self):
        alphas = tuple(_positive(f"alpha_{i + 1}", v) for i, v in enumerate(self.alphas))
        if len(alphas) < 2:
            raise InvalidParameterError("a Dirichlet needs at least two components")
        object.__setattr__(self, "alphas", alphas)

    family = "dirichlet"

    @property
    def params(self) -> tuple[float, ...]:
        return self.alphas

    @property
    def k(self) -> int:
        return len(self.alphas)

    def log_normalizer(self) -> float:
        return log_multivariate_beta(self.alphas)

    def logpdf(self, theta):
        theta = _check_simplex(theta, self.k)
        logs = np.log(np.atleast_2d(theta))
        out = logs @ (np.asarray(self.alphas) - 1.0) - self.log_normalizer()
        return out if np.ndim(theta) == 2 else float(out[0])

    def mean(self):
        a = np.asarray(self.alphas)
        return a / a.sum()


@dataclass(frozen=True)
class Normal:
    mean: float
    variance: float

    def __post_init__(self):
        mean = float(self.mean)
        if not math.isfinite(mean):
            raise InvalidParameterError(f"mean must be finite, got {mean!r}")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "variance", _positive("variance", self.variance))

    family = "normal"

    @property
    def params(self) -> tuple[float, float]:
        return (self.mean, self.variance)

    def logpdf(self, theta):
        theta = np.asarray(theta, dtype=np.float64)
        if not np.all(np.isfinite(theta)):
            raise SupportError("Normal density needs finite parameter points")
        out = -0.5 * (LOG_2PI + math.log(self.variance)) - (theta - self.mean) ** 2 / (2.0 * self.variance)
        return out if np.ndim(theta) else float(out)


Conjugate = Union[Beta, Dirichlet, Normal]
PriorSpec = Conjugate


@dataclass(frozen=True)
class Mixture:
    """``weight * first + (1 - weight) * second`` for two members of one family."""

    weight: float
    first: Conjugate
    second: Conjugate

    def __post_init__(self):
        w = float(self.weight)
        if not 0.0 <= w <= 1.0:
            raise InvalidParameterError(f"mixture weight must lie in [0, 1], got {w!r}")
        object.__setattr__(self, "weight", w)
        _same_family(self.first, self.second)

    @property
    def family(self) -> str:
        return self.first.family

    def logpdf(self, theta):
        l1 = np.atleast_1d(self.first.logpdf(theta)).astype(np.float64)
        l2 = np.atleast_1d(self.second.logpdf(theta)).astype(np.float64)
        w = self.weight
        log_w1 = math.log(w) if w > 0.0 else -math.inf
        log_w2 = math.log1p(-w) if w < 1.0 else -math.inf
        out = kernels.log_mix2(l1, l2, log_w1, log_w2)
        scalar = np.ndim(theta) == 0 or (self.family == "dirichlet" and np.ndim(theta) == 1)
        return float(out[0]) if scalar else out


PosteriorRep = Union[Beta, Dirichlet, Normal, Mixture]


# --------------------------------------------------------------------------
# sufficient statistics
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class BernoulliStats:
    t: int
    n: int

    def __post_init__(self):
        t, n = int(self.t), int(self.n)
        if t != self.t or n != self.n:
            raise InvalidParameterError("Bernoulli counts must be integers")
        if n < 1 or not 0 <= t <= n:
            raise InvalidParameterError(f"need 0 <= t <= n and n >= 1, got t={t}, n={n}")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "n", n)

    family = "beta"


@dataclass(frozen=True)
class MultinomialStats:
    counts: tuple[int, ...]

    def __post_init__(self):
        counts = tuple(int(v) for v in self.counts)
        if any(c != v for c, v in zip(counts, self.counts)):
            raise InvalidParameterError("multinomial counts must be integers")
        if len(counts) < 2 or any(c < 0 for c in counts):
            raise InvalidParameterError("multinomial counts need k >= 2 non-negative entries")
        object.__setattr__(self, "counts", counts)

    family = "dirichlet"

    @property
    def total(self) -> int:
        return sum(self.counts)


@dataclass(frozen=True)
class NormalStats:
    mean: float
    n: int

    def __post_init__(self):
        mean = float(self.mean)
        if not math.isfinite(mean):
            raise InvalidParameterError("sample mean must be finite")
        if int(self.n) != self.n or self.n < 1:
            raise InvalidParameterError(f"sample size must be a positive integer, got {self.n!r}")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "n", int(self.n))

    family = "normal"


SufficientStats = Union[BernoulliStats, MultinomialStats, NormalStats]


# --------------------------------------------------------------------------
# support checks
# --------------------------------------------------------------------------


def _check_unit_interval(theta):
    theta = np.asarray(theta, dtype=np.float64)
    if not np.all((theta > 0.0) & (theta < 1.0)):
        raise SupportError("Beta density requires 0 < theta < 1 (the density ratio diverges on the boundary)")
    return theta


def _check_simplex(theta, k):
    theta = np.asarray(theta, dtype=np.float64)
    if theta.shape[-1] != k or theta.ndim not in (1, 2):
        raise SupportError(f"expected probability vectors of length {k}, got shape {theta.shape}")
    if not np.all(theta > 0.0):
        raise SupportError("Dirichlet density requires every component strictly positive")
    if not np.all(np.abs(theta.sum(axis=-1) - 1.0) <= 1e-9):
        raise SupportError("Dirichlet parameter points must sum to one")
    return theta


def _same_family(*items):
    families = {item.family for item in items}
    if len(families) != 1:
        raise FamilyMismatchError(f"mixed families: {sorted(families)}")
    if "dirichlet" in families and len({item.k for item in items if hasattr(item, "k")}) > 1:
        raise FamilyMismatchError("Dirichlet dimensions differ")
    return families.pop()


# --------------------------------------------------------------------------
# operations
# --------------------------------------------------------------------------


def base_posterior(prior: PriorSpec, stats: SufficientStats) -> Conjugate:
    """Conjugate update of ``prior`` with the sufficient statistics."""
    _same_family(prior, stats)
    if isinstance(prior, Beta):
        return Beta(prior.alpha + stats.t, prior.beta + stats.n - stats.t)
    if isinstance(prior, Dirichlet):
        if len(stats.counts) != prior.k:
            raise FamilyMismatchError(f"{len(stats.counts)} counts for a {prior.k}-component Dirichlet")
        return Dirichlet(tuple(a + x for a, x in zip(prior.alphas, stats.counts)))
    precision = 1.0 / prior.variance + stats.n
    mean = (prior.mean / prior.variance + stats.n * stats.mean) / precision
    return Normal(mean, 1.0 / precision)


def contaminant_of(prior: PriorSpec, c: float) -> PriorSpec:
    """Scale-``c`` contaminant: hyperparameters times ``c`` (Normal: mean only)."""
    c = _positive("contaminant scale c", c)
    if c == 1.0:
        return prior
    if isinstance(prior, Beta):
        return Beta(c * prior.alpha, c * prior.beta)
    if isinstance(prior, Dirichlet):
        return Dirichlet(tuple(c * a for a in prior.alphas))
    return Normal(c * prior.mean, prior.variance)


def log_density_ratio(prior: PriorSpec, contaminant: PriorSpec, theta):
    """``log q(theta) - log pi0(theta)``, vectorised over parameter points."""
    _same_family(prior, contaminant)
    if isinstance(prior, Beta):
        theta = _check_unit_interval(theta)
        const = prior.log_normalizer() - contaminant.log_normalizer()
        out = kernels.beta_log_kernel(
            np.atleast_1d(theta), contaminant.alpha - prior.alpha, contaminant.beta - prior.beta, const
        )
        return out if np.ndim(theta) else float(out[0])
    if isinstance(prior, Dirichlet):
        theta = _check_simplex(theta, prior.k)
        expo = np.asarray(contaminant.alphas) - np.asarray(prior.alphas)
        const = prior.log_normalizer() - contaminant.log_normalizer()
        if not np.any(expo):
            out = np.full(np.atleast_2d(theta).shape[0], const)
        else:
            out = np.log(np.atleast_2d(theta)) @ expo + const
        return out if np.ndim(theta) == 2 else float(out[0])
    theta = np.asarray(theta, dtype=np.float64)
    if not np.all(np.isfinite(theta)):
        raise SupportError("Normal density ratio needs finite parameter points")
    if contaminant.variance == prior.variance:
        # equal variances: the ratio is linear in theta
        s2 = prior.variance
        m0, m1 = prior.mean, contaminant.mean
        out = (theta * (m1 - m0) + 0.5 * (m0 * m0 - m1 * m1)) / s2
    else:
        out = contaminant.logpdf(theta) - prior.logpdf(theta)
    return out if np.ndim(theta) else float(out)


def geometric_posterior(prior: PriorSpec, contaminant: PriorSpec, epsilon: float, stats: SufficientStats) -> Conjugate:
    """Posterior under the prior proportional to ``pi0^(1-eps) * q^eps``.

    The blended prior is again a member of the conjugate family, so the
    result is returned as a normalised conjugate posterior.
    """
    epsilon = _check_epsilon(epsilon)
    _same_family(prior, contaminant, stats)
    return base_posterior(geometric_prior(prior, contaminant, epsilon), stats)


def geometric_prior(prior: PriorSpec, contaminant: PriorSpec, epsilon: float) -> Conjugate:
    epsilon = _check_epsilon(epsilon)
    if epsilon == 0.0:
        return prior
    if epsilon == 1.0:
        return contaminant
    w0, w1 = 1.0 - epsilon, epsilon
    if isinstance(prior, Beta):
        # log-linear blend of Beta kernels: exponents (alpha - 1) blend affinely
        return Beta(w0 * prior.alpha + w1 * contaminant.alpha, w0 * prior.beta + w1 * contaminant.beta)
    if isinstance(prior, Dirichlet):
        return Dirichlet(tuple(w0 * a + w1 * b for a, b in zip(prior.alphas, contaminant.alphas)))
    t0, t1 = 1.0 / prior.variance, 1.0 / contaminant.variance
    precision = w0 * t0 + w1 * t1
    return Normal((w0 * t0 * prior.mean + w1 * t1 * contaminant.mean) / precision, 1.0 / precision)


def log_prior_predictive(prior: PriorSpec, stats: SufficientStats) -> float:
    """``log m(x | prior)`` up to an additive term that depends on the data only."""
    _same_family(prior, stats)
    if isinstance(prior, Beta):
        return log_multivariate_beta((prior.alpha + stats.t, prior.beta + stats.n - stats.t)) - prior.log_normalizer()
    if isinstance(prior, Dirichlet):
        post = base_posterior(prior, stats)
        return post.log_normalizer() - prior.log_normalizer()
    # the sample mean is sufficient: xbar ~ N(theta0, sigma0^2 + 1/n)
    var = prior.variance + 1.0 / stats.n
    return -0.5 * (LOG_2PI + math.log(var)) - (stats.mean - prior.mean) ** 2 / (2.0 * var)


def mixture_weight(prior: PriorSpec, contaminant: PriorSpec, epsilon: float, stats: SufficientStats) -> float:
    """Posterior weight of the base component under the epsilon-contaminated prior."""
    epsilon = _check_epsilon(epsilon)
    if epsilon == 0.0:
        return 1.0
    if epsilon == 1.0:
        return 0.0
    log_m0 = math.log1p(-epsilon) + log_prior_predictive(prior, stats)
    log_mq = math.log(epsilon) + log_prior_predictive(contaminant, stats)
    top = max(log_m0, log_mq)
    # lambda = 1 / (1 + exp(log_mq - log_m0)), computed without overflow
    return math.exp(log_m0 - top) / (math.exp(log_m0 - top) + math.exp(log_mq - top))


def epsilon_posterior(prior: PriorSpec, contaminant: PriorSpec, epsilon: float, stats: SufficientStats) -> PosteriorRep:
    """Posterior under ``(1-eps) pi0 + eps q``: a two-component mixture.

    Degenerate cases (``eps`` in {0, 1}, or ``q == pi0``) collapse to a single
    conjugate member.
    """
    epsilon = _check_epsilon(epsilon)
    _same_family(prior, contaminant, stats)
    if epsilon == 0.0 or contaminant == prior:
        return base_posterior(prior, stats)
    if epsilon == 1.0:
        return base_posterior(contaminant, stats)
    lam = mixture_weight(prior, contaminant, epsilon, stats)
    return Mixture(lam, base_posterior(prior, stats), base_posterior(contaminant, stats))


def contaminated_posterior(prior, contaminant, epsilon, stats, class_tag) -> PosteriorRep:
    if ContaminationClass.parse(class_tag) is ContaminationClass.GEOMETRIC:
        return geometric_posterior(prior, contaminant, epsilon, stats)
    return epsilon_posterior(prior, contaminant, epsilon, stats)


def log_posterior_density(post: PosteriorRep, theta):
    """Log density of a conjugate member or of the two-component mixture."""
    return post.logpdf(theta)
