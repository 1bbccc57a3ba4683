import math

import numpy as np
import pytest
from scipy import integrate

from renyirobust import (
    BernoulliStats,
    Beta,
    CurvatureRequest,
    Dirichlet,
    Estimate,
    Method,
    MultinomialStats,
    Normal,
    NormalStats,
    SeededStream,
    base_posterior,
    contaminant_of,
    curvature_beta_epsilon_closed,
    curvature_beta_geometric_closed,
    curvature_closed,
    curvature_epsilon_mc,
    curvature_geometric_mc,
    curvature_mc,
    curvature_normal_epsilon_closed,
    curvature_normal_geometric_closed,
    taylor_consistency,
)
from renyirobust.errors import InvalidParameterError, MomentDoesNotExistError
from renyirobust.estimate import FLAG_OVERFLOW, FLAG_UNRELIABLE

STATS = BernoulliStats(11, 20)
SEED = SeededStream(99)


def quad_curvature(prior, c, a, cls, stats=STATS):
    """``a * Var[f]`` under the base posterior by direct integration (Beta only)."""
    post = base_posterior(prior, stats)
    q = contaminant_of(prior, c)

    def f(p):
        lr = q.logpdf(p) - prior.logpdf(p)
        return math.exp(lr) if cls == "epsilon" else lr

    dens = lambda p: math.exp(post.logpdf(p))
    m1 = integrate.quad(lambda p: f(p) * dens(p), 0, 1, limit=200)[0]
    m2 = integrate.quad(lambda p: f(p) ** 2 * dens(p), 0, 1, limit=200)[0]
    return a * (m2 - m1 * m1)


@pytest.mark.parametrize("prior", [Beta(0.5, 0.5), Beta(1, 3), Beta(3, 1)])
@pytest.mark.parametrize("c", [0.5, 1.5, 3.0])
def test_beta_closed_forms_against_quadrature(prior, c):
    for a in (0.5, 2.0):
        assert curvature_beta_epsilon_closed(prior, c, a, STATS).value == pytest.approx(quad_curvature(prior, c, a, "epsilon"), rel=1e-7)
        assert curvature_beta_geometric_closed(prior, c, a, STATS).value == pytest.approx(quad_curvature(prior, c, a, "geometric"), rel=1e-7)


def test_closed_forms_carry_no_error():
    est = curvature_beta_geometric_closed(Beta(1, 3), 3.0, 1.0, STATS)
    assert est.method is Method.CLOSED_FORM and est.std_error == 0.0 and est.draws == 0


def test_spot_values():
    assert round(curvature_beta_epsilon_closed(Beta(1, 3), 0.5, 0.5, STATS).value, 4) == 0.0265
    assert round(curvature_beta_geometric_closed(Beta(1, 3), 0.5, 0.5, STATS).value, 4) == 0.0235
    assert round(curvature_normal_geometric_closed(Normal(0.5, 1.0), 3.0, 0.5, 20).value, 4) == 0.0238
    est = curvature_normal_epsilon_closed(Normal(0.5, 1.0), 1.5, 0.5, NormalStats(4.1905, 20))
    assert est.value == pytest.approx(0.0081, abs=1e-4)


def test_normal_geometric_depends_on_sample_size_only():
    a = curvature_normal_geometric_closed(Normal(0.5, 5.0), 3.0, 1.0, 20).value
    assert a == pytest.approx((0.5 * 2.0 / 5.0) ** 2 / (1 / 5.0 + 20))


def test_normal_epsilon_against_monte_carlo():
    prior, stats = Normal(0.5, 5.0), NormalStats(4.1905, 20)
    req = CurvatureRequest(prior, 3.0, 1.0, "epsilon", stats, 10**6, SEED)
    mc = curvature_mc(req)
    assert mc.within(curvature_closed(req).value)


def test_normal_epsilon_reports_log_value():
    est = curvature_normal_epsilon_closed(Normal(0.1, 0.1), 5.0, 1.0, NormalStats(4.1905, 20))
    assert est.log_value == pytest.approx(math.log(est.value), rel=1e-12)
    assert FLAG_OVERFLOW not in est.flags


def test_normal_epsilon_overflow_is_flagged():
    huge = curvature_normal_epsilon_closed(Normal(4.0, 0.01), 50.0, 1.0, NormalStats(4.1905, 20))
    assert huge.value == math.inf and FLAG_OVERFLOW in huge.flags
    assert math.isfinite(huge.log_value) and huge.log_value > 709.0


def test_dirichlet_monte_carlo_against_closed_form():
    prior, stats = Dirichlet((1.0,) * 4), MultinomialStats((6, 4, 5, 5))
    for cls in ("epsilon", "geometric"):
        req = CurvatureRequest(prior, 3.0, 1.0, cls, stats, 10**6, SEED)
        assert curvature_mc(req).within(curvature_closed(req).value)


def test_dirichlet_spot_value():
    req = CurvatureRequest(Dirichlet((1.0,) * 4), 3.0, 1.0, "geometric", MultinomialStats((6, 4, 5, 5)), 10**6, SEED)
    assert curvature_mc(req).within(0.2274, slack=0.0005)


def test_missing_second_moment():
    # r = q/pi0 grows like theta^-(1-c) alpha; its square is not integrable here
    with pytest.raises(MomentDoesNotExistError):
        curvature_beta_epsilon_closed(Beta(0.5, 0.5), 0.01, 1.0, BernoulliStats(0, 1))


def test_heavy_tails_are_flagged():
    req = CurvatureRequest(Beta(0.5, 0.5), 0.05, 1.0, "epsilon", BernoulliStats(0, 1), 10**5, SEED)
    est = curvature_epsilon_mc(req)
    assert FLAG_UNRELIABLE in est.flags and not est.reliable


def test_identity_contaminant_is_exact_zero():
    for cls in ("epsilon", "geometric"):
        req = CurvatureRequest(Beta(1, 3), 1.0, 2.0, cls, STATS, 1000, SEED)
        assert curvature_mc(req).value == 0.0
        assert curvature_closed(req).value == 0.0


def test_dispatch_matches_direct_calls():
    req = CurvatureRequest(Beta(3, 1), 3.0, 0.5, "geometric", STATS, 10**4, SEED)
    assert curvature_mc(req) == curvature_geometric_mc(req)


def test_request_validation():
    with pytest.raises(InvalidParameterError):
        CurvatureRequest(Beta(1, 1), 0.0, 1.0, "epsilon", STATS)
    with pytest.raises(InvalidParameterError):
        CurvatureRequest(Beta(1, 1), 2.0, 1.0, "epsilon", STATS, mc_draws=10)
    with pytest.raises(InvalidParameterError):
        CurvatureRequest(Beta(1, 1), 2.0, -1.0, "epsilon", STATS)


def test_mc_is_reproducible():
    req = CurvatureRequest(Beta(0.5, 0.5), 5.0, 2.0, "epsilon", STATS, 10**4, SeededStream(5))
    assert curvature_mc(req) == curvature_mc(req)


def test_taylor_report():
    rep = taylor_consistency(0.0033, Estimate(0.0265), 0.5)
    assert rep.predicted == pytest.approx(0.0265 / 8)
    assert rep.rel_gap == pytest.approx(abs(0.0033 - 0.0265 / 8) / 0.0033)
    assert taylor_consistency(0.0, 0.0, 0.05).rel_gap == 0.0


def test_estimate_invariants():
    with pytest.raises(ValueError):
        Estimate(float("nan"))
    with pytest.raises(ValueError):
        Estimate(1.0, std_error=0.1, method=Method.CLOSED_FORM)
    est = Estimate(0.01, 0.002, 100, Method.MONTE_CARLO)
    assert est.within(0.015) and not est.within(0.02)
    assert np.isfinite(est.value)
