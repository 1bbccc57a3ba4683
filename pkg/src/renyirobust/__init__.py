"""Prior robustness via the local curvature of the Renyi divergence."""

from ._accel import backend_name
from .calibration import Calibration, calibrate, calibration_inverse
from .curvature import (
    CurvatureRequest,
    TaylorReport,
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
from .divergence import (
    DivergenceRequest,
    divergence_closed,
    divergence_mc,
    kl_mc,
    quadrature_oracle,
    renyi_closed_conjugate,
    renyi_mc,
)
from .estimate import Estimate, Method
from .models import (
    BernoulliStats,
    Beta,
    ContaminationClass,
    ContaminationSetup,
    Dirichlet,
    Mixture,
    MultinomialStats,
    Normal,
    NormalStats,
    RenyiOrder,
    base_posterior,
    contaminant_of,
    epsilon_posterior,
    geometric_posterior,
    log_density_ratio,
    log_posterior_density,
)
from .samplers import SeededStream, sample_beta, sample_dirichlet, sample_gamma, sample_normal

__version__ = "0.1.0"
