"""Prebaked grids for the six published tables.

``table4`` needs the AIDS survival status column (not redistributed here):
pass ``--data FILE`` with a ``status`` column of ``A``/``D`` labels, or the
sufficient statistics directly with ``--stats t,n``.
"""

from __future__ import annotations

from ..errors import ConfigError
from ..models import (
    BernoulliStats,
    Beta,
    ContaminationClass,
    Dirichlet,
    MultinomialStats,
    Normal,
    NormalStats,
)
from .config import DataSource, RunConfig

BETA_PRIORS = (Beta(0.5, 0.5), Beta(1, 1), Beta(1, 3), Beta(3, 1))
DIRICHLET_PRIORS = (
    Dirichlet((0.25,) * 4),
    Dirichlet((0.5,) * 4),
    Dirichlet((1.0,) * 4),
    Dirichlet((2.0, 1.0, 1.0, 1.0)),
)
NORMAL_PRIORS = (Normal(0.1, 0.1), Normal(0.5, 1.0), Normal(0.5, 5.0), Normal(4.0, 5.0))

C_GRID = (0.5, 1.0, 1.5, 3.0, 5.0)
A_GRID = (0.5, 1.0, 2.0)
EPS_GRID = (0.05, 0.5, 1.0)
BOTH = (ContaminationClass.EPSILON, ContaminationClass.GEOMETRIC)

BERNOULLI_SAMPLE = BernoulliStats(11, 20)
MULTINOMIAL_SAMPLE = MultinomialStats((6, 4, 5, 5))
NORMAL_DATA = (
    3.37, 4.18, 3.16, 5.59, 4.32, 3.17, 4.48, 4.73, 4.57, 3.69,
    5.51, 4.38, 3.37, 1.78, 5.12, 3.95, 3.98, 4.94, 4.82, 4.59,
)
NORMAL_SAMPLE = NormalStats(4.1905, len(NORMAL_DATA))

AIDS_COLUMN = "status"
AIDS_SUCCESS = "D"

TABLE_IDS = ("table1", "table2", "table3", "table4", "table5", "table6")


def _normalise(table_id: str) -> str:
    tid = table_id.lower().replace(" ", "").replace("_", "")
    if tid.isdigit():
        tid = "table" + tid
    if tid not in TABLE_IDS:
        raise ConfigError(f"unknown table {table_id!r}; choose from {', '.join(TABLE_IDS)}")
    return tid


def table_config(table_id: str, data: DataSource = None) -> RunConfig:
    """The run configuration that reproduces ``table_id``."""
    tid = _normalise(table_id)
    bernoulli = DataSource(stats=BERNOULLI_SAMPLE)
    if tid == "table1":
        return RunConfig("beta", BETA_PRIORS, C_GRID, A_GRID, data=bernoulli)
    if tid in ("table2", "table3"):
        cls = ContaminationClass.EPSILON if tid == "table2" else ContaminationClass.GEOMETRIC
        return RunConfig(
            "beta", BETA_PRIORS, C_GRID, A_GRID, EPS_GRID, (cls,),
            analyses=("divergence", "calibration"), data=bernoulli,
        )
    if tid == "table4":
        if data is None or (data.stats is None and data.path is None):
            raise ConfigError(
                "table4 needs the AIDS status column: pass --data FILE (column 'status', "
                "success label 'D') or --stats t,n"
            )
        if data.stats is None:
            data = DataSource(
                path=data.path,
                column=data.column or AIDS_COLUMN,
                column_type="binary",
                success=data.success or AIDS_SUCCESS,
                failure=data.failure,
                delimiter=data.delimiter,
            )
        return RunConfig("beta", BETA_PRIORS, C_GRID, A_GRID, data=data)
    if tid == "table5":
        return RunConfig("dirichlet", DIRICHLET_PRIORS, C_GRID, A_GRID, data=DataSource(stats=MULTINOMIAL_SAMPLE))
    return RunConfig("normal", NORMAL_PRIORS, C_GRID, A_GRID, data=DataSource(stats=NORMAL_SAMPLE))
