"""Run configuration and its plain-text ``key = value`` grammar.

Example::

    # Table 1 of the Bernoulli example
    model    = beta
    prior    = 0.5, 0.5
    prior    = 1, 1            # prior lines repeat, one prior per line
    c        = 0.5, 1, 1.5, 3, 5
    a        = 0.5, 1, 2
    class    = epsilon, geometric
    analysis = curvature
    stats    = 11, 20          # beta: t, n | dirichlet: counts | normal: mean, n
    draws    = 1000000
    seed     = 2020

Grid keys (``prior``, ``c``, ``a``, ``epsilon``, ``class``, ``analysis``) may
repeat; their values accumulate in order. Every other key may appear once.
Instead of ``stats`` a data file can be given with ``data``, ``column``,
``column_type`` (binary | categorical | numeric), ``success`` / ``failure``
labels for binary columns and ``categories`` for categorical ones.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field, replace
from typing import Optional

from ..errors import ConfigError, RenyiRobustError
from ..models import (
    BernoulliStats,
    Beta,
    ContaminationClass,
    Dirichlet,
    MultinomialStats,
    Normal,
    NormalStats,
)

MODELS = ("beta", "dirichlet", "normal")
ANALYSES = ("curvature", "divergence", "calibration")
FORMATS = ("csv", "markdown", "json")
METHODS = ("auto", "mc", "closed")
GRID_KEYS = {"prior", "c", "a", "epsilon", "class", "analysis"}
SCALAR_KEYS = {
    "model", "stats", "draws", "seed", "method", "format",
    "data", "column", "column_type", "success", "failure", "categories", "delimiter",
}
KEY_ALIASES = {"eps": "epsilon", "classes": "class", "analyses": "analysis", "mc_draws": "draws", "order": "a"}

DEFAULT_SEED = 20200101
DEFAULT_DRAWS = 10**6


@dataclass(frozen=True)
class DataSource:
    """Inline sufficient statistics or a delimited file plus a column spec."""

    stats: object = None
    path: Optional[str] = None
    column: Optional[str] = None
    column_type: Optional[str] = None
    success: Optional[str] = None
    failure: Optional[str] = None
    categories: tuple[str, ...] = ()
    delimiter: Optional[str] = None


@dataclass(frozen=True)
class RunConfig:
    model: str
    priors: tuple
    c_grid: tuple[float, ...]
    a_grid: tuple[float, ...]
    eps_grid: tuple[float, ...] = ()
    classes: tuple[ContaminationClass, ...] = (ContaminationClass.EPSILON, ContaminationClass.GEOMETRIC)
    analyses: tuple[str, ...] = ("curvature",)
    mc_draws: int = DEFAULT_DRAWS
    seed: int = DEFAULT_SEED
    method: str = "auto"
    data: DataSource = field(default_factory=DataSource)
    output_format: str = "csv"

    def __post_init__(self):
        validate(self)

    def with_overrides(self, **changes) -> "RunConfig":
        changes = {k: v for k, v in changes.items() if v is not None}
        return replace(self, **changes) if changes else self


def validate(cfg: RunConfig) -> None:
    if cfg.model not in MODELS:
        raise ConfigError(f"model must be one of {MODELS}, got {cfg.model!r}")
    if not cfg.priors:
        raise ConfigError("at least one prior is required")
    expected = {"beta": Beta, "dirichlet": Dirichlet, "normal": Normal}[cfg.model]
    for prior in cfg.priors:
        if not isinstance(prior, expected):
            raise ConfigError(f"prior {prior!r} does not match model {cfg.model}")
    if not cfg.c_grid or any(not c > 0 for c in cfg.c_grid):
        raise ConfigError("c grid must be non-empty with positive entries")
    if not cfg.a_grid or any(not a > 0 for a in cfg.a_grid):
        raise ConfigError("a grid must be non-empty with positive entries")
    if any(not 0.0 <= e <= 1.0 for e in cfg.eps_grid):
        raise ConfigError("epsilon values must lie in [0, 1]")
    if not cfg.classes:
        raise ConfigError("at least one contamination class is required")
    if not cfg.analyses or any(a not in ANALYSES for a in cfg.analyses):
        raise ConfigError(f"analyses must be a non-empty subset of {ANALYSES}")
    needs_eps = {"divergence", "calibration"} & set(cfg.analyses)
    if needs_eps and not cfg.eps_grid:
        raise ConfigError("divergence and calibration need a non-empty epsilon grid")
    if cfg.method not in METHODS:
        raise ConfigError(f"method must be one of {METHODS}")
    if cfg.output_format not in FORMATS:
        raise ConfigError(f"format must be one of {FORMATS}")
    if int(cfg.mc_draws) != cfg.mc_draws or cfg.mc_draws < 100:
        raise ConfigError("draws must be an integer >= 100")
    if int(cfg.seed) != cfg.seed or not 0 <= cfg.seed < 2**64:
        raise ConfigError("seed must be an unsigned 64-bit integer")
    if cfg.data.stats is None and cfg.data.path is None:
        raise ConfigError("either inline stats or a data file is required")
    if cfg.data.stats is not None and cfg.data.stats.family != expected.family:
        raise ConfigError(f"inline stats {cfg.data.stats!r} do not match model {cfg.model}")


# --------------------------------------------------------------------------
# parsing
# --------------------------------------------------------------------------


def _floats(text: str, key: str, line: int) -> list[float]:
    try:
        return [float(tok) for tok in text.replace(";", ",").split(",") if tok.strip()]
    except ValueError:
        raise ConfigError(f"line {line}: {key} expects numbers, got {text!r}") from None


def _words(text: str) -> list[str]:
    return [tok.strip() for tok in text.replace(";", ",").split(",") if tok.strip()]


def make_prior(model: str, values) -> object:
    values = list(values)
    try:
        if model == "beta":
            if len(values) != 2:
                raise ConfigError(f"a Beta prior needs 2 values, got {values}")
            return Beta(*values)
        if model == "dirichlet":
            return Dirichlet(tuple(values))
        if len(values) != 2:
            raise ConfigError(f"a Normal prior needs mean, variance; got {values}")
        return Normal(*values)
    except RenyiRobustError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from None


def make_stats(model: str, values) -> object:
    values = list(values)
    try:
        if model == "beta":
            if len(values) != 2:
                raise ConfigError("Bernoulli stats need t, n")
            return BernoulliStats(*values)
        if model == "dirichlet":
            return MultinomialStats(tuple(values))
        if len(values) != 2:
            raise ConfigError("Normal stats need mean, n")
        return NormalStats(values[0], values[1])
    except RenyiRobustError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from None


def parse_config(text: str, base_dir: str = ".") -> RunConfig:
    grids: dict[str, list[tuple[int, str]]] = {k: [] for k in GRID_KEYS}
    scalars: dict[str, tuple[int, str]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        key = KEY_ALIASES.get(key.lower(), key.lower())
        if key in GRID_KEYS:
            grids[key].append((lineno, value))
        elif key in SCALAR_KEYS:
            if key in scalars:
                raise ConfigError(f"line {lineno}: duplicate key {key!r}")
            scalars[key] = (lineno, value)
        else:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")

    if "model" not in scalars:
        raise ConfigError("missing required key 'model'")
    model = scalars["model"][1].lower()
    if model not in MODELS:
        raise ConfigError(f"model must be one of {MODELS}, got {model!r}")

    priors = tuple(make_prior(model, _floats(v, "prior", ln)) for ln, v in grids["prior"])
    c_grid = tuple(x for ln, v in grids["c"] for x in _floats(v, "c", ln))
    a_grid = tuple(x for ln, v in grids["a"] for x in _floats(v, "a", ln))
    eps_grid = tuple(x for ln, v in grids["epsilon"] for x in _floats(v, "epsilon", ln))
    try:
        classes = tuple(ContaminationClass.parse(w) for _, v in grids["class"] for w in _words(v))
    except RenyiRobustError as exc:
        raise ConfigError(str(exc)) from None
    analyses = tuple(w.lower() for _, v in grids["analysis"] for w in _words(v))

    def scalar(key, default=None):
        return scalars[key][1] if key in scalars else default

    def integer(key, default):
        if key not in scalars:
            return default
        ln, v = scalars[key]
        try:
            return int(v)
        except ValueError:
            raise ConfigError(f"line {ln}: {key} must be an integer, got {v!r}") from None

    stats = None
    if "stats" in scalars:
        ln, v = scalars["stats"]
        stats = make_stats(model, _floats(v, "stats", ln))
    path = scalar("data")
    if path is not None and not os.path.isabs(path):
        path = os.path.normpath(os.path.join(base_dir, path))
    delimiter = scalar("delimiter")
    if delimiter is not None:
        delimiter = {"tab": "\t", "\\t": "\t", "comma": ","}.get(delimiter.lower(), delimiter)
    data = DataSource(
        stats=stats,
        path=path,
        column=scalar("column"),
        column_type=(scalar("column_type") or None) and scalar("column_type").lower(),
        success=scalar("success"),
        failure=scalar("failure"),
        categories=tuple(_words(scalar("categories", ""))),
        delimiter=delimiter,
    )
    kwargs = dict(
        model=model,
        priors=priors,
        c_grid=c_grid,
        a_grid=a_grid,
        eps_grid=eps_grid,
        mc_draws=integer("draws", DEFAULT_DRAWS),
        seed=integer("seed", DEFAULT_SEED),
        method=scalar("method", "auto").lower(),
        data=data,
        output_format=scalar("format", "csv").lower(),
    )
    if classes:
        kwargs["classes"] = classes
    if analyses:
        kwargs["analyses"] = analyses
    return RunConfig(**kwargs)


def load_config(path: str) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_config(text, base_dir=os.path.dirname(os.path.abspath(path)))
