"""Evaluate every cell of a configured grid."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

from .. import __version__
from ..calibration import Calibration, calibrate
from ..curvature import CurvatureRequest, curvature_closed, curvature_mc
from ..divergence import DivergenceRequest, divergence_closed, divergence_mc, quadrature_oracle
from ..errors import FamilyMismatchError, RenyiRobustError
from ..estimate import Estimate
from ..models import Beta, ContaminationClass, Normal, base_posterior
from ..samplers import SeededStream, sample_posterior
from .config import RunConfig
from .ingest import ingest


@dataclass(frozen=True)
class CellKey:
    analysis: str
    a: float
    prior: Optional[tuple] = None
    c: Optional[float] = None
    epsilon: Optional[float] = None
    class_tag: Optional[str] = None
    d0: Optional[float] = None


@dataclass(frozen=True)
class Cell:
    key: CellKey
    estimate: Optional[Estimate] = None
    calibration: Optional[Calibration] = None
    error: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.error is None

    @property
    def value(self) -> Optional[float]:
        if self.estimate is not None:
            return self.estimate.value
        if self.calibration is not None:
            return self.calibration.p
        return None


@dataclass(frozen=True)
class ResultTable:
    cells: tuple[Cell, ...]
    metadata: dict = field(default_factory=dict)

    def select(self, analysis: str) -> list[Cell]:
        return [cell for cell in self.cells if cell.key.analysis == analysis]

    def lookup(self, **key) -> Cell:
        """The single cell whose key matches every given field."""
        hits = [cell for cell in self.cells if all(getattr(cell.key, k) == v for k, v in key.items())]
        if len(hits) != 1:
            raise KeyError(f"{len(hits)} cells match {key}")
        return hits[0]


def _failure(key, exc) -> Cell:
    return Cell(key, error=f"{type(exc).__name__}: {exc}")


def posterior_stream(seed: int, prior, stats) -> SeededStream:
    """Stream shared by every cell that samples the same base posterior."""
    return SeededStream(seed).substream("posterior", repr(base_posterior(prior, stats)))


def _curvature(cfg: RunConfig, req: CurvatureRequest) -> Estimate:
    closed = cfg.method == "closed" or (cfg.method == "auto" and isinstance(req.prior, Normal))
    return curvature_closed(req) if closed else curvature_mc(req)


def _divergence(cfg: RunConfig, req: DivergenceRequest) -> Estimate:
    geometric = req.class_tag is ContaminationClass.GEOMETRIC
    if cfg.method == "mc" or (cfg.method == "auto" and not (geometric and isinstance(req.prior, Normal))):
        return divergence_mc(req)
    if geometric:
        return divergence_closed(req)
    if isinstance(req.prior, Beta):
        return Estimate(quadrature_oracle(req))
    raise FamilyMismatchError(f"no closed form for the epsilon class with a {type(req.prior).__name__} prior")


def _guarded(fn, key):
    def call():
        try:
            return key, fn(), None
        except (RenyiRobustError, ArithmeticError, ValueError) as exc:
            return key, None, exc
    return call


def run(cfg: RunConfig, workers: int = 1, stats=None) -> ResultTable:
    """Evaluate the grid of ``cfg``; per-cell failures are recorded, not raised."""
    stats = ingest(cfg.data, cfg.model) if stats is None else stats
    want_div = bool({"divergence", "calibration"} & set(cfg.analyses))
    cells: dict[CellKey, Cell] = {}
    divergences: dict[CellKey, Cell] = {}

    pool = ThreadPoolExecutor(max_workers=max(1, int(workers)))
    try:
        for prior in cfg.priors:
            stream = posterior_stream(cfg.seed, prior, stats)
            if cfg.method != "closed":
                # draw once up front so parallel cells share one cached sample
                sample_posterior(base_posterior(prior, stats), stream, cfg.mc_draws)
            jobs = []
            for c in cfg.c_grid:
                for class_tag in cfg.classes:
                    for a in cfg.a_grid:
                        if "curvature" in cfg.analyses:
                            key = CellKey("curvature", a, prior.params, c, None, class_tag.value)
                            req = (prior, c, a, class_tag, stats, cfg.mc_draws, stream)
                            jobs.append(_guarded(lambda r=req: _curvature(cfg, CurvatureRequest(*r)), key))
                        if not want_div:
                            continue
                        for eps in cfg.eps_grid:
                            key = CellKey("divergence", a, prior.params, c, eps, class_tag.value)
                            req = (prior, c, a, class_tag, eps, stats, cfg.mc_draws, stream)
                            jobs.append(_guarded(lambda r=req: _divergence(cfg, DivergenceRequest(*r)), key))
            for key, est, exc in pool.map(lambda job: job(), jobs):
                cell = Cell(key, estimate=est) if exc is None else _failure(key, exc)
                (divergences if key.analysis == "divergence" else cells)[key] = cell
    finally:
        pool.shutdown()

    if "calibration" in cfg.analyses:
        for key, div in divergences.items():
            cal_key = CellKey("calibration", key.a, key.prior, key.c, key.epsilon, key.class_tag)
            if not div.ok:
                cells[cal_key] = Cell(cal_key, error=f"divergence unavailable: {div.error}")
                continue
            d0 = div.estimate.value
            cal_key = CellKey("calibration", key.a, key.prior, key.c, key.epsilon, key.class_tag, d0)
            try:
                if not math.isfinite(d0):
                    raise ValueError(f"divergence is not finite ({d0})")
                cells[cal_key] = Cell(cal_key, calibration=calibrate(d0, key.a))
            except (RenyiRobustError, ValueError) as exc:
                cells[cal_key] = _failure(cal_key, exc)
    if "divergence" in cfg.analyses:
        cells.update(divergences)

    order = {name: i for i, name in enumerate(("curvature", "divergence", "calibration"))}
    ordered = sorted(cells.values(), key=lambda cell: order[cell.key.analysis])  # stable within analysis
    return ResultTable(tuple(ordered), metadata_for(cfg, stats))


def metadata_for(cfg: RunConfig, stats) -> dict:
    return {
        "package_version": __version__,
        "model": cfg.model,
        "method": cfg.method,
        "seed": cfg.seed,
        "mc_draws": cfg.mc_draws,
        "stats": {k: (list(v) if isinstance(v, tuple) else v) for k, v in vars(stats).items()},
    }


def run_calibration(d0_values, orders) -> ResultTable:
    """Direct calibration of given divergence values, one cell per (d0, a)."""
    cells = []
    for d0 in d0_values:
        for a in orders:
            key = CellKey("calibration", a, d0=d0)
            try:
                cells.append(Cell(key, calibration=calibrate(d0, a)))
            except (RenyiRobustError, ValueError) as exc:
                cells.append(_failure(key, exc))
    return ResultTable(tuple(cells), {"package_version": __version__})
