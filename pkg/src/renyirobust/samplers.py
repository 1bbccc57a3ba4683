"""Seeded, reproducible variate generation.

Each :class:`SeededStream` maps to a counter-based Philox generator keyed by
``(seed, stream_id)``, so distinct substreams are independent and cheap to
create, and a given stream always yields the same sequence. Gamma variates use
the Marsaglia-Tsang squeeze/acceptance method (with the ``U**(1/shape)`` boost
for shapes below one); Beta and Dirichlet variates are normalised Gammas.

Every ``sample_*`` function is a pure function of its arguments: calling it
twice with the same stream returns the same draws.
"""

from __future__ import annotations

import functools
import hashlib
import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import InvalidParameterError
from .models import Beta, Dirichlet, Mixture, Normal

_U64 = (1 << 64) - 1
# extra candidates per acceptance round; acceptance is >= 0.95 for shape >= 1
_OVERDRAW = 1.06


@dataclass(frozen=True)
class SeededStream:
    seed: int
    stream_id: int = 0

    def __post_init__(self):
        for name in ("seed", "stream_id"):
            value = getattr(self, name)
            if int(value) != value or not 0 <= int(value) <= _U64:
                raise InvalidParameterError(f"{name} must be an unsigned 64-bit integer, got {value!r}")
            object.__setattr__(self, name, int(value))

    def generator(self) -> np.random.Generator:
        """A fresh generator positioned at the start of this stream."""
        return np.random.Generator(np.random.Philox(key=self.seed | (self.stream_id << 64)))

    def substream(self, *labels) -> "SeededStream":
        """Child stream whose id is a stable hash of this id and ``labels``."""
        return SeededStream(self.seed, stable_hash64(self.stream_id, *labels))


def stable_hash64(*parts) -> int:
    """Platform-independent 64-bit hash of the ``repr`` of ``parts``."""
    digest = hashlib.blake2b(repr(parts).encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def _as_generator(stream) -> np.random.Generator:
    if isinstance(stream, np.random.Generator):
        return stream
    if isinstance(stream, SeededStream):
        return stream.generator()
    raise TypeError(f"expected SeededStream or numpy Generator, got {type(stream).__name__}")


def _count(size) -> int:
    return 1 if size is None else int(size)


def _finish(values, size):
    return float(values[0]) if size is None else values


# --------------------------------------------------------------------------
# gamma
# --------------------------------------------------------------------------


def _gamma_ge1(gen: np.random.Generator, shape: float, n: int) -> np.ndarray:
    d = shape - 1.0 / 3.0
    c = 1.0 / math.sqrt(9.0 * d)
    out = np.empty(n)
    filled = 0
    while filled < n:
        need = n - filled
        m = int(need * _OVERDRAW) + 16
        z = gen.standard_normal(m)
        u = gen.random(m)
        cand, ok = kernels.mt_gamma_candidates(z, u, d, c)
        good = cand[ok][:need]
        out[filled:filled + good.size] = good
        filled += good.size
    return out


def _log_gamma_draws(gen: np.random.Generator, shape: float, n: int) -> np.ndarray:
    """Logs of Gamma(shape, 1) draws; stays finite for very small shapes."""
    if shape >= 1.0:
        return np.log(_gamma_ge1(gen, shape, n))
    g = _gamma_ge1(gen, shape + 1.0, n)
    u = 1.0 - gen.random(n)  # (0, 1]
    return np.log(g) + np.log(u) / shape


def sample_gamma(stream, shape: float, size=None):
    """Gamma(shape, 1) variates."""
    shape = float(shape)
    if not shape > 0.0:
        raise InvalidParameterError(f"gamma shape must be positive, got {shape!r}")
    gen = _as_generator(stream)
    n = _count(size)
    if shape >= 1.0:
        values = _gamma_ge1(gen, shape, n)
    else:
        values = np.exp(_log_gamma_draws(gen, shape, n))
        # exp underflow for tiny shapes: redraw until strictly positive
        bad = ~(values > 0.0)
        while bad.any():
            values[bad] = np.exp(_log_gamma_draws(gen, shape, int(bad.sum())))
            bad = ~(values > 0.0)
    return _finish(values, size)


# --------------------------------------------------------------------------
# beta, dirichlet, normal
# --------------------------------------------------------------------------


def _beta_from_logs(lx: np.ndarray, ly: np.ndarray) -> np.ndarray:
    # x / (x + y) = 1 / (1 + exp(ly - lx))
    return 1.0 / (1.0 + np.exp(ly - lx))


def sample_beta(stream, alpha: float, beta: float, size=None):
    """Beta(alpha, beta) variates strictly inside (0, 1).

    Draws that round to exactly 0 or 1 are rejected and redrawn.
    """
    alpha, beta = float(alpha), float(beta)
    if not (alpha > 0.0 and beta > 0.0):
        raise InvalidParameterError("Beta shapes must be positive")
    gen = _as_generator(stream)
    n = _count(size)
    theta = _beta_from_logs(_log_gamma_draws(gen, alpha, n), _log_gamma_draws(gen, beta, n))
    bad = ~((theta > 0.0) & (theta < 1.0))
    while bad.any():
        m = int(bad.sum())
        theta[bad] = _beta_from_logs(_log_gamma_draws(gen, alpha, m), _log_gamma_draws(gen, beta, m))
        bad = ~((theta > 0.0) & (theta < 1.0))
    return _finish(theta, size)


def _dirichlet_rows(gen, alphas, n):
    logs = np.column_stack([_log_gamma_draws(gen, a, n) for a in alphas])
    logs -= logs.max(axis=1, keepdims=True)
    x = np.exp(logs)
    x /= x.sum(axis=1, keepdims=True)
    return x


def sample_dirichlet(stream, alphas, size=None):
    """Dirichlet(alphas) probability vectors (rows), each summing to one."""
    alphas = tuple(float(a) for a in alphas)
    if len(alphas) < 2 or not all(a > 0.0 for a in alphas):
        raise InvalidParameterError("Dirichlet needs k >= 2 positive concentrations")
    gen = _as_generator(stream)
    n = _count(size)
    x = _dirichlet_rows(gen, alphas, n)
    bad = ~np.all(x > 0.0, axis=1)
    while bad.any():
        x[bad] = _dirichlet_rows(gen, alphas, int(bad.sum()))
        bad = ~np.all(x > 0.0, axis=1)
    return x[0] if size is None else x


def sample_normal(stream, mean: float, variance: float, size=None):
    """Normal(mean, variance) variates."""
    variance = float(variance)
    if not variance > 0.0:
        raise InvalidParameterError("variance must be positive")
    gen = _as_generator(stream)
    values = mean + math.sqrt(variance) * gen.standard_normal(_count(size))
    return _finish(values, size)


# --------------------------------------------------------------------------
# posterior draws
# --------------------------------------------------------------------------


@functools.lru_cache(maxsize=8)
def _cached_draws(dist, stream: SeededStream, n: int) -> np.ndarray:
    if isinstance(dist, Beta):
        out = sample_beta(stream, dist.alpha, dist.beta, n)
    elif isinstance(dist, Dirichlet):
        out = sample_dirichlet(stream, dist.alphas, n)
    elif isinstance(dist, Normal):
        out = sample_normal(stream, dist.mean, dist.variance, n)
    else:
        raise TypeError(f"cannot sample from {type(dist).__name__}")
    out.setflags(write=False)
    return out


def sample_posterior(dist, stream: SeededStream, n: int) -> np.ndarray:
    """``n`` draws from a conjugate member; read-only and memoised per stream.

    Repeated requests for the same (distribution, stream, n) share one array,
    which gives common random numbers across grid cells for free.
    """
    if isinstance(dist, Mixture):
        raise TypeError("Monte Carlo estimators only sample from conjugate base posteriors")
    return _cached_draws(dist, stream, int(n))
