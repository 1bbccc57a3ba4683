"""Hot inner loops, each with a numba and a pure-numpy implementation.

The public names at the bottom of this module are bound to one of the two
implementations according to :mod:`renyirobust._accel`. Both variants take and
return the same types; tests exercise them side by side through the
``NUMBA_KERNELS`` and ``NUMPY_KERNELS`` tables.
"""

import math

import numpy as np

from ._accel import USE_NUMBA, NUMBA_AVAILABLE, njit


# --------------------------------------------------------------------------
# numpy implementations
# --------------------------------------------------------------------------


def _mt_gamma_candidates_np(z, u, d, c):
    """Marsaglia-Tsang candidates ``d*v`` and their acceptance mask."""
    v = 1.0 + c * z
    positive = v > 0.0
    v = np.where(positive, v * v * v, 1.0)
    z2 = z * z
    with np.errstate(divide="ignore"):
        logu = np.log(u)
    squeeze = u < 1.0 - 0.0331 * z2 * z2
    full = logu < 0.5 * z2 + d * (1.0 - v + np.log(v))
    accept = positive & (squeeze | full)
    return d * v, accept


def _central_moments_np(x):
    """Two-pass sums of centred powers: ``(n, mean, M2, M3, M4)``."""
    n = x.shape[0]
    if n == 0:
        return 0, 0.0, 0.0, 0.0, 0.0
    mean = x.mean()
    dev = x - mean
    # second pass removes the residual rounding in the first mean
    corr = dev.mean()
    mean += corr
    dev -= corr
    dev2 = dev * dev
    return n, float(mean), float(dev2.sum()), float((dev2 * dev).sum()), float((dev2 * dev2).sum())


def _selfnorm_renyi_np(lr, a):
    """Self-normalised order-``a`` term and its delta-method SE.

    With ``w = exp(lr)`` returns ``log mean(w**a) - a log mean(w)`` and the
    standard error of that quantity. Both are invariant to shifting ``lr``.
    """
    n = lr.shape[0]
    shift = lr.max()
    v = np.exp(lr - shift)
    u = np.exp(a * (lr - shift))
    mu = u.mean()
    mv = v.mean()
    z = u / mu - a * v / mv
    se = z.std(ddof=1) / math.sqrt(n) if n > 1 else 0.0
    return float(math.log(mu) - a * math.log(mv)), float(se)


def _selfnorm_kl_np(lr):
    """``mean(w lr)/mean(w) - log mean(w)`` with ``w = exp(lr)``, and its SE."""
    n = lr.shape[0]
    shift = lr.max()
    v = np.exp(lr - shift)
    mv = v.mean()
    p = (v * lr).mean() / mv
    z = v * (lr - p - 1.0) / mv
    se = z.std(ddof=1) / math.sqrt(n) if n > 1 else 0.0
    return float(p - (math.log(mv) + shift)), float(se)


def _beta_log_kernel_np(theta, e1, e2, const):
    """``const + e1*log(theta) + e2*log(1-theta)`` elementwise."""
    out = np.full(theta.shape, const, dtype=np.float64)
    if e1 != 0.0:
        out += e1 * np.log(theta)
    if e2 != 0.0:
        out += e2 * np.log1p(-theta)
    return out


def _log_mix2_np(l1, l2, log_w1, log_w2):
    """``log(exp(log_w1 + l1) + exp(log_w2 + l2))`` elementwise."""
    return np.logaddexp(log_w1 + l1, log_w2 + l2)


# --------------------------------------------------------------------------
# numba implementations
# --------------------------------------------------------------------------

if NUMBA_AVAILABLE:

    @njit(cache=True, nogil=True)
    def _mt_gamma_candidates_nb(z, u, d, c):
        n = z.shape[0]
        out = np.empty(n)
        accept = np.empty(n, dtype=np.bool_)
        for i in range(n):
            zi = z[i]
            v = 1.0 + c * zi
            if v <= 0.0:
                out[i] = d
                accept[i] = False
                continue
            v = v * v * v
            out[i] = d * v
            z2 = zi * zi
            ui = u[i]
            if ui < 1.0 - 0.0331 * z2 * z2:
                accept[i] = True
            elif ui > 0.0 and math.log(ui) < 0.5 * z2 + d * (1.0 - v + math.log(v)):
                accept[i] = True
            else:
                accept[i] = False
        return out, accept

    @njit(cache=True, nogil=True)
    def _central_moments_nb(x):
        # single-pass update of centred power sums (Terriberry)
        n = 0
        mean = 0.0
        m2 = 0.0
        m3 = 0.0
        m4 = 0.0
        for i in range(x.shape[0]):
            n1 = n
            n += 1
            delta = x[i] - mean
            delta_n = delta / n
            delta_n2 = delta_n * delta_n
            term1 = delta * delta_n * n1
            mean += delta_n
            m4 += term1 * delta_n2 * (n * n - 3 * n + 3) + 6.0 * delta_n2 * m2 - 4.0 * delta_n * m3
            m3 += term1 * delta_n * (n - 2) - 3.0 * delta_n * m2
            m2 += term1
        return n, mean, m2, m3, m4

    @njit(cache=True, nogil=True)
    def _selfnorm_renyi_nb(lr, a):
        n = lr.shape[0]
        shift = -np.inf
        for i in range(n):
            if lr[i] > shift:
                shift = lr[i]
        mu = 0.0
        mv = 0.0
        for i in range(n):
            mu += math.exp(a * (lr[i] - shift))
            mv += math.exp(lr[i] - shift)
        mu /= n
        mv /= n
        mean = 0.0
        m2 = 0.0
        for i in range(n):
            z = math.exp(a * (lr[i] - shift)) / mu - a * math.exp(lr[i] - shift) / mv
            delta = z - mean
            mean += delta / (i + 1)
            m2 += delta * (z - mean)
        se = math.sqrt(m2 / (n - 1) / n) if n > 1 else 0.0
        return math.log(mu) - a * math.log(mv), se

    @njit(cache=True, nogil=True)
    def _selfnorm_kl_nb(lr):
        n = lr.shape[0]
        shift = -np.inf
        for i in range(n):
            if lr[i] > shift:
                shift = lr[i]
        mv = 0.0
        pw = 0.0
        for i in range(n):
            v = math.exp(lr[i] - shift)
            mv += v
            pw += v * lr[i]
        mv /= n
        p = pw / n / mv
        mean = 0.0
        m2 = 0.0
        for i in range(n):
            z = math.exp(lr[i] - shift) * (lr[i] - p - 1.0) / mv
            delta = z - mean
            mean += delta / (i + 1)
            m2 += delta * (z - mean)
        se = math.sqrt(m2 / (n - 1) / n) if n > 1 else 0.0
        return p - (math.log(mv) + shift), se

    @njit(cache=True, nogil=True)
    def _beta_log_kernel_nb(theta, e1, e2, const):
        n = theta.shape[0]
        out = np.empty(n)
        for i in range(n):
            v = const
            if e1 != 0.0:
                v += e1 * math.log(theta[i])
            if e2 != 0.0:
                v += e2 * math.log1p(-theta[i])
            out[i] = v
        return out

    @njit(cache=True, nogil=True)
    def _log_mix2_nb(l1, l2, log_w1, log_w2):
        n = l1.shape[0]
        out = np.empty(n)
        for i in range(n):
            x = log_w1 + l1[i]
            y = log_w2 + l2[i]
            if x == -np.inf and y == -np.inf:
                out[i] = -np.inf
            elif x > y:
                out[i] = x + math.log1p(math.exp(y - x))
            else:
                out[i] = y + math.log1p(math.exp(x - y))
        return out


NUMPY_KERNELS = {
    "mt_gamma_candidates": _mt_gamma_candidates_np,
    "central_moments": _central_moments_np,
    "selfnorm_renyi": _selfnorm_renyi_np,
    "selfnorm_kl": _selfnorm_kl_np,
    "beta_log_kernel": _beta_log_kernel_np,
    "log_mix2": _log_mix2_np,
}

if NUMBA_AVAILABLE:
    NUMBA_KERNELS = {
        "mt_gamma_candidates": _mt_gamma_candidates_nb,
        "central_moments": _central_moments_nb,
        "selfnorm_renyi": _selfnorm_renyi_nb,
        "selfnorm_kl": _selfnorm_kl_nb,
        "beta_log_kernel": _beta_log_kernel_nb,
        "log_mix2": _log_mix2_nb,
    }
else:  # pragma: no cover
    NUMBA_KERNELS = {}

_ACTIVE = NUMBA_KERNELS if USE_NUMBA else NUMPY_KERNELS

mt_gamma_candidates = _ACTIVE["mt_gamma_candidates"]
central_moments = _ACTIVE["central_moments"]
selfnorm_renyi = _ACTIVE["selfnorm_renyi"]
selfnorm_kl = _ACTIVE["selfnorm_kl"]
beta_log_kernel = _ACTIVE["beta_log_kernel"]
log_mix2 = _ACTIVE["log_mix2"]
