"""Backend selection for the hot numeric kernels.

Numba is used when importable unless ``RENYIROBUST_DISABLE_NUMBA`` is set to a
truthy value, in which case the vectorised numpy implementations are used.
The flag is read once at import time.
"""

import os

_FALSE = {"", "0", "false", "no", "off"}


def _flag_disabled() -> bool:
    return os.environ.get("RENYIROBUST_DISABLE_NUMBA", "").strip().lower() not in _FALSE


try:
    import numba  # noqa: F401
    from numba import njit

    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    NUMBA_AVAILABLE = False
    njit = None

USE_NUMBA = NUMBA_AVAILABLE and not _flag_disabled()


def backend_name() -> str:
    return "numba" if USE_NUMBA else "numpy"
