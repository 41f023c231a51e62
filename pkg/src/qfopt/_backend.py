"""Kernel backend selection.

Set ``QFOPT_BACKEND=numpy`` to force the pure-numpy kernels; the default is
numba when it imports cleanly.
"""

import logging
import os

log = logging.getLogger(__name__)

ENV_VAR = "QFOPT_BACKEND"


def _load():
    choice = os.environ.get(ENV_VAR, "numba").strip().lower()
    if choice not in ("numba", "numpy"):
        raise ValueError(f"{ENV_VAR} must be 'numba' or 'numpy', got {choice!r}")
    if choice == "numba":
        try:
            from . import _kernels_numba as mod
            return mod
        except ImportError:  # pragma: no cover - numba is a declared dependency
            log.warning("numba unavailable, falling back to numpy kernels")
    from . import _kernels_numpy as mod
    return mod


kernels = _load()
