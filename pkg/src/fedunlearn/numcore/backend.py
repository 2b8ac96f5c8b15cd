"""Kernel backend selection.

The numba build is the default hot path; set FEDUNLEARN_BACKEND=numpy to use
the pure-numpy fallback, or =numba to insist on numba (import error if it is
unavailable). Selection happens once at import time.
"""

import os

from ..errors import InputError

ENV_VAR = "FEDUNLEARN_BACKEND"


def load_kernels(name: str):
    if name == "numpy":
        from . import kernels_numpy

        return kernels_numpy
    if name == "numba":
        from . import kernels_numba

        return kernels_numba
    raise InputError(f"{ENV_VAR} must be 'numpy' or 'numba', got {name!r}")


def _select():
    choice = os.environ.get(ENV_VAR, "").strip().lower()
    if choice:
        return load_kernels(choice)
    try:
        return load_kernels("numba")
    except ImportError:
        return load_kernels("numpy")


kernels = _select()
BACKEND_NAME: str = kernels.NAME
