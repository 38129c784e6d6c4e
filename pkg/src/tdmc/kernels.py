"""Kernel backend selection for the hot state-set loops.

The numba backend is used when importable; set ``TDMC_KERNELS=numpy`` to
force the pure-numpy fallback (or ``TDMC_KERNELS=numba`` to fail loudly when
numba is missing).  ``benchmarks/bench_kernels.py`` compares the two.
"""

import os

from . import _kernels_np


def get_backend(name=None):
    """Resolve a kernel backend by name or from ``TDMC_KERNELS``."""
    if name is None:
        name = os.environ.get("TDMC_KERNELS", "auto")
    if name == "numpy":
        return _kernels_np
    if name == "numba":
        from . import _kernels_nb

        return _kernels_nb
    if name == "auto":
        try:
            from . import _kernels_nb

            return _kernels_nb
        except ImportError:
            return _kernels_np
    raise ValueError(f"unknown kernel backend {name!r}")


def backend_name(backend=None):
    return (backend or get_backend()).NAME
