"""Hot kernels: compiled when the extension is built, numpy otherwise.

``KERNEL`` names the implementation selected at import time; setting the
environment variable ``TUBEINV_PURE_PYTHON=1`` forces the fallback.
"""
from __future__ import annotations

import os

from . import modp_py

if os.environ.get("TUBEINV_PURE_PYTHON") == "1":
    echelon_modp = modp_py.echelon_modp
    KERNEL = "python"
else:
    try:
        from ._modp import echelon_modp  # type: ignore[no-redef]

        KERNEL = "cython"
    except ImportError:  # extension not built
        echelon_modp = modp_py.echelon_modp
        KERNEL = "python"

__all__ = ["echelon_modp", "KERNEL", "modp_py"]
