"""Hypercomplex operator calculus over R, C, H, O and Cl(0,n).

Setting ``SLICESEMI_THREADS`` caps the BLAS thread pool; it must be set before
numpy is first imported to take effect.
"""

import os as _os

_threads = _os.environ.get("SLICESEMI_THREADS")
if _threads:
    for _var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        _os.environ.setdefault(_var, _threads)

from .algebra import (  # noqa: E402
    AlgebraDescriptor,
    AlgebraElement,
    ConeDecomposition,
    Kind,
    algebra,
)
from .errors import SliceSemiError  # noqa: E402

__all__ = [
    "AlgebraDescriptor",
    "AlgebraElement",
    "ConeDecomposition",
    "Kind",
    "SliceSemiError",
    "algebra",
]
__version__ = "0.1.0"
