"""Backend selection for the hot kernels.

The compiled ``_core`` extension is used when it imports; otherwise the
numpy fallback. Set ``ITX_BACKEND=python`` to force the fallback.
"""

import os

from . import _fallback

BACKEND = "python"
_impl = _fallback

if os.environ.get("ITX_BACKEND", "").lower() not in ("python", "numpy", "fallback"):
    try:
        from . import _core as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        _impl = _fallback

loggamma = _impl.loggamma
gauss2f1_matrix = _impl.gauss2f1_matrix
gauss2f1_pairs = _impl.gauss2f1_pairs
hyp1f2_scaled = _impl.hyp1f2_scaled
bessel_i_series = _impl.bessel_i_series
series_aac = _impl.series_aac


def backend():
    """Name of the active kernel backend ("cython" or "python")."""
    return BACKEND
