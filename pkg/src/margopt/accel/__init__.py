"""Hot numeric kernels with selectable backend.

The numba-compiled backend is used by default; set ``MARGOPT_DISABLE_NUMBA=1``
(or install without numba) to fall back to the pure-numpy reference
implementation. ``benchmarks/bench_accel.py`` compares the two.
"""

import os

_FLAG = os.environ.get("MARGOPT_DISABLE_NUMBA", "").strip().lower()
NUMBA_DISABLED = _FLAG in ("1", "true", "yes", "on")

if NUMBA_DISABLED:
    from . import reference as _impl
    BACKEND = "numpy"
else:
    try:
        from . import jit as _impl
        BACKEND = "numba"
    except ImportError:
        from . import reference as _impl
        BACKEND = "numpy"

matern_cross = _impl.matern_cross
matern_gram = _impl.matern_gram
lml_value_grad = _impl.lml_value_grad
predict_meanvar = _impl.predict_meanvar
mixture_ei = _impl.mixture_ei
systematic_resample = _impl.systematic_resample
iso_normal_logpdf = _impl.iso_normal_logpdf
diag_normal_logpdf = _impl.diag_normal_logpdf
pickover_trajectory = _impl.pickover_trajectory

__all__ = [
    "BACKEND",
    "NUMBA_DISABLED",
    "matern_cross",
    "matern_gram",
    "lml_value_grad",
    "predict_meanvar",
    "mixture_ei",
    "systematic_resample",
    "iso_normal_logpdf",
    "diag_normal_logpdf",
    "pickover_trajectory",
]
