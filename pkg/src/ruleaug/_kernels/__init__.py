"""Hot-kernel backend selection.

The compiled extension is used when it has been built (``python setup.py
build_ext --inplace`` or a wheel build); otherwise the NumPy fallback takes
over transparently. Set RULEAUG_PURE_KERNELS=1 to force the fallback.
"""

import os

from . import pure as _pure

_impl = _pure
if not os.environ.get("RULEAUG_PURE_KERNELS"):
    try:
        from . import _fast as _impl  # type: ignore[no-redef]
    except ImportError:
        pass

clause_mask = _impl.clause_mask
point_distances = _impl.point_distances
knn_indices = _impl.knn_indices

OP_EQ, OP_NE, OP_LT, OP_LE, OP_GT, OP_GE = range(6)


def backend_name() -> str:
    return _impl.BACKEND


def available_backends() -> dict:
    """Importable backend modules keyed by name (for tests and benchmarks)."""
    found = {"pure": _pure}
    try:
        from . import _fast

        found["compiled"] = _fast
    except ImportError:
        pass
    return found
