"""Hot kernels: compiled Cython core when available, numpy fallback otherwise.

Set ``NVLAB_PURE_PYTHON=1`` to force the fallback. ``BACKEND`` names the
implementation in use; ``fallback`` and ``compiled`` (``None`` if not built)
expose both for benchmarking and cross-checks.
"""

import os

from . import _fallback as fallback

try:
    from . import _core as compiled
except ImportError:  # extension not built
    compiled = None

if compiled is not None and os.environ.get("NVLAB_PURE_PYTHON", "") not in ("1", "true"):
    _impl = compiled
    BACKEND = "compiled"
else:
    _impl = fallback
    BACKEND = "python"

kloosterman = _impl.kloosterman
ramanujan = _impl.ramanujan
di_sum = _impl.di_sum
hurwitz_half = _impl.hurwitz_half
afe_sum = _impl.afe_sum

__all__ = ["BACKEND", "compiled", "fallback", "kloosterman", "ramanujan", "di_sum", "hurwitz_half", "afe_sum"]
