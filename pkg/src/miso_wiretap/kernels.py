"""Backend selection for the scalar kernels.

The compiled ``_ckernels`` extension is used when it imports; otherwise, or
when ``MISO_WIRETAP_PURE_PYTHON=1`` is set, the pure-Python ``_pykernels``
module is used. Callers go through :data:`impl` at call time, so
:func:`use_backend` switches every dependent module at once.
"""

import os

from . import _pykernels

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None

BACKENDS = {"python": _pykernels}
if _ckernels is not None:
    BACKENDS["cython"] = _ckernels


def _default_backend():
    if os.environ.get("MISO_WIRETAP_PURE_PYTHON", "") not in ("", "0"):
        return "python"
    return "cython" if "cython" in BACKENDS else "python"


BACKEND = _default_backend()
impl = BACKENDS[BACKEND]


def use_backend(name):
    """Switch the active kernel backend (``"cython"`` or ``"python"``)."""
    global BACKEND, impl
    if name not in BACKENDS:
        raise ValueError(f"backend {name!r} unavailable; have {sorted(BACKENDS)}")
    BACKEND = name
    impl = BACKENDS[name]
    return impl


def available_backends():
    return sorted(BACKENDS)
