"""Kernel backend selection.

The compiled extension ``rank3frob._ckernels`` is used when it imports;
otherwise the numpy fallback.  Set ``RANK3FROB_BACKEND=python`` to force the
fallback.
"""

from __future__ import annotations

import os

from . import _pykernels

python = _pykernels
compiled = None

if os.environ.get("RANK3FROB_BACKEND", "").lower() != "python":
    try:
        from . import _ckernels as compiled  # type: ignore[no-redef]
    except ImportError:  # pragma: no cover - depends on build
        compiled = None

active = compiled if compiled is not None else python
BACKEND = active.BACKEND


def build_exp_table(spec):
    return active.build_exp_table(spec)


def char_sum(zech, q, rows_a, rows_b, x_lo, x_hi, backend=None):
    """See :func:`rank3frob._pykernels.char_sum`."""
    return _pick(backend).char_sum(zech, q, rows_a, rows_b, x_lo, x_hi)


def _pick(backend):
    if backend is None:
        return active
    if backend == "python":
        return python
    if backend == "compiled":
        if compiled is None:
            raise RuntimeError("compiled kernels are not available")
        return compiled
    raise ValueError(f"unknown backend {backend!r}")
