"""Hot-kernel backend selection.

The batched successive-cancellation pass and the packed GF(2) rank dominate
simulation runtime, so they exist twice: a Cython extension (built at
install time when a compiler is available) and a pure-numpy fallback with
identical semantics.  The extension is preferred; set POLARWIRE_PURE_PY=1
to force the fallback.  benchmarks/bench_kernels.py compares the two.
"""

from __future__ import annotations

import os

import numpy as np

from . import reference

if os.environ.get("POLARWIRE_PURE_PY") == "1":
    _impl = reference
else:
    try:
        from . import _accel as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = reference

BACKEND: str = _impl.BACKEND
sc_decode_batch = _impl.sc_decode_batch
rank_packed = _impl.rank_packed


def pack_bit_rows(bits: np.ndarray) -> np.ndarray:
    """Pack 0/1 rows into little-endian uint64 words for rank_packed."""
    bits = np.ascontiguousarray(bits, dtype=np.uint8)
    if bits.ndim != 2:
        raise ValueError("expected a 2-D bit matrix")
    nrows, ncols = bits.shape
    nwords = max(1, (ncols + 63) // 64)
    packed = np.packbits(bits, axis=1, bitorder="little") if ncols else np.zeros(
        (nrows, 0), dtype=np.uint8)
    out = np.zeros((nrows, nwords * 8), dtype=np.uint8)
    out[:, : packed.shape[1]] = packed
    return out.view(np.uint64)
