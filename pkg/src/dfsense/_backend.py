"""Select the compiled sampling kernels when available.

Set ``DFSENSE_PURE_PYTHON=1`` to force the numpy fallback.
"""
import os

from . import _rng_py

if os.environ.get("DFSENSE_PURE_PYTHON", "") not in ("", "0"):
    kernels = _rng_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as kernels
        BACKEND = "cython"
    except ImportError:
        kernels = _rng_py
        BACKEND = "python"

MASK64 = (1 << 64) - 1


def _splitmix64_int(x: int) -> int:
    z = (x + 0x9E3779B97F4A7C15) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def derive_key(*parts: int) -> int:
    """Fold integers into a 64-bit stream key."""
    h = 0x6A09E667F3BCC908
    for p in parts:
        h = _splitmix64_int((h ^ (int(p) & MASK64)) & MASK64)
    return h
