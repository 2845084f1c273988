"""Process-wide precision setting.

The precision (in bits) used for high-precision enclosures is read once from
``SPECTRA_PRECISION`` (default 128). The CLI may override it at startup,
before any computation runs.
"""
from __future__ import annotations

import os

DEFAULT_PRECISION = 128

_precision: int | None = None


def get_precision() -> int:
    global _precision
    if _precision is None:
        raw = os.environ.get("SPECTRA_PRECISION")
        _precision = int(raw) if raw else DEFAULT_PRECISION
        if _precision < 53:
            raise ValueError("precision must be at least 53 bits")
    return _precision


def set_precision(bits: int) -> None:
    global _precision
    if bits < 53:
        raise ValueError("precision must be at least 53 bits")
    _precision = int(bits)
