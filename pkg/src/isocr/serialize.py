"""JSON-friendly encodings of complex matrices and numbers."""

from __future__ import annotations

import numpy as np

from .errors import DimensionError


def fmt(x: float) -> str:
    """Locale-independent 12-significant-digit rendering used in every output file."""
    x = float(x)
    if x == 0.0:
        return "0"
    return format(x, ".12g")


def complex_pair(z: complex) -> list[float]:
    z = complex(z)
    return [float(z.real), float(z.imag)]


def matrix_to_json(m) -> list[list[list[float]]]:
    """Full matrix as rows of ``[re, im]`` pairs."""
    a = np.asarray(m, dtype=complex)
    return [[complex_pair(z) for z in row] for row in a]


def matrix_from_json(rows) -> np.ndarray:
    try:
        a = np.array([[complex(re, im) for re, im in row] for row in rows], dtype=complex)
    except (TypeError, ValueError) as exc:
        raise DimensionError(f"malformed matrix entries: {exc}") from exc
    if a.ndim != 2:
        raise DimensionError("matrix rows have unequal lengths")
    return a


def hermitian_to_json(m) -> list[list[list[float]]]:
    """Lower triangle (row ``i`` holds ``i + 1`` entries) of a Hermitian matrix."""
    a = np.asarray(m, dtype=complex)
    return [[complex_pair(a[i, j]) for j in range(i + 1)] for i in range(a.shape[0])]


def hermitian_from_json(rows) -> np.ndarray:
    d = len(rows)
    a = np.zeros((d, d), dtype=complex)
    for i, row in enumerate(rows):
        if len(row) != i + 1:
            raise DimensionError(
                f"lower-triangular row {i} must have {i + 1} entries, got {len(row)}"
            )
        for j, (re, im) in enumerate(row):
            a[i, j] = complex(re, im)
            a[j, i] = complex(re, -im)
        if abs(a[i, i].imag) > 1e-12:
            raise DimensionError(f"diagonal entry {i} of a Hermitian matrix is not real")
        a[i, i] = a[i, i].real
    return a
