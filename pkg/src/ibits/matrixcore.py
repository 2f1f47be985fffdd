"""Dense complex matrix arithmetic and structure checks.

Matrices are plain ``numpy.ndarray`` objects of dtype complex128, row-major,
treated as immutable once built.  Dimensions in this project never exceed
4096, so dense storage is acceptable everywhere; structured *algorithms*
(see :mod:`ibits.gates`) avoid materializing large operators, but the value
type stays a dense array.
"""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np

from .errors import ShapeError, ValidationError

__all__ = [
    "as_matrix",
    "identity",
    "matmul",
    "kron",
    "dagger",
    "is_unitary",
    "permutation_matrix",
    "parse_matrix_text",
    "format_matrix_text",
    "load_matrix",
    "save_matrix",
]


def as_matrix(data) -> np.ndarray:
    """Coerce to a finite 2-D complex128 array (copying only if needed)."""
    m = np.asarray(data, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] == 0 or m.shape[1] == 0:
        raise ShapeError(f"expected a non-empty 2-D matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValidationError("matrix contains NaN or Inf entries")
    return m


def identity(n: int) -> np.ndarray:
    if n < 1:
        raise ValidationError(f"identity size must be positive, got {n}")
    return np.eye(n, dtype=np.complex128)


def matmul(a, b) -> np.ndarray:
    """Matrix product a @ b with an explicit inner-dimension check."""
    a, b = as_matrix(a), as_matrix(b)
    if a.shape[1] != b.shape[0]:
        raise ShapeError(f"cannot multiply {a.shape} by {b.shape}")
    return a @ b


def kron(a, b) -> np.ndarray:
    """Kronecker product with a's indices most significant."""
    return np.kron(as_matrix(a), as_matrix(b))


def dagger(a) -> np.ndarray:
    """Conjugate transpose."""
    return as_matrix(a).conj().T


def is_unitary(a, tol: float = 1e-10) -> bool:
    """True iff max |a†a - I| <= tol.  Raises on a non-square input."""
    a = as_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise ShapeError(f"unitarity is only defined for square matrices, got {a.shape}")
    delta = a.conj().T @ a - np.eye(a.shape[0])
    return float(np.abs(delta).max()) <= tol


def permutation_matrix(perm: Sequence[int]) -> np.ndarray:
    """Matrix with entry 1 at (perm[k], k): maps basis state k to perm[k]."""
    perm = np.asarray(perm)
    n = perm.shape[0]
    if perm.ndim != 1 or n == 0:
        raise ValidationError("permutation must be a non-empty 1-D index sequence")
    if not np.issubdtype(perm.dtype, np.integer):
        raise ValidationError("permutation indices must be integers")
    seen = np.zeros(n, dtype=bool)
    for idx in perm:
        if idx < 0 or idx >= n:
            raise ValidationError(f"permutation index {idx} out of range 0..{n - 1}")
        if seen[idx]:
            raise ValidationError(f"permutation repeats index {idx}")
        seen[idx] = True
    m = np.zeros((n, n), dtype=np.complex128)
    m[perm, np.arange(n)] = 1.0
    return m


def parse_matrix_text(text: str) -> np.ndarray:
    """Parse the plain-text matrix format.

    First non-comment line: ``rows cols``.  Then rows*cols whitespace-separated
    ``re im`` pairs in row-major order (line breaks are not significant).
    Lines starting with '#' are skipped.
    """
    tokens: list[str] = []
    for line in text.splitlines():
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        tokens.extend(stripped.split())
    if len(tokens) < 2:
        raise ValidationError("matrix text is missing the 'rows cols' header")
    try:
        rows, cols = int(tokens[0]), int(tokens[1])
    except ValueError as exc:
        raise ValidationError(f"bad matrix header {tokens[0]!r} {tokens[1]!r}") from exc
    if rows < 1 or cols < 1:
        raise ValidationError(f"matrix dimensions must be positive, got {rows}x{cols}")
    values = tokens[2:]
    if len(values) != 2 * rows * cols:
        raise ValidationError(
            f"expected {2 * rows * cols} numbers for a {rows}x{cols} matrix, got {len(values)}"
        )
    try:
        flat = np.array([float(v) for v in values], dtype=np.float64)
    except ValueError as exc:
        raise ValidationError(f"malformed number in matrix body: {exc}") from exc
    pairs = flat.reshape(rows * cols, 2)
    return as_matrix((pairs[:, 0] + 1j * pairs[:, 1]).reshape(rows, cols))


def format_matrix_text(m) -> str:
    m = as_matrix(m)
    lines = [f"{m.shape[0]} {m.shape[1]}"]
    for row in m:
        lines.append(" ".join(f"{float(v.real)!r} {float(v.imag)!r}" for v in row))
    return "\n".join(lines) + "\n"


def load_matrix(path) -> np.ndarray:
    with open(path, encoding="utf-8") as fh:
        return parse_matrix_text(fh.read())


def save_matrix(path, m) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_matrix_text(m))
