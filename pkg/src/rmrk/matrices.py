"""Dense matrix kernels: validation, SVD routines, and Matrix Market I/O.

All solvers in this package treat a dense real matrix as a 2-D float64
numpy array in row-major (C) order. :func:`as_matrix` is the validating
constructor; every public entry point that accepts external data routes
through it so that NaN/Inf never enter the numerical core.
"""

from __future__ import annotations

import os
from typing import NamedTuple

import numpy as np

from .exceptions import DimensionTooLarge, NonConvergence, ParseError

FULL_SVD_MAX_DIM = 2048


def as_matrix(a) -> np.ndarray:
    """Validate and normalize input into a 2-D float64 C-contiguous array.

    Raises ValueError on wrong dimensionality, empty axes, or non-finite
    entries.
    """
    out = np.ascontiguousarray(a, dtype=np.float64)
    if out.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got ndim={out.ndim}")
    if out.shape[0] < 1 or out.shape[1] < 1:
        raise ValueError(f"matrix axes must be positive, got shape {out.shape}")
    if not np.isfinite(out).all():
        raise ValueError("matrix contains NaN or Inf entries")
    return out


class SvdTriple(NamedTuple):
    """Leading singular triples: u (m x k), s (length k, non-increasing), v (n x k)."""

    u: np.ndarray
    s: np.ndarray
    v: np.ndarray


def full_svd(a) -> SvdTriple:
    """Full thin SVD via LAPACK, guarded against accidental huge inputs."""
    a = as_matrix(a)
    if min(a.shape) > FULL_SVD_MAX_DIM:
        raise DimensionTooLarge(
            f"full_svd limited to min(m, n) <= {FULL_SVD_MAX_DIM}, got {a.shape}"
        )
    u, s, vt = np.linalg.svd(a, full_matrices=False)
    return SvdTriple(u, s, vt.T.copy())


def singular_values(a) -> np.ndarray:
    """Singular values only (non-increasing), without forming the bases."""
    a = as_matrix(a)
    if min(a.shape) > FULL_SVD_MAX_DIM:
        raise DimensionTooLarge(
            f"singular_values limited to min(m, n) <= {FULL_SVD_MAX_DIM}, got {a.shape}"
        )
    return np.linalg.svd(a, compute_uv=False)


def nuclear_norm(a) -> float:
    return float(singular_values(a).sum())


def _as_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def truncated_svd(a, k: int, tol: float = 1e-9, max_iter: int = 300, seed=0) -> SvdTriple:
    """Leading-k SVD by randomized subspace iteration.

    The sketch dimension is min(k + 8, min(m, n)); power iterations repeat
    until the largest relative change of the k leading singular values drops
    below ``tol`` (relative to sigma_1), or NonConvergence is raised after
    ``max_iter`` iterations. Deterministic for a fixed ``seed``.
    """
    a = as_matrix(a)
    m, n = a.shape
    if not 1 <= k <= min(m, n):
        raise ValueError(f"k must be in [1, min(m, n)] = [1, {min(m, n)}], got {k}")
    if tol <= 0 or max_iter < 1:
        raise ValueError("tol must be positive and max_iter >= 1")
    rng = _as_rng(seed)
    sketch = min(k + 8, min(m, n))
    q, _ = np.linalg.qr(a @ rng.standard_normal((n, sketch)))
    prev = None
    for _ in range(max_iter):
        q, _ = np.linalg.qr(a.T @ q)
        q, _ = np.linalg.qr(a @ q)
        b = q.T @ a
        ub, s, vt = np.linalg.svd(b, full_matrices=False)
        top = s[:k]
        if top[0] == 0.0:
            # zero matrix: any orthonormal bases are valid singular vectors
            return SvdTriple((q @ ub)[:, :k], top.copy(), vt[:k].T.copy())
        if prev is not None and np.max(np.abs(top - prev)) <= tol * top[0]:
            return SvdTriple((q @ ub)[:, :k], top.copy(), vt[:k].T.copy())
        prev = top.copy()
    raise NonConvergence(
        f"truncated_svd: singular values did not stabilize to tol={tol} "
        f"within {max_iter} iterations"
    )


def top_singular_pair(a, tol: float = 1e-9, max_iter: int = 300, seed=0):
    """Leading singular triple (u, sigma, v) of a nonzero matrix."""
    a = as_matrix(a)
    if not np.any(a):
        raise ValueError("top_singular_pair requires a nonzero matrix")
    u, s, v = truncated_svd(a, 1, tol=tol, max_iter=max_iter, seed=seed)
    return u[:, 0].copy(), float(s[0]), v[:, 0].copy()


_MM_HEADER = "%%MatrixMarket matrix array real general"


def write_matrix(path, a) -> None:
    """Write a dense matrix in Matrix Market array format (column-major).

    Values are serialized with 17 significant digits so that
    ``read_matrix(write_matrix(a)) == a`` bitwise.
    """
    a = as_matrix(a)
    m, n = a.shape
    lines = [_MM_HEADER, f"{m} {n}"]
    lines.extend(f"{x:.16e}" for x in a.T.ravel())
    tmp = f"{path}.tmp"
    with open(tmp, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")
    os.replace(tmp, path)


def read_matrix(path) -> np.ndarray:
    """Read a dense matrix from Matrix Market array format."""
    with open(path, "r", encoding="ascii") as fh:
        raw = fh.read()
    lines = raw.splitlines()
    if not lines:
        raise ParseError(f"{path}: empty file")
    header = lines[0].strip().lower().split()
    if header[:1] != ["%%matrixmarket"] or header[1:5] != ["matrix", "array", "real", "general"]:
        raise ParseError(f"{path}: bad Matrix Market header: {lines[0]!r}")
    body = [ln for ln in lines[1:] if ln.strip() and not ln.lstrip().startswith("%")]
    if not body:
        raise ParseError(f"{path}: missing size line")
    size_tokens = body[0].split()
    if len(size_tokens) != 2:
        raise ParseError(f"{path}: size line must hold 'rows cols', got {body[0]!r}")
    try:
        m, n = int(size_tokens[0]), int(size_tokens[1])
    except ValueError as exc:
        raise ParseError(f"{path}: non-integer dimensions {body[0]!r}") from exc
    if m < 1 or n < 1:
        raise ParseError(f"{path}: dimensions must be positive, got {m} x {n}")
    tokens = [tok for ln in body[1:] for tok in ln.split()]
    if len(tokens) != m * n:
        raise ParseError(f"{path}: expected {m * n} entries, found {len(tokens)}")
    try:
        values = np.array([float(tok) for tok in tokens], dtype=np.float64)
    except ValueError as exc:
        raise ParseError(f"{path}: non-numeric entry") from exc
    if not np.isfinite(values).all():
        raise ParseError(f"{path}: non-finite entry")
    return np.ascontiguousarray(values.reshape((n, m)).T)
