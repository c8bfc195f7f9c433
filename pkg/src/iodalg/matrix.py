"""Dense complex-matrix substrate.

Matrices are plain ``numpy`` arrays of dtype ``complex128``. Tolerances are
relative: a tolerance ``tol`` applied to a matrix ``a`` means
``tol * max(1, ||a||)``.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np
import scipy.linalg

DEFAULT_TOL = 1e-9


def as_matrix(a, *, square: bool = False) -> np.ndarray:
    """Coerce ``a`` to a finite 2-D complex128 array."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    if square and m.shape[0] != m.shape[1]:
        raise ValueError("not square")
    return m


def adjoint(a: np.ndarray) -> np.ndarray:
    return np.conj(a).T


def spectral_norm(a) -> float:
    """Largest singular value; 0 for empty matrices."""
    a = np.asarray(a, dtype=np.complex128)
    if a.size == 0:
        return 0.0
    return float(np.linalg.norm(a, 2))


def scale(a) -> float:
    return max(1.0, spectral_norm(a))


def hermitian_part(a: np.ndarray) -> np.ndarray:
    return (a + adjoint(a)) / 2


def hermitian_eigvals(a) -> np.ndarray:
    """Ascending eigenvalues of the Hermitian part of ``a``."""
    a = as_matrix(a, square=True)
    if a.shape[0] == 0:
        return np.zeros(0)
    return np.linalg.eigvalsh(hermitian_part(a))


def is_hermitian(a, tol: float = DEFAULT_TOL) -> bool:
    a = as_matrix(a, square=True)
    if a.size == 0:
        return True
    return bool(np.max(np.abs(a - adjoint(a))) <= tol * scale(a))


def is_psd(a, tol: float = DEFAULT_TOL, *, norm_scale: float | None = None) -> bool:
    """Positive semidefiniteness test.

    ``a`` must be Hermitian entrywise within ``tol * max(1, ||a||)`` and the
    smallest eigenvalue of its Hermitian part must be at least
    ``-tol * max(1, ||a||)``. ``norm_scale`` overrides ``max(1, ||a||)``, which
    lets callers test compressions of a matrix at the scale of the whole.
    """
    a = as_matrix(a, square=True)
    if a.size == 0:
        return True
    s = scale(a) if norm_scale is None else max(1.0, norm_scale)
    if np.max(np.abs(a - adjoint(a))) > tol * s:
        return False
    return bool(hermitian_eigvals(a)[0] >= -tol * s)


def commutator(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    return x @ y - y @ x


def commutant_basis(
    generators: Sequence, dim: int, tol: float = 1e-7
) -> list[np.ndarray]:
    """Frobenius-orthonormal basis of ``{x : xg = gx for every generator g}``.

    The nullspace of the stacked maps ``x -> xg - gx`` is computed one
    generator at a time: the current solution space is restricted to the
    nullspace of the next map, so the working set only ever shrinks.
    Singular values below ``tol * max(1, ||g||)`` count as zero.

    A fixed pseudo-random combination of the generators is applied first.
    It lies in their span, so it adds no constraint, but its commutant is
    usually small and every later step then works in a low dimension.
    """
    gens = [as_matrix(g, square=True) for g in generators]
    for g in gens:
        if g.shape != (dim, dim):
            raise ValueError(f"generator of shape {g.shape} is not {dim}x{dim}")
    if len(gens) > 1:
        rng = np.random.default_rng(0)
        coeffs = rng.standard_normal(len(gens)) + 1j * rng.standard_normal(len(gens))
        coeffs /= np.linalg.norm(coeffs)
        mix = np.tensordot(coeffs, np.stack(gens), axes=1)
        gens = [mix] + gens

    # columns are row-major vectorisations of an orthonormal basis
    basis = np.eye(dim * dim, dtype=np.complex128)
    for g in gens:
        if basis.shape[1] == 0:
            break
        xs = basis.T.reshape(-1, dim, dim)
        images = (xs @ g - g @ xs).reshape(basis.shape[1], -1).T
        cutoff = tol * scale(g)
        if np.linalg.norm(images) <= cutoff:
            continue
        _, s, vh = np.linalg.svd(images, full_matrices=False)
        rank = int(np.sum(s > cutoff))
        basis = basis @ adjoint(vh[rank:])

    return [basis[:, k].reshape(dim, dim) for k in range(basis.shape[1])]


def orthonormal_span(mats: Iterable[np.ndarray], tol: float = 1e-10) -> np.ndarray:
    """Orthonormal basis (as columns of vectorised matrices) of a matrix span."""
    vecs = [np.asarray(m, dtype=np.complex128).reshape(-1) for m in mats]
    if not vecs:
        return np.zeros((0, 0), dtype=np.complex128)
    return scipy.linalg.orth(np.stack(vecs, axis=1), rcond=tol)


def span_intersection_dim(q1: np.ndarray, q2: np.ndarray, tol: float = 1e-7) -> int:
    """Dimension of the intersection of two subspaces given orthonormal columns."""
    if q1.shape[1] == 0 or q2.shape[1] == 0:
        return 0
    cosines = np.linalg.svd(adjoint(q1) @ q2, compute_uv=False)
    return int(np.sum(cosines > 1 - tol))


def matrix_unit(dim: int, i: int, j: int) -> np.ndarray:
    e = np.zeros((dim, dim), dtype=np.complex128)
    e[i, j] = 1
    return e


# JSON wire format: {"rows": r, "cols": c, "data": [[re, im], ...]} row-major


def matrix_to_json(a) -> dict:
    a = as_matrix(a)
    rows, cols = a.shape
    flat = a.reshape(-1)
    return {
        "rows": rows,
        "cols": cols,
        "data": [[float(z.real), float(z.imag)] for z in flat],
    }


def matrix_from_json(obj) -> np.ndarray:
    try:
        rows, cols, data = int(obj["rows"]), int(obj["cols"]), obj["data"]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed matrix object: {exc}") from exc
    if len(data) != rows * cols:
        raise ValueError(
            f"matrix data has {len(data)} entries, expected {rows}x{cols}"
        )
    flat = np.array([complex(re, im) for re, im in data], dtype=np.complex128)
    return as_matrix(flat.reshape(rows, cols))
