"""Concrete algebras: weighted matrix-unit families and ``C(X) (x) M_n`` for a
finite point set ``X``.

Layout of ``C(X) (x) M_n`` with ``|X| = m``: an element is an ``n x n`` grid
of ``m x m`` diagonal blocks. Block ``(i, j)`` holds the values of the
``(i, j)`` matrix entry at each point of ``X``, so the basis element
``delta_x (x) e_ij`` is ``kron(E_ij, E_xx)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np
import scipy.linalg

from .iod import IodElement, iod_norm
from .matrix import (
    adjoint,
    commutant_basis,
    commutator,
    matrix_unit,
    orthonormal_span,
    span_intersection_dim,
    spectral_norm,
)
from .projections import ProjectionFamily, family_from_partition, validate_family

CENTER_TOL = 1e-7


# weighted matrix units


@dataclass(frozen=True)
class WeightedUnitFamily:
    """Finitely supported coefficients ``lam[i, j]`` of the units ``e_ij``."""

    coefficients: Mapping[tuple[int, int], complex]
    claimed_bound: float

    @property
    def size(self) -> int:
        return 1 + max((max(i, j) for i, j in self.coefficients), default=-1)

    def to_matrix(self) -> np.ndarray:
        n = self.size
        lam = np.zeros((n, n), dtype=np.complex128)
        for (i, j), c in self.coefficients.items():
            lam[i, j] = c
        if not np.all(np.isfinite(lam)):
            raise ValueError("coefficients must be finite")
        return lam

    def materialize(self) -> IodElement:
        """The element with blocks ``lam_ij e_ij`` over the singleton family."""
        n = self.size
        fam = family_from_partition(n, [1] * n)
        blocks = {
            (i, j): c * matrix_unit(n, i, j)
            for (i, j), c in self.coefficients.items()
            if c != 0
        }
        elem = IodElement(fam, blocks)
        return IodElement(fam, blocks, iod_norm(elem))


@dataclass(frozen=True)
class L2BoundReport:
    samples: int
    max_ratio: float
    exact_norm: float
    corner_norm: float
    claimed_bound: float
    tol: float

    @property
    def within_bound(self) -> bool:
        return self.max_ratio <= self.claimed_bound + self.tol

    @property
    def consistent(self) -> bool:
        """Sampled ratio <= exact norm <= corner-sum norm, within tolerance."""
        s = max(1.0, self.exact_norm)
        return (
            self.max_ratio <= self.exact_norm + self.tol * s
            and self.exact_norm <= self.corner_norm + self.tol * s
        )

    def to_json(self) -> dict:
        return {
            "samples": self.samples,
            "max_ratio": float(self.max_ratio),
            "exact_norm": float(self.exact_norm),
            "corner_norm": float(self.corner_norm),
            "claimed_bound": float(self.claimed_bound),
            "within_bound": bool(self.within_bound),
            "consistent": bool(self.consistent),
        }


def l2_bound_check(
    w: WeightedUnitFamily,
    samples: int,
    seed: int,
    *,
    power_steps: int = 3,
    tol: float = 1e-9,
) -> L2BoundReport:
    """Sample ``sqrt(sum_j |sum_i lam_ij x_i|^2 / sum_i |x_i|^2)``.

    Each sample starts from a seeded complex Gaussian vector on the support
    and is pushed through ``power_steps`` steps of ``x -> conj(lam) lam^T x``
    before its ratio is taken; every ratio is still a lower bound for the
    operator norm of ``lam``. The report also carries the exact norm and the
    corner-sum norm of the materialized block element.
    """
    if samples < 1:
        raise ValueError("samples must be at least 1")
    if not w.coefficients:
        return L2BoundReport(samples, 0.0, 0.0, 0.0, w.claimed_bound, tol)
    lam = w.to_matrix()
    n = lam.shape[0]
    rng = np.random.default_rng(seed)
    xs = rng.standard_normal((n, samples)) + 1j * rng.standard_normal((n, samples))
    normal = np.conj(lam) @ lam.T
    for _ in range(power_steps):
        ys = normal @ xs
        norms = np.linalg.norm(ys, axis=0)
        keep = norms > 0
        xs[:, keep] = ys[:, keep] / norms[keep]
    ratios = np.linalg.norm(lam.T @ xs, axis=0) / np.linalg.norm(xs, axis=0)
    return L2BoundReport(
        samples=samples,
        max_ratio=float(np.max(ratios)),
        exact_norm=spectral_norm(lam),
        corner_norm=iod_norm(w.materialize()),
        claimed_bound=float(w.claimed_bound),
        tol=tol,
    )


# C(X) (x) M_n


@dataclass(frozen=True)
class CxMnModel:
    m: int
    n: int
    basis: tuple[np.ndarray, ...]
    abelian_projections: tuple[np.ndarray, ...]

    @property
    def dim(self) -> int:
        return self.m * self.n

    def family(self) -> ProjectionFamily:
        return ProjectionFamily(self.dim, self.abelian_projections)


def build_cx_mn(m: int, n: int) -> CxMnModel:
    """Basis ``delta_x (x) e_ij`` ordered by ``(i, j, x)`` and projections
    ``e_i = kron(E_ii, 1_m)``."""
    if m < 1 or n < 1:
        raise ValueError("m and n must be positive")
    basis = tuple(
        np.kron(matrix_unit(n, i, j), matrix_unit(m, x, x))
        for i in range(n)
        for j in range(n)
        for x in range(m)
    )
    eye_m = np.eye(m, dtype=np.complex128)
    projections = tuple(np.kron(matrix_unit(n, i, i), eye_m) for i in range(n))
    return CxMnModel(m, n, basis, projections)


@dataclass(frozen=True)
class TypeInReport:
    m: int
    n: int
    closure_residual: float
    center_dim: int
    abelian_ok: tuple[bool, ...]
    max_abelian_commutator: float
    decomposition_ok: bool
    units_sum_exact: bool

    @property
    def passed(self) -> bool:
        return (
            self.closure_residual <= 1e-9
            and self.center_dim == self.m
            and all(self.abelian_ok)
            and self.decomposition_ok
            and self.units_sum_exact
        )

    def to_json(self) -> dict:
        return {
            "closure_residual": float(self.closure_residual),
            "center_dim": int(self.center_dim),
            "abelian_ok": [bool(v) for v in self.abelian_ok],
            "decomposition_ok": bool(self.decomposition_ok),
        }


def _complement(q: np.ndarray, size: int) -> np.ndarray:
    """Conjugated orthonormal basis of the orthogonal complement of ``span(q)``."""
    comp = scipy.linalg.null_space(adjoint(q)) if q.shape[1] else np.eye(size)
    return np.conj(comp)


def _distance_to_span(mats: np.ndarray, comp_conj: np.ndarray) -> float:
    """Largest distance from a stack of matrices to the span whose complement
    is given by :func:`_complement`."""
    vecs = mats.reshape(len(mats), -1)
    vecs = vecs[np.any(vecs != 0, axis=1)]
    if comp_conj.shape[1] == 0 or len(vecs) == 0:
        return 0.0
    return float(np.max(np.linalg.norm(vecs @ comp_conj, axis=1)))


def verify_type_In(model: CxMnModel, tol: float = 1e-9) -> TypeInReport:
    """Finite checks of the type I_n structure of ``C(X) (x) M_n``.

    closure
        products of basis elements stay in the span.
    center
        dimension of (commutant of the basis) intersected with the span.
    abelian
        each ``e_i (span) e_i`` is commutative.
    decomposition
        ``{e_i}`` is a complete orthogonal family and every basis element is
        recovered from its blocks ``e_i b e_j``, each of which lies in the span.
    """
    d = model.dim
    stack = np.stack(model.basis)
    q = orthonormal_span(model.basis)
    comp = _complement(q, d * d)

    closure = max(_distance_to_span(left @ stack, comp) for left in stack)

    comm = commutant_basis(model.basis, d, tol=CENTER_TOL)
    center_dim = span_intersection_dim(orthonormal_span(comm), q, tol=CENTER_TOL)

    abelian, worst_comm = [], 0.0
    for e in model.abelian_projections:
        compressed = [c for c in (e @ stack @ e) if np.any(c)]
        corner = orthonormal_span(compressed)
        mats = [corner[:, k].reshape(d, d) for k in range(corner.shape[1])]
        worst = max(
            (spectral_norm(commutator(x, y)) for k, x in enumerate(mats) for y in mats[k + 1:]),
            default=0.0,
        )
        worst_comm = max(worst_comm, worst)
        abelian.append(worst <= tol)

    fam = model.family()
    decomposition_ok = not validate_family(fam, tol)
    if decomposition_ok:
        total = np.zeros_like(stack)
        for p in fam.members:
            left = p @ stack
            # zero rows contribute zero blocks
            live = np.flatnonzero(np.any(left != 0, axis=(1, 2)))
            left = left[live]
            for r in fam.members:
                blocks = left @ r
                if _distance_to_span(blocks, comp) > tol:
                    decomposition_ok = False
                total[live] += blocks
        residual = np.max(np.abs(total - stack))
        decomposition_ok = decomposition_ok and residual <= tol

    units_sum_exact = bool(
        np.array_equal(sum(model.abelian_projections), np.eye(d))
    )
    return TypeInReport(
        model.m,
        model.n,
        closure,
        center_dim,
        tuple(abelian),
        worst_comm,
        decomposition_ok,
        units_sum_exact,
    )
