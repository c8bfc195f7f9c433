"""Orthogonal projection families and equivalence witnesses between members."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

import numpy as np

from .matrix import (
    DEFAULT_TOL,
    adjoint,
    as_matrix,
    matrix_from_json,
    matrix_to_json,
    spectral_norm,
)


@dataclass(frozen=True)
class Projection:
    matrix: np.ndarray
    rank: int

    @classmethod
    def from_matrix(cls, p, tol: float = DEFAULT_TOL) -> "Projection":
        p = as_matrix(p, square=True)
        if spectral_norm(p - adjoint(p)) > tol:
            raise ValueError("projection is not self-adjoint")
        if spectral_norm(p @ p - p) > tol:
            raise ValueError("projection is not idempotent")
        trace = float(np.trace(p).real)
        rank = int(round(trace))
        if abs(trace - rank) > tol:
            raise ValueError(f"projection trace {trace} is not an integer")
        return cls(p, rank)


@dataclass(frozen=True, eq=False)
class ProjectionFamily:
    """Ordered family of projections ``p_0, p_1, ...`` on ``C^dim``.

    Members are not validated on construction; use :func:`validate_family`.
    """

    dim: int
    members: tuple[np.ndarray, ...]

    def __post_init__(self):
        members = []
        for p in self.members:
            p = as_matrix(p, square=True).copy()
            if p.shape != (self.dim, self.dim):
                raise ValueError(
                    f"member of shape {p.shape} does not match dim {self.dim}"
                )
            p.flags.writeable = False
            members.append(p)
        object.__setattr__(self, "members", tuple(members))

    def __len__(self) -> int:
        return len(self.members)

    def __getitem__(self, k: int) -> np.ndarray:
        return self.members[k]

    def __eq__(self, other) -> bool:
        if not isinstance(other, ProjectionFamily):
            return NotImplemented
        return (
            self.dim == other.dim
            and len(self) == len(other)
            and all(np.array_equal(p, q) for p, q in zip(self.members, other.members))
        )

    __hash__ = object.__hash__

    @property
    def ranks(self) -> list[int]:
        return [int(round(float(np.trace(p).real))) for p in self.members]

    def corner_projection(self, indices: Sequence[int]) -> np.ndarray:
        p = np.zeros((self.dim, self.dim), dtype=np.complex128)
        for k in indices:
            p = p + self.members[k]
        return p

    def to_json(self) -> dict:
        return {"dim": self.dim, "members": [matrix_to_json(p) for p in self.members]}

    @classmethod
    def from_json(cls, obj) -> "ProjectionFamily":
        try:
            dim, members = int(obj["dim"]), obj["members"]
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed family object: {exc}") from exc
        return cls(dim, tuple(matrix_from_json(m) for m in members))


def _check_partition(dim: int, sizes: Sequence[int]) -> None:
    if any(s < 1 for s in sizes):
        raise ValueError("partition sizes must be positive")
    if sum(sizes) != dim:
        raise ValueError(f"partition mismatch: sizes {list(sizes)} do not sum to {dim}")


def family_from_partition(dim: int, sizes: Sequence[int]) -> ProjectionFamily:
    """Diagonal 0/1 projections onto consecutive coordinate blocks."""
    _check_partition(dim, sizes)
    members = []
    start = 0
    for s in sizes:
        d = np.zeros(dim)
        d[start:start + s] = 1
        members.append(np.diag(d).astype(np.complex128))
        start += s
    return ProjectionFamily(dim, tuple(members))


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(z)
    # fix column phases so the result does not depend on the QR convention
    phases = np.diag(r) / np.abs(np.diag(r))
    return q * phases


def family_random(dim: int, sizes: Sequence[int], seed: int) -> ProjectionFamily:
    """Partition family conjugated by a seeded random unitary."""
    base = family_from_partition(dim, sizes)
    if len(sizes) == 1:
        return base
    u = random_unitary(dim, np.random.default_rng(seed))
    members = []
    for p in base.members:
        q = u @ p @ adjoint(u)
        members.append((q + adjoint(q)) / 2)
    return ProjectionFamily(dim, tuple(members))


@dataclass(frozen=True)
class Violation:
    kind: str  # "idempotence", "self-adjointness", "orthogonality", "completeness"
    indices: tuple[int, ...]
    residual: float

    def __str__(self) -> str:
        idx = ",".join(map(str, self.indices))
        return f"{self.kind}({idx}): residual {self.residual:.3g}"


def validate_family(f: ProjectionFamily, tol: float = DEFAULT_TOL) -> list[Violation]:
    """List every violated family invariant with its residual norm.

    An empty list means the family is a valid complete orthogonal family.
    """
    out = []
    for k, p in enumerate(f.members):
        r = spectral_norm(p - adjoint(p))
        if r > tol:
            out.append(Violation("self-adjointness", (k,), r))
        r = spectral_norm(p @ p - p)
        if r > tol:
            out.append(Violation("idempotence", (k,), r))
    for i, j in combinations(range(len(f)), 2):
        r = spectral_norm(f[i] @ f[j])
        if r > tol:
            out.append(Violation("orthogonality", (i, j), r))
    r = spectral_norm(np.eye(f.dim) - f.corner_projection(range(len(f))))
    if r > tol:
        out.append(Violation("completeness", (), r))
    return out


def range_basis(p: np.ndarray, rank: int) -> np.ndarray:
    """Orthonormal columns spanning ``range(p)``.

    Columns come from a Hermitian eigendecomposition, ordered by descending
    eigenvalue, each rotated so its first non-negligible coordinate is real
    and positive.
    """
    w, v = np.linalg.eigh((p + adjoint(p)) / 2)
    order = np.argsort(-w, kind="stable")[:rank]
    cols = v[:, order]
    for c in range(cols.shape[1]):
        col = cols[:, c]
        lead = np.flatnonzero(np.abs(col) > 1e-12)[0]
        cols[:, c] = col * (abs(col[lead]) / col[lead])
    return cols


@dataclass(frozen=True)
class EquivalenceWitness:
    source: int
    target: int
    isometry: np.ndarray

    def to_json(self) -> dict:
        return {
            "source": self.source,
            "target": self.target,
            "isometry": matrix_to_json(self.isometry),
        }

    @classmethod
    def from_json(cls, obj) -> "EquivalenceWitness":
        return cls(int(obj["source"]), int(obj["target"]), matrix_from_json(obj["isometry"]))


def equivalence_witnesses(f: ProjectionFamily) -> list[EquivalenceWitness]:
    """Partial isometries ``x`` with ``x x* = p_src`` and ``x* x = p_tgt``.

    Every member is mapped from a common reference space of dimension ``r``
    by ``v_k``; the witness for ``(src, tgt)`` is ``v_src v_tgt*``, so
    witnesses compose and ``x(src, tgt)* = x(tgt, src)``.
    """
    ranks = f.ranks
    if len(set(ranks)) > 1:
        raise ValueError(f"not pairwise equivalent: ranks {ranks}")
    r = ranks[0] if ranks else 0
    frames = [range_basis(p, r) for p in f.members]
    return [
        EquivalenceWitness(s, t, frames[s] @ adjoint(frames[t]))
        for s in range(len(f))
        for t in range(len(f))
    ]
