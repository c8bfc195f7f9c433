"""Block families ``{p_i a p_j}`` over a projection family.

An :class:`IodElement` stores one full-size, corner-supported matrix per
index pair. Missing pairs are zero blocks. The norm is the supremum of the
norms of finite corner sums, and the order compares corner sums in the PSD
cone. With a complete family on ``C^dim`` both reduce to the ambient
operator norm and order, which is what the property tests exploit.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Mapping, Sequence

import numpy as np

from .matrix import (
    DEFAULT_TOL,
    adjoint,
    as_matrix,
    is_psd,
    matrix_from_json,
    matrix_to_json,
    spectral_norm,
)
from .projections import ProjectionFamily

Index = tuple[int, int]

DROP_TOL = 1e-12


class FamilyMismatchError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class IodElement:
    family: ProjectionFamily
    blocks: Mapping[Index, np.ndarray]
    bound: float = 0.0

    def __post_init__(self):
        frozen = {}
        for key in sorted(self.blocks):
            block = as_matrix(self.blocks[key]).copy()
            if block.shape != (self.family.dim, self.family.dim):
                raise ValueError(f"block {key} has shape {block.shape}")
            block.flags.writeable = False
            frozen[(int(key[0]), int(key[1]))] = block
        object.__setattr__(self, "blocks", frozen)
        object.__setattr__(self, "bound", float(self.bound))

    @property
    def dim(self) -> int:
        return self.family.dim

    def block(self, xi: int, eta: int) -> np.ndarray:
        b = self.blocks.get((xi, eta))
        if b is None:
            return np.zeros((self.dim, self.dim), dtype=np.complex128)
        return b

    # vector-space structure

    def _combine(self, other: "IodElement", sign: int) -> "IodElement":
        _check_same_family(self, other)
        blocks = dict(self.blocks)
        for key, b in other.blocks.items():
            blocks[key] = blocks[key] + sign * b if key in blocks else sign * b
        return IodElement(self.family, blocks, self.bound + other.bound)

    def __add__(self, other: "IodElement") -> "IodElement":
        return self._combine(other, 1)

    def __sub__(self, other: "IodElement") -> "IodElement":
        return self._combine(other, -1)

    def __mul__(self, c: complex) -> "IodElement":
        c = complex(c)
        return IodElement(
            self.family,
            {k: c * b for k, b in self.blocks.items()},
            abs(c) * self.bound,
        )

    __rmul__ = __mul__

    def __neg__(self) -> "IodElement":
        return self * -1

    def to_json(self) -> dict:
        return {
            "family": self.family.to_json(),
            "bound": self.bound,
            "blocks": [
                {"xi": k[0], "eta": k[1], "matrix": matrix_to_json(b)}
                for k, b in sorted(self.blocks.items())
            ],
        }

    @classmethod
    def from_json(cls, obj, family: ProjectionFamily | None = None) -> "IodElement":
        """Parse the JSON form. ``family`` is used when the object carries a
        reference (any non-object value) instead of an embedded family."""
        try:
            fam = obj["family"]
            if isinstance(fam, dict):
                family = ProjectionFamily.from_json(fam)
            elif family is None:
                raise ValueError("family reference given but no family supplied")
            blocks = {}
            for b in obj["blocks"]:
                key = (int(b["xi"]), int(b["eta"]))
                if key in blocks:
                    raise ValueError(f"duplicate block {key}")
                blocks[key] = matrix_from_json(b["matrix"])
            x = cls(family, blocks, float(obj["bound"]))
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed element object: {exc}") from exc
        bad = x.support_violations()
        if bad:
            raise ValueError(f"blocks not supported on their corners: {bad}")
        return x

    def support_violations(self, tol: float = DEFAULT_TOL) -> list[Index]:
        """Keys whose block is not fixed by ``p_xi (.) p_eta``."""
        f = self.family
        out = []
        for (i, j), b in self.blocks.items():
            if not (0 <= i < len(f) and 0 <= j < len(f)):
                out.append((i, j))
            elif spectral_norm(f[i] @ b @ f[j] - b) > tol * max(1.0, spectral_norm(b)):
                out.append((i, j))
        return out


def _check_same_family(x: IodElement, y: IodElement) -> None:
    if x.family is not y.family and x.family != y.family:
        raise FamilyMismatchError("elements are defined over different families")


def zero(f: ProjectionFamily) -> IodElement:
    return IodElement(f, {}, 0.0)


def unit(f: ProjectionFamily) -> IodElement:
    return decompose(np.eye(f.dim), f)


def decompose(a, f: ProjectionFamily) -> IodElement:
    """Split ``a`` into the blocks ``p_xi a p_eta``.

    Blocks with norm below ``1e-12 * max(1, ||a||)`` are dropped.
    """
    a = as_matrix(a, square=True)
    if a.shape[0] != f.dim:
        raise ValueError(f"dimension mismatch: matrix {a.shape[0]}, family {f.dim}")
    norm = spectral_norm(a)
    cutoff = DROP_TOL * max(1.0, norm)
    blocks = {}
    for i, p in enumerate(f.members):
        left = p @ a
        for j, q in enumerate(f.members):
            b = left @ q
            if not np.any(b) or np.linalg.norm(b) < cutoff:
                continue
            if spectral_norm(b) >= cutoff:
                blocks[(i, j)] = b
    return IodElement(f, blocks, norm)


def reconstruct(x: IodElement) -> np.ndarray:
    out = np.zeros((x.dim, x.dim), dtype=np.complex128)
    for key in sorted(x.blocks):
        out = out + x.blocks[key]
    return out


def _check_selection(x: IodElement, s: Sequence[int]) -> tuple[int, ...]:
    s = tuple(int(k) for k in s)
    if len(set(s)) != len(s):
        raise ValueError(f"duplicate indices in corner selection {s}")
    bad = [k for k in s if not 0 <= k < len(x.family)]
    if bad:
        raise ValueError(f"invalid family indices {bad}")
    return s


def corner(x: IodElement, s: Iterable[int]) -> np.ndarray:
    """Sum of the blocks ``(k, l)`` with ``k, l`` in ``s``."""
    chosen = set(_check_selection(x, list(s)))
    out = np.zeros((x.dim, x.dim), dtype=np.complex128)
    for (i, j) in sorted(x.blocks):
        if i in chosen and j in chosen:
            out = out + x.blocks[(i, j)]
    return out


def corner_norms(x: IodElement, max_size: int) -> dict[tuple[int, ...], float]:
    """Norms of every corner with at most ``max_size`` indices."""
    idx = range(len(x.family))
    out = {(): 0.0}
    for size in range(1, min(max_size, len(x.family)) + 1):
        for s in combinations(idx, size):
            out[s] = spectral_norm(corner(x, s))
    return out


def monotonicity_violations(
    norms: Mapping[tuple[int, ...], float], tol: float = DEFAULT_TOL
) -> list[tuple[tuple[int, ...], tuple[int, ...], float]]:
    """Pairs ``S < T`` among swept corners where ``||corner S|| > ||corner T||``."""
    out = []
    scale = max(1.0, max(norms.values(), default=0.0))
    keys = sorted(norms, key=len)
    for s in keys:
        ss = set(s)
        for t in keys:
            if len(t) > len(s) and ss.issubset(t):
                excess = norms[s] - norms[t]
                if excess > tol * scale:
                    out.append((s, t, excess))
    return out


def iod_norm(x: IodElement, *, sweep: int | None = None, tol: float = DEFAULT_TOL) -> float:
    """Supremum of corner norms.

    For a complete family the full corner attains the supremum, so that is
    the value returned. With ``sweep=k`` every corner of at most ``k``
    indices is also evaluated, and a ``RuntimeError`` is raised if any of
    them is not dominated by its swept supersets and by the full corner.
    """
    full = spectral_norm(reconstruct(x))
    if sweep:
        norms = corner_norms(x, sweep)
        norms[tuple(range(len(x.family)))] = full
        bad = monotonicity_violations(norms, tol)
        if bad:
            s, t, excess = bad[0]
            raise RuntimeError(
                f"corner norm not monotone: {s} exceeds {t} by {excess:.3g}"
            )
    return full


def leq(x: IodElement, y: IodElement, tol: float = DEFAULT_TOL) -> bool:
    """Corner order: ``x <= y`` iff every corner of ``y - x`` is PSD.

    The full corner decides. Singleton and pair corners are also checked, at
    the scale of the full corner; if they disagree with a PSD full corner a
    ``RuntimeError`` is raised since compressions of a PSD matrix are PSD.
    """
    _check_same_family(x, y)
    d = y - x
    full = reconstruct(d)
    s = max(1.0, spectral_norm(full))
    ok = is_psd(full, tol, norm_scale=s)
    if ok:
        n = len(x.family)
        for size in (1, 2):
            for sel in combinations(range(n), size):
                if not is_psd(corner(d, sel), tol, norm_scale=s):
                    raise RuntimeError(f"corner {sel} not PSD under a PSD full corner")
    return ok


def involution(x: IodElement) -> IodElement:
    return IodElement(
        x.family,
        {(j, i): adjoint(b) for (i, j), b in x.blocks.items()},
        x.bound,
    )


def is_hermitian_blockwise(x: IodElement, tol: float = DEFAULT_TOL) -> bool:
    """``block(i, j)* == block(j, i)`` for every pair, within tolerance."""
    s = max(1.0, x.bound, spectral_norm(reconstruct(x)))
    keys = set(x.blocks) | {(j, i) for (i, j) in x.blocks}
    for (i, j) in keys:
        diff = adjoint(x.block(i, j)) - x.block(j, i)
        if np.max(np.abs(diff), initial=0.0) > tol * s:
            return False
    return True


def hermitian_split(x: IodElement) -> tuple[IodElement, IodElement]:
    """Return ``(h1, h2)`` self-adjoint with ``x = h1 + i h2`` blockwise."""
    xs = involution(x)
    keys = sorted(set(x.blocks) | set(xs.blocks))
    re = {k: (x.block(*k) + xs.block(*k)) / 2 for k in keys}
    im = {k: (x.block(*k) - xs.block(*k)) / 2j for k in keys}
    re = {k: b for k, b in re.items() if np.any(b)}
    im = {k: b for k, b in im.items() if np.any(b)}
    return IodElement(x.family, re, x.bound), IodElement(x.family, im, x.bound)


def star_product(x: IodElement, y: IodElement) -> IodElement:
    """Blockwise product ``(x*y)(i, j) = sum_k x(i, k) y(k, j)``.

    Summation runs over intermediate indices in increasing order, so the
    result is bitwise reproducible.
    """
    _check_same_family(x, y)
    rows: dict[int, list[tuple[int, np.ndarray]]] = {}
    for (k, j), b in sorted(y.blocks.items()):
        rows.setdefault(k, []).append((j, b))
    acc: dict[Index, np.ndarray] = {}
    for (i, k), a in sorted(x.blocks.items()):
        for j, b in rows.get(k, ()):
            prod = a @ b
            acc[(i, j)] = acc[(i, j)] + prod if (i, j) in acc else prod
    blocks = {key: b for key, b in acc.items() if np.any(b)}
    return IodElement(x.family, blocks, iod_norm(IodElement(x.family, blocks)))
