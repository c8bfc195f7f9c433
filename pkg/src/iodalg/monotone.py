"""Bounded increasing sequences of self-adjoint block elements and their
blockwise supremum.

The supremum is assembled block by block: diagonal blocks are limits of the
compressions ``p_i a_k p_i``; an off-diagonal block ``(i, j)`` is cut out of
the limit of the two-index compression ``(p_i + p_j) a_k (p_i + p_j)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, islice
from typing import Callable, Iterator, Sequence

import numpy as np

from .iod import IodElement, is_hermitian_blockwise, leq, reconstruct, unit
from .matrix import DEFAULT_TOL, spectral_norm
from .projections import ProjectionFamily

STABLE_STEPS = 3


class NotConvergedError(RuntimeError):
    def __init__(self, terms: int, last_increment: float):
        super().__init__(
            f"net not converged after {terms} terms (last increment {last_increment:.3g})"
        )
        self.terms = terms
        self.last_increment = last_increment


@dataclass(frozen=True)
class MonotoneNet:
    """An increasing sequence ``a_0 <= a_1 <= ...`` bounded by ``bound * 1``.

    ``terms`` is either a finite sequence or a function ``k -> a_k`` for an
    infinite net.
    """

    family: ProjectionFamily
    terms: Sequence[IodElement] | Callable[[int], IodElement]
    bound: float

    @property
    def length(self) -> int | None:
        return None if callable(self.terms) else len(self.terms)

    def term(self, k: int) -> IodElement:
        return self.terms(k) if callable(self.terms) else self.terms[k]

    def __iter__(self) -> Iterator[IodElement]:
        if callable(self.terms):
            k = 0
            while True:
                yield self.terms(k)
                k += 1
        else:
            yield from self.terms

    def validate(self, tol: float = DEFAULT_TOL, max_terms: int = 200) -> list[str]:
        """Invariant violations among the first ``max_terms`` terms."""
        problems = []
        top = self.bound * unit(self.family)
        prev = None
        for k, a in enumerate(islice(self, max_terms)):
            if not is_hermitian_blockwise(a, tol):
                problems.append(f"term {k} is not self-adjoint")
            if not leq(a, top, tol):
                problems.append(f"term {k} exceeds the bound {self.bound}")
            if prev is not None and not leq(prev, a, tol):
                problems.append(f"term {k} is below term {k - 1}")
            prev = a
        return problems


def _pair_projections(f: ProjectionFamily) -> dict[tuple[int, int], np.ndarray]:
    out = {(i, i): f[i] for i in range(len(f))}
    for i, j in combinations(range(len(f)), 2):
        out[(i, j)] = f[i] + f[j]
    return out


def blockwise_sup(
    net: MonotoneNet, tol: float = DEFAULT_TOL, max_iter: int = 10_000
) -> IodElement:
    """Least upper bound of an increasing net, built from corner limits.

    Each tracked compression (one per index and one per index pair) is
    followed along the net. The limit is taken once the largest change of
    any tracked compression stays below ``tol`` for three consecutive steps,
    or at the last term of a finite net.

    Raises
    ------
    NotConvergedError
        if ``max_iter`` terms are consumed without meeting the criterion.
    """
    f = net.family
    projs = _pair_projections(f)
    current: dict[tuple[int, int], np.ndarray] | None = None
    stable, increment, consumed = 0, float("inf"), 0

    for a in islice(net, max_iter):
        consumed += 1
        dense = reconstruct(a)
        compressed = {key: p @ dense @ p for key, p in projs.items()}
        if current is not None:
            increment = max(
                (spectral_norm(compressed[k] - current[k]) for k in compressed),
                default=0.0,
            )
            stable = stable + 1 if increment < tol else 0
        current = compressed
        if stable >= STABLE_STEPS:
            break
    else:
        if net.length is None or consumed < net.length:
            raise NotConvergedError(consumed, increment)

    if current is None:
        raise ValueError("net has no terms")

    blocks = {}
    for (i, j), c in current.items():
        if i == j:
            blocks[(i, i)] = c
        else:
            blocks[(i, j)] = f[i] @ c @ f[j]
            blocks[(j, i)] = f[j] @ c @ f[i]
    blocks = {k: b for k, b in blocks.items() if np.any(b)}
    return IodElement(f, blocks, spectral_norm(reconstruct(IodElement(f, blocks))))


def is_upper_bound(
    candidate: IodElement,
    net: MonotoneNet,
    tol: float = DEFAULT_TOL,
    max_terms: int = 200,
) -> bool:
    """``a_k <= candidate`` for every term (the first ``max_terms`` of an
    infinite net)."""
    for a in islice(net, max_terms):
        if not leq(a, candidate, tol):
            return False
    return True
