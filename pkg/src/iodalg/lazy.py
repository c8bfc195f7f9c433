"""Generator-defined block families over the countable index set 0, 1, 2, ...

Such a family can only be inspected through finite truncations. The tools
here build truncated corners, check a claimed uniform bound against them and
record how the corner norms grow. A check can refute a bound, never prove
one: a clean report means "certified up to n = N" and nothing more.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .iod import IodElement
from .matrix import as_matrix, spectral_norm
from .projections import ProjectionFamily, family_from_partition

CERTIFY_TOL = 1e-9

Generator = Callable[[int, int], np.ndarray]


@dataclass(frozen=True)
class LazyBlockFamily:
    """Blocks ``generator(xi, eta)`` of size ``block_size`` with a claimed bound."""

    name: str
    block_size: int
    generator: Generator
    claimed_bound: float

    def block(self, xi: int, eta: int) -> np.ndarray:
        b = as_matrix(self.generator(xi, eta))
        if b.shape != (self.block_size, self.block_size):
            raise ValueError(
                f"{self.name}: generator({xi}, {eta}) has shape {b.shape}"
            )
        return b


class _Truncations:
    """Grows the leading corner of a lazy family on demand.

    Each generator call happens once; the corner of size ``n`` is the leading
    ``n*b`` square of the cached matrix.
    """

    def __init__(self, f: LazyBlockFamily):
        self.f = f
        self.n = 0
        self.dense = np.zeros((0, 0), dtype=np.complex128)

    def corner(self, n: int) -> np.ndarray:
        b = self.f.block_size
        if n > self.n:
            grown = np.zeros((n * b, n * b), dtype=np.complex128)
            grown[: self.n * b, : self.n * b] = self.dense
            for xi in range(n):
                for eta in range(n):
                    if xi < self.n and eta < self.n:
                        continue
                    grown[xi * b:(xi + 1) * b, eta * b:(eta + 1) * b] = self.f.block(xi, eta)
            self.dense, self.n = grown, n
        return self.dense[: n * b, : n * b]

    def norm(self, n: int) -> float:
        return spectral_norm(self.corner(n))


def truncated_corner(f: LazyBlockFamily, n: int) -> np.ndarray:
    """Dense ``n*b`` square holding the blocks with indices below ``n``."""
    return _Truncations(f).corner(n).copy()


# builtin families


def _sequence(values) -> Callable[[int], complex]:
    if callable(values):
        return values
    values = list(values)
    return lambda k: values[k] if k < len(values) else 0.0


def _scalar_block(value: complex, b: int) -> np.ndarray:
    return value * np.eye(b, dtype=np.complex128)


def builtin_family(name: str, *, block_size: int = 1, bound: float | None = None, **params) -> LazyBlockFamily:
    """Named lazy families.

    ``unit(i, j)``
        a single identity block at ``(i, j)``.
    ``diagonal(lam)``
        ``lam(xi)`` times the identity on the diagonal.
    ``band(width, value)``
        ``value`` times the identity wherever ``|xi - eta| <= width``.
    ``shift(weights)``
        ``weights(xi)`` times the identity at ``(xi, xi + 1)``.

    Sequences may be given as callables or finite lists (zero beyond the
    end). ``bound`` overrides the default claimed bound; ``diagonal`` and
    ``shift`` with a callable sequence have no default and require it.
    """
    b = block_size
    zero = np.zeros((b, b), dtype=np.complex128)

    if name == "unit":
        i, j = int(params["i"]), int(params["j"])
        eye = _scalar_block(1.0, b)
        gen = lambda xi, eta: eye if (xi, eta) == (i, j) else zero
        default = 1.0
    elif name == "diagonal":
        lam = _sequence(params["lam"])
        gen = lambda xi, eta: _scalar_block(lam(xi), b) if xi == eta else zero
        default = None if callable(params["lam"]) else max((abs(v) for v in params["lam"]), default=0.0)
    elif name == "band":
        width, value = int(params["width"]), complex(params["value"])
        blk = _scalar_block(value, b)
        gen = lambda xi, eta: blk if abs(xi - eta) <= width else zero
        # row-sum (Schur) bound
        default = abs(value) * (2 * width + 1)
    elif name == "shift":
        w = _sequence(params["weights"])
        gen = lambda xi, eta: _scalar_block(w(xi), b) if eta == xi + 1 else zero
        default = None if callable(params["weights"]) else max((abs(v) for v in params["weights"]), default=0.0)
    else:
        raise ValueError(f"unknown family {name!r}; expected unit, diagonal, band or shift")

    if bound is None:
        if default is None:
            raise ValueError(f"family {name!r} with a callable sequence needs an explicit bound")
        bound = default
    return LazyBlockFamily(name, b, gen, float(bound))


# truncation reports


@dataclass
class TruncationReport:
    family: str
    claimed_bound: float
    sizes: list[int] = field(default_factory=list)
    norms: list[float] = field(default_factory=list)
    violation: tuple[int, float] | None = None

    @property
    def certified(self) -> bool:
        return self.violation is None

    @property
    def summary(self) -> str:
        if self.violation is None:
            top = self.sizes[-1] if self.sizes else 0
            return f"{self.family}: bound {self.claimed_bound:g} certified up to n = {top}"
        n, excess = self.violation
        return (
            f"{self.family}: bound {self.claimed_bound:g} refuted at n = {n} "
            f"(excess {excess:.6g})"
        )

    def row_certified(self, norm: float) -> bool:
        return norm <= self.claimed_bound + CERTIFY_TOL

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "corner_norm", "claimed_bound", "certified"])
        for n, v in zip(self.sizes, self.norms):
            w.writerow([n, repr(v), repr(self.claimed_bound), str(self.row_certified(v)).lower()])
        return buf.getvalue()


def doubling_schedule(max_n: int) -> list[int]:
    out, n = [], 1
    while n < max_n:
        out.append(n)
        n *= 2
    out.append(max_n)
    return out


def certify_bound(f: LazyBlockFamily, max_n: int) -> TruncationReport:
    """Check ``||corner_n|| <= K`` along a doubling schedule up to ``max_n``.

    Corner norms are nondecreasing in ``n``, so when a scheduled size
    violates the bound the first offending size is located by bisection
    between it and the last clean size.
    """
    if max_n < 1:
        raise ValueError("max_n must be at least 1")
    trunc = _Truncations(f)
    report = TruncationReport(f.name, f.claimed_bound)
    evaluated: dict[int, float] = {}

    def probe(n: int) -> float:
        if n not in evaluated:
            evaluated[n] = trunc.norm(n)
        return evaluated[n]

    last_ok = 0
    for n in doubling_schedule(max_n):
        if report.row_certified(probe(n)):
            last_ok = n
            continue
        lo, hi = last_ok, n  # lo clean (or 0), hi violating
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if report.row_certified(probe(mid)):
                lo = mid
            else:
                hi = mid
        report.violation = (hi, probe(hi) - f.claimed_bound)
        break

    for n in sorted(evaluated):
        report.sizes.append(n)
        report.norms.append(evaluated[n])
    return report


def truncated_norm_curve(f: LazyBlockFamily, schedule: Sequence[int]) -> TruncationReport:
    """Corner norms at exactly the given strictly increasing sizes."""
    schedule = [int(n) for n in schedule]
    if any(n < 1 for n in schedule) or any(a >= b for a, b in zip(schedule, schedule[1:])):
        raise ValueError("schedule must be strictly increasing positive sizes")
    trunc = _Truncations(f)
    report = TruncationReport(f.name, f.claimed_bound)
    for n in schedule:
        v = trunc.norm(n)
        report.sizes.append(n)
        report.norms.append(v)
        if report.violation is None and not report.row_certified(v):
            report.violation = (n, v - f.claimed_bound)
    return report


def materialize(f: LazyBlockFamily, n: int) -> tuple[ProjectionFamily, IodElement]:
    """Truncate to the first ``n`` indices as a concrete block element."""
    if n < 1:
        raise ValueError("n must be at least 1")
    b = f.block_size
    fam = family_from_partition(n * b, [b] * n)
    blocks = {}
    for xi in range(n):
        for eta in range(n):
            blk = f.block(xi, eta)
            if not np.any(blk):
                continue
            full = np.zeros((n * b, n * b), dtype=np.complex128)
            full[xi * b:(xi + 1) * b, eta * b:(eta + 1) * b] = blk
            blocks[(xi, eta)] = full
    dense = truncated_corner(f, n)
    return fam, IodElement(fam, blocks, spectral_norm(dense))

