"""Seeded randomized property suites behind ``iodalg verify``.

Each suite checks one structural statement on random instances and reports
the worst residual seen. Trials derive their generators from
``(seed, trial)`` so results do not depend on execution order.
"""

from __future__ import annotations

import itertools
from dataclasses import asdict, dataclass
from typing import Callable

import numpy as np

from . import iod
from .matrix import adjoint, is_hermitian, is_psd, spectral_norm
from .models import WeightedUnitFamily, build_cx_mn, l2_bound_check, verify_type_In
from .monotone import MonotoneNet, blockwise_sup, is_upper_bound
from .projections import ProjectionFamily, family_random

DIM_RANGE = (4, 16)
MAX_BLOCKS = 6


@dataclass(frozen=True)
class SuiteResult:
    suite: str
    trials: int
    failures: int
    worst_residual: float
    seed: int

    def to_json(self) -> dict:
        return asdict(self)


# random instances


def random_composition(rng: np.random.Generator, dim: int, max_parts: int = MAX_BLOCKS) -> list[int]:
    parts = int(rng.integers(1, min(max_parts, dim) + 1))
    cuts = sorted(rng.choice(np.arange(1, dim), size=parts - 1, replace=False)) if parts > 1 else []
    edges = [0, *map(int, cuts), dim]
    return [b - a for a, b in zip(edges, edges[1:])]


def random_family(rng: np.random.Generator, dim: int | None = None) -> ProjectionFamily:
    if dim is None:
        dim = int(rng.integers(DIM_RANGE[0], DIM_RANGE[1] + 1))
    sizes = random_composition(rng, dim)
    return family_random(dim, sizes, int(rng.integers(2**31)))


def random_matrix(rng: np.random.Generator, dim: int) -> np.ndarray:
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return z / np.sqrt(dim)


def random_hermitian(rng: np.random.Generator, dim: int) -> np.ndarray:
    a = random_matrix(rng, dim)
    return (a + adjoint(a)) / 2


def random_psd(rng: np.random.Generator, dim: int, rank: int | None = None) -> np.ndarray:
    rank = dim if rank is None else rank
    z = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    p = z @ adjoint(z)
    return p / spectral_norm(p)


def geometric_psd_net(
    rng: np.random.Generator, f: ProjectionFamily, ratio: float = 0.5, cycle: int = 3
) -> tuple[MonotoneNet, np.ndarray]:
    """Infinite net ``a_k = a_0 + sum_{j<k} ratio^j P_{j mod cycle}`` with PSD
    ``P``. Returns the net and its closed-form limit."""
    start = random_hermitian(rng, f.dim)
    incs = [random_psd(rng, f.dim) for _ in range(cycle)]
    limit = start + sum(p * ratio**c for c, p in enumerate(incs)) / (1 - ratio**cycle)

    def term(k: int) -> iod.IodElement:
        a = start.copy()
        for j in range(k):
            a = a + ratio**j * incs[j % cycle]
        return iod.decompose(a, f)

    bound = spectral_norm(limit) + 1
    return MonotoneNet(f, term, bound), limit


# suites: each returns (residual, ok)


def _prop9(rng, dim, tol):
    f = random_family(rng, dim)
    a = random_matrix(rng, f.dim)
    r = float(np.max(np.abs(iod.reconstruct(iod.decompose(a, f)) - a)))
    return r, r <= 1e-11


def _lemma2(rng, dim, tol):
    f = random_family(rng, dim)
    a = random_matrix(rng, f.dim)
    x = iod.decompose(a, f)
    try:
        n = iod.iod_norm(x, sweep=3, tol=tol)
    except RuntimeError:
        return float("inf"), False
    r = abs(n - spectral_norm(a)) / max(1.0, spectral_norm(a))
    return r, r <= tol


def _multiplication(rng, dim, tol):
    f = random_family(rng, dim)
    a, b, c = (random_matrix(rng, f.dim) for _ in range(3))
    x, y, z = (iod.decompose(m, f) for m in (a, b, c))
    s = max(1.0, spectral_norm(a) * spectral_norm(b))
    r1 = spectral_norm(iod.reconstruct(iod.star_product(x, y)) - a @ b) / s
    lhs = iod.reconstruct(iod.star_product(iod.star_product(x, y), z))
    rhs = iod.reconstruct(iod.star_product(x, iod.star_product(y, z)))
    r2 = spectral_norm(lhs - rhs) / max(1.0, spectral_norm(lhs))
    return max(r1, r2), r1 <= tol and r2 <= 1e-8


def _lemma7(rng, dim, tol):
    f = random_family(rng, dim)
    worst, ok = 0.0, True
    for a in (random_matrix(rng, f.dim), random_hermitian(rng, f.dim)):
        x = iod.decompose(a, f)
        h1, h2 = iod.hermitian_split(x)
        back = iod.reconstruct(h1) + 1j * iod.reconstruct(h2)
        r = float(np.max(np.abs(back - iod.reconstruct(x))))
        worst = max(worst, r)
        ok &= r <= 1e-12
        ok &= iod.is_hermitian_blockwise(h1, tol) and iod.is_hermitian_blockwise(h2, tol)
        ok &= iod.is_hermitian_blockwise(x, tol) == is_hermitian(a, tol)
    return worst, ok


def _remark3(rng, dim, tol):
    f = random_family(rng, dim)
    a = random_matrix(rng, f.dim)
    xs = iod.involution(iod.decompose(a, f))
    astar = adjoint(a)
    worst = 0.0
    for i, p in enumerate(f.members):
        for j, q in enumerate(f.members):
            worst = max(worst, float(np.max(np.abs(xs.block(i, j) - p @ astar @ q))))
    return worst, worst <= 1e-12


def _prop3(rng, dim, tol):
    f = random_family(rng, dim)
    h = random_hermitian(rng, f.dim)
    x = iod.decompose(h, f)
    one = iod.unit(f)
    n = iod.iod_norm(x)
    ok = iod.leq(-n * one, x, tol) and iod.leq(x, n * one, tol)
    # comparable and incomparable pairs
    y_dense = h + random_psd(rng, f.dim) if rng.random() < 0.5 else random_hermitian(rng, f.dim)
    y = iod.decompose(y_dense, f)
    ok &= iod.leq(x, y, tol) == is_psd(y_dense - h, tol)
    r = 0.0
    if iod.leq(x, y, tol) and iod.leq(y, x, tol):
        r = spectral_norm(y_dense - h)
        ok &= r <= 1e-8
    return r, ok


def _prop12(rng, dim, tol):
    f = random_family(rng, dim)
    net, limit = geometric_psd_net(rng, f)
    sup = blockwise_sup(net, tol=1e-12, max_iter=200)
    target = iod.decompose(limit, f)
    r = spectral_norm(iod.reconstruct(sup) - iod.reconstruct(target))
    return r, r <= 1e-7 and is_upper_bound(sup, net, tol, max_terms=60)


def _example_mn(rng, dim, tol):
    rows = int(rng.integers(1, 7))
    cols = int(rng.integers(1, 7))
    coeffs = {}
    for i, j in itertools.product(range(rows), range(cols)):
        if rng.random() < 0.7:
            coeffs[(i, j)] = complex(rng.standard_normal(), rng.standard_normal())
    if not coeffs:
        coeffs[(0, 0)] = 1.0
    w = WeightedUnitFamily(coeffs, 0.0)
    exact = spectral_norm(w.to_matrix())
    w = WeightedUnitFamily(coeffs, exact)
    rep = l2_bound_check(w, 1000, int(rng.integers(2**31)))
    r = abs(rep.corner_norm - exact) / max(1.0, exact)
    ok = r <= tol and rep.max_ratio <= exact + tol and rep.max_ratio >= 0.95 * exact
    return r, ok


def _theorem15(rng, dim, tol):
    cap = min(dim or 24, 24)
    pairs = [(m, n) for m in range(1, cap + 1) for n in range(1, cap + 1) if m * n <= cap]
    m, n = pairs[int(rng.integers(len(pairs)))]
    rep = verify_type_In(build_cx_mn(m, n))
    return max(rep.closure_residual, rep.max_abelian_commutator), rep.passed


SUITES: dict[str, Callable] = {
    "lemma2": _lemma2,
    "prop3": _prop3,
    "prop4-lemma8": _multiplication,
    "lemma7": _lemma7,
    "remark3": _remark3,
    "prop9": _prop9,
    "prop12": _prop12,
    "example-mn": _example_mn,
    "theorem15": _theorem15,
}


def run_suite(name: str, trials: int, seed: int, dim: int | None = None, tol: float = 1e-9) -> SuiteResult:
    if name not in SUITES:
        raise KeyError(name)
    check = SUITES[name]
    failures, worst = 0, 0.0
    for t in range(trials):
        rng = np.random.default_rng([seed, t])
        r, ok = check(rng, dim, tol)
        failures += not ok
        worst = max(worst, r)
    return SuiteResult(name, trials, failures, worst, seed)
