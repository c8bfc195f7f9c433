import itertools
import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from iodalg.iod import iod_norm, reconstruct, star_product
from iodalg.matrix import matrix_unit, spectral_norm
from iodalg.models import (
    WeightedUnitFamily,
    build_cx_mn,
    l2_bound_check,
    verify_type_In,
)
from iodalg.projections import validate_family


def center_dim_oracle(model):
    """Solve sum_k c_k [b_k, b_l] = 0 for all l in coefficient space."""
    basis = model.basis
    rows = []
    for bl in basis:
        cols = [(bk @ bl - bl @ bk).reshape(-1) for bk in basis]
        rows.append(np.stack(cols, axis=1))
    system = np.concatenate(rows, axis=0)
    return len(basis) - np.linalg.matrix_rank(system, tol=1e-9)


# weighted matrix units


def test_l2_single_unit():
    rep = l2_bound_check(WeightedUnitFamily({(0, 1): 1.0}, 1.0), samples=200, seed=0)
    assert rep.max_ratio <= 1 + 1e-12
    assert rep.exact_norm == pytest.approx(1.0)
    assert rep.within_bound and rep.consistent


def test_l2_violation():
    rep = l2_bound_check(WeightedUnitFamily({(0, 0): 2.0}, 1.0), samples=50, seed=0)
    assert rep.exact_norm == pytest.approx(2.0)
    assert not rep.within_bound


def test_l2_empty_support():
    rep = l2_bound_check(WeightedUnitFamily({}, 1.0), samples=10, seed=0)
    assert rep.max_ratio == 0.0 and rep.within_bound


def test_l2_random_support(rng):
    lam = rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5))
    coeffs = {(i, j): lam[i, j] for i in range(5) for j in range(5)}
    exact = float(np.linalg.svd(lam, compute_uv=False)[0])
    rep = l2_bound_check(WeightedUnitFamily(coeffs, exact), samples=1000, seed=3)
    assert rep.exact_norm == pytest.approx(exact, rel=1e-12)
    assert rep.within_bound and rep.consistent
    assert rep.max_ratio >= 0.95 * exact


def test_l2_raw_samples_are_lower_bounds(rng):
    lam = rng.standard_normal((6, 6))
    coeffs = {(i, j): lam[i, j] for i in range(6) for j in range(6)}
    rep = l2_bound_check(WeightedUnitFamily(coeffs, 0.0), samples=500, seed=1, power_steps=0)
    assert rep.max_ratio <= rep.exact_norm * (1 + 1e-12)
    assert rep.consistent and not rep.within_bound


def test_l2_ratio_formula():
    # one sample, no refinement: ratio is sqrt(sum_j |sum_i lam_ij x_i|^2 / |x|^2)
    lam = {(0, 0): 1.0, (0, 1): 2.0, (1, 1): -1.0}
    rep = l2_bound_check(WeightedUnitFamily(lam, 5.0), samples=1, seed=7, power_steps=0)
    rng = np.random.default_rng(7)
    x = rng.standard_normal((2, 1)) + 1j * rng.standard_normal((2, 1))
    x = x[:, 0]
    num = sum(abs(sum(lam.get((i, j), 0) * x[i] for i in range(2))) ** 2 for j in range(2))
    assert rep.max_ratio == pytest.approx(np.sqrt(num / np.sum(np.abs(x) ** 2)), rel=1e-12)


def test_l2_report_json():
    rep = l2_bound_check(WeightedUnitFamily({(0, 1): 1.0}, 1.0), samples=5, seed=0)
    assert json.loads(json.dumps(rep.to_json()))["within_bound"] is True


def test_matrix_unit_products():
    n = 3
    units = {
        # zero padding fixes the size at n without overwriting e_ij
        (i, j): WeightedUnitFamily({(n - 1, n - 1): 0.0, (i, j): 1.0}, 1).materialize()
        for i in range(n)
        for j in range(n)
    }
    for (i, j), x in units.items():
        for (k, l), y in units.items():
            prod = reconstruct(star_product(x, y))
            expected = matrix_unit(n, i, l) if j == k else np.zeros((n, n))
            assert np.array_equal(prod, expected)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**31))
def test_exact_norm_equals_corner_norm(seed):
    rng = np.random.default_rng(seed)
    rows, cols = rng.integers(1, 7, size=2)
    coeffs = {
        (i, j): complex(*rng.standard_normal(2))
        for i, j in itertools.product(range(rows), range(cols))
        if rng.random() < 0.6
    } or {(0, 0): 1.0}
    w = WeightedUnitFamily(coeffs, 0.0)
    exact = spectral_norm(w.to_matrix())
    assert iod_norm(w.materialize()) == pytest.approx(exact, rel=1e-9)


# C(X) (x) M_n


def test_build_point_times_m2():
    model = build_cx_mn(1, 2)
    assert len(model.basis) == 4
    units = [matrix_unit(2, i, j) for i in range(2) for j in range(2)]
    assert all(np.array_equal(b, u) for b, u in zip(model.basis, units))
    assert np.array_equal(model.abelian_projections[0], matrix_unit(2, 0, 0))
    assert np.array_equal(model.abelian_projections[1], matrix_unit(2, 1, 1))


def test_build_two_points_times_m1():
    model = build_cx_mn(2, 1)
    assert [b.tolist() for b in model.basis] == [matrix_unit(2, 0, 0).tolist(), matrix_unit(2, 1, 1).tolist()]
    assert len(model.abelian_projections) == 1
    assert np.array_equal(model.abelian_projections[0], np.eye(2))


def test_build_gram_rank():
    model = build_cx_mn(2, 2)
    vecs = np.stack([b.reshape(-1) for b in model.basis])
    gram = vecs.conj() @ vecs.T
    assert len(model.basis) == 8
    assert np.linalg.matrix_rank(gram) == 8


@pytest.mark.parametrize("m,n", [(1, 1), (2, 3), (3, 2), (4, 1), (1, 4)])
def test_projections_exact(m, n):
    model = build_cx_mn(m, n)
    assert np.array_equal(sum(model.abelian_projections), np.eye(m * n))
    for i, p in enumerate(model.abelian_projections):
        assert np.trace(p).real == m
        for q in model.abelian_projections[i + 1:]:
            assert not np.any(p @ q)
    assert validate_family(model.family()) == []


@pytest.mark.parametrize("m,n,expected", [(1, 2, 1), (3, 1, 3), (2, 3, 2), (3, 2, 3)])
def test_verify_center(m, n, expected):
    model = build_cx_mn(m, n)
    assert center_dim_oracle(model) == expected
    rep = verify_type_In(model)
    assert rep.center_dim == expected
    assert rep.closure_residual <= 1e-9
    assert len(rep.abelian_ok) == n and all(rep.abelian_ok)
    assert rep.decomposition_ok and rep.passed
    assert set(rep.to_json()) == {"closure_residual", "center_dim", "abelian_ok", "decomposition_ok"}


def test_center_elements_commute():
    from iodalg.matrix import commutant_basis

    model = build_cx_mn(2, 2)
    for z in commutant_basis(model.basis, model.dim):
        for b in model.basis:
            assert np.linalg.norm(z @ b - b @ z) <= 1e-8


def test_verify_detects_non_algebra():
    # drop one diagonal unit: the span is no longer closed under products
    model = build_cx_mn(1, 2)
    broken = type(model)(1, 2, model.basis[1:], model.abelian_projections)
    rep = verify_type_In(broken)
    assert rep.closure_residual > 0.5
    assert not rep.passed
