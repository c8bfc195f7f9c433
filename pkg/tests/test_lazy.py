import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from iodalg.iod import decompose, iod_norm, reconstruct, star_product
from iodalg.lazy import (
    builtin_family,
    certify_bound,
    doubling_schedule,
    materialize,
    truncated_corner,
    truncated_norm_curve,
)
from iodalg.matrix import matrix_unit
from iodalg.projections import family_from_partition


def tridiagonal_ones(n):
    return np.eye(n) + np.eye(n, k=1) + np.eye(n, k=-1)


def band_norm_oracle(n):
    """Largest eigenvalue of the all-ones tridiagonal matrix, two ways."""
    closed = 1 + 2 * math.cos(math.pi / (n + 1))
    dense = float(np.max(np.abs(np.linalg.eigvalsh(tridiagonal_ones(n)))))
    assert abs(closed - dense) <= 1e-12
    return closed


def test_unit_family():
    f = builtin_family("unit", i=0, j=1)
    assert f.claimed_bound == 1
    assert np.array_equal(f.block(0, 1), [[1]])
    assert not np.any(f.block(1, 0)) and not np.any(f.block(0, 0))


def test_diagonal_family_bounded():
    f = builtin_family("diagonal", lam=lambda k: 1 / (k + 1), bound=1)
    rep = truncated_norm_curve(f, [1, 2, 5, 17])
    assert all(v <= 1 + 1e-12 for v in rep.norms)
    assert rep.certified


def test_shift_family_corner_norms():
    f = builtin_family("shift", weights=lambda k: 1.0, bound=1)
    for n in (1, 2, 3, 8, 33):
        c = truncated_corner(f, n)
        shift = np.eye(n, k=1)
        assert np.array_equal(c, shift)
        sym_top = float(np.max(np.linalg.eigvalsh(shift + shift.T)))
        if n > 1:
            assert sym_top == pytest.approx(2 * math.cos(math.pi / (n + 1)), abs=1e-12)
    # the report tracks the corner of the shift itself: 0 for n = 1, then 1
    rep = truncated_norm_curve(f, [1, 2, 4, 8, 16])
    assert rep.norms[0] == 0.0
    assert rep.norms[1:] == pytest.approx([1.0] * 4, abs=1e-12)


def test_unknown_family():
    with pytest.raises(ValueError, match="unknown family"):
        builtin_family("toeplitz")


def test_callable_sequence_needs_bound():
    with pytest.raises(ValueError, match="explicit bound"):
        builtin_family("diagonal", lam=lambda k: 1.0)
    assert builtin_family("diagonal", lam=[1, -3, 2]).claimed_bound == 3


def test_doubling_schedule():
    assert doubling_schedule(1) == [1]
    assert doubling_schedule(32) == [1, 2, 4, 8, 16, 32]
    assert doubling_schedule(40) == [1, 2, 4, 8, 16, 32, 40]


def test_certify_unit():
    for max_n in (1, 2, 9):
        rep = certify_bound(builtin_family("unit", i=0, j=1), max_n)
        assert rep.certified
        assert all(v == pytest.approx(1.0) for n, v in zip(rep.sizes, rep.norms) if n >= 2)
        assert f"certified up to n = {max_n}" in rep.summary


def test_certify_diagonal_refuted_at_eleven():
    f = builtin_family("diagonal", lam=lambda k: k + 1, bound=10)
    rep = certify_bound(f, 32)
    assert not rep.certified
    n, excess = rep.violation
    assert n == 11
    assert excess == pytest.approx(1.0)
    assert "refuted at n = 11" in rep.summary


def test_certify_band():
    f = builtin_family("band", width=1, value=1, bound=3)
    rep = certify_bound(f, 64)
    assert rep.certified
    assert rep.sizes == [1, 2, 4, 8, 16, 32, 64]
    for n, v in zip(rep.sizes, rep.norms):
        assert v == pytest.approx(band_norm_oracle(n), abs=1e-9)
    assert all(a < b for a, b in zip(rep.norms, rep.norms[1:]))
    assert rep.norms[-1] < 3


def test_curve_examples():
    assert truncated_norm_curve(builtin_family("diagonal", lam=lambda k: 1, bound=1), [1, 2, 4]).norms == pytest.approx([1, 1, 1])
    assert truncated_norm_curve(builtin_family("unit", i=0, j=0), [1, 2, 4]).norms == pytest.approx([1, 1, 1])
    rep = truncated_norm_curve(builtin_family("band", width=1, value=1), [2, 4, 8, 16])
    assert all(a < b < 3 for a, b in zip(rep.norms, rep.norms[1:]))
    with pytest.raises(ValueError):
        truncated_norm_curve(builtin_family("unit", i=0, j=0), [2, 2])


def test_csv_columns():
    rep = certify_bound(builtin_family("diagonal", lam=lambda k: k + 1, bound=10), 32)
    lines = rep.to_csv().splitlines()
    assert lines[0] == "n,corner_norm,claimed_bound,certified"
    rows = [line.split(",") for line in lines[1:]]
    assert [int(r[0]) for r in rows] == rep.sizes
    assert ["11", "11.0", "10.0", "false"] in [[r[0], r[1], r[2], r[3]] for r in rows]


def test_materialize_examples():
    fam, x = materialize(builtin_family("unit", i=0, j=1), 2)
    ref = decompose(matrix_unit(2, 0, 1), family_from_partition(2, [1, 1]))
    assert fam == ref.family
    assert sorted(x.blocks) == sorted(ref.blocks)
    assert all(np.array_equal(x.blocks[k], ref.blocks[k]) for k in ref.blocks)

    lam = [0.5, -2.0, 3.0]
    _, x = materialize(builtin_family("diagonal", lam=lam), 3)
    assert np.array_equal(reconstruct(x), np.diag(lam))

    _, x = materialize(builtin_family("band", width=1, value=1), 4)
    assert np.array_equal(reconstruct(x), tridiagonal_ones(4))


def test_block_size_two():
    f = builtin_family("band", width=1, value=2, block_size=2)
    fam, x = materialize(f, 3)
    assert fam.dim == 6 and fam.ranks == [2, 2, 2]
    assert np.array_equal(reconstruct(x), 2 * np.kron(tridiagonal_ones(3), np.eye(2)))


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 3), st.floats(-2, 2), st.integers(1, 24))
def test_truncation_properties(width, value, max_n):
    f = builtin_family("band", width=width, value=value)
    rep = certify_bound(f, max_n)
    assert rep.certified  # row-sum bound holds
    assert all(a <= b + 1e-9 for a, b in zip(rep.norms, rep.norms[1:]))
    for n, v in zip(rep.sizes, rep.norms):
        _, x = materialize(f, n)
        assert iod_norm(x) == pytest.approx(v, abs=1e-9)


@settings(max_examples=15, deadline=None)
@given(st.integers(1, 12), st.integers(1, 2))
def test_star_of_materialized_bands(n, width):
    _, x = materialize(builtin_family("band", width=width, value=1), n)
    _, y = materialize(builtin_family("band", width=1, value=-0.5), n)
    dense = reconstruct(x) @ reconstruct(y)
    assert np.allclose(reconstruct(star_product(x, y)), dense, atol=1e-12)
