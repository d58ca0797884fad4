import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rgme.linalg import (
    DensityMatrix,
    NotPSDError,
    PureState,
    StructureError,
    eig_hermitian,
    kron,
    kron_all,
    mat_log2_on_support,
    mat_sqrt_psd,
    partial_trace,
    partial_transpose,
    trace_norm,
)
from rgme.states import bell_basis, proj, pure_alpha_ket


def bell_projector():
    return proj(bell_basis()["phi+"])


def random_psd(seed, D, rank=None):
    rng = np.random.default_rng(seed)
    rank = D if rank is None else rank
    g = rng.normal(size=(D, rank)) + 1j * rng.normal(size=(D, rank))
    m = g @ g.conj().T
    return m / np.trace(m).real


# -- eigendecomposition -------------------------------------------------------------------


def test_eig_identity_and_diagonal():
    w, _ = eig_hermitian(np.eye(2))
    np.testing.assert_allclose(w, [1, 1])
    w, _ = eig_hermitian(np.diag([0.25, 0.75]))
    np.testing.assert_allclose(w, [0.25, 0.75])


def test_eig_bell_projector():
    w, _ = eig_hermitian(bell_projector())
    np.testing.assert_allclose(w, [0, 0, 0, 1], atol=1e-14)


def test_eig_rejects_non_square_and_non_hermitian():
    with pytest.raises(StructureError):
        eig_hermitian(np.ones((2, 3)))
    with pytest.raises(StructureError):
        eig_hermitian(np.array([[0, 1], [0, 0]]))


# -- matrix functions -------------------------------------------------------------------


def test_sqrt_examples():
    np.testing.assert_allclose(mat_sqrt_psd(np.eye(4) / 4), np.eye(4) / 2, atol=1e-15)
    P = bell_projector()
    np.testing.assert_allclose(mat_sqrt_psd(P), P, atol=1e-12)
    np.testing.assert_allclose(mat_sqrt_psd(np.diag([0.16, 0.84])),
                               np.diag([0.4, np.sqrt(0.84)]), atol=1e-15)


def test_sqrt_rejects_negative_but_clamps_noise():
    with pytest.raises(NotPSDError):
        mat_sqrt_psd(np.diag([1.0, -1e-6]))
    r = mat_sqrt_psd(np.diag([1.0, -5e-11]))
    np.testing.assert_allclose(r, np.diag([1.0, 0.0]))


def test_log2_examples():
    np.testing.assert_allclose(mat_log2_on_support(np.eye(2)), np.zeros((2, 2)), atol=1e-15)
    np.testing.assert_allclose(mat_log2_on_support(np.diag([0.5, 0.5])), -np.eye(2), atol=1e-15)
    np.testing.assert_allclose(mat_log2_on_support(np.diag([0.25, 0.75])),
                               np.diag([-2, np.log2(0.75)]), atol=1e-15)


def test_log2_zero_on_kernel():
    r = mat_log2_on_support(np.diag([1.0, 0.0]))
    np.testing.assert_allclose(r, np.zeros((2, 2)), atol=1e-15)


# -- tensor structure ---------------------------------------------------------------------


def test_partial_transpose_examples():
    ra, rb = np.diag([0.3, 0.7]), random_psd(1, 3)
    pt = partial_transpose(kron(ra, rb), (2, 3), 1)
    np.testing.assert_allclose(np.sort(np.linalg.eigvalsh(pt)),
                               np.sort(np.linalg.eigvalsh(kron(ra, rb))), atol=1e-14)
    pt = partial_transpose(bell_projector(), (2, 2), 1)
    assert np.linalg.eigvalsh(pt).min() == pytest.approx(-0.5, abs=1e-14)
    diag = np.diag([0.1, 0.2, 0.3, 0.4])
    np.testing.assert_array_equal(partial_transpose(diag, (2, 2), 0), diag)


def test_partial_transpose_bad_subsystem():
    with pytest.raises(IndexError):
        partial_transpose(np.eye(4) / 4, (2, 2), 2)


def test_partial_trace_examples():
    ra, rb = random_psd(2, 2), random_psd(3, 3)
    np.testing.assert_allclose(partial_trace(kron(ra, rb), (2, 3), [0]), ra, atol=1e-12)
    np.testing.assert_allclose(partial_trace(bell_projector(), (2, 2), [0]), np.eye(2) / 2,
                               atol=1e-15)
    alpha = 0.6
    xi = proj(pure_alpha_ket(alpha))
    np.testing.assert_allclose(partial_trace(xi, (2, 2), [0]),
                               np.diag([alpha**2, 1 - alpha**2]), atol=1e-15)


def test_kron_examples():
    np.testing.assert_array_equal(kron(np.eye(2), np.eye(2)), np.eye(4))
    np.testing.assert_array_equal(kron(np.diag([1, 0]), np.diag([0, 1])), np.diag([0, 1, 0, 0]))
    s = random_psd(4, 2)
    out = kron(np.diag([1, 0]), s)
    np.testing.assert_array_equal(out[:2, :2], s)
    assert not out[2:].any() and not out[:, 2:].any()
    assert kron_all([np.eye(2)] * 3).shape == (8, 8)


def test_trace_norm_examples():
    assert trace_norm(random_psd(5, 4)) == pytest.approx(1.0, abs=1e-12)
    assert trace_norm(np.diag([0.5, -0.5])) == pytest.approx(1.0)
    s = random_psd(6, 3)
    assert trace_norm(s - s) == 0.0


# -- validated containers -----------------------------------------------------------------


def test_density_matrix_validation():
    with pytest.raises(ValueError, match="trace"):
        DensityMatrix(np.eye(2))
    with pytest.raises(StructureError):
        DensityMatrix(np.eye(4) / 4, dims=(2, 3))
    with pytest.raises(NotPSDError):
        DensityMatrix(np.diag([1.5, -0.5]))
    with pytest.raises(StructureError):
        DensityMatrix(np.eye(512) / 512)
    rho = DensityMatrix(np.eye(4) / 4, dims=(2, 2))
    with pytest.raises(ValueError):
        rho.matrix[0, 0] = 1


def test_density_matrix_json_roundtrip():
    rho = DensityMatrix(random_psd(7, 6), dims=(2, 3))
    back = DensityMatrix.from_json(json.loads(json.dumps(rho.to_json())))
    assert back.dims == (2, 3)
    np.testing.assert_array_equal(back.matrix, rho.matrix)


def test_pure_state_norm_check():
    with pytest.raises(ValueError, match="norm"):
        PureState([1.0, 1.0], (2,))
    psi = PureState.normalized([1.0, 1.0], (2,))
    np.testing.assert_allclose(psi.density().matrix, np.full((2, 2), 0.5))


# -- randomized properties ---------------------------------------------------------------


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**31 - 1), D=st.integers(1, 16), rank=st.integers(1, 16))
def test_sqrt_squares_back(seed, D, rank):
    m = random_psd(seed, D, min(rank, D))
    r = mat_sqrt_psd(m)
    np.testing.assert_allclose(r @ r, m, atol=1e-9)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**31 - 1), da=st.integers(1, 4), db=st.integers(1, 4))
def test_partial_trace_of_product(seed, da, db):
    ra, rb = random_psd(seed, da), random_psd(seed + 1, db)
    np.testing.assert_allclose(partial_trace(kron(ra, rb), (da, db), [0]), ra, atol=1e-12)
    np.testing.assert_allclose(partial_trace(kron(ra, rb), (da, db), [1]), rb, atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**31 - 1), dims=st.lists(st.integers(2, 3), min_size=2, max_size=3),
       which=st.integers(0, 2))
def test_double_partial_transpose_is_identity(seed, dims, which):
    which %= len(dims)
    m = random_psd(seed, int(np.prod(dims)))
    twice = partial_transpose(partial_transpose(m, dims, which), dims, which)
    np.testing.assert_array_equal(twice, m)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**31 - 1), D=st.integers(1, 16))
def test_eigenvalue_sum_is_trace(seed, D):
    rng = np.random.default_rng(seed)
    g = rng.normal(size=(D, D)) + 1j * rng.normal(size=(D, D))
    h = g + g.conj().T
    w, _ = eig_hermitian(h)
    assert abs(w.sum() - np.trace(h).real) <= 1e-10 * max(1.0, np.abs(w).sum())
