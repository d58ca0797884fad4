import json

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from rgme.linalg import DensityMatrix
from rgme.measures import concurrence
from rgme.separable import ppt_check
from rgme.states import (
    DomainError,
    FamilyTag,
    StateFamily,
    bell_basis,
    dur,
    example1,
    example1_closest_sep,
    example2,
    gen_isotropic,
    ghz,
    isotropic,
    isotropic_closest_sep,
    isotropic_threshold,
    ket,
    load_state,
    mems,
    mems_closest_sep,
    proj,
    pure_alpha,
    pure_alpha_sep_re,
    smolin,
    smolin_kets,
    two_param_2xn,
    two_param_beta,
    two_param_closest_sep,
)

PHI_PLUS = proj(bell_basis()["phi+"])
PSI_MINUS = proj(bell_basis()["psi-"])


def test_example1_endpoints_and_midpoint():
    np.testing.assert_allclose(example1(0).matrix, proj(ket([0, 1], (2, 2))))
    np.testing.assert_allclose(example1(1).matrix, PHI_PLUS, atol=1e-15)
    m = example1(0.5).matrix.real
    assert m[0, 0] == pytest.approx(0.25)
    assert m[0, 3] == pytest.approx(0.25)
    assert m[1, 1] == pytest.approx(0.5)
    assert m[3, 3] == pytest.approx(0.25)


def test_example1_closest_sep():
    np.testing.assert_allclose(example1_closest_sep(0).matrix, proj(ket([0, 1], (2, 2))))
    m = example1_closest_sep(1).matrix.real
    np.testing.assert_allclose(np.diag(m), [0.25] * 4)
    assert m[0, 3] == pytest.approx(0.25)
    for lam in np.linspace(0, 1, 11):
        assert ppt_check(example1_closest_sep(lam), 1)[0]


def test_example2_cases():
    sep = example2(0.5, 0)
    np.testing.assert_allclose(sep.matrix, np.diag(np.diag(sep.matrix)))
    assert ppt_check(sep, 1)[0]
    m = example2(0.5, 1).matrix
    assert abs(m[1, 2]) == pytest.approx(0.5)
    for A, G in [(0.5, 0.3), (0.3, 0.8), (0.5, 1.0)]:
        assert concurrence(example2(A, G)) == pytest.approx(G, abs=1e-10)
    with pytest.raises(DomainError):
        example2(0.1, 0.9)


def test_pure_alpha_endpoints():
    np.testing.assert_allclose(pure_alpha(0).matrix, proj(ket([1, 1], (2, 2))))
    np.testing.assert_allclose(pure_alpha(1 / np.sqrt(2)).matrix, PHI_PLUS, atol=1e-15)


def test_pure_alpha_diagonal_sep_weights_at_symmetric_point():
    w = np.diag(pure_alpha_sep_re(1 / np.sqrt(2)).matrix).real
    np.testing.assert_allclose(w, [0.5, 0, 0, 0.5], atol=1e-15)


def test_two_param_beta_and_trace():
    assert two_param_beta(3, 0.1, 0.6) == pytest.approx(1 / 15)
    for n in (3, 4, 5):
        rho = two_param_2xn(n, 0.05, 0.7)
        assert rho.dims == (2, n)
        assert np.trace(rho.matrix).real == pytest.approx(1, abs=1e-14)


def test_two_param_beta_zero_block():
    # gamma = 1 - 2(n-2) alpha forces beta = 0
    a = 0.1
    rho = two_param_2xn(3, a, 1 - 2 * a).matrix
    assert rho[0, 0] == pytest.approx(0)  # |00> carries weight beta
    assert rho[3 + 1, 3 + 1] == pytest.approx(0)  # |11>


def test_two_param_alpha_zero_is_werner_block():
    rho = two_param_2xn(3, 0, 0.8)
    d = np.diag(rho.matrix).real.reshape(2, 3)
    np.testing.assert_allclose(d[:, 2], 0)
    sub = rho.matrix.reshape(2, 3, 2, 3)[:, :2, :, :2].reshape(4, 4)
    beta = two_param_beta(3, 0, 0.8)
    werner = 0.8 * PSI_MINUS + beta * (np.eye(4) - PSI_MINUS)
    np.testing.assert_allclose(sub, werner, atol=1e-15)


def test_two_param_domain():
    with pytest.raises(DomainError):
        two_param_2xn(2, 0.1, 0.5)
    with pytest.raises(DomainError):
        two_param_2xn(3, 0.3, 0.5)
    with pytest.raises(DomainError):
        two_param_2xn(3, 0.1, 0.9)  # beta < 0


@pytest.mark.parametrize("alpha", np.linspace(0, 0.2, 5))
def test_two_param_closest_sep_is_ppt(alpha):
    for g in np.linspace(0.5, 1 - 2 * alpha, 5):
        ok, mineig = ppt_check(two_param_closest_sep(3, alpha, g), 1)
        assert ok, mineig


def test_mems_examples():
    np.testing.assert_allclose(mems(3, [1, 0, 0, 0]).matrix.reshape(2, 3, 2, 3)[:, :2, :, :2]
                               .reshape(4, 4), PSI_MINUS, atol=1e-15)
    sig = mems_closest_sep(3, [0.4, 0.3, 0.2, 0.1])
    assert sig.matrix[0, 0].real == pytest.approx(0.18, abs=1e-15)
    with pytest.raises(DomainError):
        mems(3, [0.1, 0.2, 0.3, 0.4])
    with pytest.raises(DomainError):
        mems(2, [0.4, 0.3, 0.2, 0.1])


def test_isotropic_examples():
    np.testing.assert_allclose(isotropic(3, 0).matrix, np.eye(9) / 9, atol=1e-15)
    np.testing.assert_allclose(isotropic(2, 1).matrix, PHI_PLUS, atol=1e-15)
    assert isotropic_threshold(2) == pytest.approx(1 / 3)
    np.testing.assert_allclose(isotropic_closest_sep(2).matrix, isotropic(2, 1 / 3).matrix)
    assert ppt_check(isotropic_closest_sep(3), 1)[0]


def test_gen_isotropic_examples():
    np.testing.assert_allclose(gen_isotropic(2, 3, 0.4).matrix, isotropic(3, 0.4).matrix)
    np.testing.assert_allclose(gen_isotropic(3, 2, 0).matrix, np.eye(8) / 8, atol=1e-15)
    assert isotropic_threshold(2, 3) == pytest.approx(1 / 5)


def test_smolin_examples():
    rho = smolin()
    np.testing.assert_allclose(np.linalg.eigvalsh(rho.matrix), [0] * 12 + [0.25] * 4, atol=1e-14)
    assert np.trace(rho.matrix).real == pytest.approx(1)
    k = smolin_kets()
    assert abs(np.vdot(k[0], k[1])) < 1e-15


def test_dur_examples():
    g = ghz(4)
    np.testing.assert_allclose(dur(4, 1).matrix, proj(g), atol=1e-15)
    d0 = dur(4, 0).matrix
    np.testing.assert_allclose(np.linalg.eigvalsh(d0)[-8:], [1 / 8] * 8, atol=1e-15)
    rho = dur(4, 0.5).matrix
    np.testing.assert_allclose(rho @ g, 0.5 * g, atol=1e-14)
    with pytest.raises(DomainError):
        dur(3, 0.5)


# -- family records ---------------------------------------------------------------------


def test_family_tag_parse():
    assert FamilyTag.parse("Smolin") is FamilyTag.Smolin
    assert FamilyTag.parse("two_param") is FamilyTag.TwoParam2xN
    assert FamilyTag.parse("TwoParam2xN") is FamilyTag.TwoParam2xN
    with pytest.raises(ValueError):
        FamilyTag.parse("werner")


def test_family_params_validated():
    with pytest.raises(ValueError):
        StateFamily.make("isotropic", d=2)
    with pytest.raises(ValueError):
        StateFamily.make("isotropic", d=2, alpha=0.5, lam=0.1)
    fam = StateFamily.make("isotropic", d=2.0, alpha=0.5)
    assert fam["d"] == 2 and isinstance(fam["d"], int)


def test_load_state_family_and_raw():
    rho, fam = load_state({"family": "dur", "params": {"N": 4, "x": 0.5}})
    assert fam.tag is FamilyTag.Dur and rho.dims == (2, 2, 2, 2)
    raw = json.loads(json.dumps(isotropic(2, 0.3).to_json()))
    rho2, fam2 = load_state(raw)
    assert fam2 is None
    np.testing.assert_allclose(rho2.matrix, isotropic(2, 0.3).matrix)


# -- every constructor yields a valid density matrix -----------------------------------


def _valid(rho):
    DensityMatrix(rho.matrix, rho.dims)  # re-validate from scratch


@settings(max_examples=1000, deadline=None)
@given(lam=st.floats(0, 1), alpha=st.floats(0, 1), d=st.integers(2, 4))
def test_simple_families_valid(lam, alpha, d):
    _valid(example1(lam))
    _valid(example1_closest_sep(lam))
    _valid(pure_alpha(alpha))
    _valid(isotropic(d, alpha))


@settings(max_examples=1000, deadline=None)
@given(A=st.floats(0, 1), t=st.floats(0, 1))
def test_example2_valid(A, t):
    _valid(example2(A, t * 2 * np.sqrt(A * (1 - A))))


@settings(max_examples=1000, deadline=None)
@given(n=st.integers(3, 5), sa=st.floats(0, 1), sg=st.floats(0, 1))
def test_two_param_valid(n, sa, sg):
    alpha = sa / (2 * n - 4)
    gamma = sg * (1 - 2 * (n - 2) * alpha)
    _valid(two_param_2xn(n, alpha, gamma))


@settings(max_examples=1000, deadline=None)
@given(n=st.integers(3, 4), raw=st.lists(st.floats(0, 1), min_size=4, max_size=4))
def test_mems_valid(n, raw):
    total = sum(raw)
    assume(total > 1e-3)
    lams = sorted((r / total for r in raw), reverse=True)
    rho = mems(n, lams)
    _valid(rho)
    _valid(mems_closest_sep(n, lams))


@settings(max_examples=1000, deadline=None)
@given(N=st.integers(4, 6), x=st.floats(0, 1), n=st.integers(2, 3), s=st.floats(0, 1))
def test_multipartite_valid(N, x, n, s):
    _valid(dur(N, x))
    lo = -1 / (2**n - 1)
    _valid(gen_isotropic(n, 2, lo + s * (1 - lo)))
