import json
import math

import numpy as np
import pytest

from rgme.linalg import DensityMatrix, kron
from rgme.measures import fidelity
from rgme.separable import (
    ProductEnsemble,
    SearchConfig,
    bipartitions,
    check_dur_conjecture,
    check_smolin_conjecture,
    lagrange_two_param_2x3,
    max_fidelity_separable,
    ppt_all_cuts,
    ppt_check,
    ppt_weight_condition,
    random_product_probes,
    rgme_numeric,
    stationarity_fidelity,
    stationarity_re,
)
from rgme.states import (
    bell_basis,
    isotropic,
    isotropic_closest_sep,
    ket,
    proj,
    smolin,
    two_param_2xn,
    two_param_closest_sep,
)

BELL = DensityMatrix(proj(bell_basis()["phi+"]), (2, 2))
FAST = SearchConfig(starts=8)


# -- product ensembles ----------------------------------------------------------------------


def test_product_ensemble_roundtrip():
    terms = [(0.25, [np.array([1, 0]), np.array([0, 1, 0])]),
             (0.75, [np.array([1, 1j]) / math.sqrt(2), np.array([0, 0, 1])])]
    ens = ProductEnsemble.from_terms(terms, (2, 3))
    rho = ens.realize()
    expected = 0.25 * proj(np.kron([1, 0], [0, 1, 0])) + 0.75 * proj(
        np.kron(np.array([1, 1j]) / math.sqrt(2), [0, 0, 1]))
    np.testing.assert_allclose(rho.matrix, expected, atol=1e-15)
    back = ProductEnsemble.from_json(json.loads(json.dumps(ens.to_json())))
    np.testing.assert_allclose(back.realize().matrix, rho.matrix, atol=1e-15)


def test_product_ensemble_validation():
    with pytest.raises(ValueError):
        ProductEnsemble(np.array([0.5, 0.6]), (np.eye(2), np.eye(2)), (2, 2))
    with pytest.raises(ValueError):
        ProductEnsemble(np.array([1.0]), (np.array([[1.0, 1.0]]), np.array([[1.0, 0.0]])), (2, 2))
    with pytest.raises(ValueError):
        ProductEnsemble(np.array([1.0]), (np.eye(2)[:1],), (2, 2))


def test_search_config_dict():
    cfg = SearchConfig.from_dict({"starts": 3, "seed": 9})
    assert cfg.starts == 3 and cfg.seed == 9
    assert SearchConfig.from_dict(cfg.to_dict()) == cfg
    with pytest.raises(ValueError):
        SearchConfig.from_dict({"startz": 3})
    with pytest.raises(ValueError):
        SearchConfig(starts=0)


# -- numerical maximization -------------------------------------------------------------------


def test_bell_max_fidelity():
    F, wit, diag = max_fidelity_separable(BELL, FAST)
    assert F == pytest.approx(1 / math.sqrt(2), abs=1e-6)
    assert fidelity(BELL, wit.realize()) == pytest.approx(F, abs=1e-12)
    assert diag["converged"]


def test_separable_input_gives_one():
    sep = DensityMatrix(kron(np.diag([0.3, 0.7]), np.diag([0.6, 0.4])), (2, 2))
    F, _, _ = max_fidelity_separable(sep, FAST)
    assert F == pytest.approx(1, abs=1e-6)
    prod = DensityMatrix(proj(ket([0, 1], (2, 2))), (2, 2))
    assert rgme_numeric(prod, FAST).value == pytest.approx(0, abs=1e-6)


def test_rgme_numeric_bell():
    rep = rgme_numeric(BELL, FAST)
    assert rep.value == pytest.approx(0.5, abs=1e-5)
    assert rep.measure == "rgme_numeric"
    assert rep.diagnostics["F"] == pytest.approx(math.sqrt(1 - rep.value))


def test_search_is_deterministic_and_worker_independent():
    rho = two_param_2xn(3, 0.1, 0.6)
    a = max_fidelity_separable(rho, SearchConfig(starts=4, seed=3))
    b = max_fidelity_separable(rho, SearchConfig(starts=4, seed=3))
    c = max_fidelity_separable(rho, SearchConfig(starts=4, seed=3, workers=2))
    assert a[0] == b[0] == c[0]
    np.testing.assert_array_equal(a[1].weights, c[1].weights)


def test_two_param_reference_maximum():
    # reference optimum for n=3, alpha=0.1, gamma=0.6 from an independent search
    rep = rgme_numeric(two_param_2xn(3, 0.1, 0.6), SearchConfig(starts=16))
    assert rep.value == pytest.approx(0.0535898385, abs=1e-7)


def test_witness_is_separable():
    _, wit, _ = max_fidelity_separable(isotropic(3, 0.6), FAST)
    assert ppt_check(wit.realize(), 1)[0]


# -- PPT ---------------------------------------------------------------------------------------


def test_ppt_examples():
    prod = DensityMatrix(proj(ket([0, 1], (2, 2))), (2, 2))
    assert ppt_check(prod, 1)[0]
    ok, mineig = ppt_check(BELL, 1)
    assert not ok and mineig == pytest.approx(-0.5)
    for a in np.linspace(0, 0.2, 3):
        assert ppt_check(two_param_closest_sep(3, a, 0.55), 1)[0]


def test_bipartitions_and_all_cuts():
    assert len(list(bipartitions(4))) == 7
    rho = smolin()
    # PPT across every 2|2 split, NPT across the 1|3 splits
    for cut in ([0, 1], [0, 2], [0, 3]):
        assert ppt_check(rho, cut)[0]
    assert not ppt_check(rho, [0])[0]
    ok, mineig = ppt_all_cuts(rho)
    assert not ok and mineig == pytest.approx(-0.125)


# -- stationarity ------------------------------------------------------------------------------


def test_stationarity_at_true_optimum():
    rho, star = isotropic(2, 0.8), isotropic_closest_sep(2)
    probes = random_product_probes((2, 2), 50, seed=1)
    assert stationarity_fidelity(rho, star, probes).passed
    assert stationarity_re(rho, star, probes).passed


def test_stationarity_detects_non_optimum():
    rho = isotropic(2, 0.8)
    star = DensityMatrix(np.eye(4) / 4, (2, 2))
    probes = random_product_probes((2, 2), 50, seed=1)
    rep = stationarity_fidelity(rho, star, probes)
    assert not rep.passed and rep.worst > 0 and rep.worst_probe is not None
    assert not stationarity_re(rho, star, probes).passed


def test_stationarity_re_support_violation():
    rho = isotropic(2, 0.8)
    star = DensityMatrix(proj(ket([0, 0], (2, 2))), (2, 2))
    rep = stationarity_re(rho, star, random_product_probes((2, 2), 3))
    assert not rep.passed and rep.diagnostics["support_violation"]


# -- Lagrange solution --------------------------------------------------------------------------


@pytest.mark.parametrize("alpha,gamma", [(0.0, 0.7), (0.1, 0.6), (0.05, 0.85), (0.2, 0.55)])
def test_lagrange_reproduces_closest_state(alpha, gamma):
    sol = lagrange_two_param_2x3(alpha, gamma)
    assert sol.objective1 >= sol.objective2 or sol.chosen_index == 0
    assert np.max(np.abs(sol.state(3).matrix - two_param_closest_sep(3, alpha, gamma).matrix)) <= 1e-14
    assert ppt_weight_condition(sol.chosen) >= -1e-15
    assert sol.chosen.sum() == pytest.approx(1, abs=1e-14)


# -- conjectures --------------------------------------------------------------------------------


def test_smolin_conjecture():
    rep = check_smolin_conjecture()
    assert rep.passed
    assert rep.rows[0]["F"] == pytest.approx(1 / math.sqrt(2), abs=1e-10)


def test_dur_conjecture_refuted():
    rep = check_dur_conjecture(4)
    assert rep.passed
    for row in rep.rows:
        assert row["margin"] > 1e-6
        assert row["decomposition_residual"] < 1e-14
