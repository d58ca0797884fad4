"""Entanglement measures: fidelity-based, entropic, and closed forms per family.

All logarithms are base 2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import xlogy

from . import _tensor
from .linalg import (
    DensityMatrix, PureState, StructureError, as_density, eig_hermitian,
    mat_sqrt_psd, partial_transpose, trace_norm,
)
from .states import (
    FamilyTag, StateFamily, dur_optimal_sep, example1_closest_sep, example2_closest_sep,
    gen_isotropic_closest_sep, isotropic_closest_sep, isotropic_singlet_fraction,
    isotropic_threshold, mems_closest_sep, pure_alpha_closest_product,
    smolin_conjectured_sep, two_param_beta, two_param_closest_sep,
)

LN2 = math.log(2)


class UncoveredFamilyError(ValueError):
    """No closed form is available for the requested family/measure."""


def _xlog2y(x, y):
    return float(xlogy(x, y) / LN2)


@dataclass
class MeasureReport:
    """A measure value plus the separable state achieving it and diagnostics."""

    measure: str
    value: float
    witness: DensityMatrix | PureState | None = None
    family: StateFamily | None = None
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self, include_witness: bool = False) -> dict:
        out = {"measure": self.measure, "value": self.value,
               "family": self.family.to_json() if self.family else None,
               "diagnostics": dict(self.diagnostics)}
        if include_witness and self.witness is not None:
            out["witness"] = self.witness.to_json()
        return out


# -- fidelity and distances -------------------------------------------------------------


def _same_dim(rho, sigma):
    if rho.dim != sigma.dim:
        raise StructureError(f"dimension mismatch: {rho.dim} vs {sigma.dim}")


def fidelity_raw(rho, sigma) -> float:
    """Unclamped ``tr sqrt(sqrt(rho) sigma sqrt(rho))``.

    Evaluated as the trace norm of ``sqrt(rho) sqrt(sigma)``, which avoids
    rooting the (often rank-deficient) middle product and is exactly symmetric.
    """
    rho, sigma = as_density(rho), as_density(sigma)
    _same_dim(rho, sigma)
    a = mat_sqrt_psd(rho.matrix, rho.psd_tolerance)
    b = mat_sqrt_psd(sigma.matrix, sigma.psd_tolerance)
    return float(np.linalg.svd(a @ b, compute_uv=False).sum())


def fidelity(rho, sigma) -> float:
    """Root fidelity ``F(rho, sigma)`` clamped to ``[0, 1]``.

    Examples
    --------
    >>> from rgme.states import example1
    >>> round(fidelity(example1(0.3), example1(0.3)), 12)
    1.0
    """
    return min(max(fidelity_raw(rho, sigma), 0.0), 1.0)


def bures_sq(rho, sigma) -> float:
    """``1 - F^2``: the squared fidelity-based distance used by the RGME."""
    return 1.0 - fidelity(rho, sigma) ** 2


def trace_distance(rho, sigma) -> float:
    rho, sigma = as_density(rho), as_density(sigma)
    _same_dim(rho, sigma)
    return 0.5 * trace_norm(rho.matrix - sigma.matrix)


def von_neumann_entropy(rho) -> float:
    w = eig_hermitian(as_density(rho).matrix)[0]
    w = w[w > 1e-14]
    return float(max(-np.sum(w * np.log2(w)), 0.0))


def relative_entropy(rho, sigma, cutoff: float = 1e-14) -> float:
    """``S(rho || sigma) = tr(rho log rho) - tr(rho log sigma)``.

    Returns ``inf`` if ``rho`` has weight (above ``1e-12``) outside the
    support of ``sigma``.
    """
    rho, sigma = as_density(rho), as_density(sigma)
    _same_dim(rho, sigma)
    ws, vs = eig_hermitian(sigma.matrix)
    # diagonal of rho in sigma's eigenbasis
    pops = np.real(np.einsum("ik,ij,jk->k", vs.conj(), rho.matrix, vs))
    support = ws > cutoff
    if np.sum(pops[~support]) > 1e-12:
        return math.inf
    cross = float(np.sum(pops[support] * np.log2(ws[support])))
    return -von_neumann_entropy(rho) - cross


# -- two-qubit and partial-transpose measures --------------------------------------------


_SY = np.array([[0, -1j], [1j, 0]])


def concurrence(rho) -> float:
    """Wootters concurrence of a two-qubit state."""
    rho = as_density(rho)
    if rho.dim != 4:
        raise StructureError("concurrence needs a 2 x 2 state")
    yy = np.kron(_SY, _SY)
    s = mat_sqrt_psd(rho.matrix)
    # sqrt of the eigenvalues of rho rho~ are the singular values of sqrt(rho) sqrt(rho~);
    # the SVD resolves them to ~eps instead of ~sqrt(eps)
    lam = np.linalg.svd(s @ yy @ s.conj() @ yy, compute_uv=False)
    return float(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))


def gme_two_qubit(rho) -> float:
    """Convex-roof geometric measure ``(1 - sqrt(1 - C^2))/2`` for two qubits."""
    c = concurrence(rho)
    return 0.5 * (1 - math.sqrt(max(1 - c * c, 0.0)))


def negativity(rho, cut=None) -> float:
    """``||rho^T_B||_1 - 1`` (no factor 1/2), floored at zero.

    ``cut`` lists the subsystems transposed; defaults to the last one.
    """
    rho = as_density(rho)
    if cut is None:
        cut = [len(rho.dims) - 1]
    return max(trace_norm(partial_transpose(rho.matrix, rho.dims, cut)) - 1.0, 0.0)


# -- pure-state geometric measure ----------------------------------------------------------


def gme_pure(psi, dims=None, starts: int = 32, seed: int = 0,
             tol: float = 1e-12, max_iters: int = 10000) -> MeasureReport:
    """``1 - Lambda_max^2`` for a pure state by alternating rank-1 updates.

    Every start runs single-site updates (each factor set to its normalized
    environment) until ``Lambda`` changes by less than ``tol``. Starts are
    seeded and run as one batch; ties resolve to the lowest start index.
    """
    if not isinstance(psi, PureState):
        psi = PureState(psi, dims)
    dims = psi.dims if dims is None else tuple(dims)
    rng = np.random.default_rng(seed)
    facs = _tensor.random_factors(rng, dims, starts)
    g = np.broadcast_to(psi.amplitudes.reshape((1,) + dims), (starts,) + dims)
    lam = np.abs(_tensor.overlaps(g, facs))
    it = 0
    for it in range(1, max_iters + 1):
        facs, ov = _tensor.als_sweep(g, facs)
        new = np.abs(ov)
        done = np.max(np.abs(new - lam)) < tol
        lam = new
        if done:
            break
    best = int(np.argmax(lam))
    vec = _tensor.product_vectors([f[best:best + 1] for f in facs])[0]
    vec = vec / np.linalg.norm(vec)
    lmax = min(float(lam[best]), 1.0)
    return MeasureReport("gme", 1 - lmax ** 2, PureState(vec, dims),
                         diagnostics={"lambda_max": lmax, "iterations": it, "starts": starts})


def gme_isotropic(d: int, alpha: float) -> float:
    """Geometric measure of an isotropic state via its singlet fraction ``F'``."""
    fp = isotropic_singlet_fraction(d, alpha)
    if fp <= 1 / d:
        return 0.0
    return 1 - (math.sqrt(fp) + math.sqrt(max((1 - fp) * (d - 1), 0.0))) ** 2 / d


# -- isotropic EOF and I-concurrence -----------------------------------------------------


def iconcurrence_isotropic(d: int, alpha: float) -> float:
    """``sqrt(2d/(d-1)) (F' - 1/d)`` above the threshold, else 0; ``2F' - 1`` at ``d = 2``."""
    fp = isotropic_singlet_fraction(d, alpha)
    if fp < 1 / d:
        return 0.0
    return math.sqrt(2 * d / (d - 1)) * (fp - 1 / d)


def _binary_entropy(x):
    return -_xlog2y(x, x) - _xlog2y(1 - x, 1 - x)


def eof_isotropic(d: int, alpha: float) -> float:
    """Entanglement of formation of the ``d x d`` isotropic state.

    Three branches in the singlet fraction ``F'``: zero below ``1/d``; the
    ``h(x) + (1 - x) log(d - 1)`` branch up to ``4(d-1)/d^2``; then the
    affine branch ``d log(d-1)/(d-2) (F' - 1) + log d``. For ``d = 2`` the
    middle branch applies all the way to ``F' = 1``.
    """
    if d < 2:
        raise ValueError("d must be >= 2")
    fp = isotropic_singlet_fraction(d, alpha)
    if fp < 1 / d:
        return 0.0
    if d > 2 and fp >= 4 * (d - 1) / d ** 2:
        return d * math.log2(d - 1) / (d - 2) * (fp - 1) + math.log2(d)
    x = (math.sqrt(fp) + math.sqrt(max((d - 1) * (1 - fp), 0.0))) ** 2 / d
    x = min(x, 1.0)
    return _binary_entropy(x) + (1 - x) * math.log2(d - 1)


# -- closed forms per family ---------------------------------------------------------------


def _f_example1(lam):
    return (1 - lam / 2) * math.sqrt(1 - lam) + lam * math.sqrt(1 - lam / 2)


def _f_example2(A, G):
    q = math.sqrt(max(1 - 4 * A + 4 * A ** 2 + A * G ** 2 - A ** 2 * G ** 2, 0.0))
    c = 1 - 2 * A + 2 * A ** 2
    return math.sqrt(max((c - q) / 2, 0.0)) + math.sqrt(max((c + q) / 2, 0.0))


def _f_two_param(n, alpha, gamma):
    beta = two_param_beta(n, alpha, gamma)
    w = 3 * beta + gamma
    return (2 * (n - 2) * alpha + 3 * math.sqrt(max(beta * w, 0.0)) / math.sqrt(6)
            + math.sqrt(max(gamma * w, 0.0)) / math.sqrt(2))


def _f_mems(l1, l2, l3, l4):
    s = l1 + l4
    return (l2 + l3 + (l1 + 2 * l4) / 2 * math.sqrt(l4 / s)
            + l1 * math.sqrt((l1 + 2 * l4) / (2 * s)))


def _f_isotropic(d, alpha):
    return ((d * d - 1) / d * math.sqrt((1 - alpha) / (d * (d + 1)))
            + math.sqrt((1 + (d * d - 1) * alpha) / d) / d)


def _f_gen_isotropic(n, d, alpha):
    D = d ** n
    return ((D - 1) * math.sqrt((1 - alpha) / (D * (D + d)))
            + math.sqrt((1 + (D - 1) * alpha) / D * (d + 1) / (D + d)))


def rgme_closed(family: StateFamily) -> MeasureReport:
    """Closed-form RGME ``1 - F^2`` for a covered family.

    The witness is the separable state whose fidelity with the family state
    equals the closed-form ``F``; for the isotropic families below threshold
    the value is 0 and the witness is the state itself.
    """
    t, p = family.tag, family.params
    if t is FamilyTag.Example1:
        F, wit = _f_example1(p["lam"]), example1_closest_sep(p["lam"])
    elif t is FamilyTag.Example2:
        F, wit = _f_example2(p["A"], p["G"]), example2_closest_sep(p["A"])
    elif t is FamilyTag.PureAlpha:
        a = p["alpha"]
        rgme = 0.5 * (1 - math.sqrt(max(1 - 4 * a * a * (1 - a * a), 0.0)))
        F, wit = math.sqrt(1 - rgme), pure_alpha_closest_product(a)
    elif t is FamilyTag.TwoParam2xN:
        F = _f_two_param(p["n"], p["alpha"], p["gamma"])
        wit = two_param_closest_sep(p["n"], p["alpha"], p["gamma"])
    elif t is FamilyTag.MEMS:
        F, wit = _f_mems(*family.lams), mems_closest_sep(p["n"], family.lams)
    elif t is FamilyTag.Isotropic:
        d, a = p["d"], p["alpha"]
        F = 1.0 if a <= isotropic_threshold(d) else _f_isotropic(d, a)
        wit = isotropic_closest_sep(d, a)
    elif t is FamilyTag.GenIsotropic:
        n, d, a = p["n"], p["d"], p["alpha"]
        F = 1.0 if a <= isotropic_threshold(d, n) else _f_gen_isotropic(n, d, a)
        wit = gen_isotropic_closest_sep(n, d, a)
    elif t is FamilyTag.Smolin:
        F, wit = math.sqrt(0.5), smolin_conjectured_sep()
    elif t is FamilyTag.Dur:
        F, wit = math.sqrt(1 - p["x"] / 2), dur_optimal_sep(p["N"], p["x"])
    else:  # pragma: no cover - enum is exhaustive
        raise UncoveredFamilyError(t)
    F = min(F, 1.0)
    value = 0.5 if t is FamilyTag.Smolin else (p["x"] / 2 if t is FamilyTag.Dur else 1 - F * F)
    return MeasureReport("rgme_closed", value, wit, family, {"F": F})


def re_closed(family: StateFamily) -> float:
    """Closed-form relative entropy of entanglement for a covered family."""
    t, p = family.tag, family.params
    if t is FamilyTag.Example1:
        lam = p["lam"]
        return _xlog2y(lam - 2, 1 - lam / 2) + _xlog2y(1 - lam, 1 - lam)
    if t is FamilyTag.PureAlpha:
        return _binary_entropy(p["alpha"] ** 2)
    if t is FamilyTag.TwoParam2xN:
        beta = two_param_beta(p["n"], p["alpha"], p["gamma"])
        g = p["gamma"]
        w = 3 * beta + g
        return _xlog2y(3 * beta, 6 * beta / w) + _xlog2y(g, 2 * g / w)
    if t is FamilyTag.MEMS:
        l1, _, _, l4 = family.lams
        return (_xlog2y(l1, 2 * (l1 + l4) / (l1 + 2 * l4))
                + _xlog2y(l4, 4 * l4 * (l1 + l4) / (l1 + 2 * l4) ** 2))
    if t is FamilyTag.Isotropic:
        d = p["d"]
        fp = isotropic_singlet_fraction(d, p["alpha"])
        if fp <= 1 / d:
            return 0.0
        return math.log2(d) + _xlog2y(fp, fp) + _xlog2y(1 - fp, (1 - fp) / (d - 1))
    if t is FamilyTag.Smolin:
        return 1.0
    raise UncoveredFamilyError(f"no closed-form relative entropy for {t.value}")
