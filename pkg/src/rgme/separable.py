"""Numerical search for the separable state of maximal fidelity, plus certificates.

The search parameterizes a separable state as ``sigma = Phi Phi^dagger`` where
the columns of ``Phi`` are ``sqrt(p_i) |phi_i>`` with ``|phi_i>`` fully product.
Since ``F(rho, Phi Phi^dagger) = ||sqrt(rho) Phi||_1``, each iteration

1. takes the polar factor ``W`` of ``sqrt(rho) Phi`` (fixing the purification
   alignment), so ``F = Re tr(W^dagger sqrt(rho) Phi)``;
2. sets the per-term target ``g_i = (sqrt(rho) W)_i`` and improves every
   product vector ``|phi_i>`` towards ``g_i`` with one alternating rank-1 sweep;
3. re-weights ``p_i`` proportionally to ``|<phi_i|g_i>|^2``, the optimal
   simplex point for the linearized objective.

Each step cannot decrease the lower bound ``Re tr(W^dagger sqrt(rho) Phi)`` and
so ``F`` increases monotonically; iteration stops once the gain per step is
below ``tol``.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from . import _tensor
from .linalg import (
    MAX_DIM, DensityMatrix, PureState, StructureError, as_density, eig_hermitian,
    mat_sqrt_psd, partial_transpose,
)
from .measures import MeasureReport, fidelity, relative_entropy
from .states import (
    _two_param_from_weights, dur, dur_conjectured_sep, dur_decomposition, proj, smolin,
    smolin_conjectured_sep, two_param_beta,
)


@dataclass(frozen=True)
class ProductEnsemble:
    """Convex mixture of fully product pure states.

    ``weights`` has shape ``(K,)``; ``factors[j]`` has shape ``(K, dims[j])`` and
    holds the ``j``-th tensor factor of every term.
    """

    weights: np.ndarray
    factors: tuple
    dims: tuple

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        facs = tuple(np.asarray(f, dtype=complex) for f in self.factors)
        dims = tuple(int(d) for d in self.dims)
        if len(facs) != len(dims) or any(f.shape != (w.size, d) for f, d in zip(facs, dims)):
            raise StructureError("factor shapes do not match weights/dims")
        if np.any(w < 0) or abs(w.sum() - 1) > 1e-12:
            raise ValueError("weights must be nonnegative and sum to 1")
        for f in facs:
            if np.any(np.abs(np.linalg.norm(f, axis=1) - 1) > 1e-12):
                raise ValueError("every factor must be normalized")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "factors", facs)
        object.__setattr__(self, "dims", dims)

    @classmethod
    def from_terms(cls, terms, dims) -> "ProductEnsemble":
        """Build from ``[(weight, [vec_1, ..., vec_k]), ...]``."""
        w = [t[0] for t in terms]
        facs = [np.array([np.asarray(t[1][j], dtype=complex) for t in terms]) for j in range(len(dims))]
        return cls(np.array(w), tuple(facs), tuple(dims))

    @property
    def terms(self) -> list:
        return [(float(self.weights[i]), [PureState(f[i]) for f in self.factors])
                for i in range(self.weights.size)]

    def realize(self) -> DensityMatrix:
        vecs = _tensor.product_vectors(list(self.factors))
        phi = vecs.T * np.sqrt(self.weights)
        return DensityMatrix(phi @ phi.conj().T, self.dims, check=False)

    def to_json(self) -> dict:
        return {"weights": self.weights.tolist(),
                "factors": [[[[float(z.real), float(z.imag)] for z in f[i]] for f in self.factors]
                            for i in range(self.weights.size)],
                "dims": list(self.dims)}

    @classmethod
    def from_json(cls, data) -> "ProductEnsemble":
        dims = data["dims"]
        terms = [(wt, [np.array([complex(*z) for z in vec]) for vec in facs])
                 for wt, facs in zip(data["weights"], data["factors"])]
        return cls.from_terms(terms, dims)


@dataclass(frozen=True)
class SearchConfig:
    """Settings for :func:`max_fidelity_separable`.

    ``term_count`` defaults to ``D^2``; ``workers > 1`` runs starts on a thread
    pool without changing the result.
    """

    term_count: int | None = None
    starts: int = 64
    max_iters: int = 2000
    tol: float = 1e-10
    seed: int = 0
    workers: int = 1

    def __post_init__(self):
        if self.term_count is not None and self.term_count < 1:
            raise ValueError("term_count must be positive")
        if self.starts < 1 or self.max_iters < 1 or self.workers < 1:
            raise ValueError("starts, max_iters and workers must be positive")
        if not self.tol > 0:
            raise ValueError("tol must be > 0")

    @classmethod
    def from_dict(cls, data) -> "SearchConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown search settings {sorted(unknown)}")
        return cls(**data)

    def to_dict(self) -> dict:
        return asdict(self)


def _single_start(M, dims, K, rng, max_iters, tol):
    facs = _tensor.random_factors(rng, dims, K)
    p = np.full(K, 1.0 / K)
    F_prev, converged, it = -1.0, False, 0
    for it in range(1, max_iters + 1):
        phi = (_tensor.product_vectors(facs) * np.sqrt(p)[:, None]).T
        U, S, Vh = np.linalg.svd(M @ phi, full_matrices=False)
        F = S.sum()
        if F - F_prev < tol:
            converged = True
            break
        F_prev = F
        G = M @ (U @ Vh)
        g = G.T.reshape((K,) + tuple(dims))
        facs, ov = _tensor.als_sweep(g, facs)
        c = np.abs(ov)
        # absorb the overlap phase so <phi_i|g_i> is real and positive
        facs[0] = facs[0] * np.exp(1j * np.angle(ov))[:, None]
        if c.sum() == 0:
            break
        p = c ** 2 / np.sum(c ** 2)
    # F for the final (p, facs) pair
    phi = (_tensor.product_vectors(facs) * np.sqrt(p)[:, None]).T
    F = np.linalg.svd(M @ phi, compute_uv=False).sum()
    return float(F), p, facs, it, converged


def max_fidelity_separable(rho, cfg: SearchConfig | None = None, dims=None):
    """Best fidelity between ``rho`` and a fully separable state.

    Parameters
    ----------
    rho : DensityMatrix or array_like
        Target state; its ``dims`` define the separability split (group
        factors to get coarser splits).
    cfg : SearchConfig, optional

    Returns
    -------
    F_max : float
    witness : ProductEnsemble
        Ensemble attaining ``F_max``.
    diagnostics : dict
        ``iterations``, ``converged`` (best start), ``start`` index, and
        ``all_converged``.
    """
    cfg = cfg or SearchConfig()
    rho = as_density(rho, dims)
    D, dims = rho.dim, rho.dims
    if D > MAX_DIM:
        raise StructureError(f"dimension {D} exceeds cap {MAX_DIM}")
    K = cfg.term_count or D * D
    M = mat_sqrt_psd(rho.matrix)

    def run(s):
        return _single_start(M, dims, K, np.random.default_rng([cfg.seed, s]), cfg.max_iters, cfg.tol)

    if cfg.workers > 1:
        with ThreadPoolExecutor(cfg.workers) as pool:
            results = list(pool.map(run, range(cfg.starts)))
    else:
        results = [run(s) for s in range(cfg.starts)]

    best = max(range(cfg.starts), key=lambda s: (results[s][0], -s))
    F, p, facs, it, conv = results[best]
    keep = p > 0
    w = p[keep] / p[keep].sum()
    witness = ProductEnsemble(w, tuple(f[keep] for f in facs), dims)
    diag = {"iterations": it, "converged": conv, "start": best,
            "all_converged": all(r[4] for r in results), "raw_F": F}
    return min(F, 1.0), witness, diag


def rgme_numeric(rho, cfg: SearchConfig | None = None, dims=None) -> MeasureReport:
    """``1 - F_max^2`` with the optimizing ensemble as witness."""
    F, wit, diag = max_fidelity_separable(rho, cfg, dims)
    diag = dict(diag, F=F)
    return MeasureReport("rgme_numeric", 1 - F * F, wit.realize(), diagnostics=diag)


# -- PPT ---------------------------------------------------------------------------------


def ppt_check(rho, cut, tol: float = 1e-10):
    """``(is_ppt, min_eigenvalue)`` of the partial transpose over ``cut``."""
    rho = as_density(rho) if not isinstance(rho, DensityMatrix) else rho
    w = eig_hermitian(partial_transpose(rho.matrix, rho.dims, cut))[0]
    return bool(w[0] >= -tol), float(w[0])


def bipartitions(k: int):
    """All nontrivial cuts of ``k`` parties, each listed once (party 0 on the untransposed side)."""
    for mask in range(1, 2 ** (k - 1)):
        yield [j for j in range(1, k) if mask >> (j - 1) & 1]


def ppt_all_cuts(rho, tol: float = 1e-10):
    """``(is_ppt_everywhere, worst_min_eigenvalue)`` over every bipartition."""
    rho = as_density(rho) if not isinstance(rho, DensityMatrix) else rho
    worst = math.inf
    for cut in bipartitions(len(rho.dims)):
        worst = min(worst, ppt_check(rho, cut, tol)[1])
    return bool(worst >= -tol), float(worst)


# -- stationarity certificates -----------------------------------------------------------


def random_product_probes(dims, count: int, seed: int = 0) -> list:
    """``count`` seeded random pure product states as one-term ensembles."""
    rng = np.random.default_rng(seed)
    facs = _tensor.random_factors(rng, dims, count)
    return [ProductEnsemble(np.ones(1), tuple(f[i:i + 1] for f in facs), dims) for i in range(count)]


@dataclass
class StationarityReport:
    """Directional derivatives at ``sigma_star`` towards each probe."""

    kind: str
    derivatives: np.ndarray
    threshold: float
    passed: bool
    worst_index: int | None = None
    worst_probe: ProductEnsemble | None = None
    diagnostics: dict = field(default_factory=dict)

    @property
    def worst(self) -> float:
        if self.derivatives.size == 0:
            return 0.0
        return float(self.derivatives.max() if self.kind == "fidelity" else self.derivatives.min())


def _directional(f, f0, h):
    """Forward difference at ``0+`` with one Richardson step: ``2 D(h/2) - D(h)``."""
    d1 = (f(h) - f0) / h
    d2 = (f(h / 2) - f0) / (h / 2)
    return 2 * d2 - d1


def _as_matrix(probe):
    if isinstance(probe, ProductEnsemble):
        return probe.realize().matrix
    return as_density(probe).matrix


def stationarity_fidelity(rho, sigma_star, probes, h: float = 1e-6, threshold: float = 1e-7):
    """Check ``d/dl F(rho, (1-l) sigma* + l sigma) <= threshold`` at ``l = 0+`` for every probe."""
    rho, star = as_density(rho), as_density(sigma_star)
    f0 = fidelity(rho, star)
    ders = []
    for pr in probes:
        s = _as_matrix(pr)
        f = lambda l: fidelity(rho, DensityMatrix((1 - l) * star.matrix + l * s, star.dims, check=False))
        ders.append(_directional(f, f0, h))
    ders = np.array(ders)
    bad = int(np.argmax(ders)) if ders.size else None
    passed = bool(ders.size == 0 or ders.max() <= threshold)
    return StationarityReport("fidelity", ders, threshold, passed, bad,
                              None if passed or bad is None else probes[bad], {"F": f0})


def stationarity_re(rho, sigma_star, probes, h: float = 1e-6, threshold: float = -1e-7):
    """Check ``d/dx S(rho || (1-x) sigma* + x sigma) >= threshold`` at ``x = 0+``.

    Infinite relative entropy at ``sigma*`` is reported as a failure with
    ``support_violation`` set in the diagnostics.
    """
    rho, star = as_density(rho), as_density(sigma_star)
    s0 = relative_entropy(rho, star)
    if not math.isfinite(s0):
        return StationarityReport("re", np.array([]), threshold, False,
                                  diagnostics={"support_violation": True, "S": s0})
    ders = []
    for pr in probes:
        s = _as_matrix(pr)
        f = lambda x: relative_entropy(rho, DensityMatrix((1 - x) * star.matrix + x * s, star.dims, check=False))
        ders.append(_directional(f, s0, h))
    ders = np.array(ders)
    bad = int(np.argmin(ders)) if ders.size else None
    passed = bool(ders.size == 0 or ders.min() >= threshold)
    return StationarityReport("re", ders, threshold, passed, bad,
                              None if passed or bad is None else probes[bad], {"S": s0})


# -- Lagrange solution for the 2 x 3 two-parameter state ----------------------------------


def _lagrange_objective(p, alpha, beta, gamma):
    """``-(beta log p1 + gamma log p2 + beta log p3 + beta log p4 + alpha log p5 + alpha log p6)``."""
    coef = np.array([beta, gamma, beta, beta, alpha, alpha])
    p = np.asarray(p, dtype=float)
    mask = coef > 0
    return float(-np.sum(coef[mask] * np.log2(p[mask])))


@dataclass
class LagrangeSolution:
    solution1: np.ndarray
    solution2: np.ndarray
    chosen: np.ndarray
    objective1: float
    objective2: float
    chosen_index: int

    def state(self, n: int = 3) -> DensityMatrix:
        """Separable state ``p1 psi+ + p2 psi- + p3 |00> + p4 |11> + p5 |02> + p6 |12>``."""
        return _two_param_from_weights(n, self.chosen, True)


def ppt_weight_condition(p) -> float:
    """``p3 p4 - ((p1 - p2)/2)^2``; nonnegative iff the ansatz is PPT."""
    return float(p[2] * p[3] - ((p[0] - p[1]) / 2) ** 2)


def lagrange_two_param_2x3(alpha: float, gamma: float) -> LagrangeSolution:
    """Both stationary weight groups of the constrained RE problem and the better one.

    Weights are ordered ``(p1..p6)`` for ``|psi+>, |psi->, |00>, |11>, |02>, |12>``.
    The group with the smaller objective (ties to the first) is chosen.
    """
    beta = two_param_beta(3, alpha, gamma)
    w = 3 * beta + gamma
    s1 = np.array([w / 6, w / 2, w / 6, w / 6, alpha, alpha])
    q = w / (2 * (2 * beta + gamma))
    s2 = np.array([w / 2, gamma * q, beta * q, beta * q, alpha, alpha])
    f1 = _lagrange_objective(s1, alpha, beta, gamma)
    f2 = _lagrange_objective(s2, alpha, beta, gamma)
    idx = 0 if f1 <= f2 else 1
    return LagrangeSolution(s1, s2, (s1, s2)[idx], f1, f2, idx)


# -- conjecture checks -------------------------------------------------------------------


@dataclass
class ConjectureReport:
    name: str
    passed: bool
    rows: list
    diagnostics: dict = field(default_factory=dict)


def check_smolin_conjecture(tol: float = 1e-10) -> ConjectureReport:
    """Fidelity of the Smolin state with its conjectured separable state is ``1/sqrt 2``."""
    F = fidelity(smolin(), smolin_conjectured_sep())
    ok_ppt, mineig = ppt_all_cuts(smolin_conjectured_sep())
    row = {"F": F, "expected": 1 / math.sqrt(2), "margin": abs(F - 1 / math.sqrt(2)),
           "rgme": 1 - F * F}
    return ConjectureReport("smolin", row["margin"] <= tol and ok_ppt, [row], {"ppt_min_eig": mineig})


def check_dur_conjecture(N: int, xs=(0.2, 0.5, 0.8), threshold: float = 1e-6) -> ConjectureReport:
    """Direct fidelity of the Dür state with its conjectured separable state.

    The conjecture is refuted at ``x`` when ``|F - sqrt(1 - x/2)| > threshold``;
    ``passed`` means it is refuted at every interior ``x``. ``x = 0`` and
    ``x = 1`` are evaluated but not required to refute.
    """
    rows, ok = [], True
    for x in xs:
        rho, sig = dur(N, x), dur_conjectured_sep(N, x)
        F = fidelity(rho, sig)
        target = math.sqrt(1 - x / 2)
        margin = abs(F - target)
        weights, kets = dur_decomposition(N, x)
        recon = sum(wt * proj(k) for wt, k in zip(weights, kets))
        resid = float(np.max(np.abs(recon - rho.matrix)))
        interior = 0 < x < 1
        refuted = margin > threshold
        if interior and not refuted:
            ok = False
        rows.append({"N": N, "x": x, "F": F, "target": target, "margin": margin,
                     "refuted": refuted, "decomposition_residual": resid})
    return ConjectureReport("dur", ok, rows)
