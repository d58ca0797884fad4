"""Executable checks of the inequality chains, equalities and conjectures.

Every check produces :class:`ClaimResult` records. A claim passes iff its
``margin >= -tolerance``; for ``lhs <= rhs`` claims the margin is
``rhs - lhs``, for equalities it is ``-|lhs - rhs|``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy.stats import qmc

from .linalg import DensityMatrix, PureState, as_density, partial_trace
from .measures import (
    bures_sq, fidelity, gme_isotropic, gme_pure, negativity, re_closed,
    relative_entropy, rgme_closed, trace_distance, von_neumann_entropy,
)
from .separable import (
    SearchConfig, check_dur_conjecture, check_smolin_conjecture, lagrange_two_param_2x3,
    ppt_weight_condition, random_product_probes, rgme_numeric, stationarity_fidelity,
    stationarity_re,
)
from .states import FamilyTag, StateFamily, mems, mems_closest_sep, two_param_closest_sep


@dataclass
class ClaimResult:
    claim_id: str
    instance: str
    lhs: float
    rhs: float
    margin: float
    passed: bool
    tolerance: float
    skipped: str | None = None

    def to_dict(self) -> dict:
        return asdict(self)


def leq(claim_id, instance, lhs, rhs, tol) -> ClaimResult:
    """Record ``lhs <= rhs`` up to ``tol``."""
    lhs, rhs = float(lhs), float(rhs)
    margin = rhs - lhs
    return ClaimResult(claim_id, instance, lhs, rhs, margin, bool(margin >= -tol), tol)


def equal(claim_id, instance, lhs, rhs, tol) -> ClaimResult:
    lhs, rhs = float(lhs), float(rhs)
    margin = -abs(lhs - rhs)
    return ClaimResult(claim_id, instance, lhs, rhs, margin, bool(margin >= -tol), tol)


def skipped(claim_id, instance, reason) -> ClaimResult:
    return ClaimResult(claim_id, instance, math.nan, math.nan, math.nan, True, 0.0, reason)


def _instance(family: StateFamily) -> str:
    args = ",".join(f"{k}={v:.6g}" if isinstance(v, float) else f"{k}={v}" for k, v in family.params.items())
    return f"{family.tag.value}({args})"


# -- random instances -----------------------------------------------------------------


PURE_DIMS = ((2, 2), (2, 3), (3, 3))


def random_pure_state(rng, dims) -> PureState:
    D = int(np.prod(dims))
    v = rng.normal(size=D) + 1j * rng.normal(size=D)
    return PureState(v / np.linalg.norm(v), dims)


def random_density(rng, D, rank=None) -> DensityMatrix:
    """Ginibre-distributed mixed state of the given rank (default full)."""
    rank = rank or D
    g = rng.normal(size=(D, rank)) + 1j * rng.normal(size=(D, rank))
    m = g @ g.conj().T
    return DensityMatrix(m / np.trace(m).real, (D,))


def random_pure_instances(count: int = 500, seed: int = 0):
    """``count`` random bipartite pure states cycling through ``PURE_DIMS``."""
    rng = np.random.default_rng(seed)
    return [random_pure_state(rng, PURE_DIMS[i % len(PURE_DIMS)]) for i in range(count)]


# -- bounds on pure states -------------------------------------------------------------------------


@dataclass
class PureWitness:
    """Numeric optimum for a pure state: ``F_max = Lambda_max`` and the product state."""

    psi: PureState
    rho: DensityMatrix
    sigma: DensityMatrix
    F: float

    @property
    def rgme(self) -> float:
        return 1 - self.F ** 2


def pure_witness(psi: PureState, seed: int = 0) -> PureWitness:
    # for pure rho, F^2(rho, sigma) = <psi|sigma|psi> is linear in sigma, so the
    # separable maximum sits at a product state and equals Lambda_max
    rep = gme_pure(psi, seed=seed)
    sigma = rep.witness.density()
    return PureWitness(psi, psi.density(), sigma, rep.diagnostics["lambda_max"])


def fidelity_gap_bound(rho, sigma, F_max: float, tol: float = 1e-6, instance: str = "") -> ClaimResult:
    """``1 - F(rho, sigma) <= sqrt(1 - F_max^2)``."""
    return leq("fidelity_gap", instance, 1 - fidelity(rho, sigma), math.sqrt(max(1 - F_max ** 2, 0.0)), tol)


def entropy_bounds(w: PureWitness, tol: float = 1e-6, instance: str = "") -> list:
    """``RGME <= S_A`` and ``RGME <= S_A - S_A^2/4`` for a bipartite pure state."""
    dims = w.psi.dims
    rho_a = DensityMatrix(partial_trace(w.rho.matrix, dims, [0]), (dims[0],), check=False)
    s = von_neumann_entropy(rho_a)
    return [leq("entropy_bound.linear", instance, w.rgme, s, tol),
            leq("entropy_bound.quadratic", instance, w.rgme, s - s * s / 4, tol)]


def trace_distance_bound(w: PureWitness, tol: float = 1e-6, instance: str = "") -> ClaimResult:
    """``RGME(psi) <= D(psi, sigma)`` with ``sigma`` the numeric witness."""
    return leq("trace_distance_bound", instance, w.rgme, trace_distance(w.rho, w.sigma), tol)


def entropy_distance_bound(rho, sigma, tol: float = 1e-6, instance: str = "") -> ClaimResult:
    """``S(rho) <= 2 D(rho, sigma) + 1/e`` for pure ``sigma`` and dimension ``>= 4``."""
    rho, sigma = as_density(rho), as_density(sigma)
    if rho.dim < 4:
        return skipped("entropy_vs_distance", instance, f"dimension {rho.dim} < 4")
    if np.sum(np.linalg.eigvalsh(sigma.matrix) > 1e-10) != 1:
        return skipped("entropy_vs_distance", instance, "sigma is not rank one")
    return leq("entropy_vs_distance", instance, von_neumann_entropy(rho), 2 * trace_distance(rho, sigma) + 1 / math.e, tol)


def distance_chain(w: PureWitness, tol: float = 1e-6, instance: str = "") -> list:
    """``(1-F)^2 <= 1-F <= RGME <= 1-F^2 <= D <= sqrt(1-F^2) <= sqrt(D)`` on one instance."""
    F = w.F
    D = trace_distance(w.rho, w.sigma)
    terms = [("(1-F)^2", (1 - F) ** 2), ("1-F", 1 - F), ("rgme", w.rgme), ("1-F^2", 1 - F * F),
             ("D", D), ("sqrt(1-F^2)", math.sqrt(max(1 - F * F, 0.0))), ("sqrt(D)", math.sqrt(D))]
    return [leq(f"distance_chain.{a}<={b}", instance, x, y, tol)
            for (a, x), (b, y) in zip(terms[:-1], terms[1:])]


def props_suite(count: int = 500, seed: int = 0, tol: float = 1e-6) -> list:
    """Pure-state bounds and the distance chain on random pure states, plus the
    entropy-vs-trace-distance bound on random mixed/pure pairs."""
    out = []
    for i, psi in enumerate(random_pure_instances(count, seed)):
        w = pure_witness(psi, seed)
        tag = f"pure#{i}{psi.dims}"
        out.append(fidelity_gap_bound(w.rho, w.sigma, w.F, tol, tag))
        out.extend(entropy_bounds(w, tol, tag))
        out.append(trace_distance_bound(w, tol, tag))
        out.extend(distance_chain(w, tol, tag))
    out.extend(entropy_distance_suite(count, seed, tol=tol))
    return out


def entropy_distance_suite(count: int = 500, seed: int = 0, dims=(4, 8, 16), tol: float = 1e-6) -> list:
    rng = np.random.default_rng([seed, 4])
    out = []
    for i in range(count):
        D = dims[i % len(dims)]
        rho = random_density(rng, D)
        sigma = random_pure_state(rng, (D,)).density()
        out.append(entropy_distance_bound(rho, sigma, tol, f"pair#{i}(D={D})"))
    return out


# -- family grids ---------------------------------------------------------------------------


def simplex_samples(count: int = 64, seed: int = 0) -> np.ndarray:
    """Descending points on the 4-simplex from a scrambled Sobol sequence."""
    u = qmc.Sobol(d=3, scramble=True, seed=seed).random(count)
    cuts = np.sort(u, axis=1)
    pts = np.diff(np.hstack([np.zeros((count, 1)), cuts, np.ones((count, 1))]), axis=1)
    pts = -np.sort(-pts, axis=1)
    # exact unit sum after sorting
    pts[:, -1] = 1 - pts[:, :-1].sum(axis=1)
    return pts


def mems_family(n, lams) -> StateFamily:
    return StateFamily.make("mems", n=n, l1=lams[0], l2=lams[1], l3=lams[2], l4=lams[3])


def two_param_grid(n: int = 3, alphas=None, count: int = 5) -> list:
    """``(alpha, gamma)`` points with ``gamma`` spanning ``[1/2, 1 - 2(n-2) alpha]``."""
    amax = 1 / (4 * (n - 2))
    alphas = np.linspace(0, amax * 0.8, count) if alphas is None else alphas
    pts = []
    for a in alphas:
        for g in np.linspace(0.5, 1 - 2 * (n - 2) * a, count):
            pts.append(StateFamily.make("two_param", n=n, alpha=float(a), gamma=float(g)))
    return pts


def default_grids(points: int = 21, seed: int = 0) -> dict:
    """Parameter grids over each family's entangled range."""
    lin = np.linspace(0, 1, points)
    return {
        "example1": [StateFamily.make("example1", lam=float(l)) for l in lin],
        "pure_alpha": [StateFamily.make("pure_alpha", alpha=float(a)) for a in lin],
        "two_param": two_param_grid(3, np.linspace(0, 0.25, points), points),
        "mems": [mems_family(3, l) for l in simplex_samples(64, seed)],
        "isotropic": [StateFamily.make("isotropic", d=d, alpha=float(a)) for d in (2, 3, 4) for a in lin],
        "smolin": [StateFamily.make("smolin")],
    }


def family_orderings(families, tol: float = 1e-6) -> list:
    """``RGME <= RE`` on every instance; additionally ``RE <= negativity`` for the two-parameter family."""
    out = []
    for fam in families:
        inst = _instance(fam)
        rg = rgme_closed(fam).value
        re = re_closed(fam)
        out.append(leq(f"ordering.rgme<=re.{fam.tag.value}", inst, rg, re, tol))
        if fam.tag is FamilyTag.TwoParam2xN:
            out.append(leq("ordering.re<=negativity.two_param", inst, re, negativity(fam.state()), tol))
    return out


def orderings_suite(points: int = 21, seed: int = 0, tol: float = 1e-6) -> list:
    out = []
    for fams in default_grids(points, seed).values():
        out.extend(family_orderings(fams, tol))
    return out


# -- equalities ------------------------------------------------------------------------------


def isotropic_gme_equality(ds=(2, 3, 4), points: int = 21, tol: float = 1e-12) -> list:
    """Closed-form RGME equals the pure-state-style GME formula for isotropic states."""
    out = []
    for d in ds:
        for a in np.linspace(0, 1, points):
            fam = StateFamily.make("isotropic", d=d, alpha=float(a))
            out.append(equal("isotropic.gme==rgme", _instance(fam), gme_isotropic(d, float(a)),
                             rgme_closed(fam).value, tol))
    return out


def mems_n_independence(samples=None, tol: float = 1e-12, seed: int = 0) -> list:
    """Fidelity with the candidate separable state is the same for ``n = 3`` and ``n = 4``."""
    samples = simplex_samples(64, seed) if samples is None else samples
    out = []
    for lams in samples:
        v3 = bures_sq(mems(3, lams), mems_closest_sep(3, lams))
        v4 = bures_sq(mems(4, lams), mems_closest_sep(4, lams))
        fam = mems_family(3, lams)
        inst = _instance(fam)
        out.append(equal("mems.n3==n4", inst, v3, v4, tol))
        out.append(equal("mems.closed==n3", inst, rgme_closed(fam).value, v3, tol))
    return out


def mems_re_consistency(samples=None, tol: float = 1e-10, seed: int = 0) -> list:
    samples = simplex_samples(64, seed) if samples is None else samples
    out = []
    for lams in samples:
        fam = mems_family(3, lams)
        out.append(equal("mems.re_closed==re", _instance(fam), re_closed(fam),
                         relative_entropy(fam.state(), mems_closest_sep(3, lams)), tol))
    return out


def mems_negativity(samples=None, tol: float = 1e-10, seed: int = 0) -> list:
    """Closed-form negativity ``max(0, sqrt((l1-l3)^2 + (l2-l4)^2) - l2 - l4)`` vs the trace norm."""
    samples = simplex_samples(64, seed) if samples is None else samples
    out = []
    for lams in samples:
        l1, l2, l3, l4 = lams
        closed = max(0.0, math.hypot(l1 - l3, l2 - l4) - l2 - l4)
        fam = mems_family(3, lams)
        out.append(equal("mems.negativity", _instance(fam), closed, negativity(fam.state()), tol))
    return out


def lagrange_selection(grid=None, tol: float = 1e-14) -> list:
    """The chosen Lagrange group reproduces the closest state, beats the other, and is PPT."""
    grid = two_param_grid(3) if grid is None else grid
    out = []
    for fam in grid:
        a, g = fam["alpha"], fam["gamma"]
        sol = lagrange_two_param_2x3(a, g)
        inst = _instance(fam)
        dev = np.max(np.abs(sol.state(3).matrix - two_param_closest_sep(3, a, g).matrix))
        out.append(leq("lagrange.reproduces_state", inst, dev, 0.0, tol))
        out.append(leq("lagrange.selects_minimum", inst, sol.objective1, sol.objective2, 1e-12))
        out.append(leq("lagrange.ppt", inst, 0.0, ppt_weight_condition(sol.chosen), 1e-12))
        out.append(equal("lagrange.normalized", inst, sol.chosen.sum(), 1.0, 1e-14))
    return out


def equalities_suite(seed: int = 0) -> list:
    return (isotropic_gme_equality() + mems_n_independence(seed=seed)
            + mems_re_consistency(seed=seed) + mems_negativity(seed=seed) + lagrange_selection())


# -- conjectures --------------------------------------------------------------------------


def smolin_conjecture_claims() -> list:
    rep = check_smolin_conjecture()
    row = rep.rows[0]
    return [equal("conjecture.smolin", "smolin", row["F"], row["expected"], 1e-10)]


def dur_conjecture_claims(Ns=(4, 5), xs=(0.2, 0.5, 0.8), threshold: float = 1e-6) -> list:
    """Refutation margin ``|F - sqrt(1 - x/2)| - threshold`` must be positive."""
    out = []
    for N in Ns:
        for row in check_dur_conjecture(N, xs, threshold).rows:
            m = row["margin"] - threshold
            out.append(ClaimResult("conjecture.dur_invalid", f"dur(N={N},x={row['x']:.6g})",
                                   row["F"], row["target"], m, bool(m > 0), 0.0))
    return out


# -- closed form vs numeric optimum ---------------------------------------------------------


def closed_vs_numeric(families, cfg: SearchConfig | None = None, tol: float = 1e-5) -> list:
    """``|rgme_closed - rgme_numeric| <= tol``; non-convergence is noted in ``skipped``."""
    out = []
    for fam in families:
        closed = rgme_closed(fam).value
        rep = rgme_numeric(fam.state(), cfg)
        res = equal(f"closed_vs_numeric.{fam.tag.value}", _instance(fam), closed, rep.value, tol)
        if not rep.diagnostics["converged"]:
            res.skipped = "optimizer hit max_iters (best-effort value)"
            res.passed = True
        out.append(res)
    return out


def closed_vs_numeric_families(seed: int = 0) -> list:
    lin = np.linspace(0, 1, 5)
    fams = two_param_grid(3)
    fams += [mems_family(3, l) for l in simplex_samples(16, seed)]
    fams += [StateFamily.make("gen_isotropic", n=3, d=2, alpha=float(a)) for a in lin]
    fams += [StateFamily.make("isotropic", d=d, alpha=float(a)) for d in (2, 3) for a in lin]
    fams += [StateFamily.make("example1", lam=float(l)) for l in lin]
    fams += [StateFamily.make("pure_alpha", alpha=float(a)) for a in lin]
    fams += [StateFamily.make("smolin")]
    fams += [StateFamily.make("dur", N=4, x=x) for x in (0.2, 0.5, 0.8)]
    return fams


# -- stationarity -----------------------------------------------------------------------------


def stationarity_claims(families, sigma_of, probes: int = 200, seed: int = 0) -> list:
    """Fidelity and relative-entropy stationarity of ``sigma_of(fam)`` against random product probes."""
    out = []
    for i, fam in enumerate(families):
        rho, star = fam.state(), sigma_of(fam)
        pr = random_product_probes(rho.dims, probes, seed + i)
        inst = _instance(fam)
        sf = stationarity_fidelity(rho, star, pr)
        out.append(leq(f"stationarity.fidelity.{fam.tag.value}", inst, sf.worst, sf.threshold, 0.0))
        sr = stationarity_re(rho, star, pr)
        out.append(leq(f"stationarity.re.{fam.tag.value}", inst, sr.threshold, sr.worst, 0.0))
    return out


def stationarity_suite(seed: int = 0, probes: int = 200) -> list:
    tp = two_param_grid(3)
    out = stationarity_claims(tp, lambda f: two_param_closest_sep(3, f["alpha"], f["gamma"]), probes, seed)
    mm = [mems_family(3, l) for l in simplex_samples(16, seed)]
    out += stationarity_claims(mm, lambda f: mems_closest_sep(3, f.lams), probes, seed)
    return out


# -- LU invariance and monotonicity ------------------------------------------------------------


def _haar_unitary(rng, d):
    z = (rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def _local_channel(rng, dims, kraus_count=2):
    """Random CPTP map acting on the first factor (Stinespring isometry slices)."""
    d0 = dims[0]
    iso = _haar_unitary(rng, d0 * kraus_count)[:, :d0]
    ks = [iso[k * d0:(k + 1) * d0] for k in range(kraus_count)]
    rest = int(np.prod(dims[1:]))
    return [np.kron(k, np.eye(rest)) for k in ks]


def properties_suite(count: int = 50, seed: int = 0, tol: float = 1e-8) -> list:
    """Local-unitary invariance and local-channel monotonicity of the fidelity."""
    rng = np.random.default_rng([seed, 7])
    out = []
    for i in range(count):
        dims = PURE_DIMS[i % len(PURE_DIMS)]
        D = int(np.prod(dims))
        rho = DensityMatrix(random_density(rng, D).matrix, dims)
        sigma = DensityMatrix(random_density(rng, D).matrix, dims)
        U = np.kron(_haar_unitary(rng, dims[0]), _haar_unitary(rng, dims[1]))
        f0 = fidelity(rho, sigma)
        f1 = fidelity(DensityMatrix(U @ rho.matrix @ U.conj().T, dims, check=False),
                      DensityMatrix(U @ sigma.matrix @ U.conj().T, dims, check=False))
        out.append(equal("fidelity.lu_invariance", f"pair#{i}{dims}", f0, f1, 1e-9))
        ks = _local_channel(rng, dims)
        apply = lambda m: DensityMatrix(sum(k @ m @ k.conj().T for k in ks), dims, check=False)
        out.append(leq("fidelity.monotone", f"pair#{i}{dims}", f0,
                       fidelity(apply(rho.matrix), apply(sigma.matrix)), tol))
    return out


# -- suite registry ------------------------------------------------------------------------------


SUITES = {
    "props": lambda seed, cfg: props_suite(seed=seed),
    "orderings": lambda seed, cfg: orderings_suite(seed=seed),
    "equalities": lambda seed, cfg: equalities_suite(seed),
    "smolin-conjecture": lambda seed, cfg: smolin_conjecture_claims(),
    "dur-conjecture": lambda seed, cfg: dur_conjecture_claims(),
    "closed-vs-numeric": lambda seed, cfg: closed_vs_numeric(closed_vs_numeric_families(seed), cfg),
    "stationarity": lambda seed, cfg: stationarity_suite(seed),
    "properties": lambda seed, cfg: properties_suite(seed=seed),
}

DEFAULT_VERIFY_SEARCH = SearchConfig(starts=8, max_iters=2000)


def run_suites(names=("all",), seed: int = 0, cfg: SearchConfig | None = None) -> list:
    """Run the selected suites and return results sorted by claim id (stable within a claim)."""
    names = list(SUITES) if "all" in names else list(names)
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise KeyError(f"unknown suites {unknown}; choose from {list(SUITES)}")
    cfg = cfg or DEFAULT_VERIFY_SEARCH
    results = []
    for n in names:
        results.extend(SUITES[n](seed, cfg))
    return sorted(results, key=lambda r: r.claim_id)


def summary_table(results) -> str:
    """One line per claim id: passed/total, worst margin, and skip count."""
    by = {}
    for r in results:
        by.setdefault(r.claim_id, []).append(r)
    width = max([len(k) for k in by] + [5])
    lines = [f"{'claim':<{width}}  {'pass':>9}  {'worst margin':>13}  skipped"]
    for cid, rs in by.items():
        ok = sum(r.passed for r in rs)
        margins = [r.margin for r in rs if not math.isnan(r.margin)]
        worst = min(margins) if margins else math.nan
        nskip = sum(r.skipped is not None for r in rs)
        lines.append(f"{cid:<{width}}  {ok:>4}/{len(rs):<4}  {worst:>13.4g}  {nskip}")
    return "\n".join(lines)
