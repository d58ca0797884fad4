"""Constructors for the analyzed state families and their candidate separable states.

Basis convention: computational basis ``|i j ...>`` with the first tensor
factor slowest (row-major), everywhere in the package.

Every constructor validates its parameters and returns a
:class:`~rgme.linalg.DensityMatrix`. Pass ``check=False`` to skip both the
parameter checks and the density-matrix validation, e.g. to probe the
boundary of a PSD region.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .linalg import MAX_DIM, DensityMatrix, StructureError

_EPS = 1e-12


class DomainError(ValueError):
    """Parameter outside the family's admissible domain."""


def _require(cond, msg, check):
    if check and not cond:
        raise DomainError(msg)


def ket(indices, dims) -> np.ndarray:
    """Computational basis vector ``|i_1 ... i_k>``."""
    dims = tuple(dims)
    v = np.zeros(int(np.prod(dims)), dtype=complex)
    v[np.ravel_multi_index(tuple(indices), dims)] = 1.0
    return v


def proj(v) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    return np.outer(v, v.conj())


def _dm(m, dims, check) -> DensityMatrix:
    return DensityMatrix(m, dims, check=check)


def bell_basis(n: int = 2) -> dict:
    """``phi+``, ``phi-``, ``psi+``, ``psi-`` embedded in a ``2 x n`` space."""
    if n < 2:
        raise DomainError("Bell basis needs n >= 2")
    d = (2, n)
    s = 1 / math.sqrt(2)
    k = lambda i, j: ket((i, j), d)
    return {
        "phi+": s * (k(0, 0) + k(1, 1)),
        "phi-": s * (k(0, 0) - k(1, 1)),
        "psi+": s * (k(0, 1) + k(1, 0)),
        "psi-": s * (k(0, 1) - k(1, 0)),
    }


def maximally_entangled(d: int, parties: int = 2) -> np.ndarray:
    """``(1/sqrt d) sum_i |i i ... i>`` on ``parties`` qudits."""
    dims = (d,) * parties
    v = sum(ket((i,) * parties, dims) for i in range(d))
    return v / math.sqrt(d)


# -- two-qubit examples -----------------------------------------------------


def example1(lam: float, check: bool = True) -> DensityMatrix:
    """``lam |phi+><phi+| + (1 - lam) |01><01|``."""
    _require(0 <= lam <= 1, f"lam={lam} outside [0, 1]", check)
    b = bell_basis(2)
    m = lam * proj(b["phi+"]) + (1 - lam) * proj(ket((0, 1), (2, 2)))
    return _dm(m, (2, 2), check)


def example1_closest_sep(lam: float, check: bool = True) -> DensityMatrix:
    """Relative-entropy closest separable state of :func:`example1`."""
    _require(0 <= lam <= 1, f"lam={lam} outside [0, 1]", check)
    d = (2, 2)
    a = lam / 2 * (1 - lam / 2)
    k00, k01, k10, k11 = (ket(i, d) for i in ((0, 0), (0, 1), (1, 0), (1, 1)))
    m = (a * proj(k00) + a * (np.outer(k00, k11) + np.outer(k11, k00))
         + (1 - lam / 2) ** 2 * proj(k01) + lam ** 2 / 4 * proj(k10) + a * proj(k11))
    return _dm(m, d, check)


def _example2_domain(A, G, check):
    _require(0 <= A <= 1, f"A={A} outside [0, 1]", check)
    _require(0 <= G <= 2 * math.sqrt(max(A * (1 - A), 0.0)) + _EPS,
             f"G={G} violates 0 <= G <= 2 sqrt(A(1-A))", check)


def example2(A: float, G: float, check: bool = True) -> DensityMatrix:
    """``A|01><01| + (1-A)|10><10| + G/2 (|01><10| + |10><01|)``."""
    _example2_domain(A, G, check)
    d = (2, 2)
    k01, k10 = ket((0, 1), d), ket((1, 0), d)
    m = A * proj(k01) + (1 - A) * proj(k10) + G / 2 * (np.outer(k01, k10) + np.outer(k10, k01))
    return _dm(m, d, check)


def example2_closest_sep(A: float, check: bool = True) -> DensityMatrix:
    """Dephased version ``A|01><01| + (1-A)|10><10|`` of :func:`example2`."""
    _require(0 <= A <= 1, f"A={A} outside [0, 1]", check)
    d = (2, 2)
    return _dm(A * proj(ket((0, 1), d)) + (1 - A) * proj(ket((1, 0), d)), d, check)


def pure_alpha_ket(alpha: float) -> np.ndarray:
    d = (2, 2)
    return alpha * ket((0, 0), d) + math.sqrt(max(1 - alpha ** 2, 0.0)) * ket((1, 1), d)


def pure_alpha(alpha: float, check: bool = True) -> DensityMatrix:
    """Projector onto ``alpha|00> + sqrt(1 - alpha^2)|11>``."""
    _require(0 <= alpha <= 1, f"alpha={alpha} outside [0, 1]", check)
    return _dm(proj(pure_alpha_ket(alpha)), (2, 2), check)


def pure_alpha_sep_re(alpha: float, check: bool = True) -> DensityMatrix:
    """Dephased state ``alpha^2|00><00| + (1 - alpha^2)|11><11|`` (RE-closest)."""
    _require(0 <= alpha <= 1, f"alpha={alpha} outside [0, 1]", check)
    d = (2, 2)
    return _dm(alpha ** 2 * proj(ket((0, 0), d)) + (1 - alpha ** 2) * proj(ket((1, 1), d)), d, check)


def pure_alpha_sep_fidelity(alpha: float, check: bool = True) -> DensityMatrix:
    """Published fidelity candidate ``(1 - t)|00><00| + t|11><11|``.

    ``t = sqrt((1 + sqrt(1 - 4 alpha^2 (1 - alpha^2))) / 2)``. Note this is a
    diagonal PPT state but it does not attain the maximal fidelity except at
    ``alpha`` in ``{0, 1/sqrt 2}``; the true optimum is the product state
    returned by :func:`pure_alpha_closest_product`.
    """
    _require(0 <= alpha <= 1, f"alpha={alpha} outside [0, 1]", check)
    t = math.sqrt((1 + math.sqrt(max(1 - 4 * alpha ** 2 * (1 - alpha ** 2), 0.0))) / 2)
    d = (2, 2)
    return _dm((1 - t) * proj(ket((0, 0), d)) + t * proj(ket((1, 1), d)), d, check)


def pure_alpha_closest_product(alpha: float) -> DensityMatrix:
    """Fidelity-optimal separable state: ``|00>`` if ``alpha^2 >= 1/2`` else ``|11>``."""
    d = (2, 2)
    return DensityMatrix(proj(ket((0, 0) if alpha ** 2 >= 0.5 else (1, 1), d)), d)


# -- two-parameter 2 x n family -----------------------------------------------


def two_param_beta(n: int, alpha: float, gamma: float) -> float:
    """``beta`` fixed by unit trace: ``2(n-2) alpha + 3 beta + gamma = 1``."""
    return (1 - 2 * (n - 2) * alpha - gamma) / 3


def _two_param_domain(n, alpha, gamma, check):
    if check:
        if int(n) != n or n < 3:
            raise DomainError(f"n={n} must be an integer >= 3")
        if 2 * n > MAX_DIM:
            raise StructureError(f"dimension {2 * n} exceeds cap {MAX_DIM}")
        if not (0 <= alpha <= 1 / (2 * n - 4) + _EPS):
            raise DomainError(f"alpha={alpha} outside [0, 1/(2n-4)]")
        beta = two_param_beta(n, alpha, gamma)
        if beta < -_EPS or gamma < -_EPS:
            raise DomainError(f"(alpha, gamma)=({alpha}, {gamma}) gives beta={beta:.6g}; state not PSD")
    return two_param_beta(n, alpha, gamma)


def two_param_2xn(n: int, alpha: float, gamma: float, check: bool = True) -> DensityMatrix:
    """U x U invariant two-parameter state on ``2 x n``.

    ``alpha`` weights each ``|i j>`` with ``j >= 2``, ``beta`` each of
    ``|00>, |11>, |psi+>`` and ``gamma`` the singlet ``|psi->``.
    """
    n = int(n)
    beta = _two_param_domain(n, alpha, gamma, check)
    d = (2, n)
    b = bell_basis(n)
    m = beta * (proj(b["psi+"]) + proj(ket((0, 0), d)) + proj(ket((1, 1), d))) + gamma * proj(b["psi-"])
    for i in range(2):
        for j in range(2, n):
            m = m + alpha * proj(ket((i, j), d))
    return _dm(m, d, check)


def _two_param_from_weights(n, p, check):
    """``p1|psi+> + p2|psi-> + p3|00> + p4|11> + alpha-block`` with ``p5`` on ``|i j>, i=0``
    and ``p6`` on ``|i j>, i=1`` (``j >= 2``)."""
    d = (2, n)
    b = bell_basis(n)
    m = (p[0] * proj(b["psi+"]) + p[1] * proj(b["psi-"])
         + p[2] * proj(ket((0, 0), d)) + p[3] * proj(ket((1, 1), d)))
    for j in range(2, n):
        m = m + p[4] * proj(ket((0, j), d)) + p[5] * proj(ket((1, j), d))
    return _dm(m, d, check)


def two_param_closest_sep(n: int, alpha: float, gamma: float, check: bool = True) -> DensityMatrix:
    """Relative-entropy closest separable state of :func:`two_param_2xn`.

    Same alpha block; weight ``(3 beta + gamma)/6`` on ``|phi+>, |phi->, |psi+>``
    and ``(3 beta + gamma)/2`` on ``|psi->``.
    """
    n = int(n)
    beta = _two_param_domain(n, alpha, gamma, check)
    w = 3 * beta + gamma
    return _two_param_from_weights(n, [w / 6, w / 2, w / 6, w / 6, alpha, alpha], check)


# -- maximally entangled mixed states ----------------------------------------------


def _mems_domain(n, lams, check):
    if check:
        if int(n) != n or n < 3:
            # for n = 2 the state |0(n-1)> coincides with |01>, breaking the block structure
            raise DomainError(f"n={n} must be an integer >= 3")
        if 2 * n > MAX_DIM:
            raise StructureError(f"dimension {2 * n} exceeds cap {MAX_DIM}")
        if len(lams) != 4:
            raise DomainError("need exactly four eigenvalues")
        if any(l < 0 for l in lams):
            raise DomainError(f"eigenvalues {lams} must be nonnegative")
        if any(lams[i] < lams[i + 1] for i in range(3)):
            raise DomainError(f"eigenvalues {lams} must be in descending order")
        if abs(sum(lams) - 1) > 1e-12:
            raise DomainError(f"eigenvalues sum to {sum(lams)!r}, expected 1")


def mems(n: int, lams, check: bool = True) -> DensityMatrix:
    """``l4|00><00| + l1|psi-><psi-| + l3|0,n-1><0,n-1| + l2|1,n-1><1,n-1|``."""
    n = int(n)
    lams = [float(l) for l in lams]
    _mems_domain(n, lams, check)
    l1, l2, l3, l4 = lams
    d = (2, n)
    b = bell_basis(n)
    m = (l4 * proj(ket((0, 0), d)) + l1 * proj(b["psi-"])
         + l3 * proj(ket((0, n - 1), d)) + l2 * proj(ket((1, n - 1), d)))
    return _dm(m, d, check)


def mems_closest_sep(n: int, lams, check: bool = True) -> DensityMatrix:
    """Relative-entropy closest separable state of :func:`mems`."""
    n = int(n)
    lams = [float(l) for l in lams]
    _mems_domain(n, lams, check)
    l1, l2, l3, l4 = lams
    d = (2, n)
    s = 4 * (l1 + l4)
    k00, k01, k10, k11 = (ket(i, d) for i in ((0, 0), (0, 1), (1, 0), (1, 1)))
    m = ((l1 + 2 * l4) ** 2 / s * proj(k00) + l1 ** 2 / s * proj(k11)
         + l1 * (l1 + 2 * l4) / s * (proj(k01) + proj(k10) - np.outer(k01, k10) - np.outer(k10, k01))
         + l3 * proj(ket((0, n - 1), d)) + l2 * proj(ket((1, n - 1), d)))
    return _dm(m, d, check)


# -- isotropic states -------------------------------------------------------------


def gen_isotropic(n: int, d: int, alpha: float, check: bool = True) -> DensityMatrix:
    """``(1 - alpha) I/d^n + alpha |psi+><psi+|`` on ``n`` qudits."""
    n, d = int(n), int(d)
    if check:
        if n < 2 or d < 2:
            raise DomainError(f"need n >= 2 and d >= 2, got n={n}, d={d}")
        if d ** n > MAX_DIM:
            raise StructureError(f"dimension {d ** n} exceeds cap {MAX_DIM}")
        if not (-1 / (d ** n - 1) - _EPS <= alpha <= 1 + _EPS):
            raise DomainError(f"alpha={alpha} outside the PSD range [-1/(d^n-1), 1]")
    D = d ** n
    psi = maximally_entangled(d, n)
    m = (1 - alpha) / D * np.eye(D) + alpha * proj(psi)
    return _dm(m, (d,) * n, check)


def isotropic(d: int, alpha: float, check: bool = True) -> DensityMatrix:
    """``alpha |phi+><phi+| + (1 - alpha) I/d^2`` on ``d x d``."""
    return gen_isotropic(2, d, alpha, check)


def isotropic_threshold(d: int, n: int = 2) -> float:
    """Separability threshold ``1/(1 + d^(n-1))``; equals ``1/(d+1)`` for two parties."""
    return 1 / (1 + d ** (n - 1))


def isotropic_closest_sep(d: int, alpha: float | None = None, check: bool = True) -> DensityMatrix:
    """Boundary state at the threshold, or the state itself if already separable."""
    a0 = isotropic_threshold(d)
    return isotropic(d, a0 if alpha is None or alpha > a0 else alpha, check)


def gen_isotropic_closest_sep(n: int, d: int, alpha: float | None = None, check: bool = True) -> DensityMatrix:
    a0 = isotropic_threshold(d, n)
    return gen_isotropic(n, d, a0 if alpha is None or alpha > a0 else alpha, check)


def isotropic_singlet_fraction(d: int, alpha: float) -> float:
    """Overlap ``<phi+|rho|phi+> = (1 + (d^2 - 1) alpha)/d^2``."""
    return (1 + (d * d - 1) * alpha) / (d * d)


# -- bound entangled multi-qubit states ---------------------------------------------


def smolin_kets() -> list:
    d = (2, 2, 2, 2)
    s = 1 / math.sqrt(2)
    pairs = [((0, 0, 0, 0), (1, 1, 1, 1)), ((0, 0, 1, 1), (1, 1, 0, 0)),
             ((0, 1, 0, 1), (1, 0, 1, 0)), ((0, 1, 1, 0), (1, 0, 0, 1))]
    return [s * (ket(a, d) + ket(b, d)) for a, b in pairs]


def smolin() -> DensityMatrix:
    """Four-qubit unlockable bound entangled state, ``(1/4) sum_i |X_i><X_i|``."""
    return DensityMatrix(sum(proj(x) for x in smolin_kets()) / 4, (2, 2, 2, 2))


def smolin_conjectured_sep() -> DensityMatrix:
    """Uniform mixture of the eight computational states supporting the ``|X_i>``."""
    d = (2, 2, 2, 2)
    basis = [(0, 0, 0, 0), (1, 1, 1, 1), (0, 0, 1, 1), (1, 1, 0, 0),
             (0, 1, 0, 1), (1, 0, 1, 0), (0, 1, 1, 0), (1, 0, 0, 1)]
    return DensityMatrix(sum(proj(ket(b, d)) for b in basis) / 8, d)


def _flip_kets(N):
    d = (2,) * N
    u = [ket(tuple(1 if j == k else 0 for j in range(N)), d) for k in range(N)]
    v = [ket(tuple(0 if j == k else 1 for j in range(N)), d) for k in range(N)]
    return u, v


def _dur_domain(N, x, check):
    if check:
        if int(N) != N or N < 4:
            raise DomainError(f"N={N} must be an integer >= 4")
        if 2 ** N > MAX_DIM:
            raise StructureError(f"dimension {2 ** N} exceeds cap {MAX_DIM}")
        if not 0 <= x <= 1:
            raise DomainError(f"x={x} outside [0, 1]")


def ghz(N: int) -> np.ndarray:
    d = (2,) * N
    return (ket((0,) * N, d) + ket((1,) * N, d)) / math.sqrt(2)


def dur(N: int, x: float, check: bool = True) -> DensityMatrix:
    """``x |GHZ><GHZ| + (1 - x)/(2N) sum_k (P_k + Pbar_k)`` on ``N`` qubits.

    ``P_k`` projects onto the state with a single 1 at site ``k``, ``Pbar_k``
    onto its bit-flip.
    """
    N = int(N)
    _dur_domain(N, x, check)
    u, v = _flip_kets(N)
    m = x * proj(ghz(N)) + (1 - x) / (2 * N) * sum(proj(a) + proj(b) for a, b in zip(u, v))
    return _dm(m, (2,) * N, check)


def dur_conjectured_sep(N: int, x: float, check: bool = True) -> DensityMatrix:
    """Dephased candidate: GHZ weight split as ``x/2`` onto ``|0..0>`` and ``|1..1>``."""
    N = int(N)
    _dur_domain(N, x, check)
    d = (2,) * N
    u, v = _flip_kets(N)
    m = (x / 2 * (proj(ket((0,) * N, d)) + proj(ket((1,) * N, d)))
         + (1 - x) / (2 * N) * sum(proj(a) + proj(b) for a, b in zip(u, v)))
    return _dm(m, d, check)


def dur_optimal_sep(N: int, x: float, check: bool = True) -> DensityMatrix:
    """Diagonal separable state attaining fidelity ``sqrt(1 - x/2)`` with :func:`dur`.

    Weight ``a/2`` on each of ``|0..0>, |1..1>`` and ``(1 - a)/(2N)`` on each flip
    state, with ``a = (x/2)/(1 - x/2)``; obtained by maximizing
    ``sqrt(x a / 2) + sqrt((1 - x)(1 - a))`` over ``a``.
    """
    N = int(N)
    _dur_domain(N, x, check)
    d = (2,) * N
    a = (x / 2) / (1 - x / 2)
    u, v = _flip_kets(N)
    m = (a / 2 * (proj(ket((0,) * N, d)) + proj(ket((1,) * N, d)))
         + (1 - a) / (2 * N) * sum(proj(p) + proj(q) for p, q in zip(u, v)))
    return _dm(m, d, check)


def dur_decomposition(N: int, x: float):
    """Spectral decomposition ``(weights, kets)`` of :func:`dur`: GHZ first, then ``u_k``, ``v_k``."""
    N = int(N)
    _dur_domain(N, x, True)
    u, v = _flip_kets(N)
    kets = [ghz(N)] + u + v
    weights = np.array([x] + [(1 - x) / (2 * N)] * (2 * N))
    return weights, kets


# -- tagged family records ---------------------------------------------------------


class FamilyTag(enum.Enum):
    Example1 = "example1"
    Example2 = "example2"
    PureAlpha = "pure_alpha"
    TwoParam2xN = "two_param"
    MEMS = "mems"
    Isotropic = "isotropic"
    GenIsotropic = "gen_isotropic"
    Smolin = "smolin"
    Dur = "dur"

    @classmethod
    def parse(cls, name) -> "FamilyTag":
        if isinstance(name, cls):
            return name
        key = str(name).strip().lower()
        for tag in cls:
            if key in (tag.value, tag.name.lower()):
                return tag
        raise DomainError(f"unknown family {name!r}; choose from {[t.value for t in cls]}")


# parameter names per tag, in canonical order; integers marked with int
FAMILY_PARAMS = {
    FamilyTag.Example1: {"lam": float},
    FamilyTag.Example2: {"A": float, "G": float},
    FamilyTag.PureAlpha: {"alpha": float},
    FamilyTag.TwoParam2xN: {"n": int, "alpha": float, "gamma": float},
    FamilyTag.MEMS: {"n": int, "l1": float, "l2": float, "l3": float, "l4": float},
    FamilyTag.Isotropic: {"d": int, "alpha": float},
    FamilyTag.GenIsotropic: {"n": int, "d": int, "alpha": float},
    FamilyTag.Smolin: {},
    FamilyTag.Dur: {"N": int, "x": float},
}


def _coerce(kind, key, value):
    if kind is int:
        f = float(value)
        if f != int(f):
            raise DomainError(f"parameter {key}={value!r} must be an integer")
        return int(f)
    return float(value)


@dataclass(frozen=True)
class StateFamily:
    """A family tag with its named parameters, e.g. ``StateFamily.make("dur", N=4, x=0.5)``."""

    tag: FamilyTag
    params: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        tag = FamilyTag.parse(self.tag)
        spec = FAMILY_PARAMS[tag]
        given = dict(self.params)
        unknown = set(given) - set(spec)
        missing = set(spec) - set(given)
        if unknown or missing:
            raise DomainError(f"{tag.value}: expected parameters {list(spec)}, "
                              f"missing {sorted(missing)}, unknown {sorted(unknown)}")
        clean = {k: _coerce(spec[k], k, given[k]) for k in spec}
        object.__setattr__(self, "tag", tag)
        object.__setattr__(self, "params", clean)

    @classmethod
    def make(cls, tag, **params) -> "StateFamily":
        return cls(FamilyTag.parse(tag), params)

    def __getitem__(self, key):
        return self.params[key]

    def state(self, check: bool = True) -> DensityMatrix:
        p, t = self.params, self.tag
        if t is FamilyTag.Example1:
            return example1(p["lam"], check)
        if t is FamilyTag.Example2:
            return example2(p["A"], p["G"], check)
        if t is FamilyTag.PureAlpha:
            return pure_alpha(p["alpha"], check)
        if t is FamilyTag.TwoParam2xN:
            return two_param_2xn(p["n"], p["alpha"], p["gamma"], check)
        if t is FamilyTag.MEMS:
            return mems(p["n"], self.lams, check)
        if t is FamilyTag.Isotropic:
            return isotropic(p["d"], p["alpha"], check)
        if t is FamilyTag.GenIsotropic:
            return gen_isotropic(p["n"], p["d"], p["alpha"], check)
        if t is FamilyTag.Smolin:
            return smolin()
        return dur(p["N"], p["x"], check)

    @property
    def lams(self) -> list:
        return [self.params[k] for k in ("l1", "l2", "l3", "l4")]

    def re_closest_sep(self) -> DensityMatrix | None:
        """Published relative-entropy closest separable state, where one exists."""
        p, t = self.params, self.tag
        if t is FamilyTag.Example1:
            return example1_closest_sep(p["lam"])
        if t is FamilyTag.Example2:
            return example2_closest_sep(p["A"])
        if t is FamilyTag.PureAlpha:
            return pure_alpha_sep_re(p["alpha"])
        if t is FamilyTag.TwoParam2xN:
            return two_param_closest_sep(p["n"], p["alpha"], p["gamma"])
        if t is FamilyTag.MEMS:
            return mems_closest_sep(p["n"], self.lams)
        if t is FamilyTag.Isotropic:
            return isotropic_closest_sep(p["d"], p["alpha"])
        if t is FamilyTag.GenIsotropic:
            return gen_isotropic_closest_sep(p["n"], p["d"], p["alpha"])
        if t is FamilyTag.Smolin:
            return smolin_conjectured_sep()
        return None

    def to_json(self) -> dict:
        return {"family": self.tag.value, "params": dict(self.params)}


def load_state(data: Mapping) -> tuple[DensityMatrix, StateFamily | None]:
    """Parse either state-file schema.

    ``{"dims": [...], "entries": [[re, im], ...]}`` gives an explicit
    row-major matrix; ``{"family": tag, "params": {...}}`` names a family.
    """
    if "family" in data:
        fam = StateFamily(FamilyTag.parse(data["family"]), dict(data.get("params", {})))
        return fam.state(), fam
    if "dims" in data and "entries" in data:
        return DensityMatrix.from_json(data), None
    raise StructureError("state JSON needs either 'family' or 'dims' + 'entries'")
