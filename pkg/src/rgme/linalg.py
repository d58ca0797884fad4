"""Dense Hermitian kernel: eigendecomposition, matrix functions, tensor ops.

Everything here works on plain ``numpy`` arrays. :class:`DensityMatrix` and
:class:`PureState` are thin validated wrappers that carry the subsystem
dimensions alongside the matrix/vector.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

HERMITIAN_TOL = 1e-10
PSD_TOL = 1e-10
LOG_CUTOFF = 1e-14
MAX_DIM = 256


class StructureError(ValueError):
    """Matrix has the wrong shape or symmetry for the requested operation."""


class NotPSDError(ValueError):
    """Matrix has an eigenvalue below the PSD tolerance."""


def _as_square(m) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise StructureError(f"expected a square matrix, got shape {m.shape}")
    return m


def _check_hermitian(m: np.ndarray, tol: float = HERMITIAN_TOL) -> None:
    dev = np.max(np.abs(m - m.conj().T)) if m.size else 0.0
    if dev > tol:
        raise StructureError(f"matrix is not Hermitian (max deviation {dev:.3g})")


def eig_hermitian(m) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and unitary eigenvector matrix of a Hermitian matrix."""
    m = _as_square(m)
    _check_hermitian(m)
    # symmetrize so eigh sees exactly Hermitian input
    return np.linalg.eigh(0.5 * (m + m.conj().T))


def _psd_spectrum(m, tol: float = PSD_TOL) -> tuple[np.ndarray, np.ndarray]:
    w, v = eig_hermitian(m)
    if w.size and w[0] < -tol:
        raise NotPSDError(f"minimum eigenvalue {w[0]:.3g} below -{tol:g}")
    # float noise on a rank-deficient input shows up as eigenvalues of order
    # eps * ||m||; rooting those would inject O(sqrt(eps)) error
    floor = w.size * np.finfo(float).eps * max(w[-1], 0.0) if w.size else 0.0
    w = np.where(w > floor, w, 0.0)
    return w, v


def mat_sqrt_psd(m, tol: float = PSD_TOL) -> np.ndarray:
    """Principal square root of a positive semidefinite matrix.

    Eigenvalues in ``[-tol, 0)`` are clamped to zero; anything more negative
    raises :class:`NotPSDError`.
    """
    w, v = _psd_spectrum(m, tol)
    return (v * np.sqrt(w)) @ v.conj().T


def mat_log2_on_support(m, cutoff: float = LOG_CUTOFF) -> np.ndarray:
    """Base-2 logarithm of ``m`` restricted to eigenvalues above ``cutoff``.

    The kernel contributes zero, which is the ``0 log 0 = 0`` convention used
    by the relative entropy.
    """
    w, v = eig_hermitian(m)
    logs = np.zeros_like(w)
    mask = w > cutoff
    logs[mask] = np.log2(w[mask])
    return (v * logs) @ v.conj().T


def kron(a, b) -> np.ndarray:
    return np.kron(np.asarray(a), np.asarray(b))


def kron_all(mats: Iterable) -> np.ndarray:
    out = np.ones((1, 1), dtype=complex)
    for m in mats:
        out = np.kron(out, m)
    return out


def trace_norm(m) -> float:
    """Sum of absolute eigenvalues of a Hermitian matrix."""
    w, _ = eig_hermitian(m)
    return float(np.sum(np.abs(w)))


def _normalize_dims(dims: Sequence[int], size: int) -> tuple[int, ...]:
    dims = tuple(int(d) for d in dims)
    if not dims or any(d < 1 for d in dims):
        raise StructureError(f"invalid subsystem dimensions {dims}")
    if int(np.prod(dims)) != size:
        raise StructureError(f"dims {dims} do not multiply to {size}")
    return dims


def partial_transpose(m, dims: Sequence[int], subsystems) -> np.ndarray:
    """Transpose the tensor factors listed in ``subsystems`` (an index or iterable)."""
    m = _as_square(m)
    dims = _normalize_dims(dims, m.shape[0])
    k = len(dims)
    subs = {subsystems} if np.isscalar(subsystems) else set(subsystems)
    for s in subs:
        if not 0 <= s < k:
            raise IndexError(f"subsystem {s} out of range for {k} factors")
    t = m.reshape(dims + dims)
    perm = list(range(2 * k))
    for s in subs:
        perm[s], perm[k + s] = k + s, s
    return t.transpose(perm).reshape(m.shape)


def partial_trace(m, dims: Sequence[int], keep) -> np.ndarray:
    """Reduced matrix on the subsystems in ``keep`` (kept in ascending order)."""
    m = _as_square(m)
    dims = _normalize_dims(dims, m.shape[0])
    k = len(dims)
    keep = sorted({keep} if np.isscalar(keep) else set(keep))
    if not keep:
        raise StructureError("keep set must be nonempty")
    for s in keep:
        if not 0 <= s < k:
            raise IndexError(f"subsystem {s} out of range for {k} factors")
    letters = "abcdefghijklmnopqrstuvwxyz"
    row = list(letters[:k])
    col = [c.upper() for c in row]
    for s in range(k):
        if s not in keep:
            col[s] = row[s]
    out = "".join(row[s] for s in keep) + "".join(col[s] for s in keep)
    sub = np.einsum("".join(row) + "".join(col) + "->" + out, m.reshape(dims + dims))
    d = int(np.prod([dims[s] for s in keep]))
    return sub.reshape(d, d)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, unit-trace, PSD matrix with its subsystem dimensions.

    Construction validates the state; pass ``check=False`` to skip validation
    for deliberately invalid matrices (only symmetry of shape is enforced).
    """

    matrix: np.ndarray
    dims: tuple[int, ...]
    psd_tolerance: float = PSD_TOL

    def __init__(self, matrix, dims=None, psd_tolerance: float = PSD_TOL, check: bool = True):
        m = _as_square(matrix).copy()
        dims = (m.shape[0],) if dims is None else _normalize_dims(dims, m.shape[0])
        if m.shape[0] > MAX_DIM:
            raise StructureError(f"dimension {m.shape[0]} exceeds cap {MAX_DIM}")
        if check:
            _check_hermitian(m, 1e-12)
            tr = np.trace(m)
            if abs(tr - 1) > 1e-12:
                raise ValueError(f"trace is {tr.real:.15g}, expected 1")
            w = np.linalg.eigvalsh(0.5 * (m + m.conj().T))
            if w[0] < -psd_tolerance:
                raise NotPSDError(f"minimum eigenvalue {w[0]:.3g} below -{psd_tolerance:g}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "dims", tuple(dims))
        object.__setattr__(self, "psd_tolerance", psd_tolerance)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self.matrix if dtype is None else self.matrix.astype(dtype)

    def eigenvalues(self) -> np.ndarray:
        return eig_hermitian(self.matrix)[0]

    def partial_transpose(self, subsystems) -> np.ndarray:
        return partial_transpose(self.matrix, self.dims, subsystems)

    def partial_trace(self, keep) -> "DensityMatrix":
        keep = sorted({keep} if np.isscalar(keep) else set(keep))
        red = partial_trace(self.matrix, self.dims, keep)
        return DensityMatrix(red, [self.dims[s] for s in keep], check=False)

    def regroup(self, dims: Sequence[int]) -> "DensityMatrix":
        """Same matrix viewed with a coarser (or different) subsystem split."""
        return DensityMatrix(self.matrix, dims, self.psd_tolerance, check=False)

    def to_json(self) -> dict:
        flat = self.matrix.reshape(-1)
        return {"dims": list(self.dims), "entries": [[float(z.real), float(z.imag)] for z in flat]}

    @classmethod
    def from_json(cls, data: dict) -> "DensityMatrix":
        """Accepts row-major ``entries`` either flat ``(D*D, 2)`` or nested ``(D, D, 2)``."""
        dims = [int(d) for d in data["dims"]]
        D = int(np.prod(dims))
        entries = np.asarray(data["entries"], dtype=float)
        if entries.shape == (D, D, 2):
            entries = entries.reshape(D * D, 2)
        if entries.shape != (D * D, 2):
            raise StructureError(f"expected {D * D} [re, im] entries, got shape {entries.shape}")
        return cls((entries[:, 0] + 1j * entries[:, 1]).reshape(D, D), dims)


@dataclass(frozen=True, eq=False)
class PureState:
    amplitudes: np.ndarray
    dims: tuple[int, ...]

    def __init__(self, amplitudes, dims=None):
        v = np.asarray(amplitudes, dtype=complex).reshape(-1).copy()
        dims = (v.size,) if dims is None else _normalize_dims(dims, v.size)
        if abs(np.linalg.norm(v) - 1) > 1e-12:
            raise ValueError(f"state norm is {np.linalg.norm(v):.15g}, expected 1")
        v.setflags(write=False)
        object.__setattr__(self, "amplitudes", v)
        object.__setattr__(self, "dims", tuple(dims))

    @classmethod
    def normalized(cls, amplitudes, dims=None) -> "PureState":
        v = np.asarray(amplitudes, dtype=complex).reshape(-1)
        return cls(v / np.linalg.norm(v), dims)

    def density(self) -> DensityMatrix:
        v = self.amplitudes
        return DensityMatrix(np.outer(v, v.conj()), self.dims)

    def to_json(self) -> dict:
        return {"dims": list(self.dims),
                "amplitudes": [[float(z.real), float(z.imag)] for z in self.amplitudes]}


def as_density(state, dims=None) -> DensityMatrix:
    """Coerce a DensityMatrix, PureState, ket or matrix into a DensityMatrix."""
    if isinstance(state, DensityMatrix):
        return state if dims is None else state.regroup(dims)
    if isinstance(state, PureState):
        rho = state.density()
        return rho if dims is None else rho.regroup(dims)
    arr = np.asarray(state, dtype=complex)
    if arr.ndim == 1:
        return PureState(arr, dims).density()
    return DensityMatrix(arr, dims)
