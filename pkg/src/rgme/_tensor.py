"""Batched rank-1 tensor helpers shared by the product-state searches.

A batch of ``K`` product vectors is stored as a list of factor arrays, one
per subsystem, each of shape ``(K, d_j)``.
"""

import numpy as np

_LETTERS = "abcdefghijklmnopqrstuvwxy"


def random_factors(rng, dims, count):
    """``count`` Haar-ish random unit vectors for every subsystem."""
    out = []
    for d in dims:
        v = rng.normal(size=(count, d)) + 1j * rng.normal(size=(count, d))
        out.append(v / np.linalg.norm(v, axis=1, keepdims=True))
    return out


def product_vectors(factors):
    """Flatten a batch of product vectors to shape ``(K, D)``."""
    out = factors[0]
    for f in factors[1:]:
        out = np.einsum("zi,zj->zij", out, f).reshape(out.shape[0], -1)
    return out


def _contract_except(g, factors, skip):
    k = len(factors)
    ops, subs = [g], ["z" + _LETTERS[:k]]
    for l, f in enumerate(factors):
        if l != skip:
            ops.append(f.conj())
            subs.append("z" + _LETTERS[l])
    target = "z" + (_LETTERS[skip] if skip is not None else "")
    return np.einsum(",".join(subs) + "->" + target, *ops)


def overlaps(g, factors):
    """``<phi_z|g_z>`` for every batch member ``z``; ``g`` has shape ``(K, *dims)``."""
    return _contract_except(g, factors, None)


def als_sweep(g, factors):
    """One alternating sweep of rank-1 updates, in place order ``0..k-1``.

    Each factor is replaced by its normalized environment vector, which can
    only increase ``|<phi|g>|``. Returns the new factors and final overlaps.
    """
    factors = list(factors)
    for j in range(len(factors)):
        env = _contract_except(g, factors, j)
        norm = np.linalg.norm(env, axis=1, keepdims=True)
        # a vanishing environment leaves the factor where it was
        factors[j] = np.where(norm > 0, env / np.where(norm > 0, norm, 1.0), factors[j])
    return factors, overlaps(g, factors)
