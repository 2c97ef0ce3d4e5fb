"""Hankel forms with monomial symbols and rectangle covers of staircases.

For the symbol ``b = z^m`` the form ``<f g, b>`` only sees the coefficient
pairs ``(k, l)`` with ``k + l = m``, so its kernel is the set of functions
whose coefficients vanish on the rectangle ``R_m``.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from .multiindex import DegreeBox, MultiIndex, as_index, beta, dominates
from .staircase import IndexSet, StaircaseSet, maximal_elements, maximal_in_box

NULL_THRESHOLD = 1e-10


def hankel_matrix(m: Sequence[int], box: DegreeBox, codomain_degree: int | None = None) -> np.ndarray:
    """``H[l, k] = beta(m) sqrt(beta(k) beta(l))`` when ``k + l = m``.

    Columns run over ``box``. Rows run over ``box`` too unless ``codomain_degree``
    is given; pass ``max(D, |m|)`` to keep every nonzero entry, which is what
    the kernel computations need when ``|m| > D``.
    """
    m = as_index(m)
    if len(m) != box.d:
        raise ValueError("dimension mismatch")
    cols = box.indices()
    rows_box = box if codomain_degree is None else DegreeBox(box.d, codomain_degree)
    rows = rows_box.indices()
    row_pos = {l: i for i, l in enumerate(rows)}
    bm = beta(m)
    H = np.zeros((len(rows), len(cols)))
    for c, k in enumerate(cols):
        if not dominates(m, k):
            continue
        l = tuple(a - b for a, b in zip(m, k))
        r = row_pos.get(l)
        if r is not None:
            H[r, c] = bm * math.sqrt(beta(k) * beta(l))
    return H


def complete_hankel_matrix(m: Sequence[int], box: DegreeBox) -> np.ndarray:
    return hankel_matrix(m, box, codomain_degree=max(box.max_degree, sum(m)))


def rectangle(m: Sequence[int], box: DegreeBox) -> list[MultiIndex]:
    """``R_m`` intersected with ``box``."""
    return [n for n in box.indices() if dominates(m, n)]


def hankel_kernel_basis(m: Sequence[int], box: DegreeBox) -> list[MultiIndex]:
    """Box monomials outside ``R_m``; they span the kernel of the symbol ``z^m``."""
    m = as_index(m)
    return [n for n in box.indices() if not dominates(m, n)]


def null_space(H: np.ndarray, threshold: float = NULL_THRESHOLD) -> np.ndarray:
    """Orthonormal null-space basis (columns), relative singular-value cutoff."""
    ncols = H.shape[1]
    if H.size == 0:
        return np.eye(ncols)
    _, s, Vh = np.linalg.svd(H)
    smax = s[0] if len(s) else 0.0
    if smax == 0:
        return np.eye(ncols)
    rank = int(np.sum(s > threshold * smax))
    return Vh[rank:].conj().T


def coordinate_support(V: np.ndarray, indices: Sequence[MultiIndex], atol: float = 1e-8) -> list[MultiIndex]:
    """Indices whose coordinate vectors span ``range(V)``.

    Raises ``ValueError`` if the span is not a coordinate subspace.
    """
    P = V @ V.conj().T
    diag = np.real(np.diag(P))
    keep = diag > 0.5
    if np.max(np.abs(P - np.diag(keep.astype(float))), initial=0.0) > atol:
        raise ValueError("null space is not spanned by coordinate vectors")
    return [n for n, k in zip(indices, keep) if k]


def cover_symbols(X: IndexSet, box: DegreeBox) -> list[MultiIndex]:
    """Exponents ``m_k`` with ``X = union R_{m_k}`` (inside ``box`` when X is unbounded)."""
    if isinstance(X, StaircaseSet) and X.is_bounded():
        return maximal_elements(X)
    return maximal_in_box(X, box)


def kernel_intersection(symbols: Sequence[Sequence[int]], box: DegreeBox,
                        threshold: float = NULL_THRESHOLD) -> list[MultiIndex]:
    """Monomials spanning the common kernel of the given Hankel symbols in ``box``."""
    indices = box.indices()
    if not symbols:
        return list(indices)
    stacked = np.vstack([complete_hankel_matrix(m, box) / max(beta(m), 1) for m in symbols])
    return coordinate_support(null_space(stacked, threshold), indices)


def decompose(X: IndexSet, box: DegreeBox) -> dict:
    """Cover symbols, their kernel dimensions, and whether the kernels cut out ``N``."""
    symbols = cover_symbols(X, box)
    dims = [null_space(complete_hankel_matrix(m, box)).shape[1] for m in symbols]
    outside = [n for n in box.indices() if not X.member(n)]
    return {
        "symbols": [list(m) for m in symbols],
        "kernel_dims": dims,
        "verified": kernel_intersection(symbols, box) == outside,
    }
