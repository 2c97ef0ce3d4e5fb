"""Finite matrix models of the compressed backshift and multiplication tuples.

All matrices are written in the orthonormal basis ``u_n = delta_n / sqrt(beta(n))``
of ``l^2(X, beta)`` (equivalently ``sqrt(beta(n)) z^n`` in H_d), so operator
norms are plain spectral norms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
import scipy.sparse.linalg

from .multiindex import DegreeBox, MultiIndex, as_index, beta
from .staircase import IndexSet, StaircaseSet, truncate

DENSE_SVD_LIMIT = 3000
NORM_SLACK = 1e-8


@dataclass(frozen=True)
class TruncatedBasis:
    """The ordered indices of ``X`` intersected with a total-degree box."""

    X: IndexSet
    box: DegreeBox
    indices: tuple[MultiIndex, ...] = field(init=False)
    weights: tuple[int, ...] = field(init=False)
    position: Mapping[MultiIndex, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        idx = tuple(truncate(self.X, self.box))
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "weights", tuple(beta(n) for n in idx))
        object.__setattr__(self, "position", {n: k for k, n in enumerate(idx)})

    @property
    def d(self) -> int:
        return self.box.d

    def __len__(self) -> int:
        return len(self.indices)


@dataclass
class OperatorTuple:
    mats: tuple[np.ndarray, ...]
    basis: TruncatedBasis | None = None
    label: str = "custom"

    def __post_init__(self):
        self.mats = tuple(np.asarray(A) for A in self.mats)
        if not self.mats:
            raise ValueError("an operator tuple needs at least one matrix")
        n = self.mats[0].shape[0]
        for A in self.mats:
            if A.shape != (n, n):
                raise ValueError("all matrices must be square of the same size")
        if self.basis is not None and len(self.basis) != n:
            raise ValueError("matrix size does not match the basis")

    @property
    def d(self) -> int:
        return len(self.mats)

    @property
    def size(self) -> int:
        return self.mats[0].shape[0]

    def __getitem__(self, j: int) -> np.ndarray:
        return self.mats[j]

    def scaled(self, r: float) -> "OperatorTuple":
        return OperatorTuple(tuple(r * A for A in self.mats), self.basis, self.label)


class Polynomial:
    """A complex polynomial in ``d`` variables, ``{exponent: coefficient}``."""

    def __init__(self, d: int, coeffs: Mapping[Sequence[int], complex] | None = None):
        if d < 1:
            raise ValueError("dimension must be >= 1")
        self.d = d
        self.coeffs: dict[MultiIndex, complex] = {}
        for k, c in (coeffs or {}).items():
            k = as_index(k)
            if len(k) != d:
                raise ValueError(f"exponent {k} does not have dimension {d}")
            c = complex(c)
            if c != 0:
                self.coeffs[k] = self.coeffs.get(k, 0) + c

    @classmethod
    def constant(cls, d: int, c: complex = 1.0) -> "Polynomial":
        return cls(d, {(0,) * d: c})

    @classmethod
    def monomial(cls, m: Sequence[int], c: complex = 1.0) -> "Polynomial":
        m = as_index(m)
        return cls(len(m), {m: c})

    @property
    def degree(self) -> int:
        return max((sum(k) for k in self.coeffs), default=0)

    def terms(self) -> list[tuple[MultiIndex, complex]]:
        return sorted(self.coeffs.items(), key=lambda kv: (sum(kv[0]), kv[0]))

    def __eq__(self, other) -> bool:
        return isinstance(other, Polynomial) and self.d == other.d and self.coeffs == other.coeffs

    def __repr__(self) -> str:
        return f"Polynomial({self.d}, {dict(self.terms())!r})"

    def __call__(self, z: Sequence[complex]) -> complex:
        return sum(c * math.prod(zj ** kj for zj, kj in zip(z, k)) for k, c in self.coeffs.items())


def backshift_tuple(basis: TruncatedBasis) -> OperatorTuple:
    """Compressed backshifts: ``B_j u_n = sqrt(beta(n-e_j)/beta(n)) u_{n-e_j}``."""
    d, size = basis.d, len(basis)
    mats = [np.zeros((size, size)) for _ in range(d)]
    for col, n in enumerate(basis.indices):
        bn = basis.weights[col]
        for j in range(d):
            if n[j] == 0:
                continue
            row = basis.position.get(n[:j] + (n[j] - 1,) + n[j + 1:])
            if row is not None:
                mats[j][row, col] = math.sqrt(basis.weights[row] / bn)
    return OperatorTuple(tuple(mats), basis, "backshift")


def mult_tuple(basis: TruncatedBasis) -> OperatorTuple:
    """Compressed coordinate multipliers; the transpose of :func:`backshift_tuple`."""
    B = backshift_tuple(basis)
    return OperatorTuple(tuple(np.ascontiguousarray(A.T) for A in B.mats), basis, "multiplication")


def _check_dims(Q: Polynomial, A: OperatorTuple):
    if Q.d != A.d:
        raise ValueError(f"dimension mismatch: polynomial d={Q.d}, tuple d={A.d}")


class _Powers:
    """Cache of ``A_j^k``."""

    def __init__(self, A: OperatorTuple):
        self.A = A
        self.cache: dict[tuple[int, int], np.ndarray] = {}

    def __call__(self, j: int, k: int) -> np.ndarray:
        if k == 0:
            return np.eye(self.A.size)
        key = (j, k)
        if key not in self.cache:
            self.cache[key] = self.A[j] if k == 1 else self(j, k - 1) @ self.A[j]
        return self.cache[key]


def monomial_apply(A: OperatorTuple, n: Sequence[int], powers: _Powers | None = None) -> np.ndarray:
    """``A^n = A_1^{n_1} ... A_d^{n_d}`` with factors in axis order."""
    powers = powers or _Powers(A)
    out = np.eye(A.size)
    for j, k in enumerate(n):
        if k:
            out = out @ powers(j, k)
    return out


def poly_apply(Q: Polynomial, A: OperatorTuple) -> np.ndarray:
    """``Q(A) = sum_k c_k A_1^{k_1} ... A_d^{k_d}``."""
    _check_dims(Q, A)
    powers = _Powers(A)
    out = np.zeros((A.size, A.size), dtype=complex)
    for k, c in Q.coeffs.items():
        out += c * monomial_apply(A, k, powers)
    return out


def op_norm(mat: np.ndarray) -> float:
    """Largest singular value."""
    mat = np.asarray(mat)
    if mat.size == 0:
        return 0.0
    if not np.all(np.isfinite(mat)):
        raise ValueError("matrix has non-finite entries")
    if max(mat.shape) <= DENSE_SVD_LIMIT:
        return float(np.linalg.svd(mat, compute_uv=False)[0])
    v0 = np.ones(min(mat.shape))
    s = scipy.sparse.linalg.svds(mat, k=1, tol=1e-12, v0=v0, return_singular_vectors=False)
    return float(s[0])


def gramian(A: OperatorTuple) -> np.ndarray:
    """``sum_j A_j^H A_j``."""
    return sum(A_j.conj().T @ A_j for A_j in A.mats)


def row_defect(A: OperatorTuple) -> float:
    """Largest eigenvalue of ``sum_j A_j^H A_j``; at most 1 for a contraction."""
    if A.size == 0:
        return 0.0
    return float(np.linalg.eigvalsh(gramian(A))[-1])


def commutator_defect(A: OperatorTuple) -> float:
    """``max_{i<j} ||A_i A_j - A_j A_i||``."""
    worst = 0.0
    for i in range(A.d):
        for j in range(i + 1, A.d):
            worst = max(worst, op_norm(A[i] @ A[j] - A[j] @ A[i]))
    return worst


def power_vanishing(A: OperatorTuple, box: DegreeBox, tol: float = 1e-12) -> set[MultiIndex]:
    """``{n in box : ||A^n|| <= tol}`` with ``A^0`` the identity."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    powers = _Powers(A)
    return {n for n in box.indices() if op_norm(monomial_apply(A, n, powers)) <= tol}


def multiplier_lower_bound(Q: Polynomial, box: DegreeBox) -> float:
    """Norm of ``Q(M_z)`` compressed to the box; increases to the multiplier norm."""
    basis = TruncatedBasis(StaircaseSet.full(box.d), box)
    return op_norm(poly_apply(Q, mult_tuple(basis)))


def monomial_multiplier(m: Sequence[int], box: DegreeBox) -> np.ndarray:
    """Matrix of multiplication by ``z^m`` on the whole box."""
    basis = TruncatedBasis(StaircaseSet.full(box.d), box)
    return monomial_apply(mult_tuple(basis), as_index(m))


def star_invariance_check(X: IndexSet, m: Sequence[int], box: DegreeBox) -> bool:
    """Whether ``(M_z^m)^*`` maps the coordinates of ``X`` in the box into themselves."""
    m = as_index(m)
    if len(m) != box.d:
        raise ValueError("dimension mismatch")
    adj = monomial_multiplier(m, box).conj().T
    inside = np.array([X.member(n) for n in box.indices()], dtype=bool)
    return not np.any(adj[np.ix_(~inside, inside)] != 0)
