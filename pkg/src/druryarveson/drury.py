"""Commuting contractive test tuples and the compressed Drury inequality.

Given a commuting tuple ``A`` with ``sum_j A_j^* A_j <= r^2 I`` whose powers
vanish off ``X``, the harness compares ``||Q(A)||`` with ``||Q(B^X)||`` on
growing degree boxes and with box lower bounds of the multiplier norm.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .multiindex import DegreeBox, MultiIndex, beta, compositions
from .opmodel import (
    NORM_SLACK,
    OperatorTuple,
    Polynomial,
    TruncatedBasis,
    _Powers,
    backshift_tuple,
    commutator_defect,
    gramian,
    monomial_apply,
    multiplier_lower_bound,
    op_norm,
    poly_apply,
    row_defect,
)
from .staircase import ExplicitSet, IndexSet, StaircaseSet, shape_condition

CONTRACTION_SLACK = 1e-12
MAX_CONDITION = 20.0
MAX_RETRIES = 100


class PatternError(ValueError):
    """The tuple's vanishing pattern does not cover the complement of X."""


@dataclass
class ContractiveTuple:
    """A commuting tuple with a declared support ``pattern`` (``None`` = nothing vanishes)."""

    A: OperatorTuple
    r: float
    pattern: IndexSet | None = None
    construction: str = "custom"

    @property
    def d(self) -> int:
        return self.A.d

    @property
    def size(self) -> int:
        return self.A.size


@dataclass
class DefectData:
    D: np.ndarray


def make_scaled_backshift_tuple(X: IndexSet, box: DegreeBox, r: float) -> ContractiveTuple:
    if not 0 < r < 1:
        raise ValueError("r must lie in (0, 1)")
    if isinstance(X, ExplicitSet) and not shape_condition(X):
        raise ValueError("set violates the shape condition; compressed backshifts do not commute")
    B = backshift_tuple(TruncatedBasis(X, box))
    return ContractiveTuple(B.scaled(r), r, X, "backshift")


def make_random_commuting_tuple(seed, dim: int, d: int, r: float) -> ContractiveTuple:
    """``A_j = V diag(lambda_j) V^-1`` for one random well-conditioned ``V``, rescaled."""
    if dim < 1:
        raise ValueError("dim must be >= 1")
    if not 0 < r < 1:
        raise ValueError("r must lie in (0, 1)")
    rng = np.random.default_rng(seed)
    for _ in range(MAX_RETRIES):
        V = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
        if np.linalg.cond(V) <= MAX_CONDITION:
            break
    else:
        raise RuntimeError(f"no V with condition number <= {MAX_CONDITION} in {MAX_RETRIES} tries")
    Vinv = np.linalg.inv(V)
    lams = rng.standard_normal((d, dim)) + 1j * rng.standard_normal((d, dim))
    mats = tuple(V @ np.diag(lam) @ Vinv for lam in lams)
    A = OperatorTuple(mats, None, "custom")
    A = A.scaled(r / np.sqrt(row_defect(A)))
    return ContractiveTuple(A, r, None, "diag")


def defect_operator(T: ContractiveTuple | OperatorTuple) -> DefectData:
    """Principal square root of ``I - sum_j A_j^* A_j``."""
    A = T.A if isinstance(T, ContractiveTuple) else T
    G = np.eye(A.size) - gramian(A)
    G = (G + G.conj().T) / 2
    vals, vecs = np.linalg.eigh(G)
    if vals.size and vals[0] < -CONTRACTION_SLACK:
        raise ValueError(f"tuple is not a contraction: row defect {1 - vals[0]:.3g} > 1")
    vals = np.clip(vals, 0, None)
    return DefectData((vecs * np.sqrt(vals)) @ vecs.conj().T)


def _orbit(A: OperatorTuple, h: np.ndarray, K: int) -> dict[MultiIndex, np.ndarray]:
    """``A^n h`` for all ``|n| <= K``, built one factor at a time."""
    d = A.d
    out = {(0,) * d: h}
    for k in range(1, K + 1):
        for n in compositions(k, d):
            j = next(j for j, c in enumerate(n) if c > 0)
            prev = n[:j] + (n[j] - 1,) + n[j + 1:]
            out[n] = A[j] @ out[prev]
    return out


def theta_sums(T: ContractiveTuple, h: np.ndarray, K: int,
               X: IndexSet | None = None) -> tuple[float, float, float]:
    """Split the orbit mass of ``h``.

    Returns ``(inside, outside, tail)``: ``sum beta(n)||D A^n h||^2`` over
    ``|n| <= K`` with ``n`` in ``X`` and not in ``X``, and
    ``sum_{|n|=K+1} beta(n)||A^n h||^2``. The three add up to ``||h||^2``.
    """
    A = T.A
    if row_defect(A) > 1 + CONTRACTION_SLACK:
        raise ValueError("tuple is not a contraction")
    D = defect_operator(A).D
    orbit = _orbit(A, np.asarray(h, dtype=complex), K + 1)
    inside = outside = tail = 0.0
    for n, v in orbit.items():
        if sum(n) <= K:
            Dv = D @ v
            mass = beta(n) * float(np.vdot(Dv, Dv).real)
            if X is None or X.member(n):
                inside += mass
            else:
                outside += mass
        else:
            tail += beta(n) * float(np.vdot(v, v).real)
    return inside, outside, tail


def isometry_residual(T: ContractiveTuple, h: np.ndarray, K: int) -> float:
    """``|sum_{|n|<=K} beta ||D A^n h||^2 + sum_{|n|=K+1} beta ||A^n h||^2 - ||h||^2|``."""
    inside, _, tail = theta_sums(T, h, K)
    return abs(inside + tail - float(np.vdot(h, h).real))


def psi_isometry_check(T: ContractiveTuple, X: IndexSet, K: int, tol: float = 1e-9) -> bool:
    """Whether projecting the orbit onto ``X`` keeps the norm of every basis vector.

    The orbit mass lost off ``X`` is summed directly, not recovered as
    ``||h||^2`` minus the rest, and its square root is compared with ``tol``
    so the verdict is on the same scale as ``max ||A^n|| <= tol``.
    """
    if T.d != X.d:
        raise ValueError("dimension mismatch")
    for i in range(T.size):
        h = np.zeros(T.size, dtype=complex)
        h[i] = 1
        _, outside, _ = theta_sums(T, h, K, X)
        if np.sqrt(outside) > tol:
            return False
    return True


def psi_slack(r: float, K: int) -> float:
    """Bound on the degree-``K+1`` remainder under ``sum A_j^* A_j <= r^2``."""
    return r ** (2 * (K + 1)) / (1 - r ** 2)


def direct_vanishing_test(T: ContractiveTuple, X: IndexSet, K: int, tol: float = 1e-9) -> bool:
    """``max_{n not in X, |n| <= K} ||A^n|| <= tol``."""
    powers = _Powers(T.A)
    for k in range(K + 1):
        for n in compositions(k, T.d):
            if not X.member(n) and op_norm(monomial_apply(T.A, n, powers)) > tol:
                return False
    return True


def pattern_within(pattern: IndexSet | None, X: IndexSet) -> bool:
    """True iff ``pattern`` is contained in ``X``."""
    if pattern is None:
        pattern = StaircaseSet.full(X.d)
    if isinstance(pattern, ExplicitSet):
        return all(X.member(n) for n in pattern.members)
    if isinstance(X, StaircaseSet):
        return all(not pattern.member(g) for g in X.generators)
    if not isinstance(pattern, StaircaseSet) or not pattern.is_bounded():
        return False
    caps = pattern.bounding_caps()
    return all(X.member(n) for n in itertools.product(*(range(c + 1) for c in caps))
               if pattern.member(n))


@dataclass
class InequalityReport:
    norm_QA: float
    schedule: list[int]
    qbx: list[float]
    mult_lower: list[float]
    verdict1: bool
    verdict2: str
    converged: bool
    basis_sizes: list[int] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.verdict1 and self.verdict2 != "fail"


def _converged(seq: Sequence[float], rtol: float) -> bool:
    if len(seq) < 2:
        return False
    a, b = seq[-2], seq[-1]
    return abs(b - a) <= rtol * max(abs(b), np.finfo(float).tiny)


def verify_inequality(Q: Polynomial, T: ContractiveTuple, X: IndexSet, schedule: Sequence[int],
                      slack: float = NORM_SLACK, convergence_rtol: float = 1e-6) -> InequalityReport:
    """Check ``||Q(A)|| <= ||Q(B^X)||_D <= ||Q(M_z)||_D`` along a box schedule."""
    if Q.d != T.d or X.d != T.d:
        raise ValueError("dimension mismatch")
    if not schedule:
        raise ValueError("empty box schedule")
    if not pattern_within(T.pattern, X):
        raise PatternError("the complement of X is not inside the tuple's vanishing pattern")
    schedule = sorted(int(D) for D in schedule)
    norm_QA = op_norm(poly_apply(Q, T.A))
    qbx, mult, sizes = [], [], []
    for D in schedule:
        box = DegreeBox(T.d, D)
        basis = TruncatedBasis(X, box)
        sizes.append(len(basis))
        qbx.append(op_norm(poly_apply(Q, backshift_tuple(basis))))
        mult.append(multiplier_lower_bound(Q, box))
    converged = _converged(qbx, convergence_rtol) and _converged(mult, convergence_rtol)
    verdict1 = norm_QA <= qbx[-1] + slack
    if qbx[-1] <= mult[-1] + slack:
        verdict2 = "pass"
    else:
        verdict2 = "fail" if converged else "inconclusive"
    return InequalityReport(norm_QA, schedule, qbx, mult, verdict1, verdict2, converged, sizes)


def tuple_diagnostics(T: ContractiveTuple) -> dict:
    return {
        "row_defect": row_defect(T.A),
        "commutator_defect": commutator_defect(T.A),
        "r_squared": T.r ** 2,
    }
