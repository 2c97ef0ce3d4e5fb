"""Reproducing kernels of H_d and of the coefficient-restricted subspaces H_d(X).

``projected_kernel_series`` sums ``beta(n) conj(z)^n w^n`` over ``X`` up to a
degree chosen from the geometric tail bound. ``slab_kernel`` evaluates the
closed forms for ``X = {n : n_j <= N}``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .multiindex import box_arrays
from .staircase import IndexSet

MAX_SERIES_DEGREE = 500
MAX_SERIES_TERMS = 5_000_000

SLAB_VARIANTS = ("corrected", "as-printed")


class ConvergenceError(RuntimeError):
    """The requested tolerance needs a truncation degree above the cap."""


@dataclass(frozen=True)
class KernelPoint:
    z: tuple[complex, ...]
    w: tuple[complex, ...]

    def __post_init__(self):
        z = tuple(complex(c) for c in self.z)
        w = tuple(complex(c) for c in self.w)
        if len(z) != len(w) or not z:
            raise ValueError("z and w must be nonempty and of equal dimension")
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "w", w)

    @property
    def d(self) -> int:
        return len(self.z)

    @property
    def t(self) -> np.ndarray:
        return np.conj(np.array(self.z)) * np.array(self.w)

    @property
    def S(self) -> complex:
        return complex(self.t.sum())

    @property
    def rho(self) -> float:
        return float(np.sum(np.abs(self.z) * np.abs(self.w)))

    def swapped(self) -> "KernelPoint":
        return KernelPoint(self.w, self.z)

    def check(self):
        if not self.rho < 1:
            raise ValueError(f"point outside the convergence region: rho={self.rho} >= 1")


@dataclass(frozen=True)
class CertifiedValue:
    value: complex
    tail_bound: float
    degree: int


def da_kernel(p: KernelPoint) -> complex:
    """``1 / (1 - conj(z) . w)``."""
    p.check()
    return 1.0 / (1.0 - p.S)


def series_degree(rho: float, tol: float, cap: int = MAX_SERIES_DEGREE) -> int:
    """Smallest D with ``rho^(D+1) / (1 - rho) <= tol``."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    if rho == 0:
        return 0
    # closed-form guess, then fix up against rounding
    D = max(0, math.ceil(math.log(tol * (1 - rho)) / math.log(rho)) - 1)
    while D > 0 and rho ** D / (1 - rho) <= tol:
        D -= 1
    while rho ** (D + 1) / (1 - rho) > tol:
        D += 1
    if D > cap:
        raise ConvergenceError(f"tolerance {tol} at rho={rho:.6g} needs degree {D} > cap {cap}")
    return D


def projected_kernel_series(X: IndexSet, p: KernelPoint, tol: float = 1e-12,
                            cap: int = MAX_SERIES_DEGREE) -> CertifiedValue:
    """Certified partial sum of ``sum_{n in X} beta(n) conj(z)^n w^n``."""
    p.check()
    if X.d != p.d:
        raise ValueError(f"dimension mismatch: set d={X.d}, point d={p.d}")
    rho = p.rho
    D = series_degree(rho, tol, cap)
    if math.comb(D + p.d, p.d) > MAX_SERIES_TERMS:
        raise ConvergenceError(f"degree {D} in d={p.d} exceeds the term budget")
    idx, weights = box_arrays(p.d, D)
    keep = X.mask(idx)
    terms = weights[keep] * np.prod(p.t[None, :] ** idx[keep], axis=1)
    tail = 0.0 if rho == 0 else rho ** (D + 1) / (1 - rho)
    return CertifiedValue(complex(terms.sum()), tail, D)


def slab_kernel(axis: int, N: int, p: KernelPoint, variant: str = "corrected") -> complex:
    """Closed-form kernel of the slab ``{n : n_axis <= N}`` (0-based axis).

    ``corrected`` is ``(1 - q^(N+1)) / (1 - S)`` with ``q = t / (1 - S + t)``;
    ``as-printed`` is ``(1 - q)^N / (1 - S)``. Only ``corrected`` agrees with
    the series.
    """
    p.check()
    if not 0 <= axis < p.d:
        raise ValueError(f"axis {axis} out of range for d={p.d}")
    if N < 0:
        raise ValueError("N must be >= 0")
    t = complex(p.t[axis])
    S = p.S
    denom = 1 - S + t
    assert denom != 0
    q = t / denom
    if variant == "corrected":
        return (1 - q ** (N + 1)) / (1 - S)
    if variant == "as-printed":
        return (1 - q) ** N / (1 - S)
    raise ValueError(f"unknown slab variant {variant!r}; expected one of {SLAB_VARIANTS}")


def gram_matrix(X: IndexSet, points: Sequence[Sequence[complex]], tol: float = 1e-12) -> np.ndarray:
    """``G[i, j] = k^X(z_i, z_j) = sum_n beta(n) conj(z_j)^n z_i^n``."""
    k = len(points)
    G = np.empty((k, k), dtype=complex)
    for i in range(k):
        for j in range(k):
            G[i, j] = projected_kernel_series(X, KernelPoint(points[j], points[i]), tol).value
    return G
