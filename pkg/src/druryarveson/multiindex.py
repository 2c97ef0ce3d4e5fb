"""Multi-indices in N^d, the multinomial weight beta, and total-degree boxes.

Multi-indices are plain tuples of nonnegative ints. Weights are exact Python
ints; conversion to float happens only at the numerical boundary.
"""

from __future__ import annotations

import functools
import math
import warnings
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

MultiIndex = tuple[int, ...]

_EXACT_FLOAT_LIMIT = 2**53


class PrecisionWarning(UserWarning):
    """A weight could not be represented exactly as a double."""


def as_index(n: Sequence[int]) -> MultiIndex:
    """Validate ``n`` and return it as a tuple of nonnegative ints."""
    idx = tuple(int(c) for c in n)
    if len(idx) == 0:
        raise ValueError("multi-index must have dimension d >= 1")
    if any(c < 0 for c in idx):
        raise ValueError(f"multi-index components must be nonnegative, got {idx}")
    if any(int(c) != c for c in n):
        raise ValueError(f"multi-index components must be integers, got {tuple(n)}")
    return idx


def degree(n: Sequence[int]) -> int:
    return sum(n)


def unit(d: int, j: int) -> MultiIndex:
    """The unit index e_j (0-based axis ``j``)."""
    if not 0 <= j < d:
        raise ValueError(f"axis {j} out of range for d={d}")
    return tuple(1 if k == j else 0 for k in range(d))


def add(n: Sequence[int], m: Sequence[int]) -> MultiIndex:
    return tuple(a + b for a, b in zip(n, m))


def dominates(n: Sequence[int], m: Sequence[int]) -> bool:
    """True iff ``m <= n`` componentwise."""
    return all(a >= b for a, b in zip(n, m))


@functools.lru_cache(maxsize=65536)
def _beta(n: MultiIndex) -> int:
    out = math.factorial(sum(n))
    for c in n:
        out //= math.factorial(c)
    return out


def beta(n: Sequence[int]) -> int:
    """Multinomial weight ``|n|! / n!`` as an exact integer."""
    return _beta(as_index(n))


def to_double(value: int) -> float:
    """Convert an exact weight to float, warning when precision is lost."""
    out = float(value)
    if value > _EXACT_FLOAT_LIMIT and int(out) != value:
        warnings.warn(
            f"weight {value} is not exactly representable as a double",
            PrecisionWarning,
            stacklevel=2,
        )
    return out


def pascal_sum(m: Sequence[int]) -> int:
    """Return ``sum_j beta(m - e_j)`` over the axes with ``m_j > 0``.

    This equals ``beta(m)`` for every nonzero ``m``.
    """
    m = as_index(m)
    if sum(m) == 0:
        raise ValueError("pascal_sum is undefined at the zero index")
    total = 0
    for j, c in enumerate(m):
        if c > 0:
            total += _beta(m[:j] + (c - 1,) + m[j + 1:])
    return total


def compositions(k: int, d: int) -> Iterator[MultiIndex]:
    """All indices of total degree ``k`` in ``d`` variables, lexicographically."""
    if d == 1:
        yield (k,)
        return
    for first in range(k + 1):
        for rest in compositions(k - first, d - 1):
            yield (first,) + rest


@dataclass(frozen=True)
class DegreeBox:
    """The truncation window ``{n in N^d : |n| <= max_degree}``."""

    d: int
    max_degree: int

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("dimension must be >= 1")
        if self.max_degree < 0:
            raise ValueError("max_degree must be >= 0")

    def __contains__(self, n) -> bool:
        return len(n) == self.d and min(n) >= 0 and sum(n) <= self.max_degree

    def __len__(self) -> int:
        return math.comb(self.max_degree + self.d, self.d)

    def indices(self) -> list[MultiIndex]:
        return enumerate_box(self)


@functools.lru_cache(maxsize=256)
def _box_indices(d: int, max_degree: int) -> tuple[MultiIndex, ...]:
    out: list[MultiIndex] = []
    for k in range(max_degree + 1):
        out.extend(compositions(k, d))
    return tuple(out)


def enumerate_box(box: DegreeBox) -> list[MultiIndex]:
    """Indices with ``|n| <= D`` in graded order, ties broken lexicographically."""
    return list(_box_indices(box.d, box.max_degree))


@functools.lru_cache(maxsize=32)
def box_arrays(d: int, max_degree: int) -> tuple[np.ndarray, np.ndarray]:
    """Cached ``(indices, beta)`` arrays for a box; beta is float64."""
    idx = _box_indices(d, max_degree)
    arr = np.array(idx, dtype=np.int64).reshape(len(idx), d)
    weights = np.array([float(_beta(n)) for n in idx], dtype=np.float64)
    arr.setflags(write=False)
    weights.setflags(write=False)
    return arr, weights
