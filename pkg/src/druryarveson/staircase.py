"""Lower subsets of N^d and their shift-invariant complements.

A :class:`StaircaseSet` stores the minimal generators of the complement
``N = N^d \\ X`` (a monomial ideal); ``X`` is the staircase under it.
:class:`ExplicitSet` holds an arbitrary finite set inside a grid and is used
where non-monotone sets are needed.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence, Union

import numpy as np

from .multiindex import DegreeBox, MultiIndex, as_index, dominates, enumerate_box, unit

LOWER_SET_LIMIT = 2**20


def minimalize(gens: Iterable[Sequence[int]]) -> tuple[MultiIndex, ...]:
    """Drop generators dominated by another one; return them sorted."""
    out: list[MultiIndex] = []
    for g in sorted(set(as_index(g) for g in gens), key=lambda g: (sum(g), g)):
        if not any(dominates(g, h) for h in out):
            out.append(g)
    return tuple(sorted(out, key=lambda g: (sum(g), g)))


@dataclass(frozen=True)
class StaircaseSet:
    """``X = {n : no generator g has g <= n}``."""

    d: int
    generators: tuple[MultiIndex, ...] = ()

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("dimension must be >= 1")
        gens = minimalize(self.generators)
        if any(len(g) != self.d for g in gens):
            raise ValueError(f"generator dimension does not match d={self.d}")
        object.__setattr__(self, "generators", gens)

    @classmethod
    def full(cls, d: int) -> "StaircaseSet":
        return cls(d, ())

    @classmethod
    def point(cls, d: int) -> "StaircaseSet":
        """``X = {0}``."""
        return cls(d, tuple(unit(d, j) for j in range(d)))

    @classmethod
    def slab(cls, d: int, axis: int, N: int) -> "StaircaseSet":
        """``X = {n : n_axis <= N}`` with a 0-based axis."""
        if N < 0:
            raise ValueError("slab thickness N must be >= 0")
        return cls(d, (tuple((N + 1) if k == axis else 0 for k in range(d)),))

    @classmethod
    def rectangle(cls, m: Sequence[int]) -> "StaircaseSet":
        """``X = R_m = {n : n <= m}``."""
        m = as_index(m)
        d = len(m)
        return cls(d, tuple(tuple((m[j] + 1) if k == j else 0 for k in range(d))
                            for j in range(d)))

    def member(self, n: Sequence[int]) -> bool:
        if len(n) != self.d:
            raise ValueError(f"dimension mismatch: index {tuple(n)} vs d={self.d}")
        return not any(dominates(n, g) for g in self.generators)

    __contains__ = member

    def mask(self, indices: np.ndarray) -> np.ndarray:
        """Vectorized membership over an ``(k, d)`` integer array."""
        indices = np.asarray(indices)
        inside = np.ones(len(indices), dtype=bool)
        for g in self.generators:
            inside &= ~np.all(indices >= np.asarray(g), axis=1)
        return inside

    def is_bounded(self) -> bool:
        """True iff every axis carries a pure-power generator."""
        covered = set()
        for g in self.generators:
            support = [j for j, c in enumerate(g) if c > 0]
            if len(support) == 1:
                covered.add(support[0])
        return len(covered) == self.d

    def bounding_caps(self) -> tuple[int, ...]:
        """Per-axis maxima of members for a bounded set."""
        if not self.is_bounded():
            raise ValueError("set is unbounded")
        caps = []
        for j in range(self.d):
            pure = [g[j] for g in self.generators
                    if g[j] > 0 and all(c == 0 for k, c in enumerate(g) if k != j)]
            caps.append(min(pure) - 1)
        return tuple(caps)

    def to_grammar(self) -> str:
        if not self.generators:
            return "full"
        return "gens: " + "; ".join(",".join(str(c) for c in g) for g in self.generators)


@dataclass(frozen=True)
class ExplicitSet:
    """A finite subset of the grid ``prod_j {0, ..., shape_j - 1}``."""

    d: int
    members: frozenset = field(default_factory=frozenset)
    shape: tuple[int, ...] | None = None

    def __post_init__(self):
        members = frozenset(as_index(n) for n in self.members)
        if any(len(n) != self.d for n in members):
            raise ValueError(f"member dimension does not match d={self.d}")
        shape = self.shape
        if shape is None:
            shape = tuple(max((n[j] for n in members), default=-1) + 1 for j in range(self.d))
        shape = tuple(int(s) for s in shape)
        if len(shape) != self.d:
            raise ValueError("grid shape dimension mismatch")
        for n in members:
            if any(c >= s for c, s in zip(n, shape)):
                raise ValueError(f"{n} lies outside the declared grid {shape}")
        object.__setattr__(self, "members", members)
        object.__setattr__(self, "shape", shape)

    def member(self, n: Sequence[int]) -> bool:
        if len(n) != self.d:
            raise ValueError(f"dimension mismatch: index {tuple(n)} vs d={self.d}")
        return tuple(n) in self.members

    __contains__ = member

    def mask(self, indices: np.ndarray) -> np.ndarray:
        return np.array([tuple(int(c) for c in n) in self.members for n in indices], dtype=bool)

    def __len__(self) -> int:
        return len(self.members)

    def sorted(self) -> list[MultiIndex]:
        return sorted(self.members, key=lambda n: (sum(n), n))


IndexSet = Union[StaircaseSet, ExplicitSet]


def member(X: IndexSet, n: Sequence[int]) -> bool:
    return X.member(n)


def is_lower_set(S: ExplicitSet) -> bool:
    """Downward closure: ``n in S`` and ``n_j > 0`` imply ``n - e_j in S``."""
    for n in S.members:
        for j, c in enumerate(n):
            if c > 0 and n[:j] + (c - 1,) + n[j + 1:] not in S.members:
                return False
    return True


def maximal_elements(X: StaircaseSet) -> list[MultiIndex]:
    """Maximal members of a bounded staircase, by a scan of its bounding grid."""
    caps = X.bounding_caps()
    out = []
    for n in itertools.product(*(range(c + 1) for c in caps)):
        if not X.member(n):
            continue
        if all(not X.member(n[:j] + (n[j] + 1,) + n[j + 1:]) for j in range(X.d)):
            out.append(n)
    return sorted(out, key=lambda n: (sum(n), n))


def maximal_in_box(X: IndexSet, box: DegreeBox) -> list[MultiIndex]:
    """Maximal elements of ``X`` intersected with ``box``."""
    members = set(truncate(X, box))
    out = []
    for n in members:
        if all(n[:j] + (n[j] + 1,) + n[j + 1:] not in members for j in range(X.d)):
            out.append(n)
    return sorted(out, key=lambda n: (sum(n), n))


def _grid_members(S: IndexSet, shape: Sequence[int] | None) -> set[MultiIndex]:
    if isinstance(S, ExplicitSet):
        if shape is None:
            return set(S.members)
        return {n for n in S.members if all(c < s for c, s in zip(n, shape))}
    if shape is None:
        raise ValueError("a grid shape is required to check a StaircaseSet")
    return {n for n in itertools.product(*(range(s) for s in shape)) if S.member(n)}


def shape_violations(S: IndexSet, shape: Sequence[int] | None = None) -> list[tuple]:
    """Triples ``(n, i, j)`` (0-based axes) with n, n+e_i, n+e_i+e_j in S but n+e_j not."""
    members = _grid_members(S, shape)
    d = S.d
    bad = []
    for n in sorted(members):
        for i in range(d):
            ni = n[:i] + (n[i] + 1,) + n[i + 1:]
            if ni not in members:
                continue
            for j in range(d):
                nij = ni[:j] + (ni[j] + 1,) + ni[j + 1:]
                nj = n[:j] + (n[j] + 1,) + n[j + 1:]
                if nij in members and nj not in members:
                    bad.append((n, i, j))
    return bad


def shape_condition(S: IndexSet, shape: Sequence[int] | None = None) -> bool:
    """Check ``n, n+e_i+e_j, n+e_i in S  =>  n+e_j in S`` on a finite grid."""
    return not shape_violations(S, shape)


def truncate(X: IndexSet, box: DegreeBox) -> list[MultiIndex]:
    """``X`` intersected with ``box``, in graded-lex order."""
    if X.d != box.d:
        raise ValueError(f"dimension mismatch: set d={X.d}, box d={box.d}")
    return [n for n in enumerate_box(box) if X.member(n)]


def enumerate_lower_sets(shape: Sequence[int], limit: int = LOWER_SET_LIMIT) -> list[ExplicitSet]:
    """All downward-closed subsets of the grid with ``shape[j]`` points on axis j."""
    shape = tuple(int(s) for s in shape)
    d = len(shape)
    points = sorted(itertools.product(*(range(s) for s in shape)), key=lambda n: (sum(n), n))
    out: list[ExplicitSet] = []

    def grow(k: int, chosen: set):
        if k == len(points):
            if len(out) >= limit:
                raise OverflowError(f"more than {limit} lower sets in grid {shape}")
            out.append(ExplicitSet(d, frozenset(chosen), shape))
            return
        n = points[k]
        grow(k + 1, chosen)
        preds_ok = all(n[:j] + (n[j] - 1,) + n[j + 1:] in chosen
                       for j in range(d) if n[j] > 0)
        if preds_ok:
            chosen.add(n)
            grow(k + 1, chosen)
            chosen.remove(n)

    grow(0, set())
    return out


def random_staircase(rng: np.random.Generator, d: int, max_component: int = 5,
                     n_gens: int = 3, bounded: bool = False) -> StaircaseSet:
    """A random staircase; ``bounded`` adds a pure power on every axis."""
    gens = []
    for _ in range(n_gens):
        g = tuple(int(c) for c in rng.integers(0, max_component + 1, size=d))
        if sum(g) > 0:
            gens.append(g)
    if bounded:
        for j in range(d):
            a = int(rng.integers(1, max_component + 1))
            gens.append(tuple(a if k == j else 0 for k in range(d)))
    return StaircaseSet(d, tuple(gens))


def random_explicit_set(rng: np.random.Generator, shape: Sequence[int],
                        density: float = 0.5) -> ExplicitSet:
    shape = tuple(shape)
    pts = [n for n in itertools.product(*(range(s) for s in shape)) if rng.random() < density]
    return ExplicitSet(len(shape), frozenset(pts), shape)
