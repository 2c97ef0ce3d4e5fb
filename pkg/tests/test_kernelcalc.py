import itertools
import math

import numpy as np
import pytest

from druryarveson.kernelcalc import (
    ConvergenceError,
    KernelPoint,
    da_kernel,
    gram_matrix,
    projected_kernel_series,
    series_degree,
    slab_kernel,
)
from druryarveson.staircase import StaircaseSet, random_staircase


def brute_series(X, z, w, D):
    """Plain nested loop over the cube, weights from a binomial chain."""
    t = [complex(a).conjugate() * complex(b) for a, b in zip(z, w)]
    total = 0j
    for n in itertools.product(range(D + 1), repeat=len(z)):
        if sum(n) > D or not X.member(n):
            continue
        weight, acc = 1, 0
        for c in n:
            acc += c
            weight *= math.comb(acc, c)
        total += weight * math.prod(tj**c for tj, c in zip(t, n))
    return total


def random_point(rng, d, rho_max):
    z = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    w = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    rho = np.sum(np.abs(z) * np.abs(w))
    scale = np.sqrt(rng.uniform(0.05, rho_max) / rho)
    return KernelPoint(z * scale, w * scale)


@pytest.mark.parametrize("z, w, expected", [
    ((0, 0), (0.7, 0.1), 1.0),
    ((0.5, 0.5), (0.5, 0.5), 2.0),
    ((0.3, 0.4), (0.3, 0.4), 1 / 0.75),
])
def test_da_kernel_examples(z, w, expected):
    p = KernelPoint(z, w)
    assert da_kernel(p) == pytest.approx(expected, abs=1e-14)
    full = projected_kernel_series(StaircaseSet.full(2), p, 1e-13)
    assert abs(full.value - expected) <= full.tail_bound + 1e-13


def test_rejects_points_outside_region():
    with pytest.raises(ValueError):
        da_kernel(KernelPoint((0.8, 0.8), (0.8, 0.8)))


def test_series_degree_is_minimal():
    for rho in (0.1, 0.36, 0.6, 0.9):
        D = series_degree(rho, 1e-12)
        assert rho ** (D + 1) / (1 - rho) <= 1e-12 < rho**D / (1 - rho)
    assert series_degree(0.0, 1e-12) == 0


def test_series_degree_cap():
    with pytest.raises(ConvergenceError):
        series_degree(0.999, 1e-15, cap=500)


def test_point_set_kernel_is_one():
    res = projected_kernel_series(StaircaseSet.point(3), KernelPoint((0.2, 0.1, 0.3), (0.4, 0.2, 0.1)))
    assert res.value == 1


def test_slab_n0_example_selects_corrected():
    p = KernelPoint((0.3, 0.4), (0.3, 0.4))
    series = projected_kernel_series(StaircaseSet.slab(2, 0, 0), p)
    assert series.value == pytest.approx(1 / 0.84, abs=1e-12)
    assert slab_kernel(0, 0, p, "corrected") == pytest.approx((1 - 0.09 / 0.84) / 0.75, abs=1e-15)
    assert slab_kernel(0, 0, p, "as-printed") == pytest.approx(1 / 0.75, abs=1e-15)
    assert abs(slab_kernel(0, 0, p) - series.value) <= series.tail_bound + 1e-12


def test_slab_three_dims_matches_series():
    p = KernelPoint((0.2, 0.3, 0.1), (0.2, 0.3, 0.1))
    series = projected_kernel_series(StaircaseSet.slab(3, 0, 2), p, 1e-12)
    assert abs(slab_kernel(0, 2, p) - series.value) <= series.tail_bound + 1e-12


def test_slab_vanishing_variable_reduction():
    p = KernelPoint((0.0, 0.3, 0.2), (0.5, 0.4, 0.1))
    assert slab_kernel(0, 4, p) == pytest.approx(1 / (1 - p.S), abs=1e-15)
    reduced = da_kernel(KernelPoint((0.3, 0.2), (0.4, 0.1)))
    series = projected_kernel_series(StaircaseSet.slab(3, 0, 4), p)
    assert abs(series.value - reduced) <= series.tail_bound + 1e-13


def test_slab_unknown_variant():
    with pytest.raises(ValueError):
        slab_kernel(0, 1, KernelPoint((0.1, 0.1), (0.1, 0.1)), "other")


@pytest.mark.parametrize("seed", range(12))
def test_series_matches_brute_force(seed):
    rng = np.random.default_rng(seed)
    d = int(rng.integers(1, 4))
    X = random_staircase(rng, d, max_component=3, n_gens=2)
    p = random_point(rng, d, 0.4)
    res = projected_kernel_series(X, p, 1e-10)
    assert abs(res.value - brute_series(X, p.z, p.w, res.degree)) <= 1e-12
    exact = brute_series(X, p.z, p.w, res.degree + 25)
    assert abs(res.value - exact) <= res.tail_bound + 1e-13


@pytest.mark.parametrize("seed", range(10))
def test_hermitian_symmetry(seed):
    rng = np.random.default_rng(seed)
    d = int(rng.integers(2, 4))
    X = random_staircase(rng, d, 3, 2)
    p = random_point(rng, d, 0.5)
    a = projected_kernel_series(X, p).value
    b = projected_kernel_series(X, p.swapped()).value
    assert abs(a - np.conj(b)) <= 1e-12


def test_slab_monotone_limit():
    p = KernelPoint((0.3, 0.2, 0.1), (0.4, 0.3, 0.2))
    vals = [slab_kernel(0, N, p).real for N in range(60)]
    assert all(b >= a - 1e-15 for a, b in zip(vals, vals[1:]))
    assert vals[-1] == pytest.approx(da_kernel(p).real, abs=1e-12)


def test_gram_matrix_is_hermitian_psd():
    rng = np.random.default_rng(3)
    pts = []
    for _ in range(6):
        v = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        pts.append(v / np.linalg.norm(v) * rng.uniform(0, 0.6))
    G = gram_matrix(StaircaseSet.slab(2, 1, 2), pts)
    assert np.allclose(G, G.conj().T, atol=1e-13)
    assert np.linalg.eigvalsh(G).min() >= -1e-10
