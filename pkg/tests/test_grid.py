import math
import random

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ftvqe.grid import CapLattice, enumerate_u_candidates, grid_points_1d, lll_reduce
from ftvqe.rings import ZOmega, ZRootTwo

R2 = math.sqrt(2)


def brute_1d(I, J, bound=60):
    out = set()
    for q in range(-bound, bound + 1):
        for p in range(-4 * bound, 4 * bound + 1):
            x, y = p + q * R2, p - q * R2
            if I[0] <= x <= I[1] and J[0] <= y <= J[1]:
                out.add((p, q))
    return out


def keys(points):
    return {(a.p, a.q) for a in points}


def test_simple_box():
    pts = grid_points_1d((0, 2), (0, 2))
    assert keys(pts) == brute_1d((0, 2), (0, 2))
    assert (1, 0) in keys(pts)


def test_narrow_tall_interval():
    I, J = (1e6, 1e6 + 1e-6), (-1, 1)
    # x - y = 2 q sqrt2 fixes q to a handful of values; scan them exactly
    expected = set()
    for q in range(int((I[0] - J[1]) / (2 * R2)) - 2, int((I[1] - J[0]) / (2 * R2)) + 3):
        for p in range(math.floor(I[0] - q * R2) - 1, math.ceil(I[1] - q * R2) + 2):
            a = ZRootTwo(p, q)
            if I[0] <= a.to_mpf() <= I[1] and J[0] <= a.conj().to_mpf() <= J[1]:
                expected.add((p, q))
    assert keys(grid_points_1d(I, J)) == expected


def test_empty_interval_rejected():
    with pytest.raises(ValueError):
        grid_points_1d((1, 0), (0, 1))


intervals = st.tuples(st.floats(-20, 20), st.floats(0.01, 10))


@given(intervals, intervals)
def test_matches_brute_force(i, j):
    I, J = (i[0], i[0] + i[1]), (j[0], j[0] + j[1])
    assert keys(grid_points_1d(I, J)) == brute_1d(I, J)


def test_points_satisfy_constraints():
    I, J = (-3.3, 7.1), (-0.2, 0.9)
    for a in grid_points_1d(I, J):
        assert I[0] <= a.to_mpf() <= I[1]
        assert J[0] <= a.conj().to_mpf() <= J[1]


def brute_u(theta, eps, k):
    """All z with |z|^2 <= 2^k near the target, by scanning coefficient boxes."""
    s = 2 ** (k / 2)
    target = complex(math.cos(theta / 2), -math.sin(theta / 2))
    b = int(s) + 1
    r = np.arange(-b, b + 1)
    a, bb, c, d = np.meshgrid(r, r, r, r, indexing="ij")
    re = a + (bb - d) / R2
    im = c + (bb + d) / R2
    rec = a - (bb - d) / R2
    imc = c - (bb + d) / R2
    u = (re + 1j * im) / s
    mask = (np.abs(u - target) <= eps) & (re**2 + im**2 <= 2**k) & (rec**2 + imc**2 <= 2**k)
    dist = np.abs(u - target)
    # points within rounding of the region boundary are ambiguous in floats
    near = mask & (np.abs(dist - eps) > 1e-9)
    sure = {
        (int(x), int(y), int(z), int(w))
        for x, y, z, w in zip(a[near], bb[near], c[near], d[near])
        if ZOmega(int(x), int(y), int(z), int(w)).abs2() <= ZRootTwo(2**k)
    }
    return sure, np.abs(dist - eps) <= 1e-9


def scaled(u, k):
    """Coefficients of sqrt2^k u, undoing the canonical reduction of u."""
    z = u.z
    for _ in range(k - u.k):
        z = z * ZOmega(0, 1, 0, -1)
    return z.coeffs


@pytest.mark.parametrize("theta,eps,k", [(0.5, 0.3, 4), (1.3, 0.2, 6), (2.9, 0.5, 3), (0.0, 0.25, 5)])
def test_u_candidates_match_brute_force(theta, eps, k):
    got = {scaled(u, k) for u in enumerate_u_candidates(theta, eps, k)}
    sure, _ = brute_u(theta, eps, k)
    assert sure <= got
    target = mpmath.mpc(math.cos(theta / 2), -math.sin(theta / 2))
    for u in enumerate_u_candidates(theta, eps, k):
        assert abs(u.to_mpc() - target) <= eps + 1e-12


def test_u_candidates_sorted_by_distance():
    target = mpmath.mpc(math.cos(0.35), -math.sin(0.35))
    d = [abs(u.to_mpc() - target) for u in enumerate_u_candidates(0.7, 0.1, 10)]
    assert d == sorted(d)


@pytest.mark.parametrize("theta,eps", [(0.7, 0.05), (2.1, 0.02), (5.5, 0.08)])
def test_cap_lattice_agrees_with_disk(theta, eps):
    cap = CapLattice(theta, eps)
    for k in range(0, 12):
        disk = enumerate_u_candidates(theta, eps, k)
        in_cap = set()
        for u in disk:
            v = u.to_mpc()
            if v.real * cap.target.real + v.imag * cap.target.imag >= 1 - mpmath.mpf(eps) ** 2 / 2:
                in_cap.add(scaled(u, k))
        assert {z.coeffs for z in cap.candidates(k)} == in_cap


@pytest.mark.parametrize(
    "theta,eps",
    [(0.02, 0.2), (1e-3, 0.05), (math.pi / 2 + 3e-3, 0.02), (-math.pi + 1e-3, 0.05), (3 * math.pi / 2 + 0.01, 0.1)],
)
def test_axis_mode_agrees_with_disk(theta, eps):
    cap = CapLattice(theta, eps)
    assert cap.axis_mode
    for k in range(0, 11):
        disk = enumerate_u_candidates(theta, eps, k)
        in_cap = set()
        for u in disk:
            v = u.to_mpc()
            if v.real * cap.target.real + v.imag * cap.target.imag >= 1 - mpmath.mpf(eps) ** 2 / 2:
                in_cap.add(scaled(u, k))
        assert {z.coeffs for z in cap.candidates(k)} == in_cap


def test_candidate_limit():
    cap = CapLattice(1e-3, 0.05)
    assert len(cap.candidates(10, limit=5)) == 5


def test_lll_reduces_and_is_unimodular():
    rng = random.Random(3)
    cols = [[mpmath.mpf(rng.randint(-50, 50)) for _ in range(4)] for _ in range(4)]
    red, U = lll_reduce(cols)
    det = mpmath.det(mpmath.matrix(U))
    assert abs(abs(det) - 1) < 1e-20
    for j in range(4):
        rebuilt = [sum(cols[i][r] * U[j][i] for i in range(4)) for r in range(4)]
        assert all(abs(a - b) < 1e-20 for a, b in zip(rebuilt, red[j]))
    norm = lambda v: mpmath.sqrt(sum(x * x for x in v))
    assert norm(red[0]) <= max(norm(c) for c in cols)
