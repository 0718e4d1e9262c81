import cmath
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ftvqe.rings import (
    LAMBDA,
    OMEGA,
    ROOT2,
    DOmega,
    ZOmega,
    ZRootTwo,
    normalize_zroottwo,
    sde,
    zomega_gcd,
    zroottwo_gcd,
)

ints = st.integers(-10**6, 10**6)
zomegas = st.builds(ZOmega, ints, ints, ints, ints)
zroottwos = st.builds(ZRootTwo, ints, ints)
W = cmath.exp(1j * math.pi / 4)


def embed(z: ZOmega) -> complex:
    return z.a + z.b * W + z.c * W**2 + z.d * W**3


def test_one_plus_omega_squared():
    x = ZOmega(1, 1, 0, 0)
    assert x * x == ZOmega(1, 2, 1, 0)


def test_omega_fourth_power_is_minus_one():
    assert OMEGA * OMEGA * OMEGA * OMEGA == ZOmega(-1)


def test_norm_of_one_plus_omega_matches_float():
    x = ZOmega(1, 1, 0, 0)
    prod = x * x.adj()
    assert prod.real_zroottwo() == ZRootTwo(2, 1)
    assert abs(prod.to_complex() - abs(1 + W) ** 2) < 1e-12


def test_sde_examples():
    assert sde(DOmega(1)) == 0
    assert sde(DOmega(1, 1)) == 1
    x = DOmega(ZOmega(1, 1, 0, 0), 2)
    assert not x.z.divisible_by_sqrt2()
    assert sde(x) == 2


def test_gcd_examples():
    x = ZOmega(3, 1, -2, 5)
    g = zomega_gcd(x, 0)
    assert g.divides(x) and x.divides(g)
    g = zomega_gcd(2, ROOT2)
    assert g.divides(ROOT2) and ROOT2.divides(g)
    with pytest.raises(ValueError):
        zomega_gcd(0, 0)


@given(zomegas, zomegas, zomegas)
def test_gcd_recovers_constructed_common_factor(f, a, b):
    if not f or not a or not b:
        return
    g = zomega_gcd(f * a, f * b)
    assert g.divides(f * a) and g.divides(f * b)
    assert f.divides(g)


@given(zomegas, zomegas, zomegas)
def test_zomega_ring_laws(x, y, z):
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z
    assert x * y == y * x


@given(zroottwos, zroottwos, zroottwos)
def test_zroottwo_ring_laws(x, y, z):
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z
    assert x * y == y * x


@given(zroottwos, zroottwos)
def test_norm_multiplicative(x, y):
    assert (x * y).norm() == x.norm() * y.norm()


@given(zroottwos, zroottwos)
def test_zroottwo_embedding_is_homomorphism(x, y):
    assert (x * y).to_zomega() == x.to_zomega() * y.to_zomega()
    assert (x + y).to_zomega() == x.to_zomega() + y.to_zomega()


@given(zomegas)
def test_float_embedding_formula(x):
    v = x.to_complex()
    re = x.a + (x.b - x.d) / math.sqrt(2)
    im = x.c + (x.b + x.d) / math.sqrt(2)
    scale = 1 + abs(x.a) + abs(x.b) + abs(x.c) + abs(x.d)
    assert abs(v.real - re) <= 1e-12 * scale
    assert abs(v.imag - im) <= 1e-12 * scale
    assert abs(v - embed(x)) <= 1e-12 * scale


@given(zomegas)
def test_conjugations(x):
    assert x.adj() == ZOmega(x.a, -x.d, -x.c, -x.b)
    assert x.conj2() == ZOmega(x.a, -x.b, x.c, -x.d)
    scale = 1 + abs(x.a) + abs(x.b) + abs(x.c) + abs(x.d)
    assert abs(x.adj().to_complex() - x.to_complex().conjugate()) <= 1e-12 * scale


@given(zomegas, st.integers(0, 6), zomegas, st.integers(0, 6))
def test_sde_subadditive_and_canonical(x, j, y, k):
    a, b = DOmega(x, j), DOmega(y, k)
    assert sde(a * b) <= sde(a) + sde(b)
    assert DOmega(a.z, a.k) == a


@given(zroottwos)
def test_normalized_associate_in_fundamental_interval(x):
    if not x:
        return
    n = normalize_zroottwo(x)
    assert 1 <= float(n) < float(LAMBDA) + 1e-9
    assert x.divides(n) and n.divides(x)


@given(zroottwos, zroottwos)
def test_zroottwo_gcd_divides(x, y):
    if not x and not y:
        return
    g = zroottwo_gcd(x, y)
    assert g.divides(x) and g.divides(y)


def test_exact_division_rejects_non_divisors():
    assert ZRootTwo(3, 0).exact_div(ZRootTwo(2, 0)) is None
    assert ZOmega(1).exact_div(ZOmega(1, 1, 0, 0)) is None
    assert ZRootTwo(2, 0).exact_div(ZRootTwo(0, 1)) == ZRootTwo(0, 1)
