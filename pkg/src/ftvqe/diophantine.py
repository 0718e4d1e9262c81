"""Norm equation t^dagger t = xi over Z[omega], plus the number theory it needs.

The solver is sound but incomplete: a returned ``t`` always satisfies the
equation exactly, while ``None`` only means the factoring budget ran out or
xi has no solution.
"""

from __future__ import annotations

import math
import random
from functools import lru_cache

from .rings import (
    IMAG,
    LAMBDA,
    LAMBDA_INV,
    LOG_LAMBDA,
    ROOT_MINUS2,
    ZOmega,
    ZRootTwo,
    zomega_gcd,
    zroottwo_gcd,
)

TRIAL_LIMIT = 100_000
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


@lru_cache(maxsize=1)
def small_primes() -> tuple[int, ...]:
    sieve = bytearray([1]) * (TRIAL_LIMIT + 1)
    sieve[0:2] = b"\x00\x00"
    for i in range(2, int(TRIAL_LIMIT**0.5) + 1):
        if sieve[i]:
            sieve[i * i :: i] = bytearray(len(range(i * i, TRIAL_LIMIT + 1, i)))
    return tuple(i for i, v in enumerate(sieve) if v)


@lru_cache(maxsize=1)
def _primorial() -> int:
    return math.prod(small_primes())


def is_probable_prime(n: int) -> bool:
    """Miller-Rabin with fixed bases (deterministic below 3.3e24)."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_brent(n: int, rng: random.Random, max_steps: int) -> int | None:
    if n % 2 == 0:
        return 2
    y, c, m = rng.randrange(1, n), rng.randrange(1, n), 64
    g = r = q = 1
    x = ys = y
    steps = 0
    while g == 1:
        x = y
        for _ in range(r):
            y = (y * y + c) % n
        k = 0
        while k < r and g == 1:
            ys = y
            for _ in range(min(m, r - k)):
                y = (y * y + c) % n
                q = q * abs(x - y) % n
            g = math.gcd(q, n)
            k += m
        r *= 2
        steps += r
        if steps > max_steps:
            return None
    if g == n:
        while True:
            ys = (ys * ys + c) % n
            g = math.gcd(abs(x - ys), n)
            if g > 1:
                break
    return g if g != n else None


def trial_divide(n: int) -> tuple[dict[int, int], int]:
    """Strip prime factors below TRIAL_LIMIT; return (factors, cofactor)."""
    factors: dict[int, int] = {}
    g = math.gcd(n, _primorial())
    if g > 1:
        for p in small_primes():
            if p > g:
                break
            if g % p == 0:
                g //= p
                while n % p == 0:
                    n //= p
                    factors[p] = factors.get(p, 0) + 1
    return factors, n


def factorize(
    n: int, rng: random.Random, attempts: int = 64, steps_per_attempt: int = 2048
) -> dict[int, int] | None:
    """Prime factorization of n > 0, or None if the budget is exhausted.

    One attempt is one Pollard-Brent run with a fresh random polynomial.
    """
    if n < 1:
        raise ValueError("factorize expects a positive integer")
    factors, m = trial_divide(n)
    rest = _split_cofactor(m, rng, attempts, steps_per_attempt)
    if rest is None:
        return None
    for p, e in rest.items():
        factors[p] = factors.get(p, 0) + e
    return factors


def _split_cofactor(
    n: int, rng: random.Random, attempts: int, steps_per_attempt: int
) -> dict[int, int] | None:
    factors: dict[int, int] = {}
    stack = [n] if n > 1 else []
    budget = attempts
    while stack:
        m = stack.pop()
        if is_probable_prime(m):
            factors[m] = factors.get(m, 0) + 1
            continue
        r = math.isqrt(m)
        if r * r == m:
            stack.extend((r, r))
            continue
        d = None
        while d is None:
            if budget <= 0:
                return None
            budget -= 1
            d = _pollard_brent(m, rng, steps_per_attempt)
        stack.extend((d, m // d))
    return factors


def _has_odd_seven(factors: dict[int, int]) -> bool:
    return any(p % 8 == 7 and e % 2 for p, e in factors.items())


def sqrt_mod(a: int, p: int, rng: random.Random) -> int:
    """Tonelli-Shanks: x with x^2 = a (mod p) for an odd prime p."""
    a %= p
    if a == 0:
        return 0
    if pow(a, (p - 1) // 2, p) != 1:
        raise ValueError(f"{a} is not a quadratic residue mod {p}")
    if p % 4 == 3:
        return pow(a, (p + 1) // 4, p)
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = rng.randrange(2, p)
    while pow(z, (p - 1) // 2, p) != p - 1:
        z = rng.randrange(2, p)
    m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c, t, r = i, b * b % p, t * b * b % p, r * b % p
    return r


def _valuation(x: ZRootTwo, eta: ZRootTwo) -> tuple[int, ZRootTwo]:
    v = 0
    while True:
        q = x.exact_div(eta)
        if q is None:
            return v, x
        x, v = q, v + 1


def _lambda_power(n: int) -> ZOmega:
    return (LAMBDA**n if n >= 0 else LAMBDA_INV ** (-n)).to_zomega()


def solve_norm_equation(
    xi: ZRootTwo,
    rng: random.Random | None = None,
    attempts: int = 64,
    steps_per_attempt: int = 2048,
) -> ZOmega | None:
    """Find t in Z[omega] with t^dagger * t == xi, or None on failure."""
    xi = ZRootTwo.coerce(xi)
    if not xi.is_doubly_positive():
        raise ValueError("xi must satisfy xi >= 0 and conj(xi) >= 0")
    if not xi:
        return ZOmega(0)
    rng = rng or random.Random(0)
    # primes 7 mod 8 must divide N(xi) to an even power; screen before any
    # expensive factoring work
    fac, m = trial_divide(xi.norm())
    if _has_odd_seven(fac):
        return None
    if m > 1:
        if is_probable_prime(m):
            if m % 8 == 7:
                return None
            rest = {m: 1}
        else:
            rest = _split_cofactor(m, rng, attempts, steps_per_attempt)
            if rest is None or _has_odd_seven(rest):
                return None
        for p, e in rest.items():
            fac[p] = fac.get(p, 0) + e

    t = ZOmega(1)
    rest = xi
    for p, e in sorted(fac.items()):
        r = p % 8
        if p == 2:
            v, rest = _valuation(rest, ZRootTwo(0, 1))
            # (1 + omega)^dagger (1 + omega) = sqrt2 * lambda
            t = t * ZOmega(1, 1, 0, 0) ** v
        elif r in (3, 5):
            half = e // 2
            q = rest.exact_div(ZRootTwo(p**half, 0))
            if q is None:
                return None
            rest = q
            if r == 5:
                s = sqrt_mod(-1, p, rng)
                tp = zomega_gcd(ZOmega(p), ZOmega(s) + IMAG)
            else:
                s = sqrt_mod(-2, p, rng)
                tp = zomega_gcd(ZOmega(p), ZOmega(s) + ROOT_MINUS2)
            t = t * tp**half
        else:
            s = sqrt_mod(2, p, rng)
            eta = zroottwo_gcd(ZRootTwo(p, 0), ZRootTwo(s, 1))
            if abs(eta.norm()) != p:
                return None
            for prime in (eta, eta.conj()):
                v, rest = _valuation(rest, prime)
                if v == 0:
                    continue
                if r == 7:
                    if v % 2:
                        return None
                    t = t * prime.to_zomega() ** (v // 2)
                else:
                    s2 = sqrt_mod(-1, p, rng)
                    tp = zomega_gcd(prime.to_zomega(), ZOmega(s2) + IMAG)
                    t = t * tp**v
    # fix the leftover doubly-positive unit lambda^(2j)
    got = t.abs2()
    unit = xi.exact_div(got)
    if unit is None or abs(unit.norm()) != 1 or not unit.is_doubly_positive():
        return None
    j = round(math.log(float(unit)) / (2 * LOG_LAMBDA)) if float(unit) > 0 else 0
    t = t * _lambda_power(j)
    if t.abs2() != xi:
        return None
    return t


__all__ = [
    "factorize",
    "is_probable_prime",
    "solve_norm_equation",
    "sqrt_mod",
    "trial_divide",
]
