"""Exact arithmetic in Z[sqrt2], Z[omega] and the dyadic ring D[omega].

omega = exp(i*pi/4).  Elements are immutable; coefficients are Python ints so
they never overflow.
"""

from __future__ import annotations

import math
from typing import Iterator, Union

import mpmath

SQRT2 = math.sqrt(2.0)
IntLike = Union[int, "ZRootTwo", "ZOmega"]


class ZRootTwo:
    """p + q*sqrt2 with integer p, q."""

    __slots__ = ("p", "q")

    def __init__(self, p: int = 0, q: int = 0) -> None:
        self.p = p
        self.q = q

    @classmethod
    def coerce(cls, x) -> ZRootTwo:
        if isinstance(x, ZRootTwo):
            return x
        if isinstance(x, int):
            return cls(x, 0)
        raise TypeError(f"cannot coerce {type(x).__name__} to ZRootTwo")

    def __repr__(self) -> str:
        return f"ZRootTwo({self.p}, {self.q})"

    def __str__(self) -> str:
        return f"{self.p}{self.q:+}√2"

    def __eq__(self, other: object) -> bool:
        if isinstance(other, int):
            return self.q == 0 and self.p == other
        if isinstance(other, ZRootTwo):
            return self.p == other.p and self.q == other.q
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.p, self.q))

    def __bool__(self) -> bool:
        return bool(self.p or self.q)

    def __add__(self, other) -> ZRootTwo:
        if isinstance(other, int):
            return ZRootTwo(self.p + other, self.q)
        if isinstance(other, ZRootTwo):
            return ZRootTwo(self.p + other.p, self.q + other.q)
        return NotImplemented

    __radd__ = __add__

    def __neg__(self) -> ZRootTwo:
        return ZRootTwo(-self.p, -self.q)

    def __sub__(self, other) -> ZRootTwo:
        if isinstance(other, (int, ZRootTwo)):
            return self + (-other)
        return NotImplemented

    def __rsub__(self, other) -> ZRootTwo:
        return (-self) + other

    def __mul__(self, other) -> ZRootTwo:
        if isinstance(other, int):
            return ZRootTwo(self.p * other, self.q * other)
        if isinstance(other, ZRootTwo):
            return ZRootTwo(
                self.p * other.p + 2 * self.q * other.q,
                self.p * other.q + self.q * other.p,
            )
        return NotImplemented

    __rmul__ = __mul__

    def __pow__(self, n: int) -> ZRootTwo:
        if n < 0:
            return self.unit_inverse() ** (-n)
        result, base = ZRootTwo(1, 0), self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def conj(self) -> ZRootTwo:
        """The sqrt2-conjugate p - q*sqrt2."""
        return ZRootTwo(self.p, -self.q)

    def norm(self) -> int:
        """N(x) = x * conj(x) = p^2 - 2 q^2 (multiplicative)."""
        return self.p * self.p - 2 * self.q * self.q

    def unit_inverse(self) -> ZRootTwo:
        n = self.norm()
        if n == 1:
            return self.conj()
        if n == -1:
            return -self.conj()
        raise ZeroDivisionError(f"{self} is not a unit")

    def __float__(self) -> float:
        return self.p + self.q * SQRT2

    def to_mpf(self):
        return self.p + self.q * mpmath.sqrt(2)

    def sign(self) -> int:
        """Exact sign of the real value p + q*sqrt2."""
        p, q = self.p, self.q
        if p >= 0 and q >= 0:
            return 0 if p == 0 and q == 0 else 1
        if p <= 0 and q <= 0:
            return -1
        # opposite signs: compare p^2 with 2 q^2
        if p > 0:
            return 1 if p * p > 2 * q * q else -1
        return 1 if 2 * q * q > p * p else -1

    def __lt__(self, other) -> bool:
        return (self - ZRootTwo.coerce(other)).sign() < 0

    def __le__(self, other) -> bool:
        return (self - ZRootTwo.coerce(other)).sign() <= 0

    def __gt__(self, other) -> bool:
        return (self - ZRootTwo.coerce(other)).sign() > 0

    def __ge__(self, other) -> bool:
        return (self - ZRootTwo.coerce(other)).sign() >= 0

    def is_doubly_positive(self) -> bool:
        """x >= 0 and conj(x) >= 0."""
        return self.sign() >= 0 and self.conj().sign() >= 0

    def divmod(self, other: ZRootTwo) -> tuple[ZRootTwo, ZRootTwo]:
        """Euclidean division with |N(r)| < |N(other)|."""
        other = ZRootTwo.coerce(other)
        n = other.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero in Z[sqrt2]")
        num = self * other.conj()
        q = ZRootTwo(_round_div(num.p, n), _round_div(num.q, n))
        return q, self - q * other

    def exact_div(self, other) -> ZRootTwo | None:
        """self / other if the quotient lies in Z[sqrt2], else None."""
        other = ZRootTwo.coerce(other)
        n = other.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero in Z[sqrt2]")
        num = self * other.conj()
        if num.p % n or num.q % n:
            return None
        return ZRootTwo(num.p // n, num.q // n)

    def divides(self, other) -> bool:
        if not self:
            return not ZRootTwo.coerce(other)
        return ZRootTwo.coerce(other).exact_div(self) is not None

    def to_zomega(self) -> ZOmega:
        # sqrt2 = omega - omega^3
        return ZOmega(self.p, self.q, 0, -self.q)


def _round_div(a: int, b: int) -> int:
    """Nearest integer to a / b (ties toward +inf), exact for big ints."""
    if b < 0:
        a, b = -a, -b
    return (2 * a + b) // (2 * b)


LAMBDA = ZRootTwo(1, 1)
LAMBDA_INV = ZRootTwo(-1, 1)
LOG_LAMBDA = math.log(1.0 + SQRT2)


def normalize_zroottwo(x: ZRootTwo) -> ZRootTwo:
    """Associate of x (times +-lambda^n) whose value lies in [1, lambda).

    Zero is returned unchanged.
    """
    if not x:
        return x
    if x.sign() < 0:
        x = -x
    v = abs(x.p + x.q * SQRT2)
    if v > 0 and math.isfinite(v):
        n = math.floor(-math.log(v) / LOG_LAMBDA)
    else:
        n = 0
    x = x * LAMBDA**n
    while x < 1:
        x = x * LAMBDA
    while x >= LAMBDA:
        x = x * LAMBDA_INV
    return x


def zroottwo_gcd(x: ZRootTwo, y: ZRootTwo) -> ZRootTwo:
    x, y = ZRootTwo.coerce(x), ZRootTwo.coerce(y)
    if not x and not y:
        raise ValueError("gcd of two zeros is undefined")
    while y:
        _, r = x.divmod(y)
        x, y = y, r
    return normalize_zroottwo(x)


class ZOmega:
    """a + b*omega + c*omega^2 + d*omega^3 with omega^4 = -1."""

    __slots__ = ("a", "b", "c", "d")

    def __init__(self, a: int = 0, b: int = 0, c: int = 0, d: int = 0) -> None:
        self.a = a
        self.b = b
        self.c = c
        self.d = d

    @classmethod
    def coerce(cls, x) -> ZOmega:
        if isinstance(x, ZOmega):
            return x
        if isinstance(x, int):
            return cls(x, 0, 0, 0)
        if isinstance(x, ZRootTwo):
            return x.to_zomega()
        raise TypeError(f"cannot coerce {type(x).__name__} to ZOmega")

    @property
    def coeffs(self) -> tuple[int, int, int, int]:
        return (self.a, self.b, self.c, self.d)

    def __repr__(self) -> str:
        return f"ZOmega({self.a}, {self.b}, {self.c}, {self.d})"

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, ZRootTwo)):
            other = ZOmega.coerce(other)
        if isinstance(other, ZOmega):
            return (
                self.a == other.a
                and self.b == other.b
                and self.c == other.c
                and self.d == other.d
            )
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.a, self.b, self.c, self.d))

    def __bool__(self) -> bool:
        return bool(self.a or self.b or self.c or self.d)

    def __add__(self, other) -> ZOmega:
        if not isinstance(other, ZOmega):
            try:
                other = ZOmega.coerce(other)
            except TypeError:
                return NotImplemented
        return ZOmega(self.a + other.a, self.b + other.b, self.c + other.c, self.d + other.d)

    __radd__ = __add__

    def __neg__(self) -> ZOmega:
        return ZOmega(-self.a, -self.b, -self.c, -self.d)

    def __sub__(self, other) -> ZOmega:
        if not isinstance(other, ZOmega):
            try:
                other = ZOmega.coerce(other)
            except TypeError:
                return NotImplemented
        return ZOmega(self.a - other.a, self.b - other.b, self.c - other.c, self.d - other.d)

    def __rsub__(self, other) -> ZOmega:
        return (-self) + other

    def __mul__(self, other) -> ZOmega:
        if isinstance(other, int):
            return ZOmega(self.a * other, self.b * other, self.c * other, self.d * other)
        if not isinstance(other, ZOmega):
            try:
                other = ZOmega.coerce(other)
            except TypeError:
                return NotImplemented
        a, b, c, d = self.a, self.b, self.c, self.d
        e, f, g, h = other.a, other.b, other.c, other.d
        return ZOmega(
            a * e - b * h - c * g - d * f,
            a * f + b * e - c * h - d * g,
            a * g + b * f + c * e - d * h,
            a * h + b * g + c * f + d * e,
        )

    __rmul__ = __mul__

    def __pow__(self, n: int) -> ZOmega:
        if n < 0:
            raise ValueError("negative powers are not defined in Z[omega]")
        result, base = ZOmega(1), self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def adj(self) -> ZOmega:
        """Complex conjugate (omega -> omega^7)."""
        return ZOmega(self.a, -self.d, -self.c, -self.b)

    def conj2(self) -> ZOmega:
        """sqrt2-conjugate (omega -> -omega)."""
        return ZOmega(self.a, -self.b, self.c, -self.d)

    def mul_omega(self, j: int = 1) -> ZOmega:
        """self * omega^j, a coefficient rotation."""
        x = self
        for _ in range(j % 8):
            x = ZOmega(-x.d, x.a, x.b, x.c)
        return x

    def abs2(self) -> ZRootTwo:
        """self^dagger * self as an element of Z[sqrt2]."""
        a, b, c, d = self.a, self.b, self.c, self.d
        # real part a^2+b^2+c^2+d^2, sqrt2 part from cross terms
        return ZRootTwo(a * a + b * b + c * c + d * d, a * b + b * c + c * d - d * a)

    def norm(self) -> int:
        """Absolute norm to Z, always >= 0."""
        return self.abs2().norm()

    def real_zroottwo(self) -> ZRootTwo | None:
        """The element as ZRootTwo if it is real and in Z[sqrt2]."""
        if self.c == 0 and self.b == -self.d:
            return ZRootTwo(self.a, self.b)
        return None

    def to_complex(self) -> complex:
        re = self.a + (self.b - self.d) / SQRT2
        im = self.c + (self.b + self.d) / SQRT2
        return complex(re, im)

    def to_mpc(self):
        r = 1 / mpmath.sqrt(2)
        return mpmath.mpc(self.a + (self.b - self.d) * r, self.c + (self.b + self.d) * r)

    def __complex__(self) -> complex:
        return self.to_complex()

    def divisible_by_sqrt2(self) -> bool:
        # z / sqrt2 = z * (omega - omega^3) / 2
        return (self.b - self.d) % 2 == 0 and (self.a - self.c) % 2 == 0 and (self.a + self.c) % 2 == 0 and (self.b + self.d) % 2 == 0

    def div_sqrt2(self) -> ZOmega:
        a, b, c, d = self.a, self.b, self.c, self.d
        # z * (omega - omega^3) = (b - d) + (a + c) w + (b + d) w^2 + (c - a) w^3
        return ZOmega((b - d) // 2, (a + c) // 2, (b + d) // 2, (c - a) // 2)

    def mul_sqrt2(self) -> ZOmega:
        a, b, c, d = self.a, self.b, self.c, self.d
        return ZOmega(b - d, a + c, b + d, c - a)

    def divmod(self, other: ZOmega) -> tuple[ZOmega, ZOmega]:
        """Euclidean division: returns (q, r) with N(r) < N(other)."""
        other = ZOmega.coerce(other)
        a2 = other.abs2()
        n = a2.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero in Z[omega]")
        # 1/y = y^dagger * conj2(y^dagger y) / N
        num = self * other.adj() * a2.conj().to_zomega()
        q = ZOmega(*(_round_div(x, n) for x in num.coeffs))
        r = self - q * other
        target = other.norm()
        if r.norm() < target:
            return q, r
        # rounding in the power basis can miss; search the neighbouring lattice points
        best = (r.norm(), q, r)
        for shift in _UNIT_SHIFTS:
            q2 = q + shift
            r2 = self - q2 * other
            nr = r2.norm()
            if nr < best[0]:
                best = (nr, q2, r2)
        if best[0] >= target:
            raise ArithmeticError("Euclidean division failed to reduce the norm")
        return best[1], best[2]

    def exact_div(self, other) -> ZOmega | None:
        other = ZOmega.coerce(other)
        a2 = other.abs2()
        n = a2.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero in Z[omega]")
        num = self * other.adj() * a2.conj().to_zomega()
        if any(x % n for x in num.coeffs):
            return None
        return ZOmega(*(x // n for x in num.coeffs))

    def divides(self, other) -> bool:
        other = ZOmega.coerce(other)
        if not self:
            return not other
        return other.exact_div(self) is not None


def _unit_shifts() -> list[ZOmega]:
    out = []
    for i in range(4):
        for s in (1, -1):
            c = [0, 0, 0, 0]
            c[i] = s
            out.append(ZOmega(*c))
    return out


_UNIT_SHIFTS = _unit_shifts()
OMEGA = ZOmega(0, 1, 0, 0)
ROOT2 = ZOmega(0, 1, 0, -1)
ROOT_MINUS2 = ZOmega(0, 1, 0, 1)
IMAG = ZOmega(0, 0, 1, 0)


def normalize_zomega(x: ZOmega) -> ZOmega:
    """Canonical associate up to units omega^j * lambda^n.

    The lambda exponent is fixed by putting |x|^2 in [1, lambda^2); the omega
    power by choosing the lexicographically largest coefficient tuple.
    """
    if not x:
        return x
    a2 = x.abs2()
    v = float(a2)
    n = math.floor(-math.log(v) / (2 * LOG_LAMBDA)) if v > 0 and math.isfinite(v) else 0
    lam = (LAMBDA**n).to_zomega() if n >= 0 else (LAMBDA_INV ** (-n)).to_zomega()
    y = x * lam
    while y.abs2() < 1:
        y = y * LAMBDA.to_zomega()
    while y.abs2() >= LAMBDA * LAMBDA:
        y = y * LAMBDA_INV.to_zomega()
    return max((y.mul_omega(j) for j in range(8)), key=lambda z: z.coeffs)


def zomega_gcd(x, y) -> ZOmega:
    """Greatest common divisor in the Euclidean ring Z[omega], up to units."""
    x, y = ZOmega.coerce(x), ZOmega.coerce(y)
    if not x and not y:
        raise ValueError("gcd of two zeros is undefined")
    while y:
        _, r = x.divmod(y)
        x, y = y, r
    return normalize_zomega(x)


class DOmega:
    """z / sqrt2^k with z in Z[omega], k >= 0, stored with k minimal."""

    __slots__ = ("z", "k")

    def __init__(self, z, k: int = 0) -> None:
        z = ZOmega.coerce(z)
        if k < 0:
            for _ in range(-k):
                z = z.mul_sqrt2()
            k = 0
        while k > 0 and z.divisible_by_sqrt2() and z:
            z = z.div_sqrt2()
            k -= 1
        if not z:
            k = 0
        self.z = z
        self.k = k

    def __repr__(self) -> str:
        return f"DOmega({self.z!r}, {self.k})"

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, ZOmega, ZRootTwo)):
            other = DOmega(other)
        if isinstance(other, DOmega):
            return self.k == other.k and self.z == other.z
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.z, self.k))

    def _lift(self, k: int) -> ZOmega:
        z = self.z
        for _ in range(k - self.k):
            z = z.mul_sqrt2()
        return z

    def __add__(self, other) -> DOmega:
        if not isinstance(other, DOmega):
            other = DOmega(other)
        k = max(self.k, other.k)
        return DOmega(self._lift(k) + other._lift(k), k)

    __radd__ = __add__

    def __neg__(self) -> DOmega:
        return DOmega(-self.z, self.k)

    def __sub__(self, other) -> DOmega:
        if not isinstance(other, DOmega):
            other = DOmega(other)
        return self + (-other)

    def __mul__(self, other) -> DOmega:
        if not isinstance(other, DOmega):
            other = DOmega(other)
        return DOmega(self.z * other.z, self.k + other.k)

    __rmul__ = __mul__

    def adj(self) -> DOmega:
        return DOmega(self.z.adj(), self.k)

    def conj2(self) -> DOmega:
        # sqrt2 -> -sqrt2 flips the sign of odd denominators
        z = self.z.conj2()
        return DOmega(-z if self.k % 2 else z, self.k)

    def to_complex(self) -> complex:
        return self.z.to_complex() / SQRT2**self.k

    def to_mpc(self):
        return self.z.to_mpc() / mpmath.sqrt(2) ** self.k


def sde(x: DOmega) -> int:
    """Smallest k with sqrt2^k * x in Z[omega]."""
    if not isinstance(x, DOmega):
        x = DOmega(x)
    return x.k


def sde_abs2(z: ZOmega, k: int) -> int:
    """sde of |z / sqrt2^k|^2, the quantity driven down by exact synthesis."""
    a2 = z.abs2()
    kk = 2 * k
    # sqrt2 | p + q sqrt2 iff p even; then (p + q sqrt2)/sqrt2 = q + (p/2) sqrt2
    p, q = a2.p, a2.q
    if p == 0 and q == 0:
        return 0
    while kk > 0 and p % 2 == 0:
        p, q = q, p // 2
        kk -= 1
    return kk


class UnitaryDOmega:
    """2x2 matrix [[a, b], [c, d]] / sqrt2^k over Z[omega], k minimal.

    The global phase is part of the entries (a global omega^w multiplies all
    four), so two instances compare equal exactly when the matrices do.
    """

    __slots__ = ("a", "b", "c", "d", "k")

    def __init__(self, a, b, c, d, k: int = 0) -> None:
        a, b, c, d = (ZOmega.coerce(x) for x in (a, b, c, d))
        while k > 0 and all(x.divisible_by_sqrt2() for x in (a, b, c, d)):
            a, b, c, d = a.div_sqrt2(), b.div_sqrt2(), c.div_sqrt2(), d.div_sqrt2()
            k -= 1
        self.a, self.b, self.c, self.d, self.k = a, b, c, d, k

    @classmethod
    def identity(cls) -> UnitaryDOmega:
        return cls(1, 0, 0, 1, 0)

    def key(self) -> tuple:
        return (self.a.coeffs, self.b.coeffs, self.c.coeffs, self.d.coeffs, self.k)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, UnitaryDOmega):
            return NotImplemented
        return self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())

    def __repr__(self) -> str:
        return f"UnitaryDOmega({self.a!r}, {self.b!r}, {self.c!r}, {self.d!r}, k={self.k})"

    def __matmul__(self, o: UnitaryDOmega) -> UnitaryDOmega:
        return UnitaryDOmega(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
            self.k + o.k,
        )

    def adj(self) -> UnitaryDOmega:
        return UnitaryDOmega(self.a.adj(), self.c.adj(), self.b.adj(), self.d.adj(), self.k)

    def entries(self) -> Iterator[DOmega]:
        for z in (self.a, self.b, self.c, self.d):
            yield DOmega(z, self.k)

    def is_unitary(self) -> bool:
        p = self.adj() @ self
        return p.k == 0 and p.a == 1 and p.d == 1 and not p.b and not p.c

    def phase_exponent(self) -> int | None:
        """w with det = omega^w, or None if det is not a power of omega."""
        det = DOmega(self.a * self.d - self.b * self.c, 2 * self.k)
        if det.k != 0:
            return None
        for w in range(8):
            if det.z == OMEGA**w:
                return w
        return None

    def to_numpy(self):
        import numpy as np

        s = SQRT2**self.k
        return np.array(
            [[self.a.to_complex(), self.b.to_complex()], [self.c.to_complex(), self.d.to_complex()]]
        ) / s

    def to_mpmath(self):
        s = mpmath.sqrt(2) ** self.k
        return mpmath.matrix(
            [[self.a.to_mpc() / s, self.b.to_mpc() / s], [self.c.to_mpc() / s, self.d.to_mpc() / s]]
        )
