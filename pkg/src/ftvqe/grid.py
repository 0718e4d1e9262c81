"""Grid problems: lattice points of Z[sqrt2] and Z[omega] in convex regions.

``grid_points_1d`` solves the one-dimensional problem
{alpha in Z[sqrt2] : alpha in I, conj(alpha) in J}.  Candidate values u for the
top-left entry of an approximating unitary are found two ways:

* ``enumerate_u_candidates`` couples two 1-D problems (imaginary part outer,
  real part inner) over the disk region |u - target| <= eps;
* ``CapLattice`` enumerates the thin epsilon-cap directly as points of a
  4-dimensional lattice after LLL reduction, which keeps the work per
  denominator exponent independent of eps.
"""

from __future__ import annotations

import math
from typing import Iterator, Sequence

import mpmath

from .rings import LAMBDA, LAMBDA_INV, LOG_LAMBDA, DOmega, ZOmega, ZRootTwo


def _interval(iv) -> tuple:
    lo, hi = (mpmath.mpf(x) for x in iv)
    if lo > hi:
        raise ValueError(f"empty interval [{lo}, {hi}]")
    return lo, hi


def grid_points_1d(I: Sequence, J: Sequence) -> list[ZRootTwo]:
    """All alpha = p + q*sqrt2 with alpha in I and conj(alpha) in J."""
    return list(iter_grid_points_1d(I, J))


def iter_grid_points_1d(I: Sequence, J: Sequence) -> Iterator[ZRootTwo]:
    """Lazy form of ``grid_points_1d``.

    I is rescaled by lambda^m (lambda = 1 + sqrt2) so that its width lies in
    [1, lambda); J is multiplied by conj(lambda)^m = (-1/lambda)^m at the same
    time.  The number of integer q to scan is then O(1 + |I| |J|).
    """
    ilo, ihi = _interval(I)
    jlo, jhi = _interval(J)
    wi = ihi - ilo
    if wi == 0:
        if jhi - jlo == 0:
            yield from _point_point(ilo, jlo)
        else:
            yield from (a.conj() for a in iter_grid_points_1d((jlo, jhi), (ilo, ihi)))
        return
    m = math.ceil(-float(mpmath.log(wi)) / LOG_LAMBDA)
    lam = LAMBDA.to_mpf()
    while lam**m * wi < 1:
        m += 1
    while lam**m * wi >= lam:
        m -= 1
    scale = lam**m
    a_lo, a_hi = ilo * scale, ihi * scale
    cscale = lam ** (-m)
    if m % 2:
        b_lo, b_hi = -jhi * cscale, -jlo * cscale
    else:
        b_lo, b_hi = jlo * cscale, jhi * cscale
    back = LAMBDA_INV**m if m >= 0 else LAMBDA ** (-m)
    r2 = mpmath.sqrt(2)
    # rounding in the rescaling can push boundary points out; scan with slack
    # and re-check against the original intervals
    slack = mpmath.mpf(2) ** (16 - mpmath.mp.prec)
    a_lo, a_hi = a_lo - slack, a_hi + slack
    b_lo, b_hi = b_lo - slack, b_hi + slack
    q_lo = int(mpmath.ceil((a_lo - b_hi) / (2 * r2)))
    q_hi = int(mpmath.floor((a_hi - b_lo) / (2 * r2)))
    for q in range(q_lo, q_hi + 1):
        qr = q * r2
        p_lo = int(mpmath.ceil(max(a_lo - qr, b_lo + qr)))
        p_hi = int(mpmath.floor(min(a_hi - qr, b_hi + qr)))
        for p in range(p_lo, p_hi + 1):
            alpha = ZRootTwo(p, q) * back
            if _within(alpha, ilo, ihi) and _within(alpha.conj(), jlo, jhi):
                yield alpha


def _within(alpha: ZRootTwo, lo, hi) -> bool:
    # endpoints are exact binary numbers; alpha is either an integer (exact)
    # or irrational, so guard digits beyond its own size settle the comparison
    if alpha.q == 0:
        return lo <= alpha.p <= hi
    bits = max(abs(alpha.p), abs(alpha.q), 1).bit_length()
    with mpmath.workprec(mpmath.mp.prec + 2 * bits + 64):
        x = alpha.p + alpha.q * mpmath.sqrt(2)
        return lo <= x <= hi


def _point_point(x, y) -> list[ZRootTwo]:
    p = (x + y) / 2
    q = (x - y) / (2 * mpmath.sqrt(2))
    pi, qi = int(mpmath.nint(p)), int(mpmath.nint(q))
    tol = mpmath.mpf(2) ** (-mpmath.mp.prec // 2)
    if abs(p - pi) < tol and abs(q - qi) < tol:
        return [ZRootTwo(pi, qi)]
    return []


def zomega_from_xy(x: ZRootTwo, y: ZRootTwo) -> ZOmega:
    """z with sqrt2*z = x + i*y (requires x.p = y.p mod 2)."""
    return ZOmega(x.q, (x.p + y.p) // 2, y.q, (y.p - x.p) // 2)


def _parity_problem(I, J, parity: int) -> Iterator[ZRootTwo]:
    """x in Z[sqrt2] with x.p = parity (mod 2), x in I, conj(x) in J."""
    r2 = mpmath.sqrt(2)
    # x = parity + sqrt2 * w ; conj(x) = parity - sqrt2 * conj(w)
    iw = ((I[0] - parity) / r2, (I[1] - parity) / r2)
    jw = ((parity - J[1]) / r2, (parity - J[0]) / r2)
    for w in iter_grid_points_1d(iw, jw):
        yield ZRootTwo(parity + 2 * w.q, w.p)


def _working_dps(eps, k: int) -> int:
    e = float(eps)
    digits = -math.log10(e) if e > 0 else 30
    return int(2 * digits + k * 0.16 + 30)


def enumerate_u_candidates(theta, eps, k: int) -> list[DOmega]:
    """Every u with sqrt2^k u in Z[omega], |u| <= 1, |conj(u)| <= 1 and
    |u - exp(-i theta/2)| <= eps, ordered by distance to the target.
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    with mpmath.workdps(_working_dps(eps, k)):
        eps = mpmath.mpf(eps)
        theta = mpmath.mpf(theta)
        x0, y0 = mpmath.cos(theta / 2), -mpmath.sin(theta / 2)
        s = mpmath.sqrt(2) ** (k + 1)
        ylo, yhi = max(y0 - eps, -1), min(y0 + eps, 1)
        found: dict[tuple, tuple] = {}
        if ylo > yhi:
            return []
        # intervals are padded against rounding; the final filters are exact
        tiny = mpmath.mpf(10) ** (-mpmath.mp.dps + 8)
        pad = tiny * s
        for Y in iter_grid_points_1d((s * ylo - pad, s * yhi + pad), (-s - pad, s + pad)):
            y = Y.to_mpf() / s
            dy = eps**2 - (y - y0) ** 2
            cy = 1 - y * y
            if dy < -tiny or cy < -tiny:
                continue
            rd, rc = mpmath.sqrt(max(dy, 0)), mpmath.sqrt(max(cy, 0))
            xlo, xhi = max(x0 - rd, -rc), min(x0 + rd, rc)
            if xlo > xhi + tiny:
                continue
            yc = Y.conj().to_mpf()
            cr = s * s - yc * yc
            if cr < -tiny * s * s:
                continue
            cr = mpmath.sqrt(max(cr, 0))
            for X in _parity_problem((s * xlo - pad, s * xhi + pad), (-cr - pad, cr + pad), Y.p % 2):
                z = zomega_from_xy(X, Y)
                if not _inside_unit_pair(z, k):
                    continue
                u = z.to_mpc() / mpmath.sqrt(2) ** k
                dist = abs(u - mpmath.mpc(x0, y0))
                if dist <= eps:
                    found[z.coeffs] = (dist, z)
        ordered = sorted(found.values(), key=lambda t: (t[0], t[1].coeffs))
        return [DOmega(z, k) for _, z in ordered]


def _inside_unit_pair(z: ZOmega, k: int) -> bool:
    """Exact test of |u| <= 1 and |conj(u)| <= 1 for u = z / sqrt2^k."""
    xi = ZRootTwo(1 << k, 0) - z.abs2()
    return xi.is_doubly_positive()


# ---------------------------------------------------------------------------
# lattice enumeration of the epsilon-cap


def lll_reduce(basis: list[list], delta: float = 0.99) -> tuple[list[list], list[list[int]]]:
    """LLL-reduce column vectors; returns (reduced, U) with reduced = basis @ U.

    ``basis`` is a list of n column vectors (lists of mpf).  U is integral and
    unimodular, kept as a list of integer columns.
    """
    n = len(basis)
    b = [list(v) for v in basis]
    u = [[int(i == j) for i in range(n)] for j in range(n)]

    def dot(x, y):
        return sum(xi * yi for xi, yi in zip(x, y))

    def gram_schmidt():
        bstar, mu, bnorm = [], [[mpmath.mpf(0)] * n for _ in range(n)], []
        for i in range(n):
            v = list(b[i])
            for j in range(i):
                mu[i][j] = dot(b[i], bstar[j]) / bnorm[j]
                v = [vi - mu[i][j] * wj for vi, wj in zip(v, bstar[j])]
            bstar.append(v)
            bnorm.append(dot(v, v))
        return mu, bnorm

    mu, bnorm = gram_schmidt()
    k = 1
    guard = 0
    while k < n:
        guard += 1
        if guard > 100_000:
            raise ArithmeticError("LLL did not terminate")
        for j in range(k - 1, -1, -1):
            r = int(mpmath.nint(mu[k][j]))
            if r:
                b[k] = [x - r * y for x, y in zip(b[k], b[j])]
                u[k] = [x - r * y for x, y in zip(u[k], u[j])]
                for i in range(j):
                    mu[k][i] -= r * mu[j][i]
                mu[k][j] -= r
        if bnorm[k] >= (delta - mu[k][k - 1] ** 2) * bnorm[k - 1]:
            k += 1
        else:
            b[k], b[k - 1] = b[k - 1], b[k]
            u[k], u[k - 1] = u[k - 1], u[k]
            mu, bnorm = gram_schmidt()
            k = max(k - 1, 1)
    return b, u


def iter_ellipsoid(basis: list[list], center: list, radius2) -> Iterator[list[int]]:
    """Integer y with ||sum_j y_j basis[j] - center||^2 <= radius2 (Fincke-Pohst).

    Points are yielded lazily in a deterministic order.
    """
    n = len(basis)

    def dot(x, y):
        return mpmath.fsum(xi * yi for xi, yi in zip(x, y))

    bstar, bnorm = [], []
    mu = [[mpmath.mpf(0)] * n for _ in range(n)]
    for i in range(n):
        v = list(basis[i])
        for j in range(i):
            mu[i][j] = dot(basis[i], bstar[j]) / bnorm[j]
            v = [vi - mu[i][j] * wj for vi, wj in zip(v, bstar[j])]
        bstar.append(v)
        bnorm.append(dot(v, v))
    # center in the Gram-Schmidt frame
    c = [dot(center, bstar[i]) / bnorm[i] for i in range(n)]
    y = [0] * n

    def rec(i: int, rem):
        ci = c[i] - mpmath.fsum(mu[j][i] * y[j] for j in range(i + 1, n))
        if rem < 0:
            return
        half = mpmath.sqrt(rem / bnorm[i])
        lo, hi = int(mpmath.ceil(ci - half)), int(mpmath.floor(ci + half))
        for v in range(lo, hi + 1):
            y[i] = v
            r2 = rem - bnorm[i] * (v - ci) ** 2
            if r2 < 0:
                continue
            if i == 0:
                yield list(y)
            else:
                yield from rec(i - 1, r2)
        y[i] = 0

    yield from rec(n - 1, mpmath.mpf(radius2))


def enumerate_ellipsoid(basis: list[list], center: list, radius2) -> list[list[int]]:
    return list(iter_ellipsoid(basis, center, radius2))


class CapLattice:
    """Enumerates u = z / sqrt2^k in the epsilon-cap of exp(-i theta/2).

    The cap {|u| <= 1, Re(u conj(target)) >= 1 - eps^2/2} is enclosed in an
    ellipse, the unit disk bounds conj(u), and together they give a
    4-dimensional ellipsoid in the coefficients (a, b, c, d) of z.  Scaling k
    shrinks the lattice uniformly, so one LLL reduction serves every k.

    When the target lies within sqrt(eps) of an axis omega^j, the cap is
    nearly parallel to a lattice direction and its points fall on sparse
    sheets that the ellipsoid scan wades through.  There the cap is rotated
    onto the real axis and scanned coordinate by coordinate instead, narrow
    real part first.
    """

    def __init__(self, theta, eps) -> None:
        self.eps = mpmath.mpf(eps)
        self.dps = _working_dps(eps, 0) + 2 * int(-math.log10(float(eps)) + 1) + 10
        with mpmath.workdps(self.dps):
            eps = mpmath.mpf(eps)
            theta = mpmath.mpf(theta)
            self.target = mpmath.mpc(mpmath.cos(theta / 2), -mpmath.sin(theta / 2))
            h = eps**2 / 2
            self.h = h
            self.min_dot = 1 - h
            psi = -theta / 2
            quarter = mpmath.pi / 4
            self.axis = int(mpmath.nint(psi / quarter))
            self.phi = psi - self.axis * quarter
            self.axis_mode = abs(self.phi) < mpmath.sqrt(eps)
            if not self.axis_mode:
                self._init_lattice(eps, h)

    def _init_lattice(self, eps, h) -> None:
        cs, sn = self.target.real, self.target.imag
        self.n0 = 1 - h / 2
        alpha = h / mpmath.sqrt(2)
        beta = mpmath.sqrt(2) * eps
        r = 1 / mpmath.sqrt(2)
        re = [1, r, 0, -r]
        im = [0, r, 1, r]
        rec = [1, -r, 0, r]
        imc = [0, -r, 1, -r]
        rows = [
            [(cs * a + sn * b) / alpha for a, b in zip(re, im)],
            [(cs * b - sn * a) / beta for a, b in zip(re, im)],
            [mpmath.mpf(x) for x in rec],
            [mpmath.mpf(x) for x in imc],
        ]
        cols = [[rows[i][j] for i in range(4)] for j in range(4)]
        # LLL only has to find the unimodular transform, so moderate
        # precision suffices; the reduced basis is then rebuilt exactly
        with mpmath.workdps(2 * int(-math.log10(float(eps)) + 1) + 20):
            _, self.unimodular = lll_reduce([[+x for x in col] for col in cols])
        self.basis = [
            [mpmath.fsum(cols[i][r] * uj[i] for i in range(4)) for r in range(4)]
            for uj in self.unimodular
        ]
        self.center = [self.n0 / alpha, mpmath.mpf(0), mpmath.mpf(0), mpmath.mpf(0)]

    def expected_count(self, k: int) -> float:
        """Approximate number of lattice points in the enclosing ellipsoid."""
        return (2.0 ** (2 * k)) * math.pi**2 * float(self.eps) ** 3 / 4

    def candidates(self, k: int, skip_divisible: bool = False, limit: int | None = None) -> list[ZOmega]:
        """Cap points at denominator exponent k, sorted by distance to target.

        ``limit`` stops the scan once that many cap points have been
        collected; a level can jump from no points to millions.
        """
        with mpmath.workdps(self.dps + k):
            raw = self._axis_points(k) if self.axis_mode else self._lattice_points(k)
            scored = []
            inv = 1 / mpmath.sqrt(2) ** k
            for z in raw:
                if skip_divisible and z.divisible_by_sqrt2():
                    continue
                if not _inside_unit_pair(z, k):
                    continue
                u = z.to_mpc() * inv
                dotp = u.real * self.target.real + u.imag * self.target.imag
                if dotp < self.min_dot:
                    continue
                scored.append((abs(u - self.target), z.coeffs, z))
                if limit is not None and len(scored) >= limit:
                    break
            scored.sort(key=lambda t: (t[0], t[1]))
            return [z for _, _, z in scored]

    def _lattice_points(self, k: int) -> Iterator[ZOmega]:
        f = mpmath.sqrt(2) ** (-k)
        basis = [[f * x for x in col] for col in self.basis]
        for y in iter_ellipsoid(basis, self.center, 2):
            yield ZOmega(*(sum(self.unimodular[j][i] * y[j] for j in range(4)) for i in range(4)))

    def _axis_points(self, k: int) -> Iterator[ZOmega]:
        # rotated target exp(i phi); sqrt2 z' = X + iY with s = sqrt2^(k+1)
        s = mpmath.sqrt(2) ** (k + 1)
        tiny = mpmath.mpf(10) ** (-mpmath.mp.dps + 8)
        pad = tiny * s
        phi = self.phi
        gam = mpmath.acos(1 - self.h)
        lo, hi = phi - gam, phi + gam
        xmin = min(mpmath.cos(lo), mpmath.cos(hi))
        xmax = 1 if lo <= 0 <= hi else max(mpmath.cos(lo), mpmath.cos(hi))
        cphi, sphi = mpmath.cos(phi), mpmath.sin(phi)
        for X in iter_grid_points_1d((s * xmin - pad, s * xmax + pad), (-s - pad, s + pad)):
            x = X.to_mpf() / s
            cy = 1 - x * x
            if cy < -tiny:
                continue
            rc = mpmath.sqrt(max(cy, 0))
            ylo, yhi = -rc, rc
            # y * sin(phi) >= 1 - h - x cos(phi)
            lin = self.min_dot - x * cphi
            if sphi > 0:
                ylo = max(ylo, lin / sphi)
            elif sphi < 0:
                yhi = min(yhi, lin / sphi)
            elif lin > tiny:
                continue
            if ylo > yhi + tiny:
                continue
            xc = X.conj().to_mpf()
            cr = s * s - xc * xc
            if cr < -tiny * s * s:
                continue
            cr = mpmath.sqrt(max(cr, 0))
            for Y in _parity_problem((s * ylo - pad, s * yhi + pad), (-cr - pad, cr + pad), X.p % 2):
                yield zomega_from_xy(X, Y).mul_omega(self.axis)
