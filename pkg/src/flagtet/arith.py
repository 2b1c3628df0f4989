"""Arithmetic substrate: exact quadratic irrationals, integer factorization,
and the dilogarithm.

Exact scalars live in the tower int < Fraction < QuadExt < complex.  A
QuadExt is a + b*sqrt(m) with rational a, b and squarefree integer m; any
operation whose result has b == 0 demotes to Fraction, and operations
mixing two different fields fall through to complex.

Everything here is stdlib-only on purpose.
"""

import cmath
import math
import random
from fractions import Fraction
from math import factorial, gcd

from .errors import ZeroInput

# ---------------------------------------------------------------- primes

def _sieve(limit):
    flags = bytearray([1]) * (limit + 1)
    flags[0:2] = b"\x00\x00"
    for p in range(2, int(limit ** 0.5) + 1):
        if flags[p]:
            for q in range(p * p, limit + 1, p):
                flags[q] = 0
    return [i for i in range(limit + 1) if flags[i]]


_SMALL_PRIMES = _sieve(10 ** 4)

# witnesses certifying primality for every n < 2^64
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _brent_rho(n: int) -> int:
    # Brent's cycle variant of Pollard rho; n odd composite, not a prime power
    # of a small prime.  Deterministic seeding keeps runs reproducible.
    rng = random.Random(n)
    while True:
        y = rng.randrange(1, n)
        c = rng.randrange(1, n)
        m = 128
        g = r = q = 1
        x = ys = y
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
                g = gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = gcd(abs(x - ys), n)
        if g != n:
            return g


def factor(n: int) -> dict:
    """Prime factorization {p: e} of a positive integer.  factor(1) == {}."""
    if n == 0:
        raise ZeroInput("cannot factor 0")
    if n < 0:
        raise ValueError("factor expects a positive integer; track signs separately")
    out = {}
    for p in _SMALL_PRIMES:
        if p * p > n:
            break
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    if n == 1:
        return out
    stack = [n]
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if is_prime(m):
            out[m] = out.get(m, 0) + 1
            continue
        # perfect powers defeat rho, peel them first
        root = math.isqrt(m)
        if root * root == m:
            stack.extend([root, root])
            continue
        d = _brent_rho(m)
        stack.extend([d, m // d])
    return out


def factor_signed(q) -> tuple:
    """(sign, {p: e}) for a nonzero rational, denominator exponents negative."""
    q = Fraction(q)
    if q == 0:
        raise ZeroInput("cannot factor 0")
    sign = 1 if q > 0 else -1
    out = dict(factor(abs(q.numerator)))
    for p, e in factor(q.denominator).items():
        out[p] = out.get(p, 0) - e
    return sign, {p: e for p, e in out.items() if e}


def squarefree_decompose(m: int) -> tuple:
    """m = s**2 * m0 with m0 squarefree; returns (s, m0)."""
    if m == 0:
        raise ZeroInput("0 has no squarefree part")
    s, m0 = 1, 1 if m > 0 else -1
    for p, e in factor(abs(m)).items():
        s *= p ** (e // 2)
        if e % 2:
            m0 *= p
    return s, m0


# ---------------------------------------------------------- quadratic field

class QuadExt:
    """a + b*sqrt(m) with a, b rational and m a squarefree non-square integer.

    Constructing with b == 0 (or with m a perfect square) gives back a plain
    Fraction, so QuadExt instances always carry a genuine irrationality.
    Same-field arithmetic stays exact; mixing fields drops to complex.
    """

    __slots__ = ("a", "b", "m")

    def __new__(cls, a, b, m):
        a, b = Fraction(a), Fraction(b)
        m = Fraction(m)
        # sqrt(p/q) = sqrt(p*q)/q keeps the radicand integral
        if m.denominator != 1:
            b = b / m.denominator
            m = m.numerator * m.denominator
        s, m0 = squarefree_decompose(int(m))
        b = b * s
        if b == 0 or m0 == 1:
            return a + b  # rational after all
        self = object.__new__(cls)
        self.a, self.b, self.m = a, b, m0
        return self

    def conj(self):
        return QuadExt(self.a, -self.b, self.m)

    def norm(self) -> Fraction:
        # field norm a^2 - m b^2, nonzero since sqrt(m) is irrational
        return self.a * self.a - self.m * self.b * self.b

    def trace(self) -> Fraction:
        return 2 * self.a

    def inverse(self):
        n = self.norm()
        return QuadExt(self.a / n, -self.b / n, self.m)

    def to_complex(self) -> complex:
        if self.m >= 0:
            root = complex(math.sqrt(self.m))
        else:
            root = 1j * math.sqrt(-self.m)
        return complex(float(self.a)) + float(self.b) * root

    __complex__ = to_complex

    # -- coercion: returns (a, b) over this field, or None meaning "go complex"
    def _split(self, other):
        if isinstance(other, (int, Fraction)):
            return Fraction(other), Fraction(0)
        if isinstance(other, QuadExt):
            if other.m == self.m:
                return other.a, other.b
            return None
        if isinstance(other, (float, complex)):
            return None
        return NotImplemented

    def __add__(self, other):
        ab = self._split(other)
        if ab is NotImplemented:
            return NotImplemented
        if ab is None:
            return self.to_complex() + _numeric(other)
        return QuadExt(self.a + ab[0], self.b + ab[1], self.m)

    __radd__ = __add__

    def __neg__(self):
        return QuadExt(-self.a, -self.b, self.m)

    def __sub__(self, other):
        ab = self._split(other)
        if ab is NotImplemented:
            return NotImplemented
        if ab is None:
            return self.to_complex() - _numeric(other)
        return QuadExt(self.a - ab[0], self.b - ab[1], self.m)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        ab = self._split(other)
        if ab is NotImplemented:
            return NotImplemented
        if ab is None:
            return self.to_complex() * _numeric(other)
        a2, b2 = ab
        return QuadExt(self.a * a2 + self.m * self.b * b2,
                       self.a * b2 + self.b * a2, self.m)

    __rmul__ = __mul__

    def __truediv__(self, other):
        ab = self._split(other)
        if ab is NotImplemented:
            return NotImplemented
        if ab is None:
            return self.to_complex() / _numeric(other)
        if ab[1] == 0:
            if ab[0] == 0:
                raise ZeroDivisionError("division by zero")
            return QuadExt(self.a / ab[0], self.b / ab[0], self.m)
        return self * QuadExt(ab[0], ab[1], self.m).inverse()

    def __rtruediv__(self, other):
        inv = self.inverse()
        ab = inv._split(other)
        if ab is NotImplemented:
            return NotImplemented
        if ab is None:
            return _numeric(other) / self.to_complex()
        return inv * other

    def __pow__(self, k):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        out, base = Fraction(1), self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, QuadExt):
            return (self.a, self.b, self.m) == (other.a, other.b, other.m)
        if isinstance(other, (int, Fraction)):
            return False  # b != 0 always
        return NotImplemented

    def __hash__(self):
        return hash((self.a, self.b, self.m))

    def __repr__(self):
        return "QuadExt(%s, %s, %s)" % (self.a, self.b, self.m)

    def __str__(self):
        sign = "+" if self.b >= 0 else "-"
        return "(%s %s %s*sqrt(%s))" % (self.a, sign, abs(self.b), self.m)


def _numeric(x):
    if isinstance(x, QuadExt):
        return x.to_complex()
    if isinstance(x, Fraction):
        return complex(float(x))
    return complex(x)


def to_complex(x) -> complex:
    """Flatten any member of the scalar tower to a complex float."""
    return _numeric(x)


def is_exact(x) -> bool:
    return isinstance(x, (int, Fraction, QuadExt))


def as_exact(x):
    """Normalize int -> Fraction; pass Fraction and QuadExt through."""
    if isinstance(x, bool):
        raise TypeError("bools are not scalars here")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, (Fraction, QuadExt)):
        return x
    raise TypeError("not an exact scalar: %r" % (x,))


# ------------------------------------------------------------- dilogarithm

_PI2_6 = math.pi * math.pi / 6

_bernoulli_cache = [Fraction(1)]


def bernoulli(k: int) -> Fraction:
    """Bernoulli number B_k, first-kind convention (B_1 = -1/2)."""
    while len(_bernoulli_cache) <= k:
        n = len(_bernoulli_cache)
        # sum_{j<=n} C(n+1, j) B_j = 0
        acc = Fraction(0)
        for j, bj in enumerate(_bernoulli_cache):
            acc += math.comb(n + 1, j) * bj
        _bernoulli_cache.append(-acc / (n + 1))
    return _bernoulli_cache[k]


# coefficients B_k / (k+1)!  of the u-series, cached as floats
_u_coeff = []


def _u_coefficients():
    if not _u_coeff:
        for k in range(64):
            _u_coeff.append(float(bernoulli(k) / factorial(k + 1)))
    return _u_coeff


def _dilog_series(z: complex) -> complex:
    # plain sum z^k / k^2, good for |z| <= 1/2
    total = 0j
    zk = 1.0 + 0j
    for k in range(1, 140):
        zk *= z
        term = zk / (k * k)
        total += term
        if abs(term) < 1e-18 * (1 + abs(total)):
            break
    return total


def dilog(z) -> complex:
    """Principal branch of Li_2, cut along [1, oo)."""
    z = complex(z)
    if z != z:
        return z
    if cmath.isinf(z):
        raise ValueError("dilog diverges at infinity")
    if z == 0:
        return 0j
    if z == 1:
        return complex(_PI2_6)
    if abs(z) > 1:
        lg = cmath.log(-z)
        return -dilog(1 / z) - _PI2_6 - 0.5 * lg * lg
    if abs(z) <= 0.5:
        return _dilog_series(z)
    if abs(1 - z) <= 0.5:
        return _PI2_6 - cmath.log(z) * cmath.log(1 - z) - _dilog_series(1 - z)
    # remaining annulus: expand in u = -log(1-z), radius 2*pi
    u = -cmath.log(1 - z)
    coeff = _u_coefficients()
    total = 0j
    p = u
    for k in range(len(coeff)):
        c = coeff[k]
        if c:
            term = c * p
            total += term
            if abs(term) < 1e-18 * (1 + abs(total)):
                break
        p *= u
    return total


def bloch_wigner(z) -> float:
    """Bloch-Wigner function D(z) = Im Li_2(z) + arg(1-z) log|z|.

    Real-valued, vanishes on the real line and at 0, 1, infinity, and
    flips sign under conjugation.
    """
    if isinstance(z, complex) and z != z:
        return float("nan")
    z = complex(z)
    if z != z:
        return float("nan")
    if cmath.isinf(z):
        return 0.0
    if z.imag == 0:
        return 0.0
    return dilog(z).imag + cmath.phase(1 - z) * math.log(abs(z))
