"""Exact integer primitives.

Everything here works on Python integers (or ``Fraction`` where an endpoint
is rational).  Interval membership never consults floating point; the only
floating-point use is the directed-rounding interval arithmetic behind
:func:`dusart_interval`.
"""

from __future__ import annotations

import math
from contextlib import contextmanager
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator

import numpy as np
from mpmath import iv

from .errors import DomainError

__all__ = [
    "isqrt",
    "ikroot",
    "is_square",
    "is_prime",
    "prime_table",
    "Radical",
    "IntervalSpec",
    "iter_primes",
    "primes_in",
    "first_prime_in",
    "dusart_interval",
    "crt2",
    "ord2",
]

# Deterministic Miller-Rabin: the first twelve primes as bases are exact
# for every n below this bound.
MR_BOUND = 3317044064679887385961981
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)

_SMALL_LIMIT = 1 << 20


def isqrt(n: int) -> int:
    if n < 0:
        raise DomainError(f"isqrt of negative number {n}")
    return math.isqrt(n)


def ikroot(n: int, k: int) -> int:
    """Return floor(n ** (1/k)) for n >= 0, k >= 1."""
    if n < 0:
        raise DomainError(f"ikroot of negative number {n}")
    if k < 1:
        raise DomainError(f"root index must be positive, got {k}")
    if k == 1 or n < 2:
        return n
    if k == 2:
        return math.isqrt(n)
    # Newton from above; the start is guaranteed >= the true root.
    x = 1 << -(-n.bit_length() // k)
    while True:
        y = ((k - 1) * x + n // x ** (k - 1)) // k
        if y >= x:
            break
        x = y
    while x**k > n:
        x -= 1
    while (x + 1) ** k <= n:
        x += 1
    return x


def is_square(n: int) -> bool:
    return n >= 0 and math.isqrt(n) ** 2 == n


def ord2(n: int) -> int:
    """2-adic order of a nonzero integer."""
    if n == 0:
        raise DomainError("ord2(0) is infinite")
    return (n & -n).bit_length() - 1


@lru_cache(maxsize=8)
def prime_table(limit: int) -> np.ndarray:
    """Boolean sieve of Eratosthenes, ``table[i]`` true iff i is prime."""
    limit = max(int(limit), 2)
    table = np.ones(limit + 1, dtype=np.bool_)
    table[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if table[p]:
            table[p * p :: p] = False
    return table


def _small_table() -> bytearray:
    return bytearray(prime_table(_SMALL_LIMIT).view(np.uint8).tobytes())


_SMALL = _small_table()


def is_prime(n: int) -> bool:
    """Deterministic primality test.

    Exact for every ``n < 3.3e24`` (which covers the full unsigned 64-bit
    range); larger inputs raise :class:`DomainError` instead of returning a
    probabilistic answer.
    """
    if n <= _SMALL_LIMIT:
        return n >= 2 and bool(_SMALL[n])
    if n >= MR_BOUND:
        raise DomainError(f"{n} exceeds the deterministic primality range")
    if n % 2 == 0:
        return False
    d = n - 1
    s = 0
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


def crt2(r1: int, m1: int, r2: int, m2: int) -> int:
    """Unique r in [0, m1*m2) with r = r1 (mod m1) and r = r2 (mod m2)."""
    if m1 < 1 or m2 < 1:
        raise DomainError("moduli must be positive")
    if math.gcd(m1, m2) != 1:
        raise DomainError(f"moduli {m1} and {m2} are not coprime")
    inv = pow(m1, -1, m2) if m2 > 1 else 0
    r = r1 + m1 * ((r2 - r1) * inv % m2)
    return r % (m1 * m2)


@dataclass(frozen=True)
class Radical:
    """The real number ``(shift + (num/den) ** (1/q)) ** (1/k)``.

    Covers every endpoint the constructions need: plain rationals
    (q = k = 1), roots such as ``(4 d^2 n) ** (1/2k)``, and the shifted
    root ``(-1 + sqrt(j (n - 1))) ** (1/k)``.  The base must be >= 0.
    """

    num: int
    den: int = 1
    q: int = 1
    k: int = 1
    shift: int = 0

    def __post_init__(self):
        if self.den <= 0 or self.num < 0 or self.q < 1 or self.k < 1:
            raise DomainError(f"malformed radical {self!r}")
        if self.shift < 0 and (-self.shift) ** self.q * self.den > self.num:
            raise DomainError(f"radical {self!r} has a negative base")

    @classmethod
    def rational(cls, x) -> "Radical":
        x = Fraction(x)
        if x < 0:
            raise DomainError("negative endpoints are not supported")
        return cls(x.numerator, x.denominator)

    @classmethod
    def root(cls, radicand, index: int) -> "Radical":
        r = Fraction(radicand)
        return cls(r.numerator, r.denominator, q=index)

    def cmp(self, m: int) -> int:
        """Sign of ``m - value``, decided exactly."""
        if m < 0:
            return -1
        t = m**self.k - self.shift
        if t < 0:
            return -1
        lhs = t**self.q * self.den
        return (lhs > self.num) - (lhs < self.num)

    def floor(self) -> int:
        base = self.shift + ikroot(self.num // self.den, self.q)
        m = ikroot(max(base, 0), self.k)
        while self.cmp(m + 1) <= 0:
            m += 1
        while m > 0 and self.cmp(m) > 0:
            m -= 1
        return m

    def ceil(self) -> int:
        f = self.floor()
        return f if self.cmp(f) == 0 else f + 1

    def __float__(self) -> float:
        inner = self.shift + (self.num / self.den) ** (1.0 / self.q)
        return max(inner, 0.0) ** (1.0 / self.k)


def _as_radical(x) -> Radical:
    return x if isinstance(x, Radical) else Radical.rational(x)


@dataclass(frozen=True)
class IntervalSpec:
    """A real interval whose integer points are computed exactly.

    ``certified`` is only meaningful for intervals produced by
    :func:`dusart_interval`; see there.
    """

    lo: Radical
    hi: Radical
    lo_open: bool = False
    hi_open: bool = False
    certified: bool = True

    def __post_init__(self):
        object.__setattr__(self, "lo", _as_radical(self.lo))
        object.__setattr__(self, "hi", _as_radical(self.hi))
        if self.lo.q == self.lo.k == self.hi.q == self.hi.k == 1 and not self.lo.shift and not self.hi.shift:
            if Fraction(self.lo.num, self.lo.den) > Fraction(self.hi.num, self.hi.den):
                raise DomainError("interval with lo > hi")

    @classmethod
    def closed(cls, lo, hi) -> "IntervalSpec":
        return cls(_as_radical(lo), _as_radical(hi))

    @classmethod
    def open(cls, lo, hi) -> "IntervalSpec":
        return cls(_as_radical(lo), _as_radical(hi), True, True)

    def contains(self, m: int) -> bool:
        c = self.lo.cmp(m)
        if c < 0 or (c == 0 and self.lo_open):
            return False
        c = self.hi.cmp(m)
        return c < 0 or (c == 0 and not self.hi_open)

    def first_int(self) -> int:
        f = self.lo.ceil()
        if self.lo_open and self.lo.cmp(f) == 0:
            f += 1
        return f

    def last_int(self) -> int:
        f = self.hi.floor()
        if self.hi_open and self.hi.cmp(f) == 0:
            f -= 1
        return f

    def integers(self) -> range:
        return range(self.first_int(), self.last_int() + 1)

    def __len__(self) -> int:
        return len(self.integers())


def _segment_sieve(lo: int, hi: int) -> np.ndarray:
    """Boolean primality flags for lo..hi inclusive (lo >= 2)."""
    size = hi - lo + 1
    flags = np.ones(size, dtype=np.bool_)
    base = prime_table(math.isqrt(hi) + 1)
    for p in np.flatnonzero(base):
        p = int(p)
        start = max(p * p, -(-lo // p) * p)
        if start > hi:
            continue
        flags[start - lo :: p] = False
    return flags


def iter_primes(iv_: IntervalSpec) -> Iterator[int]:
    """Primes of the interval in ascending order, produced lazily."""
    lo = max(iv_.first_int(), 2)
    hi = iv_.last_int()
    if hi < lo:
        return
    if hi <= _SMALL_LIMIT:
        for m in range(lo, hi + 1):
            if _SMALL[m]:
                yield m
        return
    block = 1 << 16
    for start in range(lo, hi + 1, block):
        stop = min(start + block - 1, hi)
        if stop - start < 64:
            for m in range(start, stop + 1):
                if is_prime(m):
                    yield m
        else:
            for off in np.flatnonzero(_segment_sieve(start, stop)):
                yield start + int(off)


def primes_in(iv_: IntervalSpec) -> list[int]:
    return list(iter_primes(iv_))


def first_prime_in(iv_: IntervalSpec) -> int | None:
    return next(iter_primes(iv_), None)


@contextmanager
def _iv_precision(bits: int):
    old = iv.prec
    iv.prec = bits
    try:
        yield
    finally:
        iv.prec = old


def _mpf_fraction(x) -> Fraction:
    sign, man, exp, _ = x._mpi_[0]
    v = Fraction(int(man)) * (Fraction(2) ** int(exp))
    return -v if sign else v


DUSART_THRESHOLD = 3275


def dusart_interval(x) -> IntervalSpec:
    """Return ``[x, x + x/(2 ln^2 x)]`` for rational ``x > 3275``.

    The width is rounded down with directed interval arithmetic, so the
    result is a subset of the true interval.  ``certified`` is True when
    rounding did not drop any integer, i.e. the integer realization equals
    that of the exact interval, which is when the prime guarantee carries
    over unchanged.
    """
    x = Fraction(x)
    if x <= DUSART_THRESHOLD:
        raise DomainError(f"Dusart's interval needs x > {DUSART_THRESHOLD}, got {x}")
    with _iv_precision(128):
        X = iv.mpf(x.numerator) / iv.mpf(x.denominator)
        W = X / (2 * iv.log(X) ** 2)
        w_lo = _mpf_fraction(W.a)
        w_hi = _mpf_fraction(W.b)
    hi = x + w_lo
    certified = math.floor(hi) == math.floor(x + w_hi)
    return IntervalSpec(Radical.rational(x), Radical.rational(hi), False, False, certified)
