"""Cauchy-type constrained searches and the prime-power sum decompositions.

``cauchy_*`` solve the pair (sum of weighted squares = a, weighted sum = b)
over the naturals under the side conditions that guarantee a solution.
``decompose_thm14`` picks the linear value m^k from the interval I_{j,k}
and hands (n, m^k) to the matching search.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from mpmath import iv

from .arith import IntervalSpec, Radical, _iv_precision, _mpf_fraction, is_prime, isqrt, ord2
from .errors import DomainError, InternalInvariantViolation, NoAdmissibleCandidate
from .model import FormId, LinearConstraint, Target, Witness, make_witness


@dataclass(frozen=True)
class BoundTriple:
    k: int
    j: int
    l: int  # noqa: E741
    a_val: Fraction
    b_val: Fraction
    c_val: Fraction
    third: Fraction

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "j": self.j,
            "l": self.l,
            "a": _frac_json(self.a_val),
            "b": _frac_json(self.b_val, "upper"),
            "third": _frac_json(self.third),
            "c": _frac_json(self.c_val, "upper" if self.c_val == self.b_val else None),
        }


def _frac_json(x: Fraction, certified: str | None = None) -> dict:
    d = {"num": x.numerator, "den": x.denominator, "approx": float(x)}
    if certified:
        d["certified"] = certified
    return d


def _check_pos(**kw):
    for name, v in kw.items():
        if not isinstance(v, int) or v < 1:
            raise DomainError(f"{name} must be a positive integer, got {v!r}")


def bound_a(k: int, j: int, l: int) -> int:  # noqa: E741
    """(2kl)^(2k) (j+1)^(2k-1)."""
    _check_pos(k=k, j=j, l=l)
    return (2 * k * l) ** (2 * k) * (j + 1) ** (2 * k - 1)


def bound_b_upper(k: int, j: int) -> Fraction:
    """Rational upper bound of exp(2 k^(3/2) j^(1/4k) (j+1)^((2k-1)/4k)) / j.

    Uses outward-rounded interval arithmetic, so the result never falls
    below the true value."""
    _check_pos(k=k, j=j)
    with _iv_precision(128):
        K = iv.mpf(k)
        e = 2 * K * iv.sqrt(K) * iv.mpf(j) ** (1 / (4 * K)) * iv.mpf(j + 1) ** ((2 * K - 1) / (4 * K))
        B = iv.exp(e) / j
        return _mpf_fraction(B.b)


def bounds(k: int, j: int, l: int) -> BoundTriple:  # noqa: E741
    a = Fraction(bound_a(k, j, l))
    b = bound_b_upper(k, j)
    third = Fraction(3275 ** (2 * k), j)
    return BoundTriple(k, j, l, a, b, max(a, b, third), third)


def interval_I(n: int, j: int, k: int) -> IntervalSpec:
    """Open interval ((-1 + sqrt(j(n-1)))^(1/k), ((j+1) n)^(1/2k))."""
    if n < 2:
        raise DomainError(f"n must be >= 2, got {n}")
    _check_pos(j=j, k=k)
    lo = Radical(j * (n - 1), 1, q=2, k=k, shift=-1)
    hi = Radical((j + 1) * n, 1, q=2, k=k)
    return IntervalSpec(lo, hi, True, True)


# ---------------------------------------------------------------------------
# constrained searches


def _pair(A, B):
    """Naturals u >= v with u + v = B and u^2 + v^2 = A, or None."""
    if A < 0 or B < 0:
        return None
    D = 2 * A - B * B
    if D < 0:
        return None
    r = isqrt(D)
    if r * r != D or r > B or (B - r) % 2:
        return None
    return (B + r) // 2, (B - r) // 2


def gates_1111(a: int, b: int) -> list[str]:
    bad = []
    if a < 1 or b < 1:
        bad.append("a and b must be positive")
        return bad
    if not (b * b < 4 * a):
        bad.append("b^2 < 4a fails")
    if not (3 * a < b * b + 2 * b + 4):
        bad.append("3a < b^2+2b+4 fails")
    if not ((a * b) % 2 == 1 or (ord2(a) == 1 and b % 2 == 0)):
        bad.append("need ab odd, or ord2(a) = 1 with b even")
    return bad


def gates_1122(a: int, b: int) -> list[str]:
    if a < 1 or b < 1:
        return ["a and b must be positive"]
    bad = []
    if (a - b) % 2:
        bad.append("a = b (mod 2) fails")
    if not (b * b < 6 * a):
        bad.append("b^2 < 6a fails")
    if not (5 * a < b * b + 2 * b + 6):
        bad.append("5a < b^2+2b+6 fails")
    if not (a % 2 == 1 or ord2(a) == 2):
        bad.append("need a odd or ord2(a) = 2")
    if not (a % 3 == 0 or b % 3 != 0):
        bad.append("need 3 | a or 3 does not divide b")
    return bad


def gates_1113(a: int, b: int) -> list[str]:
    if a < 1 or b < 1:
        return ["a and b must be positive"]
    bad = []
    if (a - b) % 2:
        bad.append("a = b (mod 2) fails")
    if not (b * b < 6 * a):
        bad.append("b^2 < 6a fails")
    if not (5 * a < b * b + 2 * b + 6):
        bad.append("5a < b^2+2b+6 fails")
    if not (a % 9 == 3 or b % 3 != 0):
        bad.append("need a = 3 (mod 9) or 3 does not divide b")
    return bad


def _gate(check, a, b):
    if not isinstance(a, int) or not isinstance(b, int):
        raise DomainError("a and b must be integers")
    bad = check(a, b)
    if bad:
        raise DomainError(f"(a, b) = ({a}, {b}): " + "; ".join(bad))


def search_1111(a: int, b: int):
    """First (s, t, u, v), s >= t >= u >= v, with both equations; no gates."""
    for s in range(min(b, isqrt(a)), -1, -1):
        for t in range(min(s, b - s, isqrt(a - s * s)), -1, -1):
            uv = _pair(a - s * s - t * t, b - s - t)
            if uv and uv[0] <= t:
                return (s, t, uv[0], uv[1])
    return None


def search_1122(a: int, b: int):
    """First (s, t, u, v): u descending, then v <= u descending, s >= t solved."""
    for u in range(min(b // 2, isqrt(a // 2)), -1, -1):
        for v in range(min(u, (b - 2 * u) // 2, isqrt((a - 2 * u * u) // 2)), -1, -1):
            st = _pair(a - 2 * u * u - 2 * v * v, b - 2 * u - 2 * v)
            if st:
                return (st[0], st[1], u, v)
    return None


def search_1113(a: int, b: int):
    """First (s, t, u, v): v descending, then s descending, t >= u solved."""
    for v in range(min(b // 3, isqrt(a // 3)), -1, -1):
        A, B = a - 3 * v * v, b - 3 * v
        for s in range(min(B, isqrt(A)), -1, -1):
            tu = _pair(A - s * s, B - s)
            if tu:
                return (s, tu[0], tu[1], v)
    return None


def _run(search, check, a, b, name):
    _gate(check, a, b)
    v = search(a, b)
    if v is None:
        raise InternalInvariantViolation(f"{name}({a}, {b}) found nothing although the side conditions hold")
    return v


def cauchy_1111(a: int, b: int):
    """a = s^2+t^2+u^2+v^2 and b = s+t+u+v over the naturals."""
    return _run(search_1111, gates_1111, a, b, "cauchy_1111")


def cauchy_1122(a: int, b: int):
    """a = s^2+t^2+2u^2+2v^2 and b = s+t+2u+2v over the naturals."""
    return _run(search_1122, gates_1122, a, b, "cauchy_1122")


def cauchy_1113(a: int, b: int):
    """a = s^2+t^2+u^2+3v^2 and b = s+t+u+3v over the naturals."""
    return _run(search_1113, gates_1113, a, b, "cauchy_1113")


# ---------------------------------------------------------------------------
# prime-power (or even-power) linear sums

_VARIANTS = {
    "i": (3, FormId.F1111, (1, 1, 1, 1), search_1111, gates_1111),
    "ii": (5, FormId.F1122, (1, 1, 2, 2), search_1122, gates_1122),
    "iii": (5, FormId.F1113, (1, 1, 1, 3), search_1113, gates_1113),
}


def thm14_constraint(n: int, k: int, variant: str) -> LinearConstraint:
    coeffs = _VARIANTS[variant][2]
    target = Target.prime_power(k) if n % 2 else Target.even_power(k)
    return LinearConstraint(coeffs, target)


def thm14_strict_gate(n: int, k: int, variant: str) -> str | None:
    """Why n falls outside the proven range, or None."""

    def c(j, l):  # noqa: E741
        return bounds(k, j, l).c_val

    if variant == "i":
        if n % 2 and n > c(3, 4):
            return None
        if n % 4 == 2 and n > bound_a(k, 3, 2):
            return None
        return "needs n odd with n > c_k(3,4), or n = 2 (mod 4) with n > a_k(3,2)"
    if variant == "ii":
        if n % 2 and n > c(5, 6):
            return None
        if n % 4 == 0 and n > bound_a(k, 5, 6):
            return None
        return "needs n odd with n > c_k(5,6), or 4 | n with n > a_k(5,6)"
    if n % 2 and n > c(5, 4):
        return None
    if n % 2 == 0 and n > bound_a(k, 5, 4):
        return None
    return "needs n odd with n > c_k(5,4), or n even with n > a_k(5,4)"


def decompose_thm14(n: int, k: int, variant: str, relaxed: bool = True) -> Witness:
    """Natural (x, y, z, w) whose weighted sum is m^k, m prime for odd n and
    even for even n, taken from I_{j,k} in ascending order."""
    if variant not in _VARIANTS:
        raise DomainError(f"variant must be one of i, ii, iii; got {variant!r}")
    _check_pos(n=n, k=k)
    if not relaxed:
        why = thm14_strict_gate(n, k, variant)
        if why:
            raise DomainError(f"n={n}, k={k}, variant {variant}: {why}")
    if n < 2:
        raise NoAdmissibleCandidate(f"the interval I_(j,k) needs n >= 2, got {n}")
    j, form, coeffs, search, gates = _VARIANTS[variant]
    lc = thm14_constraint(n, k, variant)
    tried = []
    for m in interval_I(n, j, k).integers():
        if m < 1:
            continue
        if n % 2 and not is_prime(m):
            continue
        if n % 2 == 0 and m % 2:
            continue
        bad = gates(n, m**k)
        if bad:
            tried.append({"m": m, "reason": "; ".join(bad)})
            continue
        v = search(n, m**k)
        if v is None:
            raise InternalInvariantViolation(f"search failed for (a, b) = ({n}, {m ** k}) under valid side conditions")
        return make_witness(n, v, form, lc)
    raise NoAdmissibleCandidate(f"no admissible m in I_({j},{k}) for n={n}", tried)
