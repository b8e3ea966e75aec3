"""Positive-definite ternary/quaternary forms and their representations.

A form here is diagonal plus an optional ``x*y`` cross term, which covers
every form the constructions use.  Representation searches are exhaustive
over the definiteness-bounded box; nothing relies on regularity theory.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .errors import ArityMismatch, DivisibilityError, DomainError, ResourceLimit

MAX_VALUE = 1 << 48


@dataclass(frozen=True)
class QuadraticForm:
    diag: tuple[int, ...]
    cross_xy: int = 0
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "diag", tuple(int(c) for c in self.diag))
        if len(self.diag) not in (3, 4):
            raise ArityMismatch(f"forms must have 3 or 4 variables, got {len(self.diag)}")
        if min(self.diag) <= 0:
            raise DomainError(f"diagonal coefficients must be positive: {self.diag}")
        if 4 * self.diag[0] * self.diag[1] <= self.cross_xy**2:
            raise DomainError("form is not positive definite")

    @property
    def arity(self) -> int:
        return len(self.diag)

    def evaluate(self, v) -> int:
        """Value at ``v``.  Also works coordinate-wise on numpy arrays."""
        if len(v) != self.arity:
            raise ArityMismatch(f"expected {self.arity} coordinates, got {len(v)}")
        total = self.cross_xy * v[0] * v[1]
        for c, x in zip(self.diag, v):
            total = total + c * x * x
        return total

    __call__ = evaluate

    def __str__(self):
        if self.name:
            return self.name
        names = "xyzw"
        parts = [f"{'' if c == 1 else c}{names[i]}^2" for i, c in enumerate(self.diag)]
        if self.cross_xy:
            parts.insert(2, f"{self.cross_xy}xy")
        return "+".join(parts)

    def _kernel_args(self, m: int):
        if m < 0:
            raise DomainError("forms are positive definite; m must be >= 0")
        if m > MAX_VALUE:
            raise ResourceLimit(f"m = {m} exceeds the enumeration cap 2^48")
        if 16 * max(self.diag) ** 2 * m >= 1 << 62 or self.cross_xy**2 * m >= 1 << 60:
            raise ResourceLimit("coefficients too large for 64-bit enumeration")
        diag = np.ones(4, np.int64)
        diag[: self.arity] = self.diag
        return diag


# The forms named in the constructions.
X2_5Y2_10Z2 = QuadraticForm((1, 5, 10), name="x^2+5y^2+10z^2")
X2_2Y2_4Z2 = QuadraticForm((1, 2, 4), name="x^2+2y^2+4z^2")
X2_3Y2_3Z2 = QuadraticForm((1, 3, 3), name="x^2+3y^2+3z^2")
X2_Y2_2Z2 = QuadraticForm((1, 1, 2), name="x^2+y^2+2z^2")
G_10_16 = QuadraticForm((1, 10, 16), name="x^2+10y^2+16z^2")
B_8_44 = QuadraticForm((1, 8, 44), name="x^2+8y^2+44z^2")
R_FORM = QuadraticForm((3, 5, 14), 2, name="3x^2+5y^2+14z^2+2xy")
H_14_42 = QuadraticForm((1, 14, 42), name="x^2+14y^2+42z^2")
RSTAR_FORM = QuadraticForm((3, 5, 7), 2, name="3x^2+5y^2+7z^2+2xy")
L_14_35 = QuadraticForm((1, 14, 35), name="x^2+14y^2+35z^2")
DICKSON_1255 = QuadraticForm((1, 2, 5, 5), name="x^2+2y^2+5z^2+5w^2")


def theorem11_form(q: int) -> QuadraticForm:
    """x^2 + q y^2 + 2q z^2."""
    return QuadraticForm((1, q, 2 * q))


@dataclass(frozen=True)
class Clause:
    """``sum(coeffs[i] * v[i]) = residue (mod modulus)``."""

    coeffs: tuple[int, ...]
    modulus: int
    residue: int

    def __post_init__(self):
        if self.modulus < 1:
            raise DomainError("clause modulus must be >= 1")

    def holds(self, v) -> bool:
        return (sum(a * x for a, x in zip(self.coeffs, v)) - self.residue) % self.modulus == 0


@dataclass(frozen=True)
class CongruenceConstraint:
    """A conjunction of clauses.

    Variables flagged in ``sign_free`` do not affect any clause, so the
    search only visits their nonnegative values; the caller is expected to
    take absolute values where the sign is immaterial.
    """

    clauses: tuple[Clause, ...] = ()
    sign_free: tuple[bool, ...] = ()

    def holds(self, v) -> bool:
        if any(f and x < 0 for f, x in zip(self.sign_free, v)):
            return False
        return all(c.holds(v) for c in self.clauses)


def clause(coeffs, modulus, residue) -> Clause:
    return Clause(tuple(coeffs), modulus, residue)


def _grow(fn, *args, cap=64):
    while True:
        out = np.zeros((cap, 4), np.int64)
        count = fn(*args, out)
        if count <= cap:
            return out[:count]
        cap = count


def represent_all(form: QuadraticForm, m: int) -> list[tuple[int, ...]]:
    """Every integer tuple (signs included) with ``form(v) == m``, sorted."""
    diag = form._kernel_args(m)
    rows = _grow(K.form_enumerate, diag, form.arity, form.cross_xy, m)
    rows = rows[:, : form.arity]
    if len(rows) > 1:
        rows = rows[np.lexsort(rows.T[::-1])]
    return [tuple(int(x) for x in r) for r in rows]


def _search_arrays(form: QuadraticForm, cc: CongruenceConstraint | None):
    n = form.arity
    coef, mods, res, levels = [], [], [], []
    trivial_fail = False
    for c in cc.clauses if cc else ():
        if len(c.coeffs) != n:
            raise ArityMismatch(f"clause {c} has wrong arity")
        M = c.modulus
        if M == 1:
            continue
        red = [a % M for a in c.coeffs]
        nz = [i for i, a in enumerate(red) if a]
        if not nz:
            trivial_fail |= c.residue % M != 0
            continue
        coef.append(red + [0] * (4 - n))
        mods.append(M)
        res.append(c.residue % M)
        levels.append(max(nz))
    C = len(mods)
    ccoef = np.array(coef, np.int64).reshape(C, 4)
    cmod = np.array(mods, np.int64)
    cres = np.array(res, np.int64)
    clevel = np.array(levels, np.int64)
    sclause = np.full(4, -1, np.int64)
    sinv = np.zeros(4, np.int64)
    for lev in range(n - 1):
        for i in range(C):
            if clevel[i] == lev and np.gcd(int(ccoef[i, lev]), int(cmod[i])) == 1:
                sclause[lev] = i
                sinv[lev] = pow(int(ccoef[i, lev]), -1, int(cmod[i]))
                break
    nonneg = np.zeros(4, np.bool_)
    if cc:
        for i, f in enumerate(cc.sign_free[:n]):
            nonneg[i] = bool(f)
    return trivial_fail, (ccoef, cmod, cres, clevel, sclause, sinv, nonneg)


def represent_constrained(form: QuadraticForm, m: int, cc: CongruenceConstraint | None = None):
    """Lexicographically least representation of ``m`` meeting ``cc``, or None."""
    diag = form._kernel_args(m)
    fail, arrays = _search_arrays(form, cc)
    if fail:
        return None
    out = np.zeros((1, 4), np.int64)
    count = K.form_lex_search(diag, form.arity, form.cross_xy, m, *arrays, out, True)
    if not count:
        return None
    return tuple(int(x) for x in out[0, : form.arity])


def represent_constrained_all(form: QuadraticForm, m: int, cc: CongruenceConstraint | None = None):
    """All representations meeting ``cc``, in lexicographic order."""
    diag = form._kernel_args(m)
    fail, arrays = _search_arrays(form, cc)
    if fail:
        return []
    rows = _grow(lambda *a: K.form_lex_search(*a, False), diag, form.arity, form.cross_xy, m, *arrays)
    return [tuple(int(x) for x in r[: form.arity]) for r in rows]


# ---------------------------------------------------------------------------
# identities


def automorphism_g(v):
    """Isometry ``(x, y, z) -> ((-3x+16z)/5, y, (x+3z)/5)`` of x^2+10y^2+16z^2.

    It is an involution on triples where both numerators are divisible by 5.
    """
    x, y, z = v
    a, c = -3 * x + 16 * z, x + 3 * z
    if np.any(a % 5) or np.any(c % 5):
        raise DivisibilityError(f"automorphism_g undefined at {v}: 5 must divide -3x+16z and x+3z")
    return (a // 5, y, c // 5)


def lift_R_to_h(v):
    """``(x, y, z) -> (3x+y, y, z)``; maps R-values to h-values times 3."""
    x, y, z = v
    return (3 * x + y, y, z)


def lift_Rstar_to_l(v):
    """``(x, y, z) -> (x+5y, x, z)``; maps R*-values to l-values times 5."""
    x, y, z = v
    return (x + 5 * y, x, z)


def multiplier7(s, t, u, v):
    """Linear map taking s^2+t^2+u^2+2v^2 to seven times itself."""
    return (s + 2 * u + 2 * v, -2 * t - u + 2 * v, 2 * s - t - 2 * v, s + t - u + v)
