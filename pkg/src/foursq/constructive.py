"""Decomposition algorithms that follow the constructive proofs.

Every algorithm has the same shape: pick a prime from an interval (or a
parameter from a small residue range), represent an auxiliary integer by
a ternary form under congruence conditions, and recover (x, y, z, w)
through a polynomial identity.  Each result is validated before it is
returned; a recovery that fails validation is treated as a rejected
candidate, never as an answer.
"""

from __future__ import annotations

import itertools

from . import oracle
from .arith import IntervalSpec, Radical, is_prime, iter_primes
from .errors import DomainError, InternalInvariantViolation, NotFound, SearchExhausted
from .forms import (
    B_8_44,
    G_10_16,
    R_FORM,
    RSTAR_FORM,
    X2_2Y2_4Z2,
    X2_3Y2_3Z2,
    CongruenceConstraint,
    automorphism_g,
    clause,
    lift_R_to_h,
    lift_Rstar_to_l,
    represent_constrained,
    represent_constrained_all,
    theorem11_form,
)
from .model import FormId, LinearConstraint, Target, Witness, make_witness

# Below these bounds the corollaries are settled by direct computation.
COR12_SMALL = 3275**2 // 4
COR13_SMALL = 3275**2


def _signs(v):
    """Distinct sign variants of v, mask order (bit i negates coordinate i)."""
    return oracle.sign_variants(tuple(v))


def _need_int(name, v):
    if not isinstance(v, int) or isinstance(v, bool):
        raise DomainError(f"{name} must be an integer, got {v!r}")


# ---------------------------------------------------------------------------
# prime-interval constructions (x, y, z, w natural)


def constraint_thm11(d: int, k: int) -> LinearConstraint:
    return LinearConstraint((1, 2 * d, 0, 0), Target.prime_power(k))


CONSTRAINT_COR12 = LinearConstraint((1, 2, 0, 0), Target.prime())
CONSTRAINT_COR13I = LinearConstraint((1, 1, 0, 0), Target.prime())
CONSTRAINT_COR13II = LinearConstraint((1, 0, 0, 1), Target.prime())


def thm11_interval(n: int, d: int, k: int) -> IntervalSpec:
    """[(4 d^2 n)^(1/2k), ((1 + 4 d^2) n)^(1/2k)]."""
    return IntervalSpec.closed(Radical.root(4 * d * d * n, 2 * k), Radical.root((4 * d * d + 1) * n, 2 * k))


def _thm11_route(n, d, k, lc, p_min, diagnostics):
    q = 4 * d * d + 1
    form = theorem11_form(q)
    for p in iter_primes(thm11_interval(n, d, k)):
        if p <= p_min:
            diagnostics.append({"p": p, "reason": f"p <= {p_min}"})
            continue
        P = p**k
        m = q * n - P * P
        cc = CongruenceConstraint((clause((1, 0, 0), q, -2 * d * P),), (False, True, True))
        rep = represent_constrained(form, m, cc)
        if rep is None:
            diagnostics.append({"p": p, "reason": "no_representation", "m": m})
            continue
        s, z, w = rep
        y, rem = divmod(s + 2 * d * P, q)
        x = P - 2 * d * y
        if rem or x < 0 or y < 0:
            diagnostics.append({"p": p, "reason": "negative_coordinate", "s": s})
            continue
        return make_witness(n, (x, y, z, w), FormId.F1112, lc)
    return None


def decompose_thm11(n: int, d: int, k: int) -> Witness:
    """n = x^2 + y^2 + z^2 + 2w^2 over the naturals with x + 2dy a prime power p^k."""
    for name, v in (("n", n), ("d", d), ("k", k)):
        _need_int(name, v)
    if d < 1:
        raise DomainError(f"d must be positive, got {d}")
    if k < 1:
        raise DomainError(f"k must be positive, got {k}")
    q = 4 * d * d + 1
    if not is_prime(q):
        raise DomainError(f"4d^2+1 = {q} is not prime")
    if n < 1:
        raise DomainError(f"n must be positive, got {n}")
    diag = []
    w = _thm11_route(n, d, k, constraint_thm11(d, k), q, diag)
    if w is None:
        raise NotFound(f"no prime in the interval for n={n}, d={d}, k={k} gave a witness", diag)
    return w


def decompose_cor12(n: int) -> Witness:
    """n = x^2 + y^2 + z^2 + 2w^2 over the naturals with x + 2y prime.

    The interval route runs first for every n; for n up to 3275^2/4, where
    the prime-gap bound does not apply, a failed route falls back to the
    exhaustive search.
    """
    _need_int("n", n)
    if n < 1:
        raise DomainError(f"n must be positive, got {n}")
    diag = []
    w = _thm11_route(n, 1, 1, CONSTRAINT_COR12, 0 if n <= COR12_SMALL else 5, diag)
    if w is not None:
        return w
    if n <= COR12_SMALL:
        w = oracle.exists_constrained(n, FormId.F1112, CONSTRAINT_COR12)
        if w is not None:
            return w
    raise InternalInvariantViolation(f"no witness for n={n}: {diag}")


def cor13i_interval(n: int) -> IntervalSpec:
    return IntervalSpec.closed(Radical.root(n, 2), Radical.root(2 * n, 2))


def cor13ii_interval(n: int) -> IntervalSpec:
    return IntervalSpec.closed(Radical.root(n, 2), Radical(3 * n, 2, q=2))


def _cor13i_route(n, p_min):
    for p in iter_primes(cor13i_interval(n)):
        if p <= p_min:
            continue
        cc = CongruenceConstraint((clause((1, 0, 0), 2, p),), (False, True, True))
        rep = represent_constrained(X2_2Y2_4Z2, 2 * n - p * p, cc)
        if rep is None:
            continue
        s, z, w = rep
        y = (s + p) // 2
        x = p - y
        if x < 0 or y < 0:
            continue
        return make_witness(n, (x, y, z, w), FormId.F1112, CONSTRAINT_COR13I)
    return None


def _cor13ii_route(n, p_min):
    for p in iter_primes(cor13ii_interval(n)):
        if p <= p_min:
            continue
        cc = CongruenceConstraint((clause((1, 0, 0), 3, -p),), (False, True, True))
        rep = represent_constrained(X2_3Y2_3Z2, 3 * n - 2 * p * p, cc)
        if rep is None:
            continue
        s, y, z = rep
        w = (s + p) // 3
        x = p - w
        if x < 0 or w < 0:
            continue
        return make_witness(n, (x, y, z, w), FormId.F1112, CONSTRAINT_COR13II)
    return None


def decompose_cor13i(n: int) -> Witness:
    """n = x^2 + y^2 + z^2 + 2w^2 over the naturals with x + y prime (n >= 2)."""
    _need_int("n", n)
    if n < 2:
        raise DomainError(f"x + y prime needs n >= 2, got {n}")
    small = n <= COR13_SMALL
    w = _cor13i_route(n, 0 if small else 2)
    if w is None and small:
        w = oracle.exists_constrained(n, FormId.F1112, CONSTRAINT_COR13I)
    if w is None:
        raise InternalInvariantViolation(f"no witness with x+y prime for n={n}")
    return w


def decompose_cor13ii(n: int) -> Witness:
    """n = x^2 + y^2 + z^2 + 2w^2 over the naturals with x + w prime (n >= 3)."""
    _need_int("n", n)
    if n < 3:
        raise DomainError(f"x + w prime needs n >= 3, got {n}")
    small = n <= COR13_SMALL
    w = _cor13ii_route(n, 0 if small else 3)
    if w is None and small:
        w = oracle.exists_constrained(n, FormId.F1112, CONSTRAINT_COR13II)
    if w is None:
        raise InternalInvariantViolation(f"no witness with x+w prime for n={n}")
    return w


# ---------------------------------------------------------------------------
# fixed linear value (x, y, z, w integers)


def _check_lambda_odd(lam):
    _need_int("lambda", lam)
    if lam < 1 or lam % 2 == 0:
        raise DomainError(f"lambda must be a positive odd integer, got {lam}")


def _lemma_a_clauses(lam):
    return (
        clause((1, 0, 0), 8, -lam),
        clause((0, 1, 0), 4, lam),
        clause((2, 0, 1), 5, 0),
        clause((1, 2, 0), 16, 9 * lam),
    )


def _lemma_a_ok(v, lam):
    return all(c.holds(v) for c in _lemma_a_clauses(lam))


def lemma_a_all(n: int, lam: int) -> list[tuple[int, int, int]]:
    """Every (a, b, c) meeting the four conditions, lexicographic."""
    return represent_constrained_all(G_10_16, 80 * n - 5 * lam * lam, CongruenceConstraint(_lemma_a_clauses(lam)))


def lemma_a(n: int, lam: int) -> tuple[int, int, int]:
    """80n - 5 lam^2 = a^2 + 10b^2 + 16c^2 with a = -lam (mod 8),
    b = lam (mod 4), c + 2a = 0 (mod 5) and a + 2b = 9 lam (mod 16)."""
    _need_int("n", n)
    _check_lambda_odd(lam)
    if 16 * n < lam * lam:
        raise DomainError(f"need 16n >= lambda^2, got n={n}, lambda={lam}")
    m = 80 * n - 5 * lam * lam
    clauses = _lemma_a_clauses(lam)
    v = represent_constrained(G_10_16, m, CongruenceConstraint(clauses))
    if v is not None:
        return v
    # Three conditions, then repair the last one through the automorphism.
    for u in represent_constrained_all(G_10_16, m, CongruenceConstraint(clauses[:3])):
        try:
            g = automorphism_g(u)
        except ValueError:
            continue
        if _lemma_a_ok(g, lam) and G_10_16(g) == m:
            return g
    raise InternalInvariantViolation(f"no (a,b,c) for 80n-5lambda^2 with n={n}, lambda={lam}")


def _lemma_b_cc(lam):
    # c's sign is free: every condition is invariant under c -> -c.
    return CongruenceConstraint(
        (clause((1, 0, 0), 8, lam), clause((1, 5, 0), 11, 0), clause((0, 0, 1), 2, 1)),
        (False, False, True),
    )


def lemma_b_all(n: int, lam: int) -> list[tuple[int, int, int]]:
    return represent_constrained_all(B_8_44, 88 * n - 11 * lam * lam, _lemma_b_cc(lam))


def lemma_b(n: int, lam: int) -> tuple[int, int, int]:
    """88n - 11 lam^2 = a^2 + 8b^2 + 44c^2 with a + 5b = 0 (mod 11), c odd,
    a = lam (mod 8).  c is returned nonnegative."""
    _need_int("n", n)
    _check_lambda_odd(lam)
    if 8 * n < lam * lam:
        raise DomainError(f"need 8n >= lambda^2, got n={n}, lambda={lam}")
    v = represent_constrained(B_8_44, 88 * n - 11 * lam * lam, _lemma_b_cc(lam))
    if v is None:
        raise InternalInvariantViolation(f"no (a,b,c) for 88n-11lambda^2 with n={n}, lambda={lam}")
    return v


def constraint_thm12i(lam):
    return LinearConstraint((1, 1, 2, 2), Target.fixed(lam))


def constraint_thm12ii(lam):
    return LinearConstraint((1, 2, 3, 2), Target.fixed(lam))


def constraint_thm12iii(lam):
    return LinearConstraint((1, 2, 3, 0), Target.fixed(lam))


def constraint_thm13(lam):
    return LinearConstraint((1, 1, 1, 1), Target.fixed(lam))


def _try(n, v, form, lc):
    w = Witness(n, tuple(int(x) for x in v), form, lc, natural=False)
    if not w.is_valid():
        return None
    return make_witness(n, v, form, lc, natural=False)


def recover_thm12i(a, b, c, lam):
    """Candidates (x, y, z, w) from a lemma_b triple, one per admissible r."""
    out = []
    for r in range(11):
        s, e1 = divmod(a - lam + 16 * r, 88)
        t, e2 = divmod(b - 2 * lam - r, 11)
        u, e3 = divmod(c + lam, 2)
        if e1 or e2 or e3:
            continue
        out.append((lam + s + 2 * t - u, s + 2 * t + u, r - 6 * s - t, -r + 5 * s - t))
    return out


def recover_thm12ii(a, b, c, lam):
    out = []
    for r in range(10):
        s, e1 = divmod(a - 7 * lam - 8 * r, 80)
        u, e2 = divmod(c - lam + r, 5)
        t, e3 = divmod(b - lam + 4 * r, 8)
        if e1 or e2 or e3:
            continue
        out.append((lam + 7 * s + t + u, -r - 2 * s + 2 * t - u, -3 * s - t + u, r + 3 * s - t - u))
    return out


def decompose_thm12i(n: int, lam: int) -> Witness:
    """n = x^2 + y^2 + z^2 + 2w^2 over the integers with x + y + 2z + 2w = lam."""
    _need_int("n", n)
    _check_lambda_odd(lam)
    if 8 * n < lam * lam:
        raise DomainError(f"need 8n >= lambda^2, got n={n}, lambda={lam}")
    lc = constraint_thm12i(lam)
    first = lemma_b(n, lam)
    for abc in itertools.chain([first], lemma_b_all(n, lam)):
        for v in (sv for t in _signs(abc) for sv in recover_thm12i(*t, lam)):
            w = _try(n, v, FormId.F1112, lc)
            if w is not None:
                return w
    raise InternalInvariantViolation(f"recovery failed for every candidate, n={n}, lambda={lam}")


def decompose_thm12ii(n: int, lam: int) -> Witness:
    """n = x^2 + y^2 + z^2 + 2w^2 over the integers with x + 2y + 3z + 2w = lam."""
    _need_int("n", n)
    _check_lambda_odd(lam)
    if 16 * n < lam * lam:
        raise DomainError(f"need 16n >= lambda^2, got n={n}, lambda={lam}")
    lc = constraint_thm12ii(lam)
    first = lemma_a(n, lam)
    for abc in itertools.chain([first], lemma_a_all(n, lam)):
        for v in (sv for t in _signs(abc) for sv in recover_thm12ii(*t, lam)):
            w = _try(n, v, FormId.F1112, lc)
            if w is not None:
                return w
    raise InternalInvariantViolation(f"recovery failed for every candidate, n={n}, lambda={lam}")


def _all_reps(form, m):
    yield from represent_constrained_all(form, m, None)


def decompose_thm12iii(n: int, lam: int) -> Witness:
    """n^2 = x^2 + y^2 + z^2 + w^2 over the integers with x + 2y + 3z = lam."""
    _need_int("n", n)
    _check_lambda_odd(lam)
    if n < 1 or n % 2 == 0:
        raise DomainError(f"n must be a positive odd integer, got {n}")
    if lam % 7 == 0:
        raise DomainError(f"lambda must not be divisible by 7, got {lam}")
    if 14 * n * n < lam * lam:
        raise DomainError(f"need 14n^2 >= lambda^2, got n={n}, lambda={lam}")
    N = n * n
    m = 14 * N - lam * lam
    lc = constraint_thm12iii(lam)
    first = represent_constrained(R_FORM, m, None)
    if first is None:
        raise InternalInvariantViolation(f"{m} is not represented by 3x^2+5y^2+14z^2+2xy")
    for rep in itertools.chain([first], _all_reps(R_FORM, m)):
        for a, b, w in _signs(lift_R_to_h(rep)):
            if (a - 2 * lam) % 7 or (b - a) % 3:
                continue
            for r in range(3):
                s, e1 = divmod(a + 5 * lam + 14 * r, 42)
                t, e2 = divmod(b - lam + 5 * r, 3)
                if e1 or e2:
                    continue
                v = (lam - 5 * s + t, -3 * r + 4 * s + t, 2 * r - s - t, w)
                wit = _try(N, v, FormId.F1111, lc)
                if wit is not None:
                    return wit
    raise InternalInvariantViolation(f"recovery failed for every candidate, n={n}, lambda={lam}")


def thm13_applicable(n: int, lam: int, delta: int) -> str | None:
    """Reason the parameters fall outside the theorem, or None."""
    if delta not in (0, 1):
        return f"delta must be 0 or 1, got {delta}"
    if lam % 7 == 0:
        return f"lambda must not be divisible by 7, got {lam}"
    if n < 0:
        return f"n must be nonnegative, got {n}"
    if 7 * n < lam * lam:
        return f"need 7n >= lambda^2, got n={n}, lambda={lam}"
    if (n - lam) % (2 << delta) == 0:
        return f"need n != lambda (mod {2 << delta})"
    return None


def recover_thm13(a, b, c, lam):
    """Candidate tuples from an l-representation (a, b, c).

    The first recovery uses w = t - 4s, which satisfies both target
    equations identically under the parametrization; the second is the
    w = u - 4s variant, kept as an extra candidate.  Callers validate.
    """
    out = []
    for r in range(10):
        s, e1 = divmod(a + lam + 7 * r, 70)
        t, e2 = divmod(b + lam + 2 * r, 5)
        u, e3 = divmod(c + lam - r, 2)
        if e1 or e2 or e3:
            continue
        x, y, z = lam - s - t - u, r - s - t + u, -r + 6 * s + t
        out.append((x, y, z, -4 * s + t))
        out.append((x, y, z, -4 * s + u))
    return out


def decompose_thm13(n: int, lam: int, delta: int) -> Witness:
    """2n + delta = x^2 + y^2 + z^2 + 2w^2 over the integers with x + y + z + w = lam."""
    for name, v in (("n", n), ("lambda", lam), ("delta", delta)):
        _need_int(name, v)
    why = thm13_applicable(n, lam, delta)
    if why:
        raise DomainError(why)
    N = 2 * n + delta
    m = 14 * N - 4 * lam * lam
    lc = constraint_thm13(lam)
    tried = 0
    first = represent_constrained(RSTAR_FORM, m, None)
    if first is not None:
        for rep in itertools.chain([first], _all_reps(RSTAR_FORM, m)):
            for abc in _signs(lift_Rstar_to_l(rep)):
                for v in recover_thm13(*abc, lam):
                    tried += 1
                    wit = _try(N, v, FormId.F1112, lc)
                    if wit is not None:
                        return wit
    raise SearchExhausted(
        f"no validated recovery for n={n}, lambda={lam}, delta={delta}",
        [{"m": m, "represented": first is not None, "candidates_tried": tried}],
    )
