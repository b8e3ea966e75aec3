"""Brute-force ground truth.

Nothing here shares code with the constructive algorithms beyond the
integer helpers and the value types: decompositions are enumerated
directly by nested loops over the definiteness-bounded box.
"""

from __future__ import annotations

import builtins
from functools import lru_cache

import numpy as np

from . import _kernels as K
from .arith import isqrt, prime_table
from .errors import ConfigError, DomainError, ResourceLimit
from .model import FormId, LinearConstraint, Witness, make_witness

MAX_N = 10**8


def _check(n: int):
    if n < 0:
        raise DomainError(f"n must be >= 0, got {n}")
    if n > MAX_N:
        raise ResourceLimit(f"n = {n} exceeds the oracle cap {MAX_N}")


def _diag4(diag) -> np.ndarray:
    c = np.ones(4, np.int64)
    c[: len(diag)] = diag
    return c


def _grow(fn, *args, cap=64):
    while True:
        out = np.zeros((cap, 4), np.int64)
        count = fn(*args, out)
        if count <= cap:
            return out[:count]
        cap = count


def sign_variants(v) -> list[tuple[int, ...]]:
    """All sign changes of ``v`` ordered by mask (bit i negates coordinate i),
    skipping masks that would negate a zero."""
    out = []
    idx = list(builtins.enumerate(v))
    for mask in range(1 << len(v)):
        if any((mask >> i) & 1 and x == 0 for i, x in idx):
            continue
        out.append(tuple(-x if (mask >> i) & 1 else x for i, x in idx))
    return out


def enumerate(n: int, f: FormId, signed: bool = False) -> list[tuple[int, ...]]:  # noqa: A001
    """Every decomposition of ``n`` by ``f``.

    Unsigned: nonnegative tuples in lexicographic order.  Signed: grouped by
    absolute-value pattern (lexicographic), then by sign mask.
    """
    f = FormId.parse(f)
    _check(n)
    rows = _grow(K.oracle_enumerate, n, _diag4(f.diag), f.arity)
    base = [tuple(int(x) for x in r[: f.arity]) for r in rows]
    if not signed:
        return base
    return [s for v in base for s in sign_variants(v)]


def count(n: int, f: FormId) -> int:
    f = FormId.parse(f)
    _check(n)
    return int(K.oracle_enumerate(n, _diag4(f.diag), f.arity, np.zeros((0, 4), np.int64)))


def max_linear(n: int, f: FormId, lc: LinearConstraint) -> int:
    """Upper bound on |linear value| over decompositions of ``n``."""
    return sum(abs(a) * isqrt(n // c) for a, c in zip(lc.coeffs, f.diag))


@lru_cache(maxsize=4)
def _ptab(limit: int) -> np.ndarray:
    # round the size up so repeated calls share a table
    size = 1 << max(limit, 1).bit_length()
    return prime_table(size)


def _kernel_args(f: FormId, lc: LinearConstraint, n_max: int):
    if len(lc.coeffs) != f.arity:
        raise ConfigError(f"constraint has {len(lc.coeffs)} coefficients, form {f.value} has {f.arity}")
    a = np.zeros(4, np.int64)
    a[: f.arity] = lc.coeffs
    kind, param = lc.target.kernel_code()
    need = kind in (K.PRIME, K.PRIME_POWER)
    ptab = _ptab(max_linear(n_max, f, lc) + 2) if need else np.zeros(2, np.bool_)
    return _diag4(f.diag), a, kind, param, ptab


def exists_constrained(n: int, f: FormId, lc: LinearConstraint, signed: bool = False) -> Witness | None:
    """Least decomposition of ``n`` whose linear value lies in the target set.

    Order is lexicographic on the nonnegative tuple; in signed mode, the
    absolute-value pattern first and then the sign mask.
    """
    f = FormId.parse(f)
    _check(n)
    c, a, kind, param, ptab = _kernel_args(f, lc, n)
    out = np.zeros(4, np.int64)
    fn = K.oracle_first_signed if signed else K.oracle_first
    if not fn(n, c, f.arity, a, kind, param, ptab, out):
        return None
    return make_witness(n, out[: f.arity], f, lc, natural=not signed, route="oracle")


def _fast_perm(f: FormId, coeffs) -> list[int]:
    """Coordinates with a nonzero linear coefficient first, so the kernel can
    reject a prefix before looping over the rest."""
    idx = list(range(f.arity))
    return sorted(idx, key=lambda i: coeffs[i] == 0)


def exists_constrained_batch(ns, f: FormId, lc: LinearConstraint, order: str = "lex") -> tuple[np.ndarray, np.ndarray]:
    """Unsigned search for many ``n`` at once.

    Returns ``(found, tuples)``; row i of ``tuples`` is meaningful only
    where ``found[i]``.  Rows are padded to four columns.  With
    ``order="lex"`` each row is the lexicographically least witness; with
    ``order="fast"`` coordinates carrying the linear constraint are
    searched first, which decides existence much sooner when the
    constraint sits on trailing coordinates but may return another witness.
    """
    if order not in ("lex", "fast"):
        raise ConfigError(f"order must be 'lex' or 'fast', got {order!r}")
    f = FormId.parse(f)
    ns = np.asarray(ns, np.int64)
    if ns.size == 0:
        return np.zeros(0, np.bool_), np.zeros((0, 4), np.int64)
    _check(int(ns.max()))
    _check(int(ns.min()))
    c, a, kind, param, ptab = _kernel_args(f, lc, int(ns.max()))
    perm = _fast_perm(f, lc.coeffs) if order == "fast" else list(range(f.arity))
    full = perm + list(range(f.arity, 4))
    out = np.zeros((ns.size, 4), np.int64)
    found = np.zeros(ns.size, np.bool_)
    K.oracle_first_batch(ns, c[full].copy(), f.arity, a[full].copy(), kind, param, ptab, out, found)
    back = np.zeros((ns.size, 4), np.int64)
    back[:, full] = out
    return found, back


def represented_upto(diag, N: int) -> np.ndarray:
    """Boolean array: entry v is True iff some integer tuple gives ``v`` under
    the diagonal form with coefficients ``diag`` (3 or 4 of them)."""
    diag = tuple(int(x) for x in diag)
    if len(diag) not in (3, 4) or min(diag) <= 0:
        raise ConfigError(f"need 3 or 4 positive coefficients, got {diag}")
    _check(N)
    out = np.zeros(N + 1, np.bool_)
    K.oracle_represented(_diag4(diag), len(diag), N, out)
    return out


def exceptions(diag, N: int) -> list[int]:
    """Positive integers up to ``N`` not represented by the diagonal form."""
    rep = represented_upto(diag, N)
    return [int(v) for v in np.flatnonzero(~rep) if v > 0]
