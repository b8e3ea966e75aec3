"""Compiled inner loops.

The functions here are written in the subset of Python that numba can
compile.  When numba is unavailable they run unchanged as plain Python,
which is slow but gives identical results.

Two independent families live here and share nothing but ``_isqrt``:

* ``form_*`` kernels back :mod:`foursq.forms` (and through it the
  constructive algorithms);
* ``oracle_*`` kernels back the brute-force :mod:`foursq.oracle`.
"""

import numpy as np

try:
    from numba import njit
except ImportError:  # pragma: no cover - exercised only without numba
    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]):
            return args[0]
        return lambda f: f

# Target kinds for linear-form membership tests.
PRIME = 0
PRIME_POWER = 1
EVEN_POWER = 2
FIXED = 3
SQUARE = 4
ANY = 5


@njit(cache=True)
def _isqrt(t):
    if t <= 0:
        return 0
    r = np.int64(np.sqrt(np.float64(t)))
    while r * r > t:
        r -= 1
    while (r + 1) * (r + 1) <= t:
        r += 1
    return r


@njit(cache=True)
def _iroot(t, k):
    if t <= 1 or k == 1:
        return t
    r = np.int64(np.float64(t) ** (1.0 / k))
    if r < 1:
        r = 1
    while r > 1 and r**k > t:
        r -= 1
    while (r + 1) ** k <= t:
        r += 1
    return r


# ---------------------------------------------------------------------------
# forms


@njit(cache=True)
def form_enumerate(diag, arity, cross, m, out):
    """Every integer tuple with form value m, written unsorted into ``out``.

    Loops run over the trailing coordinates; the first coordinate is solved
    from the quadratic residual.  Returns the total count, which may exceed
    ``out.shape[0]`` (the caller then retries with a larger buffer).
    """
    cap = out.shape[0]
    count = 0
    d0 = diag[0]
    d1 = diag[1]
    d2 = diag[2]
    d3 = diag[3] if arity == 4 else 1
    W = _isqrt(m // d3) if arity == 4 else 0
    for w in range(-W, W + 1):
        r3 = m - (d3 * w * w if arity == 4 else 0)
        Z = _isqrt(r3 // d2)
        for z in range(-Z, Z + 1):
            r2 = r3 - d2 * z * z
            # d1*y^2 + cross*x*y + d0*x^2 = r2 solvable over reals needs
            # (4 d0 d1 - cross^2) y^2 <= 4 d0 r2.
            Y = _isqrt(4 * d0 * r2 // (4 * d0 * d1 - cross * cross))
            for y in range(-Y, Y + 1):
                D = cross * cross * y * y - 4 * d0 * (d1 * y * y - r2)
                if D < 0:
                    continue
                s = _isqrt(D)
                if s * s != D:
                    continue
                for sg in (-1, 1):
                    if s == 0 and sg == 1:
                        continue
                    numer = -cross * y + sg * s
                    if numer % (2 * d0) != 0:
                        continue
                    x = numer // (2 * d0)
                    if count < cap:
                        out[count, 0] = x
                        out[count, 1] = y
                        out[count, 2] = z
                        out[count, 3] = w
                    count += 1
    return count


@njit(cache=True)
def _clauses_ok(level, cur, ccoef, cmod, cres, clevel):
    for c in range(cmod.shape[0]):
        if clevel[c] != level:
            continue
        s = 0
        for j in range(level + 1):
            s += ccoef[c, j] * cur[j]
        if (s - cres[c]) % cmod[c] != 0:
            return False
    return True


@njit(cache=True)
def _level_range(level, diag, cross, cur, R, nonneg):
    if level == 1 and cross != 0:
        x = cur[0]
        D = cross * cross * x * x + 4 * diag[1] * R
        if D < 0:
            return 1, 0
        s = _isqrt(D)
        lo = (-cross * x - s) // (2 * diag[1]) - 1
        hi = (-cross * x + s) // (2 * diag[1]) + 1
    elif level == 0 and cross != 0:
        hi = _isqrt(4 * diag[1] * R // (4 * diag[0] * diag[1] - cross * cross)) + 1
        lo = -hi
    else:
        hi = _isqrt(R // diag[level])
        lo = -hi
    if nonneg[level] and lo < 0:
        lo = 0
    return lo, hi


@njit(cache=True)
def _align(level, lo, cur, ccoef, cmod, cres, sclause, sinv):
    sc = sclause[level]
    if sc < 0:
        return lo, 1
    M = cmod[sc]
    part = 0
    for j in range(level):
        part += ccoef[sc, j] * cur[j]
    target = ((cres[sc] - part) * sinv[level]) % M
    return lo + (target - lo) % M, M


@njit(cache=True)
def form_lex_search(diag, arity, cross, m, ccoef, cmod, cres, clevel, sclause, sinv, nonneg, out, first_only):
    """Tuples with form value m meeting every congruence clause, produced in
    lexicographic order (negatives before positives).

    The first ``arity - 1`` coordinates are iterated odometer-style, the
    last one is solved by a square test.  A clause is checked as soon as
    its highest-index variable is fixed; ``sclause[level] >= 0`` names a
    clause whose coefficient at that level is invertible (inverse in
    ``sinv``) so the level steps through a single residue class.
    """
    cap = out.shape[0]
    count = 0
    last = arity - 1
    dl = diag[last]
    cur = np.zeros(4, np.int64)
    hi = np.zeros(4, np.int64)
    step = np.ones(4, np.int64)
    rem = np.zeros(5, np.int64)
    rem[0] = m
    level = 0
    lo, h = _level_range(0, diag, cross, cur, m, nonneg)
    cur[0], step[0] = _align(0, lo, cur, ccoef, cmod, cres, sclause, sinv)
    hi[0] = h
    while True:
        if cur[level] > hi[level]:
            if level == 0:
                break
            level -= 1
            cur[level] += step[level]
            continue
        v = cur[level]
        R = rem[level] - diag[level] * v * v
        if level == 1:
            R -= cross * cur[0] * v
        if R < 0 or not _clauses_ok(level, cur, ccoef, cmod, cres, clevel):
            cur[level] += step[level]
            continue
        if level + 1 == last:
            if R % dl == 0:
                t = R // dl
                r = _isqrt(t)
                if r * r == t:
                    for sg in (-1, 1):
                        if sg == -1 and (r == 0 or nonneg[last]):
                            continue
                        cur[last] = sg * r
                        if _clauses_ok(last, cur, ccoef, cmod, cres, clevel):
                            if count < cap:
                                for j in range(arity):
                                    out[count, j] = cur[j]
                            count += 1
                            if first_only:
                                return count
            cur[level] += step[level]
            continue
        rem[level + 1] = R
        level += 1
        lo, h = _level_range(level, diag, cross, cur, R, nonneg)
        cur[level], step[level] = _align(level, lo, cur, ccoef, cmod, cres, sclause, sinv)
        hi[level] = h
    return count


# ---------------------------------------------------------------------------
# oracle


@njit(cache=True)
def _target_ok(L, kind, param, ptab):
    if kind == ANY:
        return True
    if kind == FIXED:
        return L == param
    if L < 0:
        return False
    if kind == SQUARE:
        r = _isqrt(L)
        return r * r == L
    if kind == PRIME:
        return L < ptab.shape[0] and ptab[L]
    r = _iroot(L, param)
    if r**param != L:
        return False
    if kind == PRIME_POWER:
        return r < ptab.shape[0] and ptab[r]
    return r % 2 == 0  # EVEN_POWER


@njit(cache=True)
def oracle_first(n, c, arity, a, kind, param, ptab, out):
    """Least nonnegative tuple (lexicographic) with diagonal form value n and
    linear value in the target set.  Writes ``out`` and returns True if one
    exists."""
    c0 = c[0]
    c1 = c[1]
    c2 = c[2]
    c3 = c[3]
    for x in range(_isqrt(n // c0) + 1):
        r1 = n - c0 * x * x
        for y in range(_isqrt(r1 // c1) + 1):
            r2 = r1 - c1 * y * y
            P = a[0] * x + a[1] * y
            if arity == 3:
                if r2 % c2 != 0:
                    continue
                t = r2 // c2
                z = _isqrt(t)
                if z * z == t and _target_ok(P + a[2] * z, kind, param, ptab):
                    out[0] = x
                    out[1] = y
                    out[2] = z
                    out[3] = 0
                    return True
                continue
            zmax = _isqrt(r2 // c2)
            if a[2] == 0 and a[3] == 0:
                if not _target_ok(P, kind, param, ptab):
                    continue
                for z in range(zmax + 1):
                    r3 = r2 - c2 * z * z
                    if r3 % c3 != 0:
                        continue
                    t = r3 // c3
                    w = _isqrt(t)
                    if w * w == t:
                        out[0] = x
                        out[1] = y
                        out[2] = z
                        out[3] = w
                        return True
                continue
            if a[3] == 0 and a[2] > 0 and kind == SQUARE:
                # walk the squares P + a2*z instead of every z
                s = _isqrt(P)
                if s * s < P:
                    s += 1
                while s * s - P <= a[2] * zmax:
                    d = s * s - P
                    s += 1
                    if d % a[2] != 0:
                        continue
                    z = d // a[2]
                    r3 = r2 - c2 * z * z
                    if r3 % c3 != 0:
                        continue
                    t = r3 // c3
                    w = _isqrt(t)
                    if w * w == t:
                        out[0] = x
                        out[1] = y
                        out[2] = z
                        out[3] = w
                        return True
                continue
            for z in range(zmax + 1):
                r3 = r2 - c2 * z * z
                if r3 % c3 != 0:
                    continue
                t = r3 // c3
                w = _isqrt(t)
                if w * w == t and _target_ok(P + a[2] * z + a[3] * w, kind, param, ptab):
                    out[0] = x
                    out[1] = y
                    out[2] = z
                    out[3] = w
                    return True
    return False


@njit(cache=True)
def oracle_first_batch(ns, c, arity, a, kind, param, ptab, out, found):
    for i in range(ns.shape[0]):
        found[i] = oracle_first(ns[i], c, arity, a, kind, param, ptab, out[i])


@njit(cache=True)
def oracle_first_signed(n, c, arity, a, kind, param, ptab, out):
    """Signed variant: absolute-value patterns in lexicographic order, and for
    each pattern the sign masks 0..2^arity-1 (bit i set = coordinate i
    negated), skipping masks that negate a zero coordinate."""
    v = np.zeros(4, np.int64)
    for x in range(_isqrt(n // c[0]) + 1):
        r1 = n - c[0] * x * x
        for y in range(_isqrt(r1 // c[1]) + 1):
            r2 = r1 - c[1] * y * y
            zmax = _isqrt(r2 // c[2])
            zlo = zmax if arity == 3 else 0
            for z in range(zlo, zmax + 1):
                r3 = r2 - c[2] * z * z
                if arity == 3:
                    if r3 != 0:
                        continue
                    w = 0
                else:
                    if r3 % c[3] != 0:
                        continue
                    t = r3 // c[3]
                    w = _isqrt(t)
                    if w * w != t:
                        continue
                v[0] = x
                v[1] = y
                v[2] = z
                v[3] = w
                for mask in range(1 << arity):
                    L = 0
                    skip = False
                    for i in range(arity):
                        if (mask >> i) & 1:
                            if v[i] == 0:
                                skip = True
                                break
                            L -= a[i] * v[i]
                        else:
                            L += a[i] * v[i]
                    if skip:
                        continue
                    if _target_ok(L, kind, param, ptab):
                        for i in range(4):
                            out[i] = -v[i] if (mask >> i) & 1 else v[i]
                        return True
    return False


@njit(cache=True)
def oracle_enumerate(n, c, arity, out):
    """All nonnegative tuples with diagonal form value n, lexicographic."""
    cap = out.shape[0]
    count = 0
    for x in range(_isqrt(n // c[0]) + 1):
        r1 = n - c[0] * x * x
        for y in range(_isqrt(r1 // c[1]) + 1):
            r2 = r1 - c[1] * y * y
            if arity == 2:
                continue
            zmax = _isqrt(r2 // c[2])
            for z in range(zmax + 1):
                r3 = r2 - c[2] * z * z
                if arity == 3:
                    if r3 != 0:
                        continue
                    w = 0
                else:
                    if r3 % c[3] != 0:
                        continue
                    t = r3 // c[3]
                    w = _isqrt(t)
                    if w * w != t:
                        continue
                if count < cap:
                    out[count, 0] = x
                    out[count, 1] = y
                    out[count, 2] = z
                    out[count, 3] = w
                count += 1
    return count


@njit(cache=True)
def oracle_represented(c, arity, N, out):
    """out[v] = True for every v <= N represented by the diagonal form."""
    for x in range(_isqrt(N // c[0]) + 1):
        r1 = c[0] * x * x
        for y in range(_isqrt((N - r1) // c[1]) + 1):
            r2 = r1 + c[1] * y * y
            for z in range(_isqrt((N - r2) // c[2]) + 1):
                r3 = r2 + c[2] * z * z
                if arity == 3:
                    out[r3] = True
                    continue
                for w in range(_isqrt((N - r3) // c[3]) + 1):
                    out[r3 + c[3] * w * w] = True


@njit(cache=True)
def oracle_linear_values(c, arity, a, N, off, out):
    """out[v, L + off] = 1 whenever some signed tuple has form value v <= N
    and linear value L."""
    for x in range(_isqrt(N // c[0]) + 1):
        r1 = c[0] * x * x
        for y in range(_isqrt((N - r1) // c[1]) + 1):
            r2 = r1 + c[1] * y * y
            for z in range(_isqrt((N - r2) // c[2]) + 1):
                r3 = r2 + c[2] * z * z
                wmax = _isqrt((N - r3) // c[3]) if arity == 4 else 0
                for w in range(wmax + 1):
                    val = r3 + (c[3] * w * w if arity == 4 else 0)
                    for sx in (1, -1):
                        if sx == -1 and x == 0:
                            continue
                        for sy in (1, -1):
                            if sy == -1 and y == 0:
                                continue
                            for sz in (1, -1):
                                if sz == -1 and z == 0:
                                    continue
                                for sw in (1, -1):
                                    if sw == -1 and w == 0:
                                        continue
                                    L = a[0] * sx * x + a[1] * sy * y + a[2] * sz * z + a[3] * sw * w
                                    out[val, L + off] = 1
