import itertools

import numpy as np
import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from foursq.errors import ArityMismatch, DivisibilityError, DomainError, ResourceLimit
from foursq.forms import (
    B_8_44,
    DICKSON_1255,
    G_10_16,
    H_14_42,
    L_14_35,
    R_FORM,
    RSTAR_FORM,
    X2_5Y2_10Z2,
    X2_Y2_2Z2,
    CongruenceConstraint,
    QuadraticForm,
    automorphism_g,
    clause,
    lift_R_to_h,
    lift_Rstar_to_l,
    multiplier7,
    represent_all,
    represent_constrained,
    represent_constrained_all,
)


def grid_reps(form, m):
    """Independent numpy oracle: evaluate the form on a full signed box."""
    bounds = [int(np.sqrt(4 * m)) + 1] * form.arity
    axes = [np.arange(-b, b + 1) for b in bounds]
    mesh = np.meshgrid(*axes, indexing="ij")
    vals = sum(c * g * g for c, g in zip(form.diag, mesh)) + form.cross_xy * mesh[0] * mesh[1]
    pts = np.argwhere(vals == m)
    return sorted(tuple(int(axes[i][j]) for i, j in enumerate(p)) for p in pts)


def test_evaluate_examples():
    assert X2_5Y2_10Z2.evaluate((1, 0, 0)) == 1
    assert R_FORM.evaluate((1, 1, 0)) == 10
    assert DICKSON_1255.evaluate((1, 1, 1, 1)) == 13
    with pytest.raises(ArityMismatch):
        R_FORM.evaluate((1, 1))


def test_form_validation():
    with pytest.raises(DomainError):
        QuadraticForm((1, 0, 1))
    with pytest.raises(DomainError):
        QuadraticForm((1, 1, 1), cross_xy=2)
    with pytest.raises(ArityMismatch):
        QuadraticForm((1, 1))


@pytest.mark.parametrize("form", [X2_5Y2_10Z2, G_10_16, R_FORM, RSTAR_FORM, X2_Y2_2Z2, B_8_44])
def test_represent_all_matches_grid(form):
    for m in range(0, 60):
        assert represent_all(form, m) == grid_reps(form, m)


def test_represent_all_quaternary_matches_grid():
    for m in range(0, 30):
        assert represent_all(DICKSON_1255, m) == grid_reps(DICKSON_1255, m)


def test_represent_all_examples():
    reps = represent_all(G_10_16, 75)
    patterns = {tuple(abs(x) for x in v) for v in reps}
    assert patterns == {(7, 1, 1), (1, 1, 2)}
    assert len(reps) == 16
    assert represent_all(R_FORM, 0) == [(0, 0, 0)]
    assert (2, 1, 1) in represent_all(X2_Y2_2Z2, 7)
    assert represent_all(X2_5Y2_10Z2, 2) == []


def test_represent_rejects_bad_m():
    with pytest.raises(DomainError):
        represent_all(R_FORM, -1)
    with pytest.raises(ResourceLimit):
        represent_all(R_FORM, 1 << 50)


@given(st.integers(0, 3000), st.integers(2, 16), st.integers(0, 15), st.integers(-3, 3), st.integers(-3, 3))
def test_constrained_is_least_matching_rep(m, mod, res, a, b):
    cc = CongruenceConstraint((clause((a, b, 1), mod, res),))
    expect = [v for v in represent_all(G_10_16, m) if cc.holds(v)]
    assert represent_constrained_all(G_10_16, m, cc) == expect
    assert represent_constrained(G_10_16, m, cc) == (expect[0] if expect else None)


@given(st.integers(0, 3000))
def test_sign_free_restricts_to_nonnegative(m):
    cc = CongruenceConstraint((clause((1, 0, 0), 3, 1),), (False, True, True))
    expect = [v for v in represent_all(X2_5Y2_10Z2, m) if v[0] % 3 == 1 and v[1] >= 0 and v[2] >= 0]
    assert represent_constrained_all(X2_5Y2_10Z2, m, cc) == expect


def test_constrained_unsatisfiable_clause():
    cc = CongruenceConstraint((clause((0, 0, 0), 5, 1),))
    assert represent_constrained(R_FORM, 10, cc) is None


# identities, symbolically


def test_identities_symbolic():
    x, y, z, s, t, u, v = sympy.symbols("x y z s t u v")

    def g(a, b, c):
        return a**2 + 10 * b**2 + 16 * c**2

    def h(a, b, c):
        return a**2 + 14 * b**2 + 42 * c**2

    def ell(a, b, c):
        return a**2 + 14 * b**2 + 35 * c**2

    R = 3 * x**2 + 5 * y**2 + 14 * z**2 + 2 * x * y
    Rs = 3 * x**2 + 5 * y**2 + 7 * z**2 + 2 * x * y
    gx = (-3 * x + 16 * z) / 5
    gz = (x + 3 * z) / 5
    assert sympy.expand(g(gx, y, gz) - g(x, y, z)) == 0
    assert sympy.expand((-3 * gx + 16 * gz) / 5 - x) == 0
    assert sympy.expand(h(*lift_R_to_h((x, y, z))) - 3 * R) == 0
    assert sympy.expand(ell(*lift_Rstar_to_l((x, y, z))) - 5 * Rs) == 0
    q = s**2 + t**2 + u**2 + 2 * v**2
    X, Y, Z, W = multiplier7(s, t, u, v)
    assert sympy.expand(X**2 + Y**2 + Z**2 + 2 * W**2 - 7 * q) == 0


def test_parametrized_recoveries_symbolic():
    """The substitutions used to recover tuples satisfy both target equations."""
    s, t, u, r, lam = sympy.symbols("s t u r lam")
    # squared target: a = 70s - lam - 7r etc. with l(a, b, c) = 70 N - 20 lam^2
    a, b, c = 70 * s - lam - 7 * r, 5 * t - lam - 2 * r, 2 * u - lam + r
    N = sympy.expand((a**2 + 14 * b**2 + 35 * c**2 + 20 * lam**2) / 70)
    x, y, zz = lam - s - t - u, r - s - t + u, -r + 6 * s + t
    w = -4 * s + t
    assert sympy.expand(x**2 + y**2 + zz**2 + 2 * w**2 - N) == 0
    assert sympy.expand(x + y + zz + w - lam) == 0
    # the other choice of w fails the linear equation in general
    assert sympy.expand(x + y + zz + (-4 * s + u) - lam) != 0


def test_automorphism_g_examples():
    assert automorphism_g((7, 1, 1)) == (-1, 1, 2)
    assert automorphism_g((-1, 1, 2)) == (7, 1, 1)
    with pytest.raises(DivisibilityError):
        automorphism_g((1, 0, 0))


def test_multiplier7_example():
    assert multiplier7(1, 1, 1, 1) == (5, -1, -1, 2)


def test_lifts_examples():
    assert lift_R_to_h((1, 1, 0)) == (4, 1, 0)
    assert H_14_42.evaluate(lift_R_to_h((1, 1, 0))) == 3 * R_FORM.evaluate((1, 1, 0))
    assert L_14_35.evaluate(lift_Rstar_to_l((1, 2, 3))) == 5 * RSTAR_FORM.evaluate((1, 2, 3))


def test_identities_vectorized_numpy():
    rng = np.random.default_rng(7)
    v = rng.integers(-1000, 1001, size=(4, 2000))
    x, y, z, w = v
    assert np.all(H_14_42.evaluate(lift_R_to_h((x, y, z))) == 3 * R_FORM.evaluate((x, y, z)))
    assert np.all(L_14_35.evaluate(lift_Rstar_to_l((x, y, z))) == 5 * RSTAR_FORM.evaluate((x, y, z)))
    X, Y, Z, W = multiplier7(x, y, z, w)
    assert np.all(X**2 + Y**2 + Z**2 + 2 * W**2 == 7 * (x**2 + y**2 + z**2 + 2 * w**2))


def test_single_partition_counts_brute():
    def rep3(m):
        r = int(m**0.5) + 1
        return [v for v in itertools.product(range(r), repeat=3) if sum(c * c for c in v) == m and v[0] >= v[1] >= v[2]]

    for base in (2, 6, 14):
        assert len(rep3(base)) == 1
