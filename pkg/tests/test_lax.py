import pytest

from redkp import (
    BiPoly,
    InsufficientHistory,
    LatticeParams,
    PolyMatrix,
    bipoly_eval,
    build_factor,
    build_monodromy,
    matdet,
    new_state,
    rat,
    shift_matrix,
    special_points,
    spectral_curve,
    uniform_state,
    verify_compatibility,
)
from redkp.lax import (
    SHIFT_MU_K,
    SHIFT_MU_MINUS_M,
    SHIFT_SIGMA,
    apply_shift,
    default_time,
)
from conftest import random_state


def char_poly(m: PolyMatrix) -> BiPoly:
    return matdet(m - PolyMatrix.identity(m.n).scale(BiPoly.x()))


# -- factors ------------------------------------------------------------------


def test_build_factor_shape():
    f = build_factor([1, 5])
    assert f.entry(0, 0) == BiPoly.constant(1)
    assert f.entry(0, 1) == BiPoly.one()
    assert f.entry(1, 0) == BiPoly.y()
    assert f.entry(1, 1) == BiPoly.constant(5)


def test_build_factor_uniform():
    f = build_factor([rat(7, 2)] * 4)
    for i in range(4):
        assert f.entry(i, i) == BiPoly.constant(rat(7, 2))
        for j in range(4):
            if j == i + 1:
                assert f.entry(i, j) == BiPoly.one()
            elif j not in (i, i + 1) and (i, j) != (3, 0):
                assert f.entry(i, j).is_zero()
    assert f.entry(3, 0) == BiPoly.y()


def test_factor_determinant_small():
    assert matdet(build_factor([2, 3])) == BiPoly.constant(6) - BiPoly.y()


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_factor_determinant_sign(n):
    """det factor = (product of values) + (-1)^(N+1) y; the printed two-size
    shorthand 'product - y' is literally right only for even N."""
    vals = [rat(i + 2, 1 + (i % 3)) for i in range(n)]
    prod = rat(1)
    for v in vals:
        prod *= v
    sign = rat(-1) if n % 2 == 0 else rat(1)
    computed = matdet(build_factor(vals))
    assert computed == BiPoly.constant(prod) + BiPoly.monomial(0, 1, sign)
    assert (computed == BiPoly.constant(prod) - BiPoly.y()) == (n % 2 == 0)


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_shift_matrix_determinant(n):
    sign = rat(-1) if n % 2 == 0 else rat(1)  # (-1)^(N+1)
    assert matdet(shift_matrix(n)) == BiPoly.monomial(0, 1, sign)


# -- monodromy ------------------------------------------------------------------


def test_monodromy_single_factors(classic_state):
    x0 = build_monodromy(classic_state, 0)
    lhs = build_factor(classic_state.v_slice(0)) @ build_factor(classic_state.i_slice(0))
    assert x0 == lhs  # hand multiplication of the two 2x2 factors
    assert x0.entry(0, 0) == BiPoly.constant(2) + BiPoly.y()
    assert x0.entry(0, 1) == BiPoly.constant(4)
    assert x0.entry(1, 0) == BiPoly.monomial(0, 1, 7)
    assert x0.entry(1, 1) == BiPoly.y() + BiPoly.constant(15)


@pytest.mark.parametrize("M,K,N,seed", [(2, 1, 3, 4), (1, 2, 3, 5), (2, 3, 5, 6), (3, 2, 5, 1)])
def test_standard_equals_alternate(M, K, N, seed):
    st = random_state(M, K, N, seed=seed)
    t = default_time(st, deep=True)
    assert build_monodromy(st, t, "standard") == build_monodromy(st, t, "alternate")


def test_monodromy_insufficient_history():
    st = random_state(2, 1, 3, seed=2)
    with pytest.raises(InsufficientHistory):
        build_monodromy(st, st.i_min - 1)


# -- compatibility -----------------------------------------------------------------


def test_compatibility_uniform():
    st = uniform_state(LatticeParams(2, 1, 3), 3, 2)
    rep = verify_compatibility(st, default_time(st, deep=True))
    assert rep.all_zero


def test_compatibility_classic_after_steps(classic_state):
    classic_state.evolve_to(5)
    rep = verify_compatibility(classic_state, 4)
    assert rep.all_zero


def test_compatibility_negative_control():
    st = random_state(1, 1, 2, seed=8)
    st.evolve_to(6)
    corrupted = st.copy()
    vals = list(corrupted.v_slice(3))
    vals[0] += 1  # break one slice; the exchange identities must notice
    corrupted._v[3] = tuple(vals)
    rep = verify_compatibility(corrupted, 4)
    assert not rep.all_zero


# -- shifts ---------------------------------------------------------------------------


@pytest.mark.parametrize("M,K,N,seed", [(1, 1, 3, 3), (2, 1, 3, 4), (2, 3, 5, 5)])
def test_mu_k_matches_rebuild(M, K, N, seed):
    st = random_state(M, K, N, seed=seed)
    t = default_time(st, deep=True)
    assert apply_shift(st, t, SHIFT_MU_K) == build_monodromy(st, t + K)


def test_mu_minus_m_matches_rebuild():
    st = random_state(2, 1, 3, seed=9)
    t = default_time(st, deep=True)
    assert apply_shift(st, t, SHIFT_MU_MINUS_M) == build_monodromy(st, t - 2)


def test_sigma_preserves_char_poly():
    st = random_state(1, 2, 3, seed=10)
    t = default_time(st, deep=True)
    assert char_poly(apply_shift(st, t, SHIFT_SIGMA)) == char_poly(build_monodromy(st, t))


def test_shift_round_trip():
    # M applications of the (+K)-shift then K of the (-M)-shift realise
    # t -> t + MK -> t; each hop must match the independent rebuild and the
    # composition must land back on X_t entrywise.
    M, K = 2, 1
    st = random_state(M, K, 3, seed=11)
    t = default_time(st, deep=True)
    start = build_monodromy(st, t)
    for j in range(M):
        hop = apply_shift(st, t + j * K, SHIFT_MU_K)
        assert hop == build_monodromy(st, t + (j + 1) * K)
    for j in range(K):
        hop = apply_shift(st, t + M * K - j * M, SHIFT_MU_MINUS_M)
        assert hop == build_monodromy(st, t + M * K - (j + 1) * M)
    assert hop == start


# -- spectral curve ---------------------------------------------------------------------


def test_classic_curve_closed_form(classic_state):
    curve = spectral_curve(classic_state, 0)
    expected = BiPoly(
        {(0, 2): 1, (1, 1): -2, (0, 1): -11, (2, 0): 1, (1, 0): -17, (0, 0): 30}
    )
    assert curve.poly == expected
    assert curve.deg_x == 2 and curve.deg_y == 2


def test_zeta_seeded_curve_closed_form():
    zeta = rat(10)
    i1, v1 = [rat(3), rat(7)], [rat(2), rat(5)]
    st = new_state(LatticeParams(2, 1, 2), {-1: [zeta, zeta], 0: i1}, {0: v1})
    curve = spectral_curve(st, 0)
    u1 = i1[0] * i1[1] + v1[0] * v1[1]
    u2 = v1[0] * i1[0] + v1[1] * i1[1]
    u3 = i1[0] * i1[1] * v1[0] * v1[1]
    u4 = i1[0] + i1[1] + v1[0] + v1[1]
    expected = BiPoly(
        {
            (0, 3): -1,
            (0, 2): zeta * zeta + u1,
            (1, 1): -(2 * zeta + u4),
            (0, 1): -(zeta * zeta * u1 + u3),
            (2, 0): 1,
            (1, 0): -zeta * u2,
            (0, 0): zeta * zeta * u3,
        }
    )
    assert curve.poly == expected


@pytest.mark.parametrize("M,K,N,seed", [(1, 1, 2, 1), (2, 1, 3, 2), (3, 2, 5, 3)])
def test_curve_time_invariance(M, K, N, seed):
    st = random_state(M, K, N, seed=seed)
    t = default_time(st)
    c0 = spectral_curve(st, t).poly
    for dt in range(1, 4):
        assert spectral_curve(st, t + dt).poly == c0


# -- special points -----------------------------------------------------------------------


def test_special_points_classic(classic_state):
    sp = special_points(classic_state, 0)
    assert sp.a_points == ((rat(0), rat(6)),)
    assert sp.b_points == ((rat(0), rat(5)),)
    assert set(sp.q_points) == {(rat(2), rat(0)), (rat(15), rat(0))}
    assert sp.p_branch is None  # gcd(2, 2) != 1


def test_special_points_on_curve_exactly():
    st = random_state(2, 1, 3, seed=12)
    t = default_time(st)
    curve = spectral_curve(st, t).poly
    sp = special_points(st, t)
    for (x0, y0) in sp.all_points():
        assert bipoly_eval(curve, x0, y0) == 0
    assert sp.p_branch == (3, 3) if st.params.gcd_mkn_ok else sp.p_branch is None


def test_special_points_case_b_coincide():
    st = uniform_state(LatticeParams(1, 1, 3), 2, 1)
    sp = special_points(st, 0)
    assert len(set(sp.q_points)) == 1
    assert sp.p_branch == (2, 3)


def test_x_at_zero_triangular_with_invariant_diagonal():
    st = random_state(3, 2, 5, seed=13)
    t = default_time(st)
    x0 = build_monodromy(st, t)
    u = st.site_invariants()
    for i in range(5):
        for j in range(5):
            val = x0.entry(i, j).evaluate(0, 0)
            if i > j:
                assert val == 0
        assert x0.entry(i, i).evaluate(0, 0) == u[i]


def test_product_of_factor_determinants():
    st = random_state(2, 1, 3, seed=14)
    t = default_time(st)
    x_t = build_monodromy(st, t)
    det_x = matdet(x_t)
    prod = matdet(build_factor(st.v_slice(t)))
    for j in range(2):
        prod = prod * matdet(build_factor(st.i_slice(t - j)))
    assert det_x == prod
