import numpy as np
import pytest

from redkp import (
    BiPoly,
    WordGuard,
    band_coefficients,
    build_companions,
    build_monodromy,
    build_shift_stars,
    matdet,
    rat,
    shift_stars,
    spectral_curve,
    spectral_duality,
    verify_word_append_rule,
)
from redkp.numeric import eigen_extension, fiber_x, matrix_eval
from redkp.lax import default_time
from redkp.yform import (
    BandCoefficients,
    companion_reference_report,
    reassemble,
)
from conftest import random_state


# -- band coefficients ---------------------------------------------------------


def test_bands_smallest_case(classic_state):
    """For single factors the bands are read straight off the two-factor
    product: a_{i,0} = V_i I_i, a_{i,1} = V_i + I_{i+1}, a_{i,2} = 1."""
    bc = band_coefficients(classic_state, 0)
    i_vals, v_vals = classic_state.i_slice(0), classic_state.v_slice(0)
    n = 2
    for i in range(n):
        assert bc.rows[i][0] == v_vals[i] * i_vals[i]
        assert bc.rows[i][1] == v_vals[i] + i_vals[(i + 1) % n]
        assert bc.rows[i][2] == 1


@pytest.mark.parametrize("M,K,N,seed", [(2, 1, 3, 1), (1, 2, 3, 2), (3, 2, 5, 3)])
def test_first_band_is_site_invariant(M, K, N, seed):
    st = random_state(M, K, N, seed=seed)
    t = default_time(st)
    bc = band_coefficients(st, t)
    u = st.site_invariants()
    assert bc.rows[0][0] == u[0]
    assert tuple(bc.rows[i][0] for i in range(N)) == u


@pytest.mark.parametrize(
    "M,K,N,seed", [(1, 1, 2, 4), (2, 1, 3, 5), (2, 3, 7, 6), (3, 2, 5, 7)]
)
def test_product_method_equals_word_method(M, K, N, seed):
    st = random_state(M, K, N, seed=seed)
    t = default_time(st, deep=True)
    assert band_coefficients(st, t, "product") == band_coefficients(st, t, "words")


@pytest.mark.parametrize("M,K,N,seed", [(1, 1, 2, 8), (2, 1, 3, 9), (3, 2, 5, 10)])
def test_reassembly_reproduces_monodromy(M, K, N, seed):
    st = random_state(M, K, N, seed=seed)
    t = default_time(st)
    bc = band_coefficients(st, t)
    assert reassemble(bc) == build_monodromy(st, t)


def test_word_guard():
    st = random_state(5, 4, 3, seed=11)
    t = default_time(st, deep=True)
    with pytest.raises(WordGuard):
        band_coefficients(st, t, "words")
    with pytest.raises(WordGuard):
        verify_word_append_rule(st, t)


# -- word append rule ---------------------------------------------------------------------


@pytest.mark.parametrize("M,K,N,seed", [(2, 1, 3, 12), (2, 3, 5, 13), (1, 1, 2, 14)])
def test_word_append_rule(M, K, N, seed):
    st = random_state(M, K, N, seed=seed)
    rep = verify_word_append_rule(st, default_time(st, deep=True))
    assert rep.ok
    assert rep.checked > 0


def test_word_append_rule_base_case():
    st = random_state(2, 1, 2, seed=15)
    t = default_time(st, deep=True)
    from redkp.yform import word_value

    i_ref = st.i_slice(t - (st.params.M - 1) * st.params.K)
    for i in range(2):
        # chi = "s": <sm> = <ss> * I^-_{i+1}
        assert word_value(st, t, "sm", i) == word_value(st, t, "ss", i) * i_ref[(i + 1) % 2]


# -- companions and duality --------------------------------------------------------------


def test_companion_reference_case():
    rep = companion_reference_report()
    assert rep["entries_match_display"] == {"00": True, "01": True, "10": True}
    assert rep["product_uses_plus_x"] is True
    assert rep["duality_holds"]["plus_x"] is True
    assert rep["duality_holds"]["minus_x"] is False


@pytest.mark.parametrize("M,K,N,seed", [(1, 1, 2, 16), (2, 1, 3, 17), (1, 2, 3, 18), (3, 2, 5, 19)])
def test_spectral_duality_exact(M, K, N, seed):
    st = random_state(M, K, N, seed=seed)
    t = default_time(st)
    rep = spectral_duality(st, t)
    assert rep.ok
    assert rep.ratio.term_count() == 1
    # the quotient is a bare sign: the companion product reproduces the curve
    # polynomial up to parity-dependent orientation
    assert rep.ratio in (BiPoly.one(), -BiPoly.one())
    curve = spectral_curve(st, t).poly
    assert rep.y_form in (curve, -curve)


def test_companion_eigen_relation_numeric():
    """Y(x0) w = y0 w for on-curve points, w the eigenvector extension."""
    st = random_state(2, 1, 3, seed=20)
    t = default_time(st)
    curve = spectral_curve(st, t)
    bc = band_coefficients(st, t)
    _, y_sym = build_companions(bc)
    for y0 in (0.7 + 0.2j, 1.3 - 0.5j):
        for pt in fiber_x(curve, y0):
            w = eigen_extension(st, t, pt)
            y_num = matrix_eval(y_sym, pt.x, 0.0)
            assert np.linalg.norm(y_num @ w - pt.y * w) <= 1e-8 * np.linalg.norm(y_num)


# -- star matrices -----------------------------------------------------------------------


def test_star_shapes_smallest(classic_state):
    t = 1  # stars need the factor slice one step below the band time
    bc = band_coefficients(classic_state, t)
    s_star, r_star, l_star = shift_stars(classic_state, t)
    e1 = BiPoly.x() - BiPoly.constant(bc.rows[0][0])
    e2 = BiPoly.constant(-bc.rows[0][1])
    assert s_star.entry(0, 0).is_zero() and s_star.entry(0, 1) == BiPoly.one()
    assert s_star.entry(1, 0) == e1 and s_star.entry(1, 1) == e2
    # det S* = -E_1 = a_{1,0} - x = U_1 - x for width 2
    u1 = classic_state.site_invariants()[0]
    assert matdet(s_star) == BiPoly.constant(u1) - BiPoly.x()


@pytest.mark.parametrize(
    "M,K,N,seed", [(1, 1, 2, 21), (2, 1, 3, 22), (1, 2, 3, 23), (2, 3, 5, 24), (3, 2, 5, 25)]
)
def test_star_determinants(M, K, N, seed):
    st = random_state(M, K, N, seed=seed)
    t = default_time(st, deep=True)
    s_star, r_star, l_star = shift_stars(st, t)
    width = M + K
    u1 = st.site_invariants()[0]
    sign = rat(1) if width % 2 == 0 else rat(-1)  # (-1)^(M+K)
    assert matdet(s_star) == (BiPoly.constant(u1) - BiPoly.x()) * sign
    expected_rl = BiPoly.monomial(1, 0, -sign)  # (-1)^(M+K+1) x
    assert matdet(r_star) == expected_rl
    assert matdet(l_star) == expected_rl
    # root form: det S* vanishes exactly at x = U_1
    assert matdet(s_star).evaluate(u1, 0) == 0


def test_star_wraps_when_width_exceeds_period():
    # M+K = 3 > N = 2: site values repeat periodically along the diagonal
    st = random_state(2, 1, 2, seed=26)
    t = default_time(st, deep=True)
    bc = band_coefficients(st, t)
    i_vals = st.i_slice(t - (2 - 1) * 1)
    v_vals = st.v_slice(t - 2)
    s_star, r_star, l_star = build_shift_stars(bc, i_vals, v_vals)
    assert r_star.entry(0, 0) == BiPoly.constant(i_vals[0])
    assert r_star.entry(1, 1) == BiPoly.constant(i_vals[1])
    # wrapped diagonal value on the closing row
    assert r_star.entry(2, 2) == BiPoly.constant(i_vals[0]) + BiPoly.constant(
        -bc.rows[0][2]
    )
    assert l_star.entry(2, 2) == BiPoly.constant(v_vals[0]) + BiPoly.constant(
        -bc.rows[0][2]
    )


def test_star_transport_numeric():
    """R* carries the y-form eigenvector to the (+K)-shifted trajectory,
    L* to the (-M)-shifted one."""
    st = random_state(1, 1, 3, seed=27)
    t = default_time(st, deep=True)
    curve = spectral_curve(st, t)
    _, y_t = build_companions(band_coefficients(st, t))
    _, y_up = build_companions(band_coefficients(st, t + st.params.K))
    _, y_dn = build_companions(band_coefficients(st, t - st.params.M))
    s_star, r_star, l_star = shift_stars(st, t)
    for y0 in (0.9 + 0.3j, 1.7 - 0.8j):
        for pt in fiber_x(curve, y0):
            w = eigen_extension(st, t, pt)
            for star, y_target in ((r_star, y_up), (l_star, y_dn)):
                w2 = matrix_eval(star, pt.x, 0.0) @ w
                y_num = matrix_eval(y_target, pt.x, 0.0)
                res = np.linalg.norm(y_num @ w2 - pt.y * w2)
                assert res <= 1e-8 * max(1.0, np.linalg.norm(y_num) * np.linalg.norm(w2))


def test_band_table_validation():
    with pytest.raises(Exception):
        BandCoefficients(n_sites=2, width=2, rows=((rat(1), rat(2), rat(5)),) * 2)
