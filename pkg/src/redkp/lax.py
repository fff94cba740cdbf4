"""Lax factors, monodromy matrices, the spectral curve and its special points.

The monodromy at time t is the ordered product of K lower-family factors and
M upper-family factors; its characteristic polynomial is independent of t,
which is the anchor identity of the whole package.  Conjugation by the corner
matrix S or by a single factor realises the site shift and the two time
shifts exactly, entirely in polynomial arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass

from .bipoly import BiPoly, bipoly_eval
from .errors import NonPolynomialResult, ExactDivisionError
from .lattice import LatticeParams, LatticeState
from .polymatrix import PolyMatrix, matdet
from .rational import Rational

SHIFT_SIGMA = "sigma"
SHIFT_MU_K = "mu_K"
SHIFT_MU_MINUS_M = "mu_minus_M"


def build_factor(values) -> PolyMatrix:
    """Banded factor: given values on the diagonal, 1 on the superdiagonal,
    the indeterminate y in the lower-left corner."""
    vals = [Rational(v) for v in values]
    n = len(vals)
    rows = [[BiPoly.zero() for _ in range(n)] for _ in range(n)]
    for i in range(n):
        rows[i][i] = BiPoly.constant(vals[i])
        if i + 1 < n:
            rows[i][i + 1] = BiPoly.one()
    corner = rows[n - 1][0] + BiPoly.y()
    rows[n - 1][0] = corner
    return PolyMatrix(rows)


def shift_matrix(n: int) -> PolyMatrix:
    """The corner matrix S: superdiagonal ones, y in the corner."""
    rows = [[BiPoly.zero() for _ in range(n)] for _ in range(n)]
    for i in range(n - 1):
        rows[i][i + 1] = BiPoly.one()
    rows[n - 1][0] = BiPoly.y()
    return PolyMatrix(rows)


def factor_r(state: LatticeState, t: int) -> PolyMatrix:
    return build_factor(state.i_slice(t))


def factor_l(state: LatticeState, t: int) -> PolyMatrix:
    return build_factor(state.v_slice(t))


def build_monodromy(state: LatticeState, t: int, form: str = "standard") -> PolyMatrix:
    """Ordered product of the K lower and M upper factors feeding time t.

    The standard form takes the upper factors at times t, t-K, ...,
    t-(M-1)K to the right of the lower factors at t, t-M, ..., t-(K-1)M.
    The alternate form is the provably equal product with every factor
    pushed through the exchange identity, i.e. upper factors at t-MK, ...,
    t-(2M-1)K followed by lower factors at t-KM, ..., t-(2K-1)M.
    """
    M, K = state.params.M, state.params.K
    if form == "standard":
        mats = [factor_l(state, t - j * M) for j in range(K - 1, -1, -1)]
        mats += [factor_r(state, t - j * K) for j in range(M)]
    elif form == "alternate":
        mats = [factor_r(state, t - (M + j) * K) for j in range(M)]
        mats += [factor_l(state, t - (K + j) * M) for j in range(K - 1, -1, -1)]
    else:
        raise ValueError(f"unknown monodromy form: {form}")
    out = mats[0]
    for m in mats[1:]:
        out = out @ m
    return out


@dataclass(frozen=True)
class CompatibilityReport:
    """Exact residual matrices of the three exchange identities at one time."""

    time: int
    factor_exchange: PolyMatrix      # L_t R_t - R_{t-M} L_{t-K}
    monodromy_r: PolyMatrix          # X_t R_{t-MK} - R_{t-MK} X_{t-K}
    monodromy_l: PolyMatrix          # L_{t-MK} X_t - X_{t-M} L_{t-MK}

    @property
    def all_zero(self) -> bool:
        return (
            self.factor_exchange.is_zero()
            and self.monodromy_r.is_zero()
            and self.monodromy_l.is_zero()
        )


def verify_compatibility(state: LatticeState, t: int) -> CompatibilityReport:
    M, K = state.params.M, state.params.K
    lhs = factor_l(state, t) @ factor_r(state, t)
    rhs = factor_r(state, t - M) @ factor_l(state, t - K)
    r_mid = factor_r(state, t - M * K)
    x_t = build_monodromy(state, t)
    x_tk = build_monodromy(state, t - K)
    l_mid = factor_l(state, t - M * K)
    x_tm = build_monodromy(state, t - M)
    return CompatibilityReport(
        time=t,
        factor_exchange=lhs - rhs,
        monodromy_r=(x_t @ r_mid) - (r_mid @ x_tk),
        monodromy_l=(l_mid @ x_t) - (x_tm @ l_mid),
    )


def _conjugate(a: PolyMatrix, x: PolyMatrix) -> PolyMatrix:
    """a x a^{-1} over the rational-function field, returned as polynomials."""
    det = matdet(a)
    raw = a @ x @ a.adjugate()
    try:
        return raw.exact_div_entries(det)
    except ExactDivisionError as exc:
        raise NonPolynomialResult(
            "conjugation produced non-polynomial entries; trajectory inconsistent"
        ) from exc


def apply_shift(state: LatticeState, t: int, which: str) -> PolyMatrix:
    """Conjugate the monodromy at t by S (site shift) or a factor (time shift).

    mu_K equals the independently built monodromy at t+K, mu_minus_M the one
    at t-M; sigma preserves the characteristic polynomial.
    """
    M, K = state.params.M, state.params.K
    x_t = build_monodromy(state, t)
    if which == SHIFT_SIGMA:
        conj = shift_matrix(state.params.N)
    elif which == SHIFT_MU_K:
        conj = factor_r(state, t - (M - 1) * K)
    elif which == SHIFT_MU_MINUS_M:
        conj = factor_l(state, t - M * K)
    else:
        raise ValueError(f"unknown shift: {which}")
    return _conjugate(conj, x_t)


@dataclass(frozen=True)
class SpectralCurve:
    """det(X_t(y) - x E), normalised so the x^N coefficient is +1."""

    poly: BiPoly
    deg_x: int
    deg_y: int
    params: LatticeParams

    def evaluate(self, x0, y0):
        return self.poly.evaluate(x0, y0)


def spectral_curve(state: LatticeState, t: int) -> SpectralCurve:
    params = state.params
    n = params.N
    x_t = build_monodromy(state, t)
    char = matdet(x_t - PolyMatrix.identity(n).scale(BiPoly.x()))
    if n % 2 == 1:
        char = -char
    lead = char.coefficient(n, 0)
    if lead != 1:
        raise AssertionError(f"x^{n} coefficient is {lead}, expected 1")
    curve = SpectralCurve(poly=char, deg_x=char.degree_x, deg_y=char.degree_y, params=params)
    if curve.deg_x != n or curve.deg_y != params.M + params.K:
        raise AssertionError(
            f"unexpected curve degrees ({curve.deg_x}, {curve.deg_y})"
        )
    return curve


@dataclass(frozen=True)
class SpecialPoints:
    """Distinguished finite curve points, plus the infinity-branch exponents."""

    a_points: tuple  # (0, y) with y the factor-determinant zero, j = 0..M-1
    b_points: tuple  # likewise for the lower family, j = 0..K-1
    q_points: tuple  # (U_j, 0), one per site
    p_branch: tuple | None  # (M+K, N) pole orders; present iff gcd(M+K, N) == 1

    def all_points(self):
        return list(self.a_points) + list(self.b_points) + list(self.q_points)


def special_points(state: LatticeState, t: int) -> SpecialPoints:
    """Locate the x=0 and y=0 points and verify each on the curve exactly.

    The y-coordinates are the exact roots of the factor determinants
    (product of the slice plus (-1)^{N+1} y), so they carry the (-1)^N
    factor for odd N.
    """
    params = state.params
    M, K, n = params.M, params.K, params.N
    curve = spectral_curve(state, t)
    sign = Rational(1) if n % 2 == 0 else Rational(-1)
    zero = Rational(0)
    a_pts = tuple((zero, sign * state.i_product(t - j * K)) for j in range(M))
    b_pts = tuple((zero, sign * state.v_product(t - j * M)) for j in range(K))
    q_pts = tuple((u, zero) for u in state.site_invariants())
    for (x0, y0) in (*a_pts, *b_pts, *q_pts):
        if bipoly_eval(curve.poly, x0, y0) != 0:
            raise AssertionError(f"special point ({x0}, {y0}) not on curve")
    p_branch = (M + K, n) if params.gcd_mkn_ok else None
    return SpecialPoints(a_points=a_pts, b_points=b_pts, q_points=q_pts, p_branch=p_branch)


def default_time(state: LatticeState, deep: bool = False) -> int:
    """Earliest time at which the monodromy is constructible from the initial
    data; with ``deep`` also every identity-check neighbour (X at t-K and t-M,
    the alternate form, and the exchange factors)."""
    M, K = state.params.M, state.params.K
    if deep:
        return max(state.i_min, state.v_min) + 2 * (M * K + M + K)
    return max(state.i_min + (M - 1) * K, state.v_min + (K - 1) * M)
