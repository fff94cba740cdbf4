"""Band coefficients and the companion (y-form) realisation of the monodromy.

The N x N eigenproblem in x unfolds into an infinite banded recursion of
width M+K whose cyclic coefficients a_{i,k} are rational numbers.  Reading
the same recursion as an eigenproblem in y yields an (M+K) x (M+K) matrix
built as an ordered product of per-row companion matrices; the corner and
factor conjugators get matching star realisations.

Two independent routes compute the band coefficients: sequential application
of the banded factors (polynomial time) and the two-letter word expansion
(exponential, the literal recursive definition); they must agree exactly.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .bipoly import BiPoly
from .errors import ExactDivisionError, SizeMismatch, WordGuard
from .lattice import LatticeState
from .lax import spectral_curve
from .polymatrix import PolyMatrix
from .rational import Rational

WORD_MAX_WIDTH = 8


@dataclass(frozen=True)
class BandCoefficients:
    """Cyclic band table a_{i,k}: N rows, columns k = 0..M+K."""

    n_sites: int
    width: int  # M + K
    rows: tuple  # rows[i][k]

    def __post_init__(self):
        if len(self.rows) != self.n_sites or any(
            len(r) != self.width + 1 for r in self.rows
        ):
            raise SizeMismatch("band table must be N x (M+K+1)")
        if any(r[self.width] != 1 for r in self.rows):
            raise AssertionError("leading band coefficient must be 1")

    def a(self, i: int, k: int):
        """Band value with cyclic site index (1-based rows wrap modulo N)."""
        return self.rows[i % self.n_sites][k]

    def e_values(self) -> tuple:
        """E_1 = x - a_{1,0}; E_{k+1} = -a_{1,k}: the closing row of the stars."""
        first = self.rows[0]
        e1 = BiPoly.x() - BiPoly.constant(first[0])
        return (e1,) + tuple(BiPoly.constant(-first[k]) for k in range(1, self.width))


def _xi(state: LatticeState, t: int, level: int, site: int):
    """Per-site multiplier of the level-th factor in the ordered product."""
    M, N = state.params.M, state.params.N
    if level <= M:
        return state.i_slice(t - (M - level) * state.params.K)[site % N]
    return state.v_slice(t - (level - M - 1) * M)[site % N]


def _bands_product(state: LatticeState, t: int) -> tuple:
    n = state.params.N
    width = state.params.M + state.params.K
    coeffs = [{0: Rational(1)} for _ in range(n)]
    for level in range(1, width + 1):
        nxt = []
        for i in range(n):
            row: dict = {}
            mult = _xi(state, t, level, i)
            for k, v in coeffs[i].items():
                row[k] = row.get(k, Rational(0)) + mult * v
            for k, v in coeffs[(i + 1) % n].items():
                row[k + 1] = row.get(k + 1, Rational(0)) + v
            nxt.append(row)
        coeffs = nxt
    return tuple(
        tuple(coeffs[i].get(k, Rational(0)) for k in range(width + 1))
        for i in range(n)
    )


def word_value(state: LatticeState, t: int, word: str, site: int):
    """Value of one {s,m}-word at a row index; the letter written first is the
    outermost (last applied) factor."""
    val = Rational(1)
    pos_site = site
    length = len(word)
    for pos, ch in enumerate(word):
        level = length - pos
        if ch == "m":
            val *= _xi(state, t, level, pos_site)
        elif ch == "s":
            pos_site += 1
        else:
            raise ValueError(f"bad letter {ch!r}")
    return val


def _bands_words(state: LatticeState, t: int) -> tuple:
    n = state.params.N
    width = state.params.M + state.params.K
    if width > WORD_MAX_WIDTH:
        raise WordGuard(f"word enumeration limited to width {WORD_MAX_WIDTH}")
    acc = [[Rational(0)] * (width + 1) for _ in range(n)]
    for letters in itertools.product("sm", repeat=width):
        word = "".join(letters)
        k = word.count("s")
        for i in range(n):
            acc[i][k] += word_value(state, t, word, i)
    return tuple(tuple(row) for row in acc)


def band_coefficients(state: LatticeState, t: int, method: str = "product") -> BandCoefficients:
    if method == "product":
        rows = _bands_product(state, t)
    elif method == "words":
        rows = _bands_words(state, t)
    else:
        raise ValueError(f"unknown band method: {method}")
    return BandCoefficients(
        n_sites=state.params.N, width=state.params.M + state.params.K, rows=rows
    )


def reassemble(bc: BandCoefficients) -> PolyMatrix:
    """Fold the band table back into the N x N matrix (y powers carry the wrap)."""
    n, width = bc.n_sites, bc.width
    rows = [[BiPoly.zero() for _ in range(n)] for _ in range(n)]
    for i in range(n):
        for k in range(width + 1):
            col = (i + k) % n
            wrap = (i + k) // n
            rows[i][col] = rows[i][col] + BiPoly.monomial(0, wrap, bc.rows[i][k])
    return PolyMatrix(rows)


def _companion(row, width: int) -> PolyMatrix:
    rows = [[BiPoly.zero() for _ in range(width)] for _ in range(width)]
    for r in range(width - 1):
        rows[r][r + 1] = BiPoly.one()
    rows[width - 1][0] = BiPoly.x() - BiPoly.constant(row[0])
    for k in range(1, width):
        rows[width - 1][k] = BiPoly.constant(-row[k])
    return PolyMatrix(rows)


def build_companions(bc: BandCoefficients):
    """Per-row companion matrices C_1..C_N and their ordered product Y = C_N...C_1.

    C_i advances the window (g_i, ..., g_{i+W-1}) by one site; the full cycle
    multiplies the window by y, so Y w = y w on the curve.  C_1 is the star
    realisation of the corner matrix.
    """
    companions = tuple(_companion(row, bc.width) for row in bc.rows)
    y_matrix = companions[0]
    for c in companions[1:]:
        y_matrix = c @ y_matrix
    return companions, y_matrix


def build_shift_stars(bc: BandCoefficients, i_values, v_values):
    """Star realisations (S*, R*, L*) of the corner matrix and the two factor
    conjugators; site values wrap cyclically when M+K exceeds N."""
    width = bc.width
    e_vals = bc.e_values()
    i_vals = [Rational(v) for v in i_values]
    v_vals = [Rational(v) for v in v_values]
    n_i, n_v = len(i_vals), len(v_vals)

    def shell(diag_vals, n_src):
        rows = [[BiPoly.zero() for _ in range(width)] for _ in range(width)]
        for r in range(width - 1):
            rows[r][r + 1] = BiPoly.one()
            if diag_vals is not None:
                rows[r][r] = BiPoly.constant(diag_vals[r % n_src])
        for k in range(width):
            rows[width - 1][k] = e_vals[k]
        if diag_vals is not None:
            rows[width - 1][width - 1] = rows[width - 1][width - 1] + BiPoly.constant(
                diag_vals[(width - 1) % n_src]
            )
        return PolyMatrix(rows)

    s_star = shell(None, 1)
    r_star = shell(i_vals, n_i)
    l_star = shell(v_vals, n_v)
    return s_star, r_star, l_star


def shift_stars(state: LatticeState, t: int):
    """Stars at time t, fetching the conjugating factor slices from history."""
    M, K = state.params.M, state.params.K
    bc = band_coefficients(state, t)
    i_slice = state.i_slice(t - (M - 1) * K)
    v_slice = state.v_slice(t - M * K)
    return build_shift_stars(bc, i_slice, v_slice)


@dataclass(frozen=True)
class WordAppendReport:
    """Check of the append rule <chi m> = <chi s> * I^-_{i+k} for every word."""

    width: int
    checked: int
    violations: tuple

    @property
    def ok(self) -> bool:
        return not self.violations


def verify_word_append_rule(state: LatticeState, t: int) -> WordAppendReport:
    M, K, n = state.params.M, state.params.K, state.params.N
    width = M + K
    if width > WORD_MAX_WIDTH:
        raise WordGuard(f"word enumeration limited to width {WORD_MAX_WIDTH}")
    i_ref = state.i_slice(t - (M - 1) * K)
    violations = []
    checked = 0
    for length in range(1, width):
        for letters in itertools.product("sm", repeat=length):
            chi = "".join(letters)
            k = chi.count("s")
            for i in range(n):
                lhs = word_value(state, t, chi + "m", i)
                rhs = word_value(state, t, chi + "s", i) * i_ref[(i + k) % n]
                checked += 1
                if lhs != rhs:
                    violations.append((chi, i))
    return WordAppendReport(width=width, checked=checked, violations=tuple(violations))


@dataclass(frozen=True)
class DualityReport:
    """Exact comparison of the two characteristic polynomials."""

    x_form: BiPoly  # det(X(y) - xE), normalised to +x^N
    y_form: BiPoly  # det(Y(x) - yE)
    ratio: BiPoly | None  # single-term quotient when the polys divide exactly

    @property
    def ok(self) -> bool:
        return self.ratio is not None and self.ratio.term_count() == 1


def spectral_duality(state: LatticeState, t: int) -> DualityReport:
    """det(Y - yE) must equal det(X - xE) up to a single-term unit; in practice
    the companion product reproduces the normalised curve polynomial exactly."""
    curve = spectral_curve(state, t).poly
    bc = band_coefficients(state, t)
    _, y_matrix = build_companions(bc)
    width = bc.width
    char_y = (y_matrix - PolyMatrix.identity(width).scale(BiPoly.y())).det()
    ratio = None
    for num, den in ((char_y, curve), (curve, char_y)):
        try:
            q = num.exact_div(den)
        except ExactDivisionError:
            continue
        if q.term_count() == 1:
            ratio = q
            break
    return DualityReport(x_form=curve, y_form=char_y, ratio=ratio)


def companion_reference_report() -> dict:
    """Fixed 3-site, width-2 reference case for the companion product.

    The band rows are (1,2,1), (3,4,1), (5,6,1).  A hand derivation of this
    Y can plausibly land on either sign of x inside the lower-right bracket,
    a2*(c1-x) - c2*(a2*b2 - b1 +- x); the companion product carries +x there
    (consistent with the top-right entry) and only the +x variant satisfies
    the x-form/y-form duality, so the report records both entries and which
    one is consistent.
    """
    a1, a2 = Rational(1), Rational(2)
    b1, b2 = Rational(3), Rational(4)
    c1, c2 = Rational(5), Rational(6)
    rows = (
        (a1, a2, Rational(1)),
        (b1, b2, Rational(1)),
        (c1, c2, Rational(1)),
    )
    bc = BandCoefficients(n_sites=3, width=2, rows=rows)
    _, y_matrix = build_companions(bc)
    x = BiPoly.x()
    expected = {
        (0, 0): b2 * (BiPoly.constant(a1) - x),
        (0, 1): BiPoly.constant(a2 * b2 - b1) + x,
        (1, 0): (BiPoly.constant(a1) - x)
        * (BiPoly.constant(c1) - x - BiPoly.constant(b2 * c2)),
    }
    plus_22 = a2 * (BiPoly.constant(c1) - x) - c2 * (BiPoly.constant(a2 * b2 - b1) + x)
    minus_22 = a2 * (BiPoly.constant(c1) - x) - c2 * (BiPoly.constant(a2 * b2 - b1) - x)
    matches = {f"{i}{j}": y_matrix.entry(i, j) == expected[(i, j)] for (i, j) in expected}
    # duality check for both sign variants of the lower-right entry; the raw
    # x-form characteristic polynomial is what the companion form reproduces
    x_char = (reassemble(bc) - PolyMatrix.identity(3).scale(BiPoly.x())).det()
    verdicts = {}
    for label, entry in (("plus_x", plus_22), ("minus_x", minus_22)):
        rows_m = y_matrix.rows
        rows_m[1][1] = entry
        variant = PolyMatrix(rows_m)
        char_y = (variant - PolyMatrix.identity(2).scale(BiPoly.y())).det()
        verdicts[label] = char_y == x_char
    return {
        "entries_match_display": matches,
        "product_entry_22": repr(y_matrix.entry(1, 1)),
        "plus_x_entry_22": repr(plus_22),
        "minus_x_entry_22": repr(minus_22),
        "product_uses_plus_x": y_matrix.entry(1, 1) == plus_22,
        "duality_holds": verdicts,
    }
