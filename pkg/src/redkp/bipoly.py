"""Sparse bivariate polynomials over exact rationals.

Terms are stored as a map from exponent pairs ``(deg_x, deg_y)`` to nonzero
rational coefficients, so equality is structural and the spectral curves of
banded matrix products stay sparse.  Values are immutable after construction.
"""

from __future__ import annotations

from .errors import ExactDivisionError
from .rational import Rational, format_rational, parse_rational

_ZERO = Rational(0)
_ONE = Rational(1)


def _coerce(value) -> "BiPoly":
    if isinstance(value, BiPoly):
        return value
    return BiPoly.constant(value)


class BiPoly:
    """Polynomial in the indeterminates x and y with Rational coefficients."""

    __slots__ = ("_terms",)

    def __init__(self, terms=None):
        data = {}
        if terms:
            for (dx, dy), c in dict(terms).items():
                if dx < 0 or dy < 0:
                    raise ValueError("negative exponent")
                c = Rational(c)
                if c != 0:
                    data[(int(dx), int(dy))] = c
        self._terms = data

    @classmethod
    def _raw(cls, data: dict) -> "BiPoly":
        # internal: data already canonical (no zeros, int keys, Rational values)
        obj = cls.__new__(cls)
        obj._terms = data
        return obj

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls) -> "BiPoly":
        return cls._raw({})

    @classmethod
    def one(cls) -> "BiPoly":
        return cls._raw({(0, 0): _ONE})

    @classmethod
    def constant(cls, c) -> "BiPoly":
        c = Rational(c)
        return cls._raw({(0, 0): c} if c != 0 else {})

    @classmethod
    def x(cls) -> "BiPoly":
        return cls._raw({(1, 0): _ONE})

    @classmethod
    def y(cls) -> "BiPoly":
        return cls._raw({(0, 1): _ONE})

    @classmethod
    def monomial(cls, dx: int, dy: int, c=1) -> "BiPoly":
        c = Rational(c)
        if dx < 0 or dy < 0:
            raise ValueError("negative exponent")
        return cls._raw({(dx, dy): c} if c != 0 else {})

    # -- structure ---------------------------------------------------------

    def items(self):
        return self._terms.items()

    def coefficient(self, dx: int, dy: int):
        return self._terms.get((dx, dy), _ZERO)

    @property
    def degree_x(self) -> int:
        return max((dx for dx, _ in self._terms), default=-1)

    @property
    def degree_y(self) -> int:
        return max((dy for _, dy in self._terms), default=-1)

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return not self._terms or set(self._terms) == {(0, 0)}

    def term_count(self) -> int:
        return len(self._terms)

    # -- arithmetic ----------------------------------------------------------

    def __add__(self, other) -> "BiPoly":
        other = _coerce(other)
        out = dict(self._terms)
        for key, c in other._terms.items():
            s = out.get(key, _ZERO) + c
            if s == 0:
                out.pop(key, None)
            else:
                out[key] = s
        return BiPoly._raw(out)

    __radd__ = __add__

    def __neg__(self) -> "BiPoly":
        return BiPoly._raw({k: -c for k, c in self._terms.items()})

    def __sub__(self, other) -> "BiPoly":
        return self + (-_coerce(other))

    def __rsub__(self, other) -> "BiPoly":
        return _coerce(other) + (-self)

    def __mul__(self, other) -> "BiPoly":
        other = _coerce(other)
        a, b = self._terms, other._terms
        if not a or not b:
            return BiPoly._raw({})
        if len(a) > len(b):
            a, b = b, a
        out = {}
        get = out.get
        for (ax, ay), ac in a.items():
            for (bx, by), bc in b.items():
                key = (ax + bx, ay + by)
                cur = get(key)
                out[key] = ac * bc if cur is None else cur + ac * bc
        return BiPoly._raw({k: c for k, c in out.items() if c != 0})

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "BiPoly":
        if exponent < 0:
            raise ValueError("negative power")
        result = BiPoly.one()
        base = self
        e = exponent
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def exact_div(self, divisor: "BiPoly") -> "BiPoly":
        """Exact polynomial quotient; raises ExactDivisionError on remainder."""
        divisor = _coerce(divisor)
        if divisor.is_zero():
            raise ExactDivisionError("division by zero polynomial")
        if self.is_zero():
            return BiPoly.zero()
        lead_d = max(divisor._terms)  # lex order on (deg_x, deg_y)
        cd = divisor._terms[lead_d]
        rem = dict(self._terms)
        quot: dict = {}
        while rem:
            lead_r = max(rem)
            qx, qy = lead_r[0] - lead_d[0], lead_r[1] - lead_d[1]
            if qx < 0 or qy < 0:
                raise ExactDivisionError("leading term not divisible")
            qc = rem[lead_r] / cd
            quot[(qx, qy)] = qc
            for (dx, dy), c in divisor._terms.items():
                key = (dx + qx, dy + qy)
                s = rem.get(key, _ZERO) - qc * c
                if s == 0:
                    rem.pop(key, None)
                else:
                    rem[key] = s
        return BiPoly._raw(quot)

    # -- evaluation ----------------------------------------------------------

    def evaluate(self, x0, y0):
        """Exact value at a rational point; a ring homomorphism."""
        x0, y0 = Rational(x0), Rational(y0)
        total = _ZERO
        for (dx, dy), c in self._terms.items():
            total += c * x0**dx * y0**dy
        return total

    def evaluate_complex(self, x0: complex, y0: complex) -> complex:
        total = 0j
        for (dx, dy), c in self._terms.items():
            total += float(c) * x0**dx * y0**dy
        return total

    def subs_y(self, y0) -> list:
        """Exact coefficients in x after substituting a rational y0; dense, low to high."""
        y0 = Rational(y0)
        n = self.degree_x
        out = [_ZERO] * (n + 1)
        for (dx, dy), c in self._terms.items():
            out[dx] += c * y0**dy
        return out

    # -- serialization -------------------------------------------------------

    def to_records(self) -> list:
        return [
            {"dx": dx, "dy": dy, "c": format_rational(c)}
            for (dx, dy), c in sorted(self._terms.items())
        ]

    @classmethod
    def from_records(cls, records) -> "BiPoly":
        data = {}
        for rec in records:
            key = (int(rec["dx"]), int(rec["dy"]))
            if key in data:
                raise ValueError(f"duplicate term {key}")
            data[key] = parse_rational(rec["c"])
        return cls(data)

    # -- dunder --------------------------------------------------------------

    def __eq__(self, other) -> bool:
        if isinstance(other, BiPoly):
            return self._terms == other._terms
        if isinstance(other, (int, type(_ONE))):
            return self._terms == BiPoly.constant(other)._terms
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __repr__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for (dx, dy), c in sorted(self._terms.items(), reverse=True):
            mono = "".join(
                f"{v}^{d}" if d > 1 else v
                for v, d in (("x", dx), ("y", dy))
                if d > 0
            )
            if not mono:
                parts.append(format_rational(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append(f"-{mono}")
            else:
                parts.append(f"{format_rational(c)}*{mono}")
        out = " + ".join(parts)
        return out.replace("+ -", "- ")


X = BiPoly.x()
Y = BiPoly.y()


def bipoly_eval(p: BiPoly, x0, y0):
    """Exact evaluation of ``p`` at a rational point (x0, y0)."""
    return p.evaluate(x0, y0)
