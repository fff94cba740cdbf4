"""Periodic lattice data and exact time evolution.

A state holds the two families of period-N slices I and V.  Advancing one
time step solves the cyclic one-step equations

    x_n = a_{n-1} + b_n - y_{n-1},      y_n = a_n b_n / x_n

(a = I-slice M steps back, b = V-slice K steps back) by forming the 2x2
monodromy of the associated linear-fractional recursion over the rationals
and taking the fixed point belonging to the eigenvalue prod(a).  Both
candidate eigenvalues, prod(a) and prod(b), are rational, so the selected
branch is exactly representable and the product conservation laws hold with
zero error; prod(b) is the excluded trivial branch.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from math import gcd

from .errors import (
    DegenerateEvolution,
    GcdViolation,
    InsufficientHistory,
    SingularStep,
    SizeMismatch,
    ZeroValue,
)
from .rational import Rational, format_rational, parse_rational

CASE_A = "case_a"
CASE_B = "case_b"
CASE_MIXED = "mixed"


@dataclass(frozen=True)
class LatticeParams:
    M: int
    K: int
    N: int

    def __post_init__(self):
        if self.M < 1 or self.K < 1 or self.N < 1:
            raise SizeMismatch("M, K, N must be positive")
        if gcd(self.M, self.K) != 1:
            raise GcdViolation(f"gcd(M,K) = {gcd(self.M, self.K)} != 1")

    @property
    def gcd_mkn_ok(self) -> bool:
        """Recorded, not enforced: the unique-infinity-point condition."""
        return gcd(self.M + self.K, self.N) == 1


@dataclass(frozen=True)
class Slice:
    kind: str  # "I" or "V"
    time: int
    values: tuple


def _check_values(values, n: int, label: str) -> tuple:
    vals = tuple(Rational(v) for v in values)
    if len(vals) != n:
        raise SizeMismatch(f"{label}: expected {n} values, got {len(vals)}")
    if any(v == 0 for v in vals):
        raise ZeroValue(f"{label}: zero lattice value")
    return vals


def _product(values):
    p = Rational(1)
    for v in values:
        p *= v
    return p


def monodromy_closure(a, b):
    """2x2 monodromy T of the cyclic step recursion, with its exact identities.

    Returns (T, prod_a, prod_b).  trace(T) == prod_a + prod_b and
    det(T) == prod_a * prod_b hold exactly; their failure would indicate
    corrupted inputs, so they are asserted here.
    """
    n = len(a)
    t11, t12, t21, t22 = Rational(1), Rational(0), Rational(0), Rational(1)
    for i in range(n):
        am1 = a[i - 1]
        m11, m12 = am1 + b[i], -am1 * b[i - 1]
        t11, t12, t21, t22 = (
            m11 * t11 + m12 * t21,
            m11 * t12 + m12 * t22,
            t11,
            t12,
        )
    pa, pb = _product(a), _product(b)
    if t11 + t22 != pa + pb or t11 * t22 - t12 * t21 != pa * pb:
        raise AssertionError("monodromy trace/det identity violated")
    return (t11, t12, t21, t22), pa, pb


class LatticeState:
    """History of I/V slices with an advancing frontier.

    The history is append-only; a state is exclusively owned while being
    advanced, while ``copy()`` snapshots may be read concurrently.
    """

    def __init__(self, params: LatticeParams, i_hist: dict, v_hist: dict, frontier: int):
        self.params = params
        self._i = dict(i_hist)
        self._v = dict(v_hist)
        self.frontier = frontier

    # -- construction --------------------------------------------------------

    @classmethod
    def create(cls, params: LatticeParams, i_slices, v_slices) -> "LatticeState":
        M, K, N = params.M, params.K, params.N
        i_hist = {int(t): _check_values(vals, N, f"I[{t}]") for t, vals in dict(i_slices).items()}
        v_hist = {int(t): _check_values(vals, N, f"V[{t}]") for t, vals in dict(v_slices).items()}
        if len(i_hist) < M or len(v_hist) < K:
            raise SizeMismatch(
                f"need at least {M} I-slices and {K} V-slices, "
                f"got {len(i_hist)} and {len(v_hist)}"
            )
        fi, fv = max(i_hist), max(v_hist)
        if fi != fv:
            raise SizeMismatch(f"I and V windows end at different times ({fi} vs {fv})")
        for t in range(min(i_hist), fi + 1):
            if t not in i_hist:
                raise SizeMismatch(f"I history has a gap at time {t}")
        for t in range(min(v_hist), fv + 1):
            if t not in v_hist:
                raise SizeMismatch(f"V history has a gap at time {t}")
        return cls(params, i_hist, v_hist, fi)

    def copy(self) -> "LatticeState":
        return LatticeState(self.params, self._i, self._v, self.frontier)

    # -- access ---------------------------------------------------------------

    @property
    def i_min(self) -> int:
        return min(self._i)

    @property
    def v_min(self) -> int:
        return min(self._v)

    def _get(self, hist: dict, kind: str, t: int) -> tuple:
        if t > self.frontier:
            self.evolve_to(t)
        try:
            return hist[t]
        except KeyError:
            raise InsufficientHistory(
                f"{kind}-slice at time {t} predates the initial data"
            ) from None

    def i_slice(self, t: int) -> tuple:
        return self._get(self._i, "I", t)

    def v_slice(self, t: int) -> tuple:
        return self._get(self._v, "V", t)

    def slice_at(self, kind: str, t: int) -> Slice:
        if kind not in ("I", "V"):
            raise ValueError(f"unknown slice kind: {kind}")
        values = self.i_slice(t) if kind == "I" else self.v_slice(t)
        return Slice(kind=kind, time=t, values=values)

    def i_product(self, t: int):
        return _product(self.i_slice(t))

    def v_product(self, t: int):
        return _product(self.v_slice(t))

    def times(self, kind: str):
        hist = self._i if kind == "I" else self._v
        return sorted(hist)

    # -- evolution --------------------------------------------------------------

    def step(self) -> "LatticeState":
        t1 = self.frontier + 1
        a = self._i[t1 - self.params.M]
        b = self._v[t1 - self.params.K]
        n = self.params.N

        (t11, t12, t21, t22), pa, pb = monodromy_closure(a, b)
        if pa == pb:
            raise DegenerateEvolution(
                f"prod(I) == prod(V) == {format_rational(pa)} at step {t1}: "
                "closure is not unique"
            )
        lam = pa
        if lam != t11:
            x_last = t12 / (lam - t11)
        elif t21 != 0:
            x_last = (lam - t22) / t21
        else:
            raise DegenerateEvolution(f"closure fixed point at infinity at step {t1}")

        x = [None] * n
        y = [None] * n
        if x_last == 0:
            raise SingularStep(f"x_{n} = 0 at step {t1}")
        x[n - 1] = x_last
        y[n - 1] = a[n - 1] * b[n - 1] / x_last
        for i in range(n - 1):
            xi = a[i - 1] + b[i] - y[i - 1]
            if xi == 0:
                raise SingularStep(f"x_{i + 1} = 0 at step {t1}")
            x[i] = xi
            y[i] = a[i] * b[i] / xi

        self._i[t1] = tuple(x)
        self._v[t1] = tuple(y)
        self.frontier = t1
        return self

    def evolve_to(self, target: int) -> "LatticeState":
        while self.frontier < target:
            self.step()
        return self

    def prune_below(self, floor: int) -> "LatticeState":
        """Drop slices strictly below ``floor``.  The history is unbounded by
        default; after pruning, a request below the floor raises
        InsufficientHistory rather than recomputing silently.  The stepping
        windows themselves are never evicted."""
        keep = min(self.frontier - self.params.M + 1, self.frontier - self.params.K + 1)
        floor = min(floor, keep)
        self._i = {t: v for t, v in self._i.items() if t >= floor}
        self._v = {t: v for t, v in self._v.items() if t >= floor}
        return self

    # -- invariants ------------------------------------------------------------

    def site_invariants(self) -> tuple:
        """The N per-site conserved products (the diagonal of the monodromy at y=0).

        U_j multiplies the V value at times t, t-M, ..., t-(K-1)M and the I
        value at times t, t-K, ..., t-(M-1)K; this progression form is exactly
        invariant in t, so any sufficiently deep anchor gives the same tuple.
        """
        M, K = self.params.M, self.params.K
        anchor_min = max(self.i_min + (M - 1) * K, self.v_min + (K - 1) * M)
        if self.frontier < anchor_min:
            self.evolve_to(anchor_min)
        t = self.frontier
        out = []
        for j in range(self.params.N):
            u = Rational(1)
            for r in range(K):
                u *= self._v[t - r * M][j]
            for r in range(M):
                u *= self._i[t - r * K][j]
            out.append(u)
        return tuple(out)

    def classify_case(self) -> str:
        u = self.site_invariants()
        if all(v == u[0] for v in u):
            return CASE_B
        if len(set(u)) == len(u):
            return CASE_A
        return CASE_MIXED

    # -- serialization -----------------------------------------------------------

    def to_json_dict(self) -> dict:
        return {
            "M": self.params.M,
            "K": self.params.K,
            "N": self.params.N,
            "frontier": self.frontier,
            "I": {str(t): [format_rational(v) for v in vals] for t, vals in sorted(self._i.items())},
            "V": {str(t): [format_rational(v) for v in vals] for t, vals in sorted(self._v.items())},
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "LatticeState":
        try:
            params = LatticeParams(int(data["M"]), int(data["K"]), int(data["N"]))
            i_slices = {int(t): [parse_rational(v) for v in vals] for t, vals in data["I"].items()}
            v_slices = {int(t): [parse_rational(v) for v in vals] for t, vals in data["V"].items()}
            frontier = int(data["frontier"])
        except (KeyError, TypeError, ValueError) as exc:
            raise SizeMismatch(f"malformed state file: {exc}") from exc
        state = cls.create(params, i_slices, v_slices)
        if state.frontier != frontier:
            raise SizeMismatch(
                f"frontier {frontier} does not match slice windows (expected {state.frontier})"
            )
        return state

    def dumps(self) -> str:
        return json.dumps(self.to_json_dict(), indent=None, sort_keys=False)

    @classmethod
    def loads(cls, text: str) -> "LatticeState":
        return cls.from_json_dict(json.loads(text))


# Operation-style wrappers ------------------------------------------------------


def new_state(params: LatticeParams, i_slices, v_slices) -> LatticeState:
    return LatticeState.create(params, i_slices, v_slices)


def step(state: LatticeState) -> LatticeState:
    return state.step()


def evolve_to(state: LatticeState, target: int) -> LatticeState:
    return state.evolve_to(target)


def site_invariants(state: LatticeState) -> tuple:
    return state.site_invariants()


def classify_case(state: LatticeState) -> str:
    return state.classify_case()


def uniform_state(params: LatticeParams, i_value, v_value, frontier: int = 0) -> LatticeState:
    """All-sites-equal data; handy fixed point of the evolution."""
    i_val, v_val = Rational(i_value), Rational(v_value)
    i_slices = {
        frontier - r: [i_val] * params.N for r in range(params.M)
    }
    v_slices = {
        frontier - r: [v_val] * params.N for r in range(params.K)
    }
    return LatticeState.create(params, i_slices, v_slices)
