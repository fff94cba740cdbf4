"""Large-parameter degeneration: tracing a lattice to a lower-order one.

Seeding one slice family with a large constant zeta makes the trajectory,
restricted to a thinned set of times, converge (as zeta grows) to a
trajectory of the system with the corresponding parameter reduced.  The big
and the reduced systems both evolve in exact arithmetic; only the error
norms of the comparison are floats, so the o(1) measurement carries no
drift of its own.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bipoly import BiPoly
from .errors import EmptyIndexSet, WrongParams
from .lattice import LatticeParams, LatticeState
from .rational import Rational

REDUCE_M = "reduce_M"
REDUCE_K = "reduce_K"


def lambda_set(M: int, K: int, horizon: int) -> list:
    """Times kept under the M-reduction: the complement of the K-wide blocks
    {kM, ..., kM+K-1} below the horizon.  Closed form: t mod M >= K."""
    if K >= M:
        raise EmptyIndexSet(f"index set empty: K = {K} >= M = {M}")
    removed = set()
    for k in range(horizon // M + 1):
        removed.update(range(k * M, min(k * M + K, horizon)))
    return sorted(set(range(horizon)) - removed)


def xi_set(M: int, K: int, horizon: int) -> list:
    """Times kept under the K-reduction; the mirror of lambda_set."""
    return lambda_set(K, M, horizon)


@dataclass(frozen=True)
class DegenerationPlan:
    direction: str
    zeta: object  # Rational (exact runs) or float (sweep labels)
    base: LatticeState  # initial data of the reduced system
    horizon: int = 20

    def __post_init__(self):
        if self.direction not in (REDUCE_M, REDUCE_K):
            raise ValueError(f"unknown direction: {self.direction}")
        if self.horizon < 1:
            raise ValueError("horizon must be positive")

    @property
    def big_params(self) -> LatticeParams:
        Mr, Kr = self.base.params.M, self.base.params.K
        n = self.base.params.N
        if self.direction == REDUCE_M:
            return LatticeParams(Mr + Kr, Kr, n)
        return LatticeParams(Mr, Kr + Mr, n)


def _windows_at_zero(state: LatticeState):
    """The defining slice windows re-keyed to end at time 0."""
    M, K = state.params.M, state.params.K
    f = state.frontier
    i_win = {s: state.i_slice(f + s) for s in range(-M + 1, 1)}
    v_win = {s: state.v_slice(f + s) for s in range(-K + 1, 1)}
    return i_win, v_win


def seed_large_zeta(plan: DegenerationPlan) -> LatticeState:
    """Big-system initial state: the designated slices set to the constant
    zeta at every site, the remaining windows copied from the reduced base.

    Time alignment (reduce_M, reduced (M', K')): base I-slices occupy big
    times -M'..-1, the K' zeta I-slices times 0..K'-1, base V-slices times
    0..K'-1; the kept-times comparison then matches reduced time s >= 1 with
    the s-th kept big time.  reduce_K mirrors the roles.
    """
    zeta = Rational(plan.zeta)
    n = plan.base.params.N
    Mr, Kr = plan.base.params.M, plan.base.params.K
    i_win, v_win = _windows_at_zero(plan.base)
    big = plan.big_params
    if plan.direction == REDUCE_M:
        i_slices = {s - 1: i_win[s] for s in i_win}  # big times -M'..-1
        for u in range(big.K):
            i_slices[u] = [zeta] * n
        v_slices = {s + Kr - 1: v_win[s] for s in v_win}  # big times 0..K'-1
    else:
        v_slices = {s - 1: v_win[s] for s in v_win}  # big times -K'..-1
        for u in range(big.M):
            v_slices[u] = [zeta] * n
        i_slices = {s + Mr - 1: i_win[s] for s in i_win}  # big times 0..M'-1
    return LatticeState.create(big, i_slices, v_slices)


@dataclass(frozen=True)
class ConvergenceRow:
    zeta: float
    max_err: float      # sup over kept times and sites of |big - reduced|
    freeze_err: float   # off-set slices: deviation from the carried-over slice
    scale_dev: float    # off-set designated slices: max |value/zeta - 1|


@dataclass(frozen=True)
class ConvergenceTable:
    direction: str
    horizon: int
    rows: tuple
    slope: float  # log-log fit of max_err against zeta

    @property
    def strictly_decreasing(self) -> bool:
        errs = [r.max_err for r in self.rows]
        return all(a > b for a, b in zip(errs, errs[1:]))

    def csv_rows(self):
        for r in self.rows:
            yield (r.zeta, r.max_err, self.slope)


def _kept_times(plan: DegenerationPlan, start: int, count: int) -> list:
    big = plan.big_params
    if plan.direction == REDUCE_M:
        period, width = big.M, big.K
    else:
        period, width = big.K, big.M
    out = []
    t = start
    while len(out) < count:
        if t % period >= width:
            out.append(t)
        t += 1
    return out


def limit_compare(plan: DegenerationPlan, zeta_sweep) -> ConvergenceTable:
    """Exact big-system runs over the zeta sweep against the exact reduced run."""
    reduced = LatticeState.create(plan.base.params, *_windows_at_zero(plan.base))
    reduced.evolve_to(plan.horizon)

    big = plan.big_params
    start = big.K if plan.direction == REDUCE_M else big.M  # first computed big time
    kept = _kept_times(plan, start, plan.horizon)
    kept_set = set(kept)
    rows = []
    for z in zeta_sweep:
        # floats like 1e3 convert exactly; arbitrary rationals pass through
        run_plan = DegenerationPlan(plan.direction, Rational(z), plan.base, plan.horizon)
        state = seed_large_zeta(run_plan)
        state.evolve_to(kept[-1])
        err = 0.0
        for s, t_big in enumerate(kept, start=1):
            for n in range(big.N):
                err = max(err, abs(float(state.i_slice(t_big)[n] - reduced.i_slice(s)[n])))
                err = max(err, abs(float(state.v_slice(t_big)[n] - reduced.v_slice(s)[n])))
        freeze = 0.0
        scale = 0.0
        zf = float(Rational(z))
        for t_big in range(start, kept[-1] + 1):
            if t_big in kept_set:
                continue
            if plan.direction == REDUCE_M:
                frozen_now, frozen_prev = state.v_slice(t_big), state.v_slice(t_big - big.K)
                scaled = state.i_slice(t_big)
            else:
                frozen_now, frozen_prev = state.i_slice(t_big), state.i_slice(t_big - big.M)
                scaled = state.v_slice(t_big)
            for n in range(big.N):
                freeze = max(freeze, abs(float(frozen_now[n] - frozen_prev[n])))
                scale = max(scale, abs(float(scaled[n]) / zf - 1.0))
        rows.append(ConvergenceRow(zeta=zf, max_err=err, freeze_err=freeze, scale_dev=scale))

    if len(rows) >= 2:
        slope = float(
            np.polyfit(
                np.log([r.zeta for r in rows]),
                np.log([max(r.max_err, 1e-300) for r in rows]),
                1,
            )[0]
        )
    else:
        slope = float("nan")  # a slope needs at least two sweep points
    return ConvergenceTable(direction=plan.direction, horizon=plan.horizon, rows=tuple(rows), slope=slope)


# -- small-case closed forms and the hidden invariant ------------------------------


def curve_closed_form_112(i_values, v_values) -> BiPoly:
    """Curve polynomial of the (1,1,2) system straight from the slice data."""
    i1, i2 = (Rational(v) for v in i_values)
    v1, v2 = (Rational(v) for v in v_values)
    u1 = i1 * i2 + v1 * v2
    u2 = v1 * i1 + v2 * i2
    u3 = i1 * i2 * v1 * v2
    x, y = BiPoly.x(), BiPoly.y()
    return y * y - y * (x * 2 + BiPoly.constant(u1)) + x * x - x * u2 + BiPoly.constant(u3)


def curve_closed_form_212(zeta, i_values, v_values) -> BiPoly:
    """Curve polynomial of the (2,1,2) system seeded with a constant slice."""
    z = Rational(zeta)
    i1, i2 = (Rational(v) for v in i_values)
    v1, v2 = (Rational(v) for v in v_values)
    u1 = i1 * i2 + v1 * v2
    u2 = v1 * i1 + v2 * i2
    u3 = i1 * i2 * v1 * v2
    u4 = i1 + i2 + v1 + v2
    x, y = BiPoly.x(), BiPoly.y()
    return (
        -(y ** 3)
        + (y * y) * (z * z + u1)
        - y * (x * (2 * z + u4) + BiPoly.constant(z * z * u1 + u3))
        + x * x
        - x * (z * u2)
        + BiPoly.constant(z * z * u3)
    )


def hidden_sum(state: LatticeState, t: int):
    """Sum of all four lattice values of the (1,1,2) system at one time."""
    if (state.params.M, state.params.K, state.params.N) != (1, 1, 2):
        raise WrongParams("hidden invariant is specific to (M,K,N) = (1,1,2)")
    i, v = state.i_slice(t), state.v_slice(t)
    return i[0] + i[1] + v[0] + v[1]


@dataclass(frozen=True)
class HiddenInvariantReport:
    value: object
    times_checked: int
    constant: bool


def hidden_invariant_check(state: LatticeState, steps: int = 50) -> HiddenInvariantReport:
    """The four-value sum is exactly constant along the (1,1,2) evolution."""
    if (state.params.M, state.params.K, state.params.N) != (1, 1, 2):
        raise WrongParams("hidden invariant is specific to (M,K,N) = (1,1,2)")
    state.evolve_to(state.frontier + steps)
    times = [t for t in state.times("I") if t in set(state.times("V"))]
    values = [hidden_sum(state, t) for t in times]
    return HiddenInvariantReport(
        value=values[0],
        times_checked=len(times),
        constant=all(v == values[0] for v in values),
    )


def companion_with_same_curve(state: LatticeState, p) -> LatticeState:
    """A (1,1,2) state with the same spectral curve but generally a different
    hidden-sum value: the curve fixes the four products i1*i2, v1*v2, v1*i1,
    v2*i2, and p reparametrises the one-parameter family they leave free."""
    if (state.params.M, state.params.K, state.params.N) != (1, 1, 2):
        raise WrongParams("companion construction is specific to (1,1,2)")
    p = Rational(p)
    if p == 0:
        raise WrongParams("parameter must be nonzero")
    t = state.frontier
    i, v = state.i_slice(t), state.v_slice(t)
    a = i[0] * i[1]
    q1, q2 = v[0] * i[0], v[1] * i[1]
    new_i = (p, a / p)
    new_v = (q1 / p, q2 * p / a)
    return LatticeState.create(state.params, {t: new_i}, {t: new_v})


def find_hidden_invariant_pair(rng, attempts: int = 200):
    """Randomized search: two states with exactly equal curves but different
    hidden sums, witnessing that the sum is independent of the curve data."""
    from .lax import spectral_curve

    for _ in range(attempts):
        vals = [Rational(int(rng.integers(1, 9)), int(rng.integers(1, 5))) for _ in range(4)]
        base = LatticeState.create(LatticeParams(1, 1, 2), {0: vals[:2]}, {0: vals[2:]})
        p = Rational(int(rng.integers(1, 9)), int(rng.integers(1, 5)))
        other = companion_with_same_curve(base, p)
        if spectral_curve(base, 0).poly != spectral_curve(other, 0).poly:
            raise AssertionError("companion construction changed the curve")
        if hidden_sum(base, 0) != hidden_sum(other, 0):
            return base, other
    raise RuntimeError("no witness pair found")
