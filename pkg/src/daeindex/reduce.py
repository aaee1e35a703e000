"""Consistent initialization and Taylor-jet integration of square systems.

The state carried between steps is ``X^[e-1]``.  At each step the state is
extended to a jet by ``extend_witness``, advanced with truncated Taylor
polynomials, and pulled back onto the constraint manifold by a min-norm
Gauss-Newton projection whenever its residual exceeds the tolerance.  All
arithmetic is exact; states are rounded to a dyadic grid to keep the
rationals short.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from decimal import Decimal, localcontext
from fractions import Fraction
from typing import Iterable, Sequence, TextIO

from .diffpoly import DerivVar
from .errors import InconsistentWitness, InvalidSystem, ProjectionFailed, RankDeficient
from .linalg import rref
from .prolong import prolongation_jacobian
from .rank import RankOracle, Witness, extend_witness
from .system import DAESystem

GRID_BITS = 100
LENIENT_BOUND = Fraction(1, 100)
MAX_NEWTON = 10


def _round(x: Fraction) -> Fraction:
    return Fraction(round(x * (1 << GRID_BITS)), 1 << GRID_BITS)


def _as_fraction(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(str(x))


def _sigma_of(s: DAESystem, w: Witness, seed: int) -> int:
    from .index import differentiation_index

    return differentiation_index(s, RankOracle.at(s, w, seed=seed))[0]


def _require_square(s: DAESystem) -> None:
    if s.n != s.r:
        raise InvalidSystem("integration needs as many equations as unknowns")


def state_variables(s: DAESystem) -> list[DerivVar]:
    return [DerivVar(j, l) for l in range(s.e) for j in range(1, s.n + 1)]


@dataclass(frozen=True)
class TaylorJet:
    """``coefficients[j-1][l] = X_j^(l)(t0) / l!`` for ``l <= e-1+q``."""

    coefficients: tuple[tuple[Fraction, ...], ...]
    witness: Witness

    def truncate(self, depth: int) -> tuple[tuple[Fraction, ...], ...]:
        return tuple(c[: depth + 1] for c in self.coefficients)


def taylor_jet(
    s: DAESystem,
    w: Witness,
    q: int,
    *,
    sigma: int | None = None,
    seed: int = 0,
    order: int | None = None,
) -> TaylorJet:
    _require_square(s)
    if q < 0:
        raise ValueError("jet depth must be non-negative")
    top = s.e - 1 + q if order is None else max(order, s.e - 1 + q)
    margin = sigma if sigma is not None else None
    ext = extend_witness(s, w, top, seed=seed, margin=margin)
    coeffs = tuple(
        tuple(ext.values[DerivVar(j, l)] / math.factorial(l) for l in range(s.e + q))
        for j in range(1, s.n + 1)
    )
    return TaylorJet(coeffs, ext)


@dataclass
class Trajectory:
    names: list[str]
    times: list[Fraction] = field(default_factory=list)
    states: list[tuple[Fraction, ...]] = field(default_factory=list)
    residuals: list[float] = field(default_factory=list)
    projections: int = 0

    def column(self, name: str) -> list[Fraction]:
        k = self.names.index(name)
        return [st[k] for st in self.states]

    def to_csv(self, out: TextIO, digits: int = 20) -> None:
        out.write(",".join(["t", *self.names, "residual"]) + "\n")
        for t, st, res in zip(self.times, self.states, self.residuals):
            cells = [_decimal(t, digits)] + [_decimal(x, digits) for x in st]
            cells.append(f"{res:.6e}")
            out.write(",".join(cells) + "\n")


def _decimal(x: Fraction, digits: int) -> str:
    with localcontext() as ctx:
        ctx.prec = digits
        d = Decimal(x.numerator) / Decimal(x.denominator)
    return format(d.normalize(), "f") if d else "0"


class _Stepper:
    """Shared machinery of ``simulate`` and ``project_state``."""

    def __init__(self, s: DAESystem, params: dict, sigma: int, q: int, tol: float, seed: int):
        _require_square(s)
        self.s = s
        self.params = params
        self.sigma = sigma
        self.q = q
        self.tol = tol
        self.seed = seed
        self.state_vars = state_variables(s)
        self.res_order = sigma + s.e
        if sigma > 0:
            eqs, cols, entries = prolongation_jacobian(s, sigma)
            self.constraints = eqs
            self.z_vars = cols
            self.z_entries = entries
        else:
            self.constraints = []

    def witness(self, state: Sequence[Fraction]) -> Witness:
        values = dict(self.params)
        values.update(zip(self.state_vars, state))
        return Witness(values, self.s.e - 1, LENIENT_BOUND)

    def jet(self, state: Sequence[Fraction]) -> TaylorJet:
        return taylor_jet(
            self.s, self.witness(state), self.q, sigma=self.sigma, seed=self.seed,
            order=self.res_order,
        )

    def residual(self, values) -> Fraction:
        worst = Fraction(0)
        for i in range(1, self.s.r + 1):
            for p in range(self.sigma + 1):
                worst = max(worst, abs(self.s.derivative(i, p).evaluate(values)))
        return worst

    def advance(self, jet: TaylorJet, h: Fraction) -> tuple[Fraction, ...]:
        vals = jet.witness.values
        out = []
        for v in self.state_vars:
            acc = Fraction(0)
            hm = Fraction(1)
            for m in range(self.q + 1):
                acc += vals[DerivVar(v.var, v.order + m)] * hm / math.factorial(m)
                hm *= h
            out.append(_round(acc))
        return tuple(out)

    def project(self, state: Sequence[Fraction], step: int) -> tuple[tuple[Fraction, ...], TaylorJet]:
        """Return a state within ``tol`` of the manifold, with its jet."""
        try:
            jet = self.jet(state)
        except (InconsistentWitness, RankDeficient) as exc:
            raise ProjectionFailed(step, math.inf) from exc
        res = self.residual(jet.witness.values)
        if float(res) <= self.tol or not self.constraints:
            return tuple(state), jet
        z = {v: jet.witness.values[v] for v in self.z_vars}
        z.update(self.params)
        last = float(res)
        damping = Fraction(1)
        for _ in range(MAX_NEWTON):
            G = [f.evaluate(z) for f in self.constraints]
            J = [[Fraction(0)] * len(self.z_vars) for _ in G]
            for (a, c), p in self.z_entries.items():
                J[a][c] = p.evaluate(z)
            JJt = [[sum(x * y for x, y in zip(ra, rb)) for rb in J] for ra in J]
            A, b, pivots = rref(JJt, G)
            if len(pivots) < len(G):
                raise ProjectionFailed(step, last)
            y = [Fraction(0)] * len(G)
            for row, c in enumerate(pivots):
                y[c] = b[row]
            trial = dict(z)
            for c, v in enumerate(self.z_vars):
                delta = sum(J[a][c] * y[a] for a in range(len(G)))
                trial[v] = _round(z[v] - damping * delta)
            new = float(max(abs(f.evaluate(trial)) for f in self.constraints))
            if new >= last:
                damping /= 2
                continue
            z, last = trial, new
            if last <= self.tol:
                break
        projected = tuple(z[v] for v in self.state_vars)
        try:
            jet = self.jet(projected)
        except (InconsistentWitness, RankDeficient) as exc:
            raise ProjectionFailed(step, last) from exc
        res = float(self.residual(jet.witness.values))
        if res > self.tol:
            raise ProjectionFailed(step, res)
        return projected, jet


def _initial(s: DAESystem, w: Witness, sigma: int, seed: int):
    params = {v: x for v, x in w.values.items() if v.is_param}
    base = w
    if any(v not in w.values for v in state_variables(s)):
        base = extend_witness(s, w, s.e - 1, seed=seed, margin=sigma)
    state = tuple(base.values[v] for v in state_variables(s))
    return params, state


def simulate(
    s: DAESystem,
    w: Witness,
    h,
    steps: int,
    q: int = 4,
    tol: float = 1e-10,
    *,
    sigma: int | None = None,
    seed: int = 0,
) -> Trajectory:
    h = _as_fraction(h)
    if h <= 0:
        raise ValueError("step size must be positive")
    if steps < 0:
        raise ValueError("steps must be non-negative")
    _require_square(s)
    if sigma is None:
        sigma = _sigma_of(s, w, seed)
    params, state = _initial(s, w, sigma, seed)
    stepper = _Stepper(s, params, sigma, q, tol, seed)
    traj = Trajectory([s.name_of(v) for v in stepper.state_vars])
    state0 = state
    state, jet = stepper.project(state, 0)
    traj.projections += state != state0
    t = Fraction(0)
    for step in range(steps + 1):
        traj.times.append(t)
        traj.states.append(state)
        traj.residuals.append(float(stepper.residual(jet.witness.values)))
        if step == steps:
            break
        advanced = stepper.advance(jet, h)
        state, jet = stepper.project(advanced, step + 1)
        traj.projections += state != advanced
        t += h
    return traj


def project_state(
    s: DAESystem, w: Witness, *, sigma: int | None = None, tol: float = 1e-10, seed: int = 0
) -> Witness:
    """Consistent point near ``w`` (only ``X^[e-1]`` and parameters are read)."""
    if sigma is None:
        sigma = _sigma_of(s, w, seed)
    params = {v: x for v, x in w.values.items() if v.is_param}
    state = tuple(w.values[v] for v in state_variables(s))
    stepper = _Stepper(s, params, sigma, 0, tol, seed)
    projected, jet = stepper.project(state, 0)
    return jet.witness


@dataclass(frozen=True)
class ProbeReport:
    delta: Fraction
    initial_offset: float
    projected_offset: float
    divergence: tuple[float, ...]
    free_coordinates: tuple[str, ...]

    @property
    def final_divergence(self) -> float:
        return self.divergence[-1] if self.divergence else self.projected_offset


def _distance(a: Iterable[Fraction], b: Iterable[Fraction]) -> float:
    return math.sqrt(float(sum((x - y) ** 2 for x, y in zip(a, b))))


def local_uniqueness_probe(
    s: DAESystem,
    w: Witness,
    delta,
    *,
    h="1e-3",
    steps: int = 100,
    q: int = 4,
    tol: float = 1e-10,
    sigma: int | None = None,
    seed: int = 0,
) -> ProbeReport:
    """Shift the state by a vector of Euclidean length ``delta``, re-project
    and re-simulate.  Offsets and divergences are Euclidean distances between
    the two state vectors.

    Free coordinates are the jet values that two differently seeded
    extensions of the same consistent state disagree on.
    """
    delta = _as_fraction(delta)
    if sigma is None:
        sigma = _sigma_of(s, w, seed)
    params, state = _initial(s, w, sigma, seed)
    unit = _round(Fraction(1 / math.sqrt(len(state))))
    perturbed = tuple(x + delta * unit for x in state)
    pw = Witness({**params, **dict(zip(state_variables(s), perturbed))}, s.e - 1)
    base = Witness({**params, **dict(zip(state_variables(s), state))}, s.e - 1)
    ref = simulate(s, base, h, steps, q, tol, sigma=sigma, seed=seed)
    alt = simulate(s, pw, h, steps, q, tol, sigma=sigma, seed=seed)
    divergence = tuple(_distance(a, b) for a, b in zip(ref.states, alt.states))

    top = s.e - 1 + q
    j1 = extend_witness(s, base, top, seed=seed, margin=sigma)
    j2 = extend_witness(s, base, top, seed=seed + 1, margin=sigma)
    free = tuple(
        s.name_of(v) for v in s.all_variables(top)
        if not v.is_param and j1.values[v] != j2.values[v]
    )
    return ProbeReport(
        delta=delta,
        initial_offset=_distance(state, perturbed),
        projected_offset=divergence[0],
        divergence=divergence,
        free_coordinates=free,
    )
