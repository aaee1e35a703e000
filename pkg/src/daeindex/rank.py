"""Rank oracles: exact rank at a witness point and randomized generic rank.

A witness is a rational point on the solution variety, given up to some
derivative order.  ``extend_witness`` pushes it to higher orders by walking
the prolongation level by level: each new level is linear in its top
derivatives once everything below is known, so most values follow from
exact linear solves.  Coordinates the equations leave free are drawn from a
seeded generator.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .diffpoly import NEG_INF, DerivVar, DiffPoly, Number
from .errors import InconsistentWitness, MissingAssignment, RankDeficient
from .linalg import rank_exact, rank_with_min_pivot, rref
from .prolong import PseudoJacobian, prolongation_jacobian, pseudo_jacobian
from .system import DAESystem

GENERIC_BOUND = 2**31
PIVOT_SAFETY = 10**6


@dataclass(frozen=True)
class Witness:
    values: Mapping[DerivVar, Fraction]
    max_order: int
    residual_bound: Fraction = Fraction(0)
    free: tuple[DerivVar, ...] = ()

    def __post_init__(self):
        object.__setattr__(
            self, "values", {v: Fraction(x) for v, x in self.values.items()}
        )
        object.__setattr__(self, "residual_bound", Fraction(self.residual_bound))

    def __getitem__(self, v: DerivVar) -> Fraction:
        return self.values[v]

    def restrict(self, max_order: int) -> "Witness":
        keep = {v: x for v, x in self.values.items() if v.is_param or v.order <= max_order}
        return Witness(keep, max_order, self.residual_bound, self.free)


def witness_from_names(
    s: DAESystem, named: Mapping[str, Number], residual_bound: Number = 0
) -> Witness:
    """Build a witness from ``{"x1": ..., "x1'": ..., "g": ...}`` style keys."""
    from .cli.dsl import parse_variable_name

    values: dict[DerivVar, Fraction] = {}
    for name, val in named.items():
        values[parse_variable_name(s, name)] = Fraction(val)
    orders = [v.order for v in values if not v.is_param]
    top = max(orders, default=-1)
    # max_order is the highest order through which every unknown is present
    complete = -1
    for l in range(top + 1):
        if all(DerivVar(j, l) in values for j in range(1, s.n + 1)):
            complete = l
        else:
            break
    return Witness(values, complete, Fraction(residual_bound))


def _random_rational(rng: random.Random) -> Fraction:
    num = rng.randint(1, 29) * rng.choice((1, -1))
    return Fraction(num, rng.randint(1, 9))


def _equation_orders(s: DAESystem) -> list[int]:
    return [int(o) if o != NEG_INF else 0 for o in (f.order() for f in s.equations)]


def _propagate(
    s: DAESystem,
    pending: list[DiffPoly],
    values: dict[DerivVar, Fraction],
    tol: Fraction,
    fresh: dict[DerivVar, Fraction],
) -> None:
    """Deduce every value forced by ``pending`` and record it in ``values``.

    ``pending`` holds equations with all previously known values substituted;
    ``fresh`` are values not yet substituted into them.  Affine equations are
    solved jointly; a lone power ``c*u^k`` forces ``u = 0``.  Whatever stays
    nonlinear remains pending.
    """
    while True:
        keep: list[DiffPoly] = []
        for p in pending:
            if fresh and not fresh.keys().isdisjoint(p.variables()):
                p = p.substitute(fresh)
            if p.is_constant():
                c = p.constant_term()
                if abs(c) > tol:
                    raise InconsistentWitness(
                        f"a prolongation equation evaluates to {c} at the witness"
                    )
                continue
            keep.append(p)
        pending[:] = keep
        fresh = {}

        for p in keep:
            if len(p) == 1:
                (m,) = p.terms
                vs = list(m.variables())
                if len(vs) == 1:
                    fresh[vs[0]] = Fraction(0)

        linear = [p for p in keep if p.degree() <= 1]
        if linear:
            cols = sorted({v for p in linear for v in p.variables()})
            index = {v: c for c, v in enumerate(cols)}
            rows = []
            rhs = []
            for p in linear:
                row = [Fraction(0)] * len(cols)
                for m, c in p.items():
                    if m.degree == 0:
                        continue
                    (v,) = m.variables()
                    row[index[v]] = c
                rows.append(row)
                rhs.append(-p.constant_term())
            A, b, pivots = rref(rows, rhs)
            for extra in b[len(pivots):]:
                if abs(extra) > tol:
                    raise InconsistentWitness(
                        f"linear prolongation equations are inconsistent (residual {extra})"
                    )
            pivset = set(pivots)
            for r_i, c in enumerate(pivots):
                if all(not A[r_i][j] for j in range(len(cols)) if j not in pivset):
                    fresh[cols[c]] = b[r_i]

        fresh = {v: x for v, x in fresh.items() if v not in values}
        if not fresh:
            return
        values.update(fresh)


def extend_witness(
    s: DAESystem,
    w: Witness,
    target_order: int,
    *,
    seed: int = 0,
    margin: int | None = None,
    pinned: Mapping[DerivVar, Number] | None = None,
) -> Witness:
    """Extend ``w`` to a consistent point of ``X^[target_order]``.

    Equations are examined up to derivative level ``target_order + margin``
    (default margin: the Jacobi index bound), so hidden constraints that
    only appear after further differentiation still pin down the values.
    """
    if target_order < 0:
        raise ValueError("target order must be non-negative")
    if margin is None:
        from .jacobi import bounds

        margin = bounds(s).index_bound_rhs
    tol = w.residual_bound
    values: dict[DerivVar, Fraction] = dict(w.values)
    for name in s.params:
        if DerivVar(0, 0, name) not in values and not (pinned and DerivVar(0, 0, name) in pinned):
            raise MissingAssignment(DerivVar(0, 0, name))
    if pinned:
        values.update({v: Fraction(x) for v, x in pinned.items()})

    orders = _equation_orders(s)
    pending: list[DiffPoly] = []
    rng = random.Random(seed)
    top = target_order + margin
    for level in range(top + 1):
        for i, o in enumerate(orders, 1):
            if level >= o:
                pending.append(s.derivative(i, level - o).substitute(values))
        _propagate(s, pending, values, tol, {})

    free = list(w.free)
    for v in s.all_variables(target_order):
        if v in values:
            continue
        values[v] = _random_rational(rng)
        free.append(v)
        try:
            _propagate(s, pending, values, tol, {v: values[v]})
        except InconsistentWitness as exc:
            raise RankDeficient(
                f"no consistent value for the free coordinate {s.name_of(v)}: {exc}"
            ) from exc
    return Witness(values, target_order, tol, tuple(free)).restrict(target_order)


def check_residuals(s: DAESystem, w: Witness, max_level: int | None = None) -> Fraction:
    """Largest ``|f_j^(p)(w)|`` over every prolongation equation ``w`` fully assigns."""
    orders = _equation_orders(s)
    worst = Fraction(0)
    for i, o in enumerate(orders, 1):
        top = w.max_order - o if max_level is None else min(max_level, w.max_order - o)
        for p in range(top + 1):
            worst = max(worst, abs(s.derivative(i, p).evaluate(w.values)))
    return worst


def _rank_of_values(M: Sequence[Sequence[Fraction]], tol: Fraction) -> int:
    if not tol:
        return rank_exact(M)
    rank, smallest = rank_with_min_pivot(M)
    if smallest is not None and smallest <= tol * PIVOT_SAFETY:
        raise InconsistentWitness(
            f"smallest pivot {float(smallest):.3e} is too close to the residual bound"
        )
    return rank


def rank_at(J: PseudoJacobian, w: Witness) -> int:
    s = J.system
    needed = J.i + J.k
    worst = Fraction(0)
    for a in range(1, s.r + 1):
        for p in range(J.i - s.e + J.k + 1):
            try:
                val = abs(s.derivative(a, p).evaluate(w.values))
            except MissingAssignment:
                continue
            worst = max(worst, val)
    if worst > w.residual_bound:
        raise InconsistentWitness(
            f"witness residual {worst} exceeds its bound up to order {needed}"
        )
    return _rank_of_values(J.evaluate(w.values), w.residual_bound)


def random_point(variables, rng: random.Random) -> dict[DerivVar, Fraction]:
    return {
        v: Fraction(rng.randrange(-GENERIC_BOUND + 1, GENERIC_BOUND), rng.randrange(1, GENERIC_BOUND))
        for v in sorted(variables)
    }


def rank_generic(J: PseudoJacobian, seed: int = 0, trials: int = 3) -> int:
    if trials < 1:
        raise ValueError("trials must be at least 1")
    rng = random.Random(seed)
    variables = J.variables()
    best = 0
    for _ in range(trials):
        best = max(best, rank_exact(J.evaluate(random_point(variables, rng))))
    return best


def check_quasiregularity(s: DAESystem, k: int, w: Witness) -> bool:
    """Full row rank of the Jacobian of ``F^[k-1]`` w.r.t. ``X^[k-1+e]`` at ``w``."""
    if k < 1:
        raise ValueError("k must be at least 1")
    eqs, cols, entries = prolongation_jacobian(s, k)
    worst = max(abs(f.evaluate(w.values)) for f in eqs)
    if worst > w.residual_bound:
        raise InconsistentWitness(f"witness residual {worst} exceeds its bound")
    M = [[Fraction(0)] * len(cols) for _ in eqs]
    for (a, c), p in entries.items():
        M[a][c] = p.evaluate(w.values)
    return _rank_of_values(M, w.residual_bound) == len(eqs)


@dataclass(frozen=True)
class HypothesisReport:
    k: int
    i: int
    witness_rank: int
    generic_rank: int

    @property
    def agree(self) -> bool:
        return self.witness_rank == self.generic_rank


def hypothesis_diagnostic(
    s: DAESystem, k: int, i: int, w: Witness, seed: int = 0, trials: int = 3
) -> HypothesisReport:
    J = pseudo_jacobian(s, k, i)
    if w.max_order < i + k:
        w = extend_witness(s, w, i + k, seed=seed)
    return HypothesisReport(k, i, rank_at(J, w), rank_generic(J, seed, trials))


@dataclass
class RankOracle:
    """Ranks of pseudo-Jacobians, either at a witness or at random points.

    In witness mode the point is extended on demand (and cached) to the
    order each matrix needs.
    """

    system: DAESystem
    mode: str = "generic"
    witness: Witness | None = None
    seed: int = 0
    trials: int = 3
    margin: int | None = None
    _extended: Witness | None = field(default=None, init=False, repr=False)

    def __post_init__(self):
        if self.mode not in ("witness", "generic"):
            raise ValueError(f"unknown oracle mode {self.mode!r}")
        if self.mode == "witness" and self.witness is None:
            raise ValueError("witness mode needs a witness")

    @classmethod
    def generic(cls, s: DAESystem, seed: int = 0, trials: int = 3) -> "RankOracle":
        return cls(s, "generic", seed=seed, trials=trials)

    @classmethod
    def at(cls, s: DAESystem, w: Witness, seed: int = 0, margin: int | None = None) -> "RankOracle":
        return cls(s, "witness", witness=w, seed=seed, margin=margin)

    def point(self, order: int) -> Witness:
        current = self._extended or self.witness
        if current.max_order < order:
            current = extend_witness(
                self.system, current, order, seed=self.seed, margin=self.margin
            )
            self._extended = current
        return current

    def rank(self, J: PseudoJacobian) -> int:
        if self.mode == "generic":
            return rank_generic(J, self.seed, self.trials)
        return rank_at(J, self.point(J.i + J.k))

    def describe(self) -> dict:
        if self.mode == "generic":
            return {"mode": "generic", "seed": self.seed, "trials": self.trials}
        return {"mode": "witness", "seed": self.seed}
