"""Differential ideal membership: a priori bounds and explicit certificates.

``find_representation`` looks for cofactors ``g_ij`` with
``f = sum g_ij * f_i^(j)`` by exact linear algebra.  Only cofactor monomials
that can interact with the support of ``f`` are ever created: starting from
``supp(f)``, a column ``(i, j, m)`` is added when ``m * t`` hits a known
monomial for some term ``t`` of ``f_i^(j)``, and its products join the known
set.  Any representation splits into a part connected to ``supp(f)`` this
way plus a part summing to zero, so nothing is lost.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .diffpoly import NEG_INF, DiffPoly, Monomial
from .errors import CapExceeded
from .jacobi import bounds
from .linalg import solve_sparse
from .system import DAESystem

DEFAULT_SIZE_LIMIT = 200_000


@dataclass(frozen=True)
class MembershipBounds:
    N: int
    degree_bound: int
    D: int
    N_syntactic: int


def order_bound(sigma: int, e: int, f: DiffPoly) -> int:
    """``sigma + max(-1, ord f - e)``, floored at 0."""
    ord_f = f.order()
    extra = -1 if ord_f == NEG_INF else max(-1, int(ord_f) - e)
    return max(0, sigma + extra)


def degree_bound(D: int, r: int, N: int, f: DiffPoly) -> int:
    if D < 1:
        raise ValueError("D must be at least 1")
    deg = f.degree()
    return (0 if deg == NEG_INF else int(deg)) + D ** (r * (N + 1))


def syntactic_order_bound(s: DAESystem, f: DiffPoly) -> int:
    jb = bounds(s)
    ord_f = f.order()
    top = s.e - 1 if ord_f == NEG_INF else max(int(ord_f), s.e - 1)
    return jb.J_E0 - jb.min_e0 + top


def membership_bounds(s: DAESystem, f: DiffPoly, sigma: int) -> MembershipBounds:
    N = order_bound(sigma, s.e, f)
    D = s.max_degree()
    return MembershipBounds(N, degree_bound(D, s.r, N, f), D, syntactic_order_bound(s, f))


@dataclass(frozen=True)
class Representation:
    cofactors: dict[tuple[int, int], DiffPoly]  # (equation i, derivative j) -> g_ij
    N: int
    degree: int

    def expand(self, s: DAESystem) -> DiffPoly:
        total = DiffPoly()
        for (i, j), g in self.cofactors.items():
            total = total + g * s.derivative(i, j)
        return total


def _solve_at_degree(s, f, gens, d, size_limit):
    """Grow the column set level by level at total degree ``d`` and solve."""
    target = dict(f.items())
    known: set[Monomial] = set(target)
    frontier = set(target)
    columns: dict[tuple[int, int, Monomial], dict[Monomial, Fraction]] = {}
    while frontier:
        added = []
        for M in sorted(frontier):
            for key, g, deg_g in gens:
                for t in g.terms:
                    m = M.divide(t)
                    if m is None or m.degree + deg_g > d:
                        continue
                    col = (key[0], key[1], m)
                    if col in columns:
                        continue
                    columns[col] = {m * u: c for u, c in g.items()}
                    added.append(col)
                    if len(columns) > size_limit:
                        raise CapExceeded(len(columns), size_limit)
        frontier = set()
        for col in added:
            for M in columns[col]:
                if M not in known:
                    known.add(M)
                    frontier.add(M)
        if not added:
            break
        rows: dict[Monomial, dict] = {M: {} for M in known}
        for col, prods in columns.items():
            for M, c in prods.items():
                rows[M][col] = c
        order = sorted(known)
        sol = solve_sparse([rows[M] for M in order], [target.get(M, Fraction(0)) for M in order])
        if sol is not None:
            return sol
    return None


def find_representation(
    s: DAESystem,
    f: DiffPoly,
    N: int,
    deg_cap: int | None = None,
    size_limit: int = DEFAULT_SIZE_LIMIT,
) -> Representation | None:
    """Cofactors with ``f = sum g_ij f_i^(j)`` (``j <= N``), or None if none is
    found below ``deg_cap``.  None is not a proof of non-membership.
    """
    if N < 0:
        raise ValueError("N must be non-negative")
    if f.is_zero():
        return Representation({}, N, 0)
    deg_f = int(f.degree())
    cap = deg_f + 4 if deg_cap is None else deg_cap
    if cap < deg_f:
        raise ValueError("the degree cap is below deg f")
    gens = []
    for j in range(N + 1):
        for i in range(1, s.r + 1):
            g = s.derivative(i, j)
            gens.append(((i, j), g, int(g.degree())))
    for d in range(deg_f, cap + 1):
        sol = _solve_at_degree(s, f, gens, d, size_limit)
        if sol is None:
            continue
        cof: dict[tuple[int, int], dict[Monomial, Fraction]] = {}
        for (i, j, m), c in sol.items():
            cof.setdefault((i, j), {})[m] = c
        rep = Representation(
            {key: DiffPoly(terms) for key, terms in sorted(cof.items())}, N, d
        )
        if rep.expand(s) != f:
            raise AssertionError("representation failed exact re-expansion")
        return rep
    return None
