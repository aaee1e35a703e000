"""DAE system model and its order matrices."""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from typing import Sequence

from .diffpoly import NEG_INF, DerivVar, DiffPoly, ExtInt
from .errors import InvalidSystem


@dataclass(frozen=True)
class DAESystem:
    """Equations ``f_1 = ... = f_r = 0`` in unknowns ``X_1..X_n``.

    Unknown ``j`` (1-based) is named ``unknowns[j-1]``; parameters are
    zero-derivative symbols referenced by name.  The presentation is kept
    exactly as given.
    """

    equations: tuple[DiffPoly, ...]
    unknowns: tuple[str, ...]
    params: tuple[str, ...] = ()
    _levels: dict = field(default_factory=dict, init=False, repr=False, compare=False)
    _lock: threading.Lock = field(
        default_factory=threading.Lock, init=False, repr=False, compare=False
    )

    def __post_init__(self):
        object.__setattr__(self, "equations", tuple(self.equations))
        object.__setattr__(self, "unknowns", tuple(self.unknowns))
        object.__setattr__(self, "params", tuple(self.params))
        n, r = len(self.unknowns), len(self.equations)
        if r < 1 or r > n:
            raise InvalidSystem(f"need 1 <= r <= n, got r={r}, n={n}")
        if len(set(self.unknowns) | set(self.params)) != n + len(self.params):
            raise InvalidSystem("duplicate symbol names")
        for i, f in enumerate(self.equations, 1):
            if f.is_zero():
                raise InvalidSystem(f"equation {i} is identically zero")
            for v in f.variables():
                if v.is_param:
                    if v.param not in self.params:
                        raise InvalidSystem(f"undeclared parameter {v.param!r}")
                elif not 1 <= v.var <= n:
                    raise InvalidSystem(f"unknown index {v.var} out of range")
        if self.e < 1:
            raise InvalidSystem("the system involves no derivatives (e = 0)")

    @property
    def n(self) -> int:
        return len(self.unknowns)

    @property
    def r(self) -> int:
        return len(self.equations)

    @property
    def e(self) -> int:
        best = max(f.order() for f in self.equations)
        return int(best) if best != NEG_INF else 0

    def name_of(self, v: DerivVar) -> str:
        if v.is_param:
            return v.param
        base = self.unknowns[v.var - 1]
        return base + "'" * v.order if v.order <= 3 else f"D({base}, {v.order})"

    def var_index(self, name: str) -> int:
        return self.unknowns.index(name) + 1

    def param_var(self, name: str) -> DerivVar:
        return DerivVar(0, 0, name)

    def format_poly(self, p: DiffPoly) -> str:
        return p.format(self.name_of)

    def derivative(self, i: int, p: int) -> DiffPoly:
        """Memoized ``f_i^(p)`` for 1-based equation index ``i``."""
        key = (i, p)
        cached = self._levels.get(key)
        if cached is not None:
            return cached
        with self._lock:
            q = p
            while q > 0 and (i, q) not in self._levels:
                q -= 1
            poly = self._levels.get((i, q), self.equations[i - 1])
            while q < p:
                poly = poly.total_derivative()
                q += 1
                self._levels[(i, q)] = poly
            self._levels.setdefault((i, p), poly)
        return self._levels[key]

    def all_variables(self, max_order: int) -> list[DerivVar]:
        """``X^[max_order]`` in canonical order, followed by the parameters."""
        out = [DerivVar(j, l) for l in range(max_order + 1) for j in range(1, self.n + 1)]
        return out + [DerivVar(0, 0, name) for name in self.params]

    def max_degree(self) -> int:
        return int(max(f.degree() for f in self.equations))


@dataclass(frozen=True)
class OrderMatrix:
    """The r x n matrix of orders ``eps_ij`` (``NEG_INF`` where X_j is absent)."""

    entries: tuple[tuple[ExtInt, ...], ...]

    @property
    def E(self) -> list[list[ExtInt]]:
        return [list(row) for row in self.entries]

    @property
    def E0(self) -> list[list[int]]:
        return [[0 if a == NEG_INF else int(a) for a in row] for row in self.entries]

    @property
    def e(self) -> int:
        return max(max(row) for row in self.E0)

    @property
    def min_e0(self) -> int:
        return min(min(row) for row in self.E0)


def order_matrix(s: DAESystem) -> OrderMatrix:
    return OrderMatrix(
        tuple(
            tuple(f.order_in_var(j) for j in range(1, s.n + 1)) for f in s.equations
        )
    )


def make_system(
    equations: Sequence[DiffPoly], unknowns: Sequence[str], params: Sequence[str] = ()
) -> DAESystem:
    return DAESystem(tuple(equations), tuple(unknowns), tuple(params))
