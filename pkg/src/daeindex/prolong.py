"""Prolongations of a system and the block lower-triangular pseudo-Jacobians."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .diffpoly import DerivVar, DiffPoly, Number
from .errors import BadIndices
from .system import DAESystem


@dataclass(frozen=True)
class Prolongation:
    base: DAESystem
    k: int
    rows: tuple[tuple[DiffPoly, ...], ...]  # rows[p][j] = f_{j+1}^(p)

    def level(self, p: int) -> tuple[DiffPoly, ...]:
        return self.rows[p]

    def flat(self) -> list[DiffPoly]:
        return [f for level in self.rows for f in level]


def prolong(s: DAESystem, k: int) -> Prolongation:
    if k < 0:
        raise ValueError("k must be non-negative")
    rows = tuple(
        tuple(s.derivative(i, p) for i in range(1, s.r + 1)) for p in range(k + 1)
    )
    return Prolongation(s, k, rows)


@dataclass(frozen=True)
class PseudoJacobian:
    """The kr x kn matrix whose block (p, q) is dF^(i-e+p)/dX^(i+q).

    Only structurally nonzero entries are stored, keyed by 0-based
    ``(row, col)``; row ``(p-1)*r + a`` is equation ``a+1`` of block ``p``
    and column ``(q-1)*n + b`` is the variable ``X_{b+1}^(i+q)``.
    """

    system: DAESystem
    k: int
    i: int
    entries: Mapping[tuple[int, int], DiffPoly]

    @property
    def shape(self) -> tuple[int, int]:
        return self.k * self.system.r, self.k * self.system.n

    def entry(self, row: int, col: int) -> DiffPoly:
        return self.entries.get((row, col), DiffPoly())

    def block(self, p: int, q: int) -> list[list[DiffPoly]]:
        """Block ``(p, q)``, 1-based, as an r x n list of lists."""
        r, n = self.system.r, self.system.n
        return [
            [self.entry((p - 1) * r + a, (q - 1) * n + b) for b in range(n)]
            for a in range(r)
        ]

    def to_matrix(self) -> list[list[DiffPoly]]:
        rows, cols = self.shape
        return [[self.entry(a, b) for b in range(cols)] for a in range(rows)]

    def variables(self) -> set[DerivVar]:
        out: set[DerivVar] = set()
        for p in self.entries.values():
            out |= p.variables()
        return out

    def evaluate(self, values: Mapping[DerivVar, Number]) -> list[list[Fraction]]:
        rows, cols = self.shape
        M = [[Fraction(0)] * cols for _ in range(rows)]
        for (a, b), p in self.entries.items():
            M[a][b] = p.evaluate(values)
        return M

    def row_equation(self, row: int) -> tuple[int, int]:
        """``(equation index, derivative order)`` generating this row (1-based eq)."""
        r, e = self.system.r, self.system.e
        p, a = divmod(row, r)
        return a + 1, self.i - e + p + 1


def pseudo_jacobian(s: DAESystem, k: int, i: int) -> PseudoJacobian:
    e = s.e
    if k < 1 or i < e - 1:
        raise BadIndices(f"need k >= 1 and i >= e-1 = {e - 1}, got k={k}, i={i}")
    r, n = s.r, s.n
    entries: dict[tuple[int, int], DiffPoly] = {}
    for p in range(1, k + 1):
        order = i - e + p
        for a in range(r):
            f = s.derivative(a + 1, order)
            present = f.variables()
            for q in range(1, p + 1):
                for b in range(n):
                    v = DerivVar(b + 1, i + q)
                    if v not in present:
                        continue
                    d = f.partial(v)
                    if d:
                        entries[((p - 1) * r + a, (q - 1) * n + b)] = d
    return PseudoJacobian(s, k, i, entries)


def prolongation_jacobian(s: DAESystem, k: int) -> tuple[list[DiffPoly], list[DerivVar], dict]:
    """Jacobian of ``F^[k-1]`` with respect to all of ``X^[k-1+e]``.

    Returns the rows (equations), the column variables and a sparse entry map.
    """
    eqs = [s.derivative(a, p) for p in range(k) for a in range(1, s.r + 1)]
    cols = [DerivVar(j, l) for l in range(k + s.e) for j in range(1, s.n + 1)]
    col_of = {v: c for c, v in enumerate(cols)}
    entries: dict[tuple[int, int], DiffPoly] = {}
    for a, f in enumerate(eqs):
        for v in f.variables():
            c = col_of.get(v)
            if c is not None:
                entries[(a, c)] = f.partial(v)
    return eqs, cols, entries
