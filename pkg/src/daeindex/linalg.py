"""Exact linear algebra over Q: fraction-free rank, dense and sparse solvers."""

from __future__ import annotations

import heapq
from fractions import Fraction
from math import lcm
from typing import Hashable, Sequence


def _integer_row(row: Sequence) -> list[int]:
    den = 1
    for a in row:
        if a:
            den = lcm(den, Fraction(a).denominator)
    return [int(Fraction(a) * den) for a in row]


def rank_exact(M: Sequence[Sequence]) -> int:
    """Rank of a rational matrix by fraction-free (Bareiss) elimination.

    Each row is scaled to integers first; the pivot in every column is the
    candidate of smallest magnitude, which keeps intermediate minors short.
    """
    A = [_integer_row(row) for row in M if any(row)]
    if not A:
        return 0
    m, ncols = len(A), len(A[0])
    r = 0
    prev = 1
    for c in range(ncols):
        piv = -1
        best = None
        for i in range(r, m):
            a = A[i][c]
            if a and (best is None or abs(a) < best):
                best, piv = abs(a), i
        if piv < 0:
            continue
        A[r], A[piv] = A[piv], A[r]
        p = A[r][c]
        prow = A[r]
        for i in range(r + 1, m):
            row = A[i]
            a = row[c]
            if a:
                for j in range(c + 1, ncols):
                    row[j] = (p * row[j] - a * prow[j]) // prev
            else:
                for j in range(c + 1, ncols):
                    if row[j]:
                        row[j] = (p * row[j]) // prev
            row[c] = 0
        prev = p
        r += 1
        if r == m:
            break
    return r


def rank_with_min_pivot(M: Sequence[Sequence]) -> tuple[int, Fraction | None]:
    """Gaussian elimination with largest-magnitude pivoting.

    Returns the rank and the smallest absolute pivot used (None if rank 0).
    Used to judge whether a rank decision at an approximate point is safe.
    """
    A = [[Fraction(a) for a in row] for row in M]
    if not A:
        return 0, None
    m, ncols = len(A), len(A[0])
    r = 0
    smallest = None
    for c in range(ncols):
        piv = max(range(r, m), key=lambda i: abs(A[i][c]), default=None)
        if piv is None or not A[piv][c]:
            continue
        A[r], A[piv] = A[piv], A[r]
        p = A[r][c]
        smallest = abs(p) if smallest is None else min(smallest, abs(p))
        for i in range(r + 1, m):
            f = A[i][c] / p
            if f:
                A[i] = [x - f * y for x, y in zip(A[i], A[r])]
        r += 1
        if r == m:
            break
    return r, smallest


def rref(
    rows: list[list[Fraction]], rhs: list[Fraction]
) -> tuple[list[list[Fraction]], list[Fraction], list[int]]:
    """Reduced row echelon form of ``[rows | rhs]`` with largest-magnitude pivots.

    Returns the reduced rows, reduced right-hand sides and pivot columns; rows
    beyond ``len(pivots)`` are zero on the left and carry the inconsistency
    residuals on the right.
    """
    A = [list(r) for r in rows]
    b = list(rhs)
    m = len(A)
    ncols = len(A[0]) if A else 0
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == m:
            break
        piv = max(range(r, m), key=lambda i: abs(A[i][c]))
        if not A[piv][c]:
            continue
        A[r], A[piv] = A[piv], A[r]
        b[r], b[piv] = b[piv], b[r]
        p = A[r][c]
        if p != 1:
            A[r] = [x / p for x in A[r]]
            b[r] = b[r] / p
        for i in range(m):
            if i != r and A[i][c]:
                f = A[i][c]
                A[i] = [x - f * y for x, y in zip(A[i], A[r])]
                b[i] = b[i] - f * b[r]
        pivots.append(c)
        r += 1
    return A, b, pivots


def solve_sparse(
    rows: list[dict[Hashable, Fraction]], rhs: list[Fraction]
) -> dict[Hashable, Fraction] | None:
    """Solve a sparse system exactly; free unknowns are set to zero.

    Rows are reduced one at a time against the pivots found so far; the pivot
    of each new row is the column of that row occurring in the fewest rows, so
    basic solutions stay sparse.  Returns None if the system is inconsistent.
    """
    counts: dict[Hashable, int] = {}
    for row in rows:
        for c in row:
            counts[c] = counts.get(c, 0) + 1
    pivot_rows: dict[Hashable, tuple[dict, Fraction]] = {}
    created: dict[Hashable, int] = {}
    order: list[Hashable] = []
    for row0, b0 in sorted(zip(rows, rhs), key=lambda rb: len(rb[0])):
        row = dict(row0)
        b = Fraction(b0)
        heap = [(created[c], c) for c in row if c in created]
        heapq.heapify(heap)
        while heap:
            _, c = heapq.heappop(heap)
            a = row.get(c)
            if not a:
                continue
            prow, pb = pivot_rows[c]
            for cc, v in prow.items():
                s = row.get(cc, 0) - a * v
                if s:
                    if cc not in row and cc in created:
                        heapq.heappush(heap, (created[cc], cc))
                    row[cc] = s
                else:
                    row.pop(cc, None)
            b -= a * pb
        if not row:
            if b:
                return None
            continue
        c = min(row, key=lambda cc: (counts.get(cc, 0), repr(cc)))
        a = row[c]
        prow = {cc: v / a for cc, v in row.items()}
        pivot_rows[c] = (prow, b / a)
        created[c] = len(order)
        order.append(c)
    sol: dict[Hashable, Fraction] = {}
    for c in reversed(order):
        prow, pb = pivot_rows[c]
        val = pb
        for cc, v in prow.items():
            if cc != c:
                val -= v * sol.get(cc, 0)
        if val:
            sol[c] = val
    return sol
