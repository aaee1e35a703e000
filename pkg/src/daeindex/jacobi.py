"""Jacobi numbers of order matrices and their Koenig-Egervary certificates.

The Jacobi number of an s x m matrix (s <= m) is the best total of an
injection rows -> columns.  Entries equal to ``NEG_INF`` are forbidden edges.
It is computed with the Hungarian method (shortest augmenting paths with
row/column potentials) after a maximum-matching feasibility check; the final
potentials double as a minimum dual cover.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .diffpoly import NEG_INF, ExtInt
from .errors import InfiniteEntry, KTooSmall, TooLarge
from .system import DAESystem, order_matrix

INF = float("inf")
BRUTEFORCE_CAP = 2_000_000


@dataclass(frozen=True)
class DualCover:
    lam: tuple[int, ...]
    phi: tuple[int, ...]

    @property
    def total(self) -> int:
        return sum(self.lam) + sum(self.phi)

    def covers(self, A: Sequence[Sequence[ExtInt]]) -> bool:
        return all(
            self.lam[i] >= 0
            and self.phi[j] >= 0
            and (a == NEG_INF or self.lam[i] + self.phi[j] >= a)
            for i, row in enumerate(A)
            for j, a in enumerate(row)
        )


def _normalize(A: Sequence[Sequence[ExtInt]]) -> tuple[list[list[ExtInt]], bool]:
    rows = [list(r) for r in A]
    if rows and any(len(r) != len(rows[0]) for r in rows):
        raise ValueError("matrix rows have different lengths")
    if rows and len(rows) > len(rows[0]):
        return [list(c) for c in zip(*rows)], True
    return rows, False


def _has_full_matching(A: list[list[ExtInt]]) -> bool:
    """Kuhn's augmenting-path test: can every row use a distinct allowed column?"""
    s = len(A)
    m = len(A[0]) if s else 0
    owner = [-1] * m

    def augment(i: int, seen: list[bool]) -> bool:
        for j in range(m):
            if A[i][j] != NEG_INF and not seen[j]:
                seen[j] = True
                if owner[j] < 0 or augment(owner[j], seen):
                    owner[j] = i
                    return True
        return False

    return all(augment(i, [False] * m) for i in range(s))


def _hungarian(A: list[list[ExtInt]]):
    """Max-weight perfect matching of a square matrix with forbidden edges.

    Returns ``(assignment, u, v)`` with ``assignment[i]`` the column of row i
    and potentials for the min-cost form (cost = -a): ``u_i + v_j <= -a_ij``.
    The caller guarantees a perfect matching on allowed edges exists.
    """
    n = len(A)
    u = [0] * (n + 1)
    v = [0] * (n + 1)
    p = [0] * (n + 1)  # p[j]: row matched to column j (1-based, 0 = free)
    way = [0] * (n + 1)
    for i in range(1, n + 1):
        p[0] = i
        j0 = 0
        minv = [INF] * (n + 1)
        used = [False] * (n + 1)
        while True:
            used[j0] = True
            i0 = p[j0]
            delta = INF
            j1 = -1
            row = A[i0 - 1]
            for j in range(1, n + 1):
                if used[j]:
                    continue
                a = row[j - 1]
                if a != NEG_INF:
                    cur = -a - u[i0] - v[j]
                    if cur < minv[j]:
                        minv[j] = cur
                        way[j] = j0
                if minv[j] < delta:
                    delta = minv[j]
                    j1 = j
            if j1 < 0:
                raise AssertionError("no augmenting path; feasibility check missed")
            for j in range(n + 1):
                if used[j]:
                    u[p[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if p[j0] == 0:
                break
        while j0:
            j1 = way[j0]
            p[j0] = p[j1]
            j0 = j1
    assignment = [0] * n
    for j in range(1, n + 1):
        assignment[p[j] - 1] = j - 1
    return assignment, u[1:], v[1:]


def _solve(A: Sequence[Sequence[ExtInt]]):
    """Jacobi number, optimal injection and (unnormalized) potentials."""
    rows, transposed = _normalize(A)
    s = len(rows)
    if s == 0:
        return 0, [], rows, transposed, None
    m = len(rows[0])
    if not _has_full_matching(rows):
        return NEG_INF, None, rows, transposed, None
    square = rows + [[0] * m for _ in range(m - s)]
    assignment, u, v = _hungarian(square)
    value = sum(rows[i][assignment[i]] for i in range(s))
    return int(value), assignment[:s], rows, transposed, (u, v)


def jacobi_number(A: Sequence[Sequence[ExtInt]]) -> ExtInt:
    """``max`` over injections of the entry sum; ``NEG_INF`` if every injection is blocked."""
    return _solve(A)[0]


def optimal_injection(A: Sequence[Sequence[ExtInt]]) -> list[int] | None:
    value, assignment, _, transposed, _ = _solve(A)
    if value == NEG_INF or transposed:
        return None if value == NEG_INF else assignment
    return assignment


def jacobi_bruteforce(A: Sequence[Sequence[ExtInt]], cap: int = BRUTEFORCE_CAP) -> ExtInt:
    rows, _ = _normalize(A)
    s = len(rows)
    if s == 0:
        return 0
    m = len(rows[0])
    if math.perm(m, s) > cap:
        raise TooLarge(f"{math.perm(m, s)} injections exceed the enumeration cap {cap}")
    best: ExtInt = NEG_INF
    for tau in itertools.permutations(range(m), s):
        total = sum(rows[i][tau[i]] for i in range(s))
        if total > best:
            best = total
    return best if best == NEG_INF else int(best)


def koenig_dual(A: Sequence[Sequence[ExtInt]]) -> DualCover:
    """Nonnegative integer cover ``lam_i + phi_j >= a_ij`` whose total is ``J(A)``."""
    if any(a == NEG_INF for row in A for a in row):
        raise InfiniteEntry("the Koenig-Egervary identity needs finite entries")
    if any(a < 0 for row in A for a in row):
        raise ValueError("entries must be nonnegative")
    value, _, rows, transposed, pots = _solve(A)
    s = len(rows)
    if s == 0:
        return DualCover((), tuple(0 for _ in (A[0] if A else ())))
    u, v = pots
    lam = [-x for x in u]
    phi = [-x for x in v]
    shift = min(phi)
    phi = [x - shift for x in phi]
    lam = [x + shift for x in lam]
    real_lam = lam[:s]
    assert sum(lam[s:]) == 0 and sum(real_lam) + sum(phi) == value
    if transposed:
        return DualCover(tuple(phi), tuple(real_lam))
    return DualCover(tuple(real_lam), tuple(phi))


def binary_matrix(M: Sequence[Sequence]) -> list[list[int]]:
    return [[1 if a != 0 else 0 for a in row] for row in M]


def triangular_block(k: int, a: int) -> list[list[int]]:
    """k x k matrix with ones exactly where ``k - a <= i - j <= k - 1`` (1-based)."""
    if not 0 <= a <= k:
        raise KTooSmall(f"need 0 <= a <= k, got a={a}, k={k}")
    return [[1 if k - a <= i - j <= k - 1 else 0 for j in range(k)] for i in range(k)]


def triangular_expand(A: Sequence[Sequence[int]], k: int) -> list[list[int]]:
    """The ks x km block matrix ``(T_{k, a_ij})``."""
    if any(a == NEG_INF or a < 0 for row in A for a in row):
        raise ValueError("entries must be nonnegative integers")
    top = max((a for row in A for a in row), default=0)
    if k < 1 or k < top:
        raise KTooSmall(f"k={k} is smaller than the largest entry {top}")
    out: list[list[int]] = []
    for row in A:
        blocks = [triangular_block(k, int(a)) for a in row]
        for h in range(k):
            out.append([x for b in blocks for x in b[h]])
    return out


@dataclass(frozen=True)
class JacobiBounds:
    J_E: ExtInt
    J_E0: int
    e: int
    min_e0: int

    @property
    def index_bound_rhs(self) -> int:
        """Upper bound for ``sigma + ord``."""
        return self.J_E0 + self.e - self.min_e0

    @property
    def order_bound(self) -> ExtInt:
        return self.J_E

    @property
    def k_max(self) -> int:
        return self.index_bound_rhs + 1


def bounds(s: DAESystem) -> JacobiBounds:
    om = order_matrix(s)
    return JacobiBounds(
        J_E=jacobi_number(om.E),
        J_E0=int(jacobi_number(om.E0)),
        e=om.e,
        min_e0=om.min_e0,
    )


def rational_rank_bound(M: Sequence[Sequence[Fraction]]) -> int:
    """``J(B(M))``: the structural upper bound on ``rank(M)``."""
    return int(jacobi_number(binary_matrix(M))) if M and M[0] else 0
