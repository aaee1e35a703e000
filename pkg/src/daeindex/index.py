"""The mu sequence, differentiation index, order and Hilbert-Kolchin data."""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import BadIndices, NegativeOrder, NotStabilized
from .jacobi import JacobiBounds, bounds
from .prolong import pseudo_jacobian
from .rank import RankOracle
from .system import DAESystem


@dataclass(frozen=True)
class MuSequence:
    values: tuple[int, ...]
    i: int
    oracle: dict = field(default_factory=dict, compare=False)

    def __getitem__(self, k: int) -> int:
        return self.values[k]

    def __len__(self) -> int:
        return len(self.values)


def mu(s: DAESystem, k: int, i: int, oracle: RankOracle) -> int:
    if k < 0:
        raise BadIndices("k must be non-negative")
    if i < s.e - 1:
        raise BadIndices(f"i must be at least e-1 = {s.e - 1}")
    if k == 0:
        return 0
    return k * s.r - oracle.rank(pseudo_jacobian(s, k, i))


def mu_sequence(s: DAESystem, k_last: int, i: int, oracle: RankOracle) -> MuSequence:
    return MuSequence(tuple(mu(s, k, i, oracle) for k in range(k_last + 1)), i, oracle.describe())


def differentiation_index(
    s: DAESystem, oracle: RankOracle, max_k: int | None = None
) -> tuple[int, MuSequence]:
    """Return ``sigma`` and the sequence ``mu_0..mu_{sigma+1}`` at ``i = e-1``."""
    cap = bounds(s).k_max if max_k is None else max_k
    i = s.e - 1
    values = [0]
    for k in range(1, cap + 1):
        values.append(mu(s, k, i, oracle))
        if values[k] == values[k - 1]:
            return k - 1, MuSequence(tuple(values), i, oracle.describe())
    raise NotStabilized(cap, values)


def order_of_ideal(s: DAESystem, sigma: int, mu_sigma: int) -> int:
    value = s.e * s.r - mu_sigma
    if value < 0:
        raise NegativeOrder(f"e*r = {s.e * s.r} is smaller than mu_sigma = {mu_sigma}")
    return value


@dataclass(frozen=True)
class HKData:
    linear: int
    constant: int
    regularity_bound: int

    def __call__(self, T: int) -> int:
        return self.linear * (T + 1) + self.constant


def hk_data(s: DAESystem, order: int) -> HKData:
    return HKData(s.n - s.r, order, s.e - 1)


def trdeg_report(s: DAESystem, i: int, k: int, mu_k: int) -> int:
    return (s.n - s.r) * (i + 1) + s.e * s.r - mu_k


@dataclass(frozen=True)
class BoundChecks:
    index_bound_rhs: int
    order_bound: object
    index_ok: bool
    order_ok: bool


@dataclass(frozen=True)
class IndexReport:
    sigma: int
    mu: MuSequence
    order: int
    hk: HKData
    trdeg: tuple[int, ...]
    jacobi: JacobiBounds
    checks: BoundChecks

    @property
    def hk_linear(self) -> int:
        return self.hk.linear

    @property
    def hk_constant(self) -> int:
        return self.hk.constant

    @property
    def regularity_bound(self) -> int:
        return self.hk.regularity_bound


def analyze(s: DAESystem, oracle: RankOracle, max_k: int | None = None, extra: int = 2) -> IndexReport:
    """Full index analysis; the mu sequence is reported through ``sigma + extra``."""
    sigma, seq = differentiation_index(s, oracle, max_k)
    values = list(seq.values)
    for k in range(len(values), sigma + extra + 1):
        values.append(mu(s, k, seq.i, oracle))
    seq = MuSequence(tuple(values), seq.i, seq.oracle)
    order = order_of_ideal(s, sigma, values[sigma])
    jb = bounds(s)
    checks = BoundChecks(
        index_bound_rhs=jb.index_bound_rhs,
        order_bound=jb.order_bound,
        index_ok=sigma + order <= jb.index_bound_rhs,
        order_ok=order <= jb.order_bound,
    )
    trdeg = tuple(trdeg_report(s, seq.i, k, m) for k, m in enumerate(values))
    return IndexReport(sigma, seq, order, hk_data(s, order), trdeg, jb, checks)
