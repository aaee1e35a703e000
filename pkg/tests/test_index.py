import pytest

from daeindex.cli.dsl import parse_system
from daeindex.errors import BadIndices, NegativeOrder, NotStabilized
from daeindex.index import (
    analyze,
    differentiation_index,
    hk_data,
    mu,
    order_of_ideal,
    trdeg_report,
)
from daeindex.jacobi import bounds
from daeindex.rank import RankOracle

from conftest import load, load_witness


@pytest.fixture(scope="module")
def pend_oracle(pendulum, pendulum_witness):
    return RankOracle.at(pendulum, pendulum_witness)


def test_mu_examples(pendulum, pend_oracle):
    assert mu(pendulum, 3, 1, pend_oracle) == 3
    assert mu(pendulum, 5, 1, pend_oracle) == 4
    assert mu(pendulum, 0, 1, pend_oracle) == 0
    with pytest.raises(BadIndices):
        mu(pendulum, 1, 0, pend_oracle)
    with pytest.raises(BadIndices):
        mu(pendulum, -1, 1, pend_oracle)


def test_pendulum_index(pendulum, pend_oracle):
    sigma, seq = differentiation_index(pendulum, pend_oracle)
    assert sigma == 4
    assert seq.values == (0, 1, 2, 3, 4, 4)
    assert order_of_ideal(pendulum, sigma, seq[sigma]) == 2


@pytest.mark.parametrize("n", [3, 4, 5])
def test_hessenberg_index(n):
    s = load(f"hessenberg{n}")
    sigma, seq = differentiation_index(s, RankOracle.generic(s))
    assert sigma == n
    assert list(seq.values[: n + 1]) == list(range(n + 1))
    assert order_of_ideal(s, sigma, seq[sigma]) == 0


def test_ode_index(expode):
    sigma, seq = differentiation_index(expode, RankOracle.generic(expode))
    assert sigma == 0 and seq.values == (0, 0)
    assert order_of_ideal(expode, 0, 0) == 1


def test_negative_order(pendulum):
    with pytest.raises(NegativeOrder):
        order_of_ideal(pendulum, 4, 7)


def test_hk_data(pendulum, hess3):
    h = hk_data(pendulum, 2)
    assert (h.linear, h.constant, h.regularity_bound) == (0, 2, 1)
    assert h(10) == 2
    h = hk_data(hess3, 0)
    assert (h.linear, h.constant, h.regularity_bound) == (0, 0, 0)
    s = parse_system("unknowns: x1 x2\nequations:\n x1'\n")
    rep = analyze(s, RankOracle.generic(s))
    assert (rep.hk.linear, rep.hk.constant) == (1, rep.order)
    assert rep.hk(3) == 4 + rep.order


def test_trdeg(pendulum, hess3):
    assert trdeg_report(pendulum, 1, 4, 4) == 2
    assert trdeg_report(pendulum, 3, 0, 0) == 6
    assert trdeg_report(hess3, 0, 3, 3) == 0


def test_not_stabilized_on_degenerate_point():
    s = load("nonqr")
    with pytest.raises(NotStabilized) as exc:
        differentiation_index(s, RankOracle.at(s, load_witness("nonqr", s)))
    assert exc.value.k_max == bounds(s).k_max


def test_cap_override(pendulum):
    with pytest.raises(NotStabilized):
        differentiation_index(pendulum, RankOracle.generic(pendulum), max_k=3)


def test_analyze_report(pendulum, pend_oracle):
    rep = analyze(pendulum, pend_oracle)
    assert rep.sigma == 4 and rep.order == 2
    assert rep.mu.values == (0, 1, 2, 3, 4, 4, 4)
    assert rep.checks.index_ok and rep.checks.order_ok
    assert rep.checks.index_bound_rhs == 6
    assert rep.trdeg[4] == 2


@pytest.mark.parametrize("name", ["pendulum", "hessenberg3", "hessenberg4", "expode"])
def test_mu_independent_of_row_index(name):
    s = load(name)
    oracle = RankOracle.generic(s, seed=1)
    for k in range(0, 6):
        values = {mu(s, k, i, oracle) for i in (s.e - 1, s.e, s.e + 1)}
        assert len(values) == 1
