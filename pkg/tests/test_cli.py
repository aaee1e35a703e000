import json
from fractions import Fraction
from io import StringIO

import pytest
from hypothesis import given, strategies as st

from daeindex import corpus
from daeindex.cli.dsl import format_system, parse_expression, parse_system, parse_variable_name
from daeindex.cli.io import dump_witness, load_witness
from daeindex.cli.main import run
from daeindex.diffpoly import DiffPoly, Monomial, P, X
from daeindex.errors import InvalidSystem, NonIntegerExponent, ParseError, UndeclaredSymbol
from daeindex.system import DAESystem


def invoke(*argv):
    out, err = StringIO(), StringIO()
    code = run(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def test_parse_two_terms():
    p = parse_expression("x1'' - lam*x1", ["x1", "x2", "lam"])
    assert p == DiffPoly({Monomial.from_dict({X(1, 2): 1}): 1, Monomial.from_dict({X(3): 1, X(1): 1}): -1})


def test_parse_constraint_with_parameter():
    p = parse_expression("x1^2 + x2^2 - L^2", ["x1", "x2"], ["L"])
    x1, x2, L = DiffPoly.var(X(1)), DiffPoly.var(X(2)), DiffPoly.var(P("L"))
    assert p == x1**2 + x2**2 - L**2


def test_parse_derivative_forms():
    assert parse_expression("x1'''", ["x1"]) == DiffPoly.var(X(1, 3))
    assert parse_expression("D(x1, 5)", ["x1"]) == DiffPoly.var(X(1, 5))
    assert parse_expression("3/4*x - 0.5", ["x"]) == Fraction(3, 4) * DiffPoly.var(X(1)) - Fraction(1, 2)
    assert parse_expression("-(x + 1)^2 = x", ["x"]) == -(DiffPoly.var(X(1)) + 1) ** 2 - DiffPoly.var(X(1))


def test_parse_errors():
    with pytest.raises(UndeclaredSymbol) as exc:
        parse_system("unknowns: x\nequations:\n  x' - y\n")
    assert (exc.value.line, exc.value.column) == (3, 8)
    with pytest.raises(NonIntegerExponent):
        parse_expression("x^2.5", ["x"])
    with pytest.raises(NonIntegerExponent):
        parse_expression("x^y", ["x", "y"])
    with pytest.raises(ParseError):
        parse_expression("x +", ["x"])
    with pytest.raises(ParseError):
        parse_expression("x / x", ["x"])
    with pytest.raises(ParseError):
        parse_expression("g'", ["x"], ["g"])
    with pytest.raises(ParseError):
        parse_system("x' - x\n")
    with pytest.raises(ParseError):
        parse_system("unknowns: x\nunknowns: y\nequations:\n x'\n")
    with pytest.raises(InvalidSystem):
        parse_system("unknowns: x\nequations:\n x\n")


def test_semicolons_and_comments():
    s = parse_system("unknowns: x, y  # two\nequations: x' - y; y' + x\n")
    assert s.r == 2 and s.unknowns == ("x", "y")


@pytest.mark.parametrize("name", corpus.NAMES)
def test_corpus_round_trip(name):
    s = parse_system(corpus.read(name))
    assert parse_system(format_system(s)) == s


@st.composite
def systems(draw):
    n = draw(st.integers(1, 3))
    names = [f"u{j}" for j in range(1, n + 1)]
    params = draw(st.sampled_from([(), ("c",), ("c", "k")]))
    vars_ = [X(j, l) for j in range(1, n + 1) for l in range(5)] + [P(p) for p in params]
    r = draw(st.integers(1, n))
    eqs = []
    for i in range(r):
        terms = {Monomial.from_dict({X(1 + i % n, 1): 1}): Fraction(1)}
        for _ in range(draw(st.integers(0, 3))):
            m = Monomial.from_dict({v: draw(st.integers(1, 3)) for v in draw(st.sets(st.sampled_from(vars_), max_size=2))})
            terms[m] = terms.get(m, 0) + Fraction(draw(st.integers(-9, 9)), draw(st.integers(1, 5)))
        p = DiffPoly(terms)
        if p.is_zero() or p.order() < 1:
            p = DiffPoly.var(X(1, 1))
        eqs.append(p)
    return DAESystem(tuple(eqs), tuple(names), params)


@given(systems())
def test_random_round_trip(s):
    assert parse_system(format_system(s)) == s


def test_witness_files():
    s = parse_system(corpus.read("pendulum"))
    w = load_witness(s, corpus.read("pendulum", ".wit"))
    assert w[X(1, 1)] == 4
    again = load_witness(s, dump_witness(s, w))
    assert again.values == w.values
    assert parse_variable_name(s, "lam''") == X(3, 2)
    with pytest.raises(ParseError):
        load_witness(s, "{bad json")
    with pytest.raises(ParseError):
        load_witness(s, '{"x1": "1/0"}')
    with pytest.raises(ParseError):
        parse_variable_name(s, "x1*x2")


def test_analyze_pendulum_json():
    code, out, _ = invoke("analyze", "pendulum", "--witness", "pendulum")
    assert code == 0
    rep = json.loads(out)
    assert rep["schema"] == 1
    assert (rep["sigma"], rep["order"]) == (4, 2)
    assert rep["mu"][:6] == [0, 1, 2, 3, 4, 4]
    assert rep["oracle"]["mode"] == "witness"
    assert all(d["agree"] for d in rep["hypothesis"])
    assert all(q["full_row_rank"] for q in rep["quasi_regular"])
    assert rep["witness_point"]["lam"] == "3/5"


def test_jacobi_command(tmp_path):
    path = tmp_path / "p.dae"
    path.write_text(corpus.read("pendulum"))
    code, out, _ = invoke("jacobi", str(path))
    rep = json.loads(out)
    assert code == 0
    assert (rep["J_E"], rep["J_E0"], rep["index_bound_rhs"]) == (2, 4, 6)
    assert rep["dual_cover_E0"]["total"] == 4


def test_analyze_hessenberg_text():
    code, out, _ = invoke("analyze", "hessenberg3", "--format", "text")
    assert code == 0
    fields = dict(line.split(None, 1) for line in out.splitlines())
    assert fields["sigma"] == "3" and fields["order"] == "0"


def test_member_command():
    code, out, _ = invoke("member", "pendulum", "--f", "2*x1*x1' + 2*x2*x2'", "--find")
    rep = json.loads(out)
    assert code == 0 and rep["bounds"]["N"] == 3
    assert rep["representation"]["cofactors"] == [{"cofactor": "1", "derivative": 1, "equation": 3}]
    code, out, _ = invoke("member", "pendulum", "--f", "1", "--find", "--deg-cap", "6")
    rep = json.loads(out)
    assert rep["representation"]["found"] is False
    assert "not a proof" in rep["representation"]["note"]


def test_simulate_command(tmp_path):
    out_path = tmp_path / "traj.csv"
    code, _, _ = invoke("simulate", "expode", "--witness", "expode", "--h", "0.1", "--steps", "10",
                        "--out", str(out_path))
    lines = out_path.read_text().splitlines()
    assert code == 0 and lines[0] == "t,x,residual" and len(lines) == 12
    assert lines[-1].startswith("1,2.7182")


def test_selftest_command():
    code, out, _ = invoke("selftest", "--count", "50", "--seed", "3")
    rep = json.loads(out)
    assert code == 0 and rep["ok"] and rep["corpus"]["pendulum"]["sigma"] == 4


def test_exit_codes(tmp_path):
    bad = tmp_path / "bad.dae"
    bad.write_text("unknowns: x\nequations:\n x^1.5\n")
    assert invoke("analyze", str(bad))[0] == 2
    assert invoke("analyze", str(tmp_path / "missing.dae"))[0] == 2
    assert invoke("analyze", "pendulum", "--oracle", "witness")[0] == 2
    assert invoke("analyze", "nonqr", "--witness", "nonqr")[0] == 3
    assert invoke("analyze", "pendulum", "--max-k", "2")[0] == 3
    wit = tmp_path / "off.wit"
    wit.write_text(json.dumps({"g": "10", "L": "5", "x1": "3", "x2": "4", "x1'": "1", "x2'": "1"}))
    assert invoke("analyze", "pendulum", "--witness", str(wit))[0] == 3


@pytest.mark.parametrize("name", corpus.NAMES)
def test_json_is_deterministic(name):
    a = invoke("analyze", name, "--seed", "42")
    b = invoke("analyze", name, "--seed", "42")
    assert a == b and a[0] == 0
