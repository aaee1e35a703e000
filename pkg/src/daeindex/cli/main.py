"""``daeindex`` command line: analyze, jacobi, member, simulate, selftest."""

from __future__ import annotations

import argparse
import io
import random
import sys
from pathlib import Path

from .. import corpus
from ..diffpoly import NEG_INF
from ..errors import AnalysisError, DAEError, ParseError
from ..index import analyze
from ..jacobi import (
    bounds,
    jacobi_bruteforce,
    jacobi_number,
    koenig_dual,
    rational_rank_bound,
    triangular_expand,
)
from ..linalg import rank_exact
from ..membership import find_representation, membership_bounds
from ..rank import RankOracle, check_quasiregularity, extend_witness, hypothesis_diagnostic
from ..reduce import simulate
from ..system import DAESystem, order_matrix
from .dsl import parse_expression, parse_system
from .io import load_witness, to_json, to_text

EXIT_OK, EXIT_FAIL, EXIT_PARSE, EXIT_ANALYSIS = 0, 1, 2, 3


def _read(path: str, suffix: str = ".dae") -> str:
    p = Path(path)
    if p.is_file():
        return p.read_text()
    if path in corpus.NAMES:
        text = corpus.read(path, suffix)
        if text is not None:
            return text
    raise ParseError(f"cannot read {path!r}")


def _load(args) -> tuple[DAESystem, object]:
    s = parse_system(_read(args.system))
    w = load_witness(s, _read(args.witness, ".wit")) if args.witness else None
    return s, w


def _oracle(args, s: DAESystem, w) -> RankOracle:
    mode = args.oracle or ("witness" if w is not None else "generic")
    if mode == "witness":
        if w is None:
            raise ParseError("--oracle witness needs --witness FILE")
        return RankOracle.at(s, w, seed=args.seed)
    return RankOracle.generic(s, seed=args.seed)


def _system_summary(s: DAESystem) -> dict:
    return {
        "unknowns": list(s.unknowns),
        "params": list(s.params),
        "equations": [s.format_poly(f) for f in s.equations],
        "n": s.n,
        "r": s.r,
        "e": s.e,
    }


def _jacobi_summary(s: DAESystem) -> dict:
    om = order_matrix(s)
    jb = bounds(s)
    dual = koenig_dual(om.E0)
    return {
        "E": om.E,
        "E0": om.E0,
        "J_E": jb.J_E,
        "J_E0": jb.J_E0,
        "e": jb.e,
        "min_e0": jb.min_e0,
        "index_bound_rhs": jb.index_bound_rhs,
        "order_bound": jb.order_bound,
        "dual_cover_E0": {"lambda": list(dual.lam), "phi": list(dual.phi), "total": dual.total},
    }


def cmd_analyze(args) -> dict:
    s, w = _load(args)
    oracle = _oracle(args, s, w)
    rep = analyze(s, oracle, args.max_k)
    out = {
        "system": _system_summary(s),
        "oracle": oracle.describe(),
        "sigma": rep.sigma,
        "mu": list(rep.mu.values),
        "mu_row_index": rep.mu.i,
        "order": rep.order,
        "hk": {
            "linear": rep.hk.linear,
            "constant": rep.hk.constant,
            "polynomial": f"{rep.hk.linear}*(T+1) + {rep.hk.constant}",
            "regularity_bound": rep.hk.regularity_bound,
        },
        "trdeg": list(rep.trdeg),
        "jacobi": _jacobi_summary(s),
        "bound_checks": {
            "index": {
                "sigma_plus_order": rep.sigma + rep.order,
                "rhs": rep.checks.index_bound_rhs,
                "ok": rep.checks.index_ok,
            },
            "order": {"order": rep.order, "J_E": rep.checks.order_bound, "ok": rep.checks.order_ok},
        },
    }
    if oracle.mode == "witness":
        top = rep.sigma + 1
        point = oracle.point(s.e - 1 + top + 1)
        out["hypothesis"] = [
            {
                "k": d.k,
                "i": d.i,
                "witness_rank": d.witness_rank,
                "generic_rank": d.generic_rank,
                "agree": d.agree,
            }
            for d in (
                hypothesis_diagnostic(s, k, s.e - 1, point, args.seed) for k in range(1, top + 1)
            )
        ]
        out["quasi_regular"] = [
            {"k": k, "full_row_rank": check_quasiregularity(s, k, point)} for k in range(1, top + 1)
        ]
        low = point.restrict(s.e - 1)
        out["witness_point"] = {s.name_of(v): x for v, x in sorted(low.values.items())}
    return out


def cmd_jacobi(args) -> dict:
    s = parse_system(_read(args.system))
    return {"system": _system_summary(s), **_jacobi_summary(s)}


def cmd_member(args) -> dict:
    s, w = _load(args)
    f = parse_expression(args.f, s.unknowns, s.params)
    if f.is_zero():
        raise ParseError("f must be nonzero")
    oracle = _oracle(args, s, w)
    sigma = analyze(s, oracle, args.max_k).sigma
    mb = membership_bounds(s, f, sigma)
    out = {
        "f": s.format_poly(f),
        "sigma": sigma,
        "oracle": oracle.describe(),
        "bounds": {
            "N": mb.N,
            "N_syntactic": mb.N_syntactic,
            "D": mb.D,
            "degree_bound": mb.degree_bound,
        },
    }
    if args.find:
        N = mb.N if args.N is None else args.N
        rep = find_representation(s, f, N, args.deg_cap)
        if rep is None:
            cap = args.deg_cap if args.deg_cap is not None else int(f.degree()) + 4
            out["representation"] = {
                "found": False,
                "N": N,
                "degree_cap": cap,
                "note": "no representation below the degree cap; this is not a proof of non-membership",
            }
        else:
            out["representation"] = {
                "found": True,
                "N": N,
                "degree": rep.degree,
                "verified": True,
                "cofactors": [
                    {"equation": i, "derivative": j, "cofactor": s.format_poly(g)}
                    for (i, j), g in rep.cofactors.items()
                ],
            }
    return out


def cmd_simulate(args) -> str:
    s, w = _load(args)
    if w is None:
        raise ParseError("simulate needs --witness FILE")
    sigma = analyze(s, RankOracle.at(s, w, seed=args.seed), args.max_k).sigma
    traj = simulate(s, w, args.h, args.steps, args.q, args.tol, sigma=sigma, seed=args.seed)
    buf = io.StringIO()
    traj.to_csv(buf)
    return buf.getvalue()


def _random_ext(rng: random.Random, rows: int, cols: int, p_inf: float = 0.25):
    return [
        [NEG_INF if rng.random() < p_inf else rng.randint(0, 4) for _ in range(cols)]
        for _ in range(rows)
    ]


def cmd_selftest(args) -> dict:
    rng = random.Random(args.seed)
    count = args.count
    failures: dict[str, int] = {"jacobi_vs_bruteforce": 0, "koenig_dual": 0, "triangular": 0, "rank_bound": 0}
    for _ in range(count):
        A = _random_ext(rng, rng.randint(1, 4), rng.randint(1, 5))
        if jacobi_number(A) != jacobi_bruteforce(A):
            failures["jacobi_vs_bruteforce"] += 1
        F = [[0 if a == NEG_INF else a for a in row] for row in A]
        d = koenig_dual(F)
        if not (d.covers(F) and d.total == jacobi_number(F)):
            failures["koenig_dual"] += 1
        cols = rng.randint(1, 4)
        B = [[rng.randint(0, 3) for _ in range(cols)] for _ in range(rng.randint(1, 3))]
        k = max(max(r) for r in B) + rng.randint(0, 2)
        if k >= 1 and jacobi_number(B) != jacobi_number(triangular_expand(B, k)):
            failures["triangular"] += 1
        cols = rng.randint(1, 7)
        M = [[rng.choice((0, rng.randint(-5, 5))) for _ in range(cols)] for _ in range(rng.randint(1, 5))]
        if rank_exact(M) > rational_rank_bound(M):
            failures["rank_bound"] += 1
    corpus_results = {}
    for name in corpus.NAMES:
        s = parse_system(corpus.read(name))
        rep = analyze(s, RankOracle.generic(s, seed=args.seed))
        corpus_results[name] = {
            "sigma": rep.sigma,
            "order": rep.order,
            "bounds_ok": rep.checks.index_ok and rep.checks.order_ok,
        }
    ok = not any(failures.values()) and all(r["bounds_ok"] for r in corpus_results.values())
    return {"cases": count, "failures": failures, "corpus": corpus_results, "ok": ok}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="daeindex", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, system=True):
        if system:
            p.add_argument("system", help="system file, or the name of a bundled example")
        p.add_argument("--oracle", choices=("witness", "generic"))
        p.add_argument("--witness", metavar="FILE")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--max-k", type=int, dest="max_k")
        p.add_argument("--format", choices=("json", "text"), default="json")
        p.add_argument("--out", metavar="PATH")

    common(sub.add_parser("analyze", help="index, order and Hilbert-Kolchin data"))
    common(sub.add_parser("jacobi", help="Jacobi bounds and a dual cover"))
    p = sub.add_parser("member", help="membership bounds and certificates")
    common(p)
    p.add_argument("--f", required=True, help="polynomial to test, in the system syntax")
    p.add_argument("--find", action="store_true")
    p.add_argument("--deg-cap", type=int, dest="deg_cap")
    p.add_argument("--N", type=int)
    p = sub.add_parser("simulate", help="Taylor-jet integration, CSV output")
    common(p)
    p.add_argument("--h", default="1e-3")
    p.add_argument("--steps", type=int, default=1000)
    p.add_argument("--q", type=int, default=4)
    p.add_argument("--tol", type=float, default=1e-10)
    p = sub.add_parser("selftest", help="randomized oracle cross-checks")
    common(p, system=False)
    p.add_argument("--count", type=int, default=200)
    return parser


COMMANDS = {
    "analyze": cmd_analyze,
    "jacobi": cmd_jacobi,
    "member": cmd_member,
    "simulate": cmd_simulate,
    "selftest": cmd_selftest,
}


def run(argv: list[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    args = build_parser().parse_args(argv)
    try:
        result = COMMANDS[args.command](args)
    except (ParseError, ValueError) as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_PARSE
    except (AnalysisError, DAEError) as exc:
        print(f"analysis error: {type(exc).__name__}: {exc}", file=stderr)
        return EXIT_ANALYSIS
    text = result if isinstance(result, str) else (
        to_json(result) if args.format == "json" else to_text(result)
    )
    if args.out:
        Path(args.out).write_text(text)
    else:
        stdout.write(text)
    if args.command == "selftest" and not result["ok"]:
        return EXIT_FAIL
    return EXIT_OK


def main() -> None:
    sys.exit(run())
