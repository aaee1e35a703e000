"""Exact structural analysis of polynomial DAE systems."""

from .diffpoly import NEG_INF, DerivVar, DiffPoly, Monomial, P, X
from .errors import *  # noqa: F401,F403
from .index import IndexReport, MuSequence, analyze, differentiation_index, mu
from .jacobi import bounds, jacobi_bruteforce, jacobi_number, koenig_dual
from .prolong import PseudoJacobian, prolong, pseudo_jacobian
from .rank import RankOracle, Witness, extend_witness, rank_at, rank_exact, rank_generic
from .system import DAESystem, make_system, order_matrix

__version__ = "0.1.0"
