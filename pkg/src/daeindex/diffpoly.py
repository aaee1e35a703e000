"""Sparse differential polynomials over the rationals.

A differential polynomial lives in Q[params][X_j^(l)]: the unknowns X_1..X_n and
all their derivatives are independent indeterminates, and parameters are
indeterminates whose total derivative is zero.  Coefficients are always
:class:`fractions.Fraction`, so every operation is exact.

>>> x1, x2 = DiffPoly.var(X(1)), DiffPoly.var(X(2))
>>> ((x1 + x2) * (x1 - x2)).format()
'x1^2 - x2^2'
>>> (x1**2 + x2**2).total_derivative().format()
"2*x1*x1' + 2*x2*x2'"
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational
from typing import Callable, Iterable, Iterator, Mapping, NamedTuple, Union

from .errors import MissingAssignment

NEG_INF = float("-inf")
"""Order of a variable that does not occur (the ``-inf`` of the order matrices)."""

ExtInt = Union[int, float]
Number = Union[int, Fraction]


class DerivVar(NamedTuple):
    """The indeterminate X_var^(order), or a parameter when ``var == 0``."""

    var: int
    order: int = 0
    param: str = ""

    @property
    def is_param(self) -> bool:
        return self.var == 0

    def shifted(self, k: int = 1) -> "DerivVar":
        if self.is_param:
            raise ValueError("parameters have no derivatives")
        return DerivVar(self.var, self.order + k)

    def default_name(self) -> str:
        if self.is_param:
            return self.param
        return f"x{self.var}" + "'" * self.order


def X(var: int, order: int = 0) -> DerivVar:
    if var < 1 or order < 0:
        raise ValueError(f"bad derivative variable X{var}^({order})")
    return DerivVar(var, order)


def P(name: str) -> DerivVar:
    return DerivVar(0, 0, name)


class Monomial:
    """A power product; ``powers`` is sorted by variable with positive exponents."""

    __slots__ = ("powers", "degree", "_hash")

    def __init__(self, powers: tuple = ()):
        self.powers = powers
        self.degree = sum(e for _, e in powers)
        self._hash = hash(powers)

    @classmethod
    def from_dict(cls, exps: Mapping[DerivVar, int]) -> "Monomial":
        return cls(tuple(sorted((v, e) for v, e in exps.items() if e)))

    def as_dict(self) -> dict[DerivVar, int]:
        return dict(self.powers)

    def __mul__(self, other: "Monomial") -> "Monomial":
        if not other.powers:
            return self
        if not self.powers:
            return other
        d = dict(self.powers)
        for v, e in other.powers:
            d[v] = d.get(v, 0) + e
        return Monomial(tuple(sorted(d.items())))

    def divide(self, other: "Monomial") -> "Monomial | None":
        """Return ``self / other`` when ``other`` divides ``self``, else None."""
        d = dict(self.powers)
        for v, e in other.powers:
            left = d.get(v, 0) - e
            if left < 0:
                return None
            if left:
                d[v] = left
            else:
                del d[v]
        return Monomial(tuple(sorted(d.items())))

    def variables(self) -> Iterator[DerivVar]:
        return (v for v, _ in self.powers)

    def __eq__(self, other) -> bool:
        return isinstance(other, Monomial) and self.powers == other.powers

    def __hash__(self) -> int:
        return self._hash

    def __lt__(self, other: "Monomial") -> bool:
        return (self.powers, self.degree) < (other.powers, other.degree)

    def __repr__(self) -> str:
        return f"Monomial({self.powers!r})"


ONE = Monomial()

Namer = Callable[[DerivVar], str]


class DiffPoly:
    """Immutable sparse polynomial ``{Monomial: Fraction}`` with no zero terms."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[Monomial, Number] | None = None):
        clean: dict[Monomial, Fraction] = {}
        if terms:
            for m, c in terms.items():
                if c:
                    clean[m] = c if isinstance(c, Fraction) else Fraction(c)
        self._terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, terms: dict[Monomial, Fraction]) -> "DiffPoly":
        # caller guarantees Fraction coefficients and no zeros
        p = cls.__new__(cls)
        p._terms = terms
        p._hash = None
        return p

    @classmethod
    def const(cls, c: Number) -> "DiffPoly":
        return cls({ONE: c})

    @classmethod
    def var(cls, v: DerivVar) -> "DiffPoly":
        return cls._raw({Monomial(((v, 1),)): Fraction(1)})

    # ------------------------------------------------------------------ access
    @property
    def terms(self) -> Mapping[Monomial, Fraction]:
        return self._terms

    def items(self):
        return self._terms.items()

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return not self._terms or (len(self._terms) == 1 and ONE in self._terms)

    def constant_term(self) -> Fraction:
        return self._terms.get(ONE, Fraction(0))

    def variables(self) -> set[DerivVar]:
        out: set[DerivVar] = set()
        for m in self._terms:
            out.update(m.variables())
        return out

    def degree(self) -> ExtInt:
        """Total degree; ``NEG_INF`` for the zero polynomial."""
        if not self._terms:
            return NEG_INF
        return max(m.degree for m in self._terms)

    def degree_in(self, vs: set[DerivVar]) -> int:
        best = 0
        for m in self._terms:
            best = max(best, sum(e for v, e in m.powers if v in vs))
        return best

    def order_in_var(self, j: int) -> ExtInt:
        best: ExtInt = NEG_INF
        for m in self._terms:
            for v, _ in m.powers:
                if v.var == j and v.order > best:
                    best = v.order
        return best

    def order(self) -> ExtInt:
        """Highest derivation order of any unknown (``NEG_INF`` if none occurs)."""
        best: ExtInt = NEG_INF
        for m in self._terms:
            for v, _ in m.powers:
                if not v.is_param and v.order > best:
                    best = v.order
        return best

    # -------------------------------------------------------------- arithmetic
    @staticmethod
    def _coerce(other) -> "DiffPoly | None":
        if isinstance(other, DiffPoly):
            return other
        if isinstance(other, (int, Rational)):
            return DiffPoly.const(Fraction(other))
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        out = dict(self._terms)
        for m, c in other._terms.items():
            s = out.get(m, 0) + c
            if s:
                out[m] = s
            else:
                out.pop(m, None)
        return DiffPoly._raw(out)

    __radd__ = __add__

    def __neg__(self):
        return DiffPoly._raw({m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Rational)) and not isinstance(other, DiffPoly):
            c = Fraction(other)
            if not c:
                return DiffPoly()
            return DiffPoly._raw({m: a * c for m, a in self._terms.items()})
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        out: dict[Monomial, Fraction] = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                m = m1 * m2
                s = out.get(m, 0) + c1 * c2
                if s:
                    out[m] = s
                else:
                    out.pop(m, None)
        return DiffPoly._raw(out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponent must be a non-negative integer")
        result = DiffPoly.const(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __eq__(self, other) -> bool:
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    # ----------------------------------------------------------- differential
    def partial(self, v: DerivVar) -> "DiffPoly":
        out: dict[Monomial, Fraction] = {}
        for m, c in self._terms.items():
            d = dict(m.powers)
            e = d.get(v)
            if not e:
                continue
            if e == 1:
                del d[v]
            else:
                d[v] = e - 1
            nm = Monomial(tuple(sorted(d.items())))
            s = out.get(nm, 0) + c * e
            if s:
                out[nm] = s
            else:
                out.pop(nm, None)
        return DiffPoly._raw(out)

    def total_derivative(self, times: int = 1) -> "DiffPoly":
        """Apply d/dt ``times`` times; coefficients and parameters are constants."""
        p = self
        for _ in range(times):
            p = p._derive_once()
        return p

    def _derive_once(self) -> "DiffPoly":
        out: dict[Monomial, Fraction] = {}
        for m, c in self._terms.items():
            for v, e in m.powers:
                if v.is_param:
                    continue
                d = dict(m.powers)
                if e == 1:
                    del d[v]
                else:
                    d[v] = e - 1
                w = DerivVar(v.var, v.order + 1)
                d[w] = d.get(w, 0) + 1
                nm = Monomial(tuple(sorted(d.items())))
                s = out.get(nm, 0) + c * e
                if s:
                    out[nm] = s
                else:
                    out.pop(nm, None)
        return DiffPoly._raw(out)

    # ------------------------------------------------------------- evaluation
    def evaluate(self, assignment: Mapping[DerivVar, Number]) -> Fraction:
        total = Fraction(0)
        for m, c in self._terms.items():
            t = c
            for v, e in m.powers:
                try:
                    x = assignment[v]
                except KeyError:
                    raise MissingAssignment(v) from None
                t = t * (x if e == 1 else x**e)
            total += t
        return total

    def substitute(self, assignment: Mapping[DerivVar, Number]) -> "DiffPoly":
        """Partially evaluate: variables found in ``assignment`` are replaced."""
        out: dict[Monomial, Fraction] = {}
        for m, c in self._terms.items():
            t = c
            keep = []
            for v, e in m.powers:
                x = assignment.get(v)
                if x is None:
                    keep.append((v, e))
                else:
                    t = t * (x if e == 1 else x**e)
                    if not t:
                        break
            if not t:
                continue
            nm = Monomial(tuple(keep)) if len(keep) != len(m.powers) else m
            s = out.get(nm, 0) + t
            if s:
                out[nm] = s
            else:
                out.pop(nm, None)
        return DiffPoly._raw(out)

    # ----------------------------------------------------------------- output
    def sorted_terms(self) -> list[tuple[Monomial, Fraction]]:
        """Terms in display order: highest derivative first, then degree."""
        return sorted(self._terms.items(), key=lambda mc: _display_key(mc[0]))

    def format(self, namer: Namer | None = None) -> str:
        """Render in the system DSL (``x1'' - lam*x1``)."""
        namer = namer or DerivVar.default_name
        if not self._terms:
            return "0"
        parts: list[str] = []
        for m, c in self.sorted_terms():
            sign = "-" if c < 0 else "+"
            a = abs(c)
            factors = [
                namer(v) if e == 1 else f"{namer(v)}^{e}" for v, e in m.powers
            ]
            if not factors:
                body = _fmt_rational(a)
            elif a == 1:
                body = "*".join(factors)
            else:
                body = "*".join([_fmt_rational(a)] + factors)
            parts.append((sign, body))
        first_sign, first = parts[0]
        text = ("-" if first_sign == "-" else "") + first
        for sign, body in parts[1:]:
            text += f" {sign} {body}"
        return text

    def __repr__(self) -> str:
        return f"DiffPoly({self.format()!r})"

    __str__ = format


def _display_key(m: Monomial):
    top = max((v.order for v in m.variables() if not v.is_param), default=-1)
    factors = tuple((v.is_param, v.var, v.param, -v.order, -e) for v, e in m.powers)
    factors = tuple(sorted(factors))
    return (-top, -m.degree, factors)


def _fmt_rational(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def as_poly(p) -> DiffPoly:
    if isinstance(p, DiffPoly):
        return p
    return DiffPoly.const(Fraction(p))


def linear_combination(pairs: Iterable[tuple[DiffPoly, DiffPoly]]) -> DiffPoly:
    """Sum of ``a * b`` over ``pairs``."""
    out: dict[Monomial, Fraction] = {}
    for a, b in pairs:
        for m1, c1 in a._terms.items():
            for m2, c2 in b._terms.items():
                m = m1 * m2
                s = out.get(m, 0) + c1 * c2
                if s:
                    out[m] = s
                else:
                    out.pop(m, None)
    return DiffPoly._raw(out)
