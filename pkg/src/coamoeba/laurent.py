"""Laurent polynomials with complex coefficients and integer exponents.

A polynomial lives in the group ring of M = Z^n.  Exponents and weights are
exact Python integers; coefficients are double precision complex numbers.
Terms are kept sorted lexicographically by exponent, so two polynomials are
equal exactly when their term tuples are.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import ParseError, UnknownVariableError

__all__ = [
    "LaurentTerm",
    "LaurentPolynomial",
    "parse",
    "evaluate",
    "weight_value",
    "initial_form",
    "deform",
    "format_complex",
]


@dataclass(frozen=True)
class LaurentTerm:
    coefficient: complex
    exponent: tuple[int, ...]

    def __post_init__(self):
        if self.coefficient == 0:
            raise ValueError("a Laurent term needs a nonzero coefficient")
        object.__setattr__(self, "coefficient", complex(self.coefficient))
        object.__setattr__(self, "exponent", tuple(int(e) for e in self.exponent))


@dataclass(frozen=True)
class LaurentPolynomial:
    """Finite sum of terms ``c_m * xi^m`` in canonical (lexicographic) order.

    Use :meth:`from_dict` to build one; the constructor assumes its input is
    already canonical and only validates it.
    """

    rank: int
    terms: tuple[LaurentTerm, ...] = ()

    def __post_init__(self):
        if self.rank < 1:
            raise ValueError("rank must be positive")
        exps = [t.exponent for t in self.terms]
        if any(len(e) != self.rank for e in exps):
            raise ValueError(f"every exponent must have length {self.rank}")
        if any(a >= b for a, b in zip(exps, exps[1:])):
            raise ValueError("terms must be distinct and sorted by exponent")

    @classmethod
    def from_dict(cls, rank: int, coefficients: Mapping[Sequence[int], complex]) -> LaurentPolynomial:
        """Build a canonical polynomial from ``{exponent: coefficient}``, dropping zeros."""
        merged: dict[tuple[int, ...], complex] = {}
        for exp, c in coefficients.items():
            key = tuple(int(e) for e in exp)
            merged[key] = merged.get(key, 0j) + complex(c)
        terms = tuple(LaurentTerm(c, e) for e, c in sorted(merged.items()) if c != 0)
        return cls(rank, terms)

    @classmethod
    def from_terms(cls, rank: int, terms: Iterable[tuple[Sequence[int], complex]]) -> LaurentPolynomial:
        """Like :meth:`from_dict` but like terms given repeatedly are summed."""
        merged: dict[tuple[int, ...], complex] = {}
        for exp, c in terms:
            key = tuple(int(e) for e in exp)
            merged[key] = merged.get(key, 0j) + complex(c)
        return cls.from_dict(rank, merged)

    @property
    def support(self) -> tuple[tuple[int, ...], ...]:
        return tuple(t.exponent for t in self.terms)

    @property
    def coefficients(self) -> tuple[complex, ...]:
        return tuple(t.coefficient for t in self.terms)

    def as_dict(self) -> dict[tuple[int, ...], complex]:
        return {t.exponent: t.coefficient for t in self.terms}

    def is_zero(self) -> bool:
        return not self.terms

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def exponent_matrix(self) -> np.ndarray:
        return np.array(self.support, dtype=np.int64).reshape(len(self.terms), self.rank)

    def coefficient_array(self) -> np.ndarray:
        return np.array(self.coefficients, dtype=complex)

    def __len__(self):
        return len(self.terms)

    def to_string(self, variables: Sequence[str] | None = None) -> str:
        return to_string(self, variables)

    def __str__(self):
        return to_string(self)


# --------------------------------------------------------------------------
# printing

def _default_variables(rank: int) -> list[str]:
    if rank <= 3:
        return ["x", "y", "z"][:rank]
    return [f"x{i + 1}" for i in range(rank)]


def _decimal(x: float) -> str:
    # shortest round-tripping positional form; the grammar has no exponent notation
    return np.format_float_positional(x, unique=True, trim="-")


def format_complex(c: complex) -> tuple[str, str]:
    """Split ``c`` into a sign and a grammar-conforming unsigned coefficient literal.

    >>> format_complex(-2 - 3j)
    ('-', '(2+3i)')
    >>> format_complex(0.5)
    ('+', '0.5')
    """
    re_, im = c.real, c.imag
    if im == 0:
        return ("-" if math.copysign(1.0, re_) < 0 else "+"), _decimal(abs(re_))
    if re_ == 0:
        sign = "-" if im < 0 else "+"
        mag = abs(im)
        return sign, "i" if mag == 1 else f"({_decimal(mag)}i)"
    sign = "-" if re_ < 0 else "+"
    if sign == "-":
        re_, im = -re_, -im
    op = "-" if im < 0 else "+"
    return sign, f"({_decimal(re_)}{op}{_decimal(abs(im))}i)"


def to_string(f: LaurentPolynomial, variables: Sequence[str] | None = None) -> str:
    """Render ``f`` in the polynomial grammar accepted by :func:`parse`.

    Terms are printed in decreasing lexicographic order of exponents, so
    x + y + 1 prints as ``x+y+1``.
    """
    names = list(variables) if variables is not None else _default_variables(f.rank)
    if len(names) != f.rank:
        raise ValueError(f"need {f.rank} variable names, got {len(names)}")
    if f.is_zero():
        return "0"
    pieces = []
    for k, term in enumerate(reversed(f.terms)):
        sign, coeff = format_complex(term.coefficient)
        factors = []
        for name, e in zip(names, term.exponent):
            if e == 1:
                factors.append(name)
            elif e != 0:
                factors.append(f"{name}^{e}")
        if coeff != "1" or not factors:
            factors.insert(0, coeff)
        body = "*".join(factors)
        if k == 0:
            pieces.append(("-" if sign == "-" else "") + body)
        else:
            pieces.append(f"{sign}{body}")
    return "".join(pieces)


# --------------------------------------------------------------------------
# parsing

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>[0-9]+(?:\.[0-9]+)?)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>[-+*^()])
    """,
    re.VERBOSE,
)


class _Parser:
    def __init__(self, text: str, variables: Sequence[str]):
        self.text = text
        self.variables = {v: k for k, v in enumerate(variables)}
        self.rank = len(variables)
        self.tokens = self._lex()
        self.pos = 0

    def _offset(self, char_index: int) -> int:
        return len(self.text[:char_index].encode("utf-8"))

    def error(self, message: str, char_index: int | None = None, cls=ParseError):
        if char_index is None:
            char_index = self.tokens[self.pos][2] if self.pos < len(self.tokens) else len(self.text)
        offset = self._offset(char_index)
        return cls(f"{message} at byte {offset}", offset)

    def _lex(self):
        tokens = []
        i = 0
        while i < len(self.text):
            m = _TOKEN.match(self.text, i)
            if m is None:
                raise ParseError(f"unexpected character {self.text[i]!r} at byte {self._offset(i)}",
                                 self._offset(i))
            kind = m.lastgroup
            if kind != "ws":
                tokens.append((kind, m.group(), i))
            i = m.end()
        return tokens

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else (None, None, len(self.text))

    def take(self, kind=None, value=None):
        tok = self.peek()
        if tok[0] is None or (kind and tok[0] != kind) or (value and tok[1] != value):
            want = value or kind or "token"
            got = "end of input" if tok[0] is None else repr(tok[1])
            raise self.error(f"expected {want}, found {got}")
        self.pos += 1
        return tok

    def parse(self) -> LaurentPolynomial:
        acc: dict[tuple[int, ...], complex] = {}
        sign = 1.0
        if self.peek()[1] in ("+", "-"):
            sign = -1.0 if self.take()[1] == "-" else 1.0
        while True:
            coeff, exp = self.term()
            acc[exp] = acc.get(exp, 0j) + sign * coeff
            tok = self.peek()
            if tok[0] is None:
                break
            if tok[1] not in ("+", "-"):
                raise self.error(f"expected '+', '-' or '*', found {tok[1]!r}")
            sign = -1.0 if self.take()[1] == "-" else 1.0
        return LaurentPolynomial.from_dict(self.rank, acc)

    def term(self):
        coeff = 1 + 0j
        exp = [0] * self.rank
        while True:
            c, e = self.factor()
            coeff *= c
            for k, v in e.items():
                exp[k] += v
            if self.peek()[1] == "*":
                self.take()
                continue
            tok = self.peek()
            if tok[0] in ("num", "name") or tok[1] == "(":
                raise self.error("juxtaposition without '*'")
            return coeff, tuple(exp)

    def factor(self):
        kind, value, where = self.peek()
        if kind == "num":
            self.take()
            return complex(float(value)), {}
        if kind == "name":
            self.take()
            if value == "i":
                return 1j, {}
            if value not in self.variables:
                raise self.error(f"unknown variable {value!r}", where, cls=UnknownVariableError)
            power = 1
            if self.peek()[1] == "^":
                self.take()
                power = self.integer()
            return 1 + 0j, {self.variables[value]: power}
        if value == "(":
            return self.paren_coefficient(), {}
        raise self.error("expected a coefficient or variable")

    def integer(self) -> int:
        negative = False
        if self.peek()[1] == "-":
            self.take()
            negative = True
        _, digits, where = self.take("num")
        if "." in digits:
            raise self.error("exponent must be an integer", where)
        return -int(digits) if negative else int(digits)

    def paren_coefficient(self) -> complex:
        self.take(value="(")
        first = float(self.take("num")[1])
        if self.peek()[1] == "i":
            self.take()
            self.take(value=")")
            return complex(0.0, first)
        value = complex(first)
        if self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            second = float(self.take("num")[1])
            if op == "-":
                second = -second
            if self.peek()[1] == "i":
                self.take()
                value += complex(0.0, second)
            else:
                value += second
        self.take(value=")")
        return value


def parse(text: str, variables: Sequence[str]) -> LaurentPolynomial:
    """Parse ``text`` into a canonical polynomial over the given variables.

    Grammar (whitespace is ignored)::

        expr   := term (('+'|'-') term)*
        term   := factor ('*' factor)*
        factor := coeff | var ('^' int)?
        coeff  := decimal | 'i' | '(' decimal (('+'|'-') decimal)? 'i'? ')'

    A single leading sign is also accepted.  Like terms are combined and
    vanishing ones dropped, so ``parse("x - x", ["x"])`` is the zero polynomial.

    Raises
    ------
    ParseError
        On malformed input; ``.offset`` is the UTF-8 byte offset of the problem.
    """
    variables = list(variables)
    if not variables:
        raise ValueError("at least one variable is required")
    if len(set(variables)) != len(variables):
        raise ValueError("variable names must be distinct")
    for v in variables:
        if v == "i" or not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", v):
            raise ValueError(f"invalid variable name {v!r}")
    parser = _Parser(text, variables)
    if not parser.tokens:
        raise ParseError("empty expression at byte 0", 0)
    return parser.parse()


# --------------------------------------------------------------------------
# evaluation, weights, initial forms

def evaluate(f: LaurentPolynomial, x) -> complex | np.ndarray:
    """Value of ``f`` at a torus point, or at each row of an ``(k, n)`` array."""
    x = np.asarray(x, dtype=complex)
    if x.shape[-1:] != (f.rank,):
        raise ValueError(f"point has rank {x.shape[-1] if x.ndim else 0}, polynomial has rank {f.rank}")
    if np.any(x == 0):
        raise ValueError("torus points must have nonzero coordinates")
    if f.is_zero():
        out = np.zeros(x.shape[:-1], dtype=complex)
    else:
        monomials = np.prod(x[..., None, :] ** f.exponent_matrix(), axis=-1)
        out = monomials @ f.coefficient_array()
    return complex(out) if out.ndim == 0 else out


def _pairings(f: LaurentPolynomial, w: Sequence[int]) -> list[int]:
    w = [int(v) for v in w]
    if len(w) != f.rank:
        raise ValueError(f"weight has length {len(w)}, polynomial has rank {f.rank}")
    return [sum(a * b for a, b in zip(m, w)) for m in f.support]


def weight_value(f: LaurentPolynomial, w: Sequence[int]) -> int:
    """w(f): the minimum of <m, w> over the support of ``f``."""
    if f.is_zero():
        raise ValueError("w(f) is undefined for the zero polynomial")
    return min(_pairings(f, w))


def initial_form(f: LaurentPolynomial, w: Sequence[int]) -> LaurentPolynomial:
    """Sub-sum of the terms of ``f`` on which <m, w> attains w(f)."""
    if f.is_zero():
        raise ValueError("initial form of the zero polynomial is undefined")
    pair = _pairings(f, w)
    low = min(pair)
    return LaurentPolynomial(f.rank, tuple(t for t, p in zip(f.terms, pair) if p == low))


def deform(f: LaurentPolynomial, w: Sequence[int], t: float) -> LaurentPolynomial:
    """The polynomial f(t) = sum c_m t^<m,w> xi^m, so that f(t)(x) = f(t^w x)."""
    if not t > 0:
        raise ValueError("deformation parameter t must be positive")
    pair = _pairings(f, w)
    terms = []
    for term, p in zip(f.terms, pair):
        c = term.coefficient * float(t) ** p
        if c != 0:
            terms.append(LaurentTerm(c, term.exponent))
    return LaurentPolynomial(f.rank, tuple(terms))


def scale_torus(x, w: Sequence[int], t: float) -> np.ndarray:
    """The torus action t^w . x, multiplying coordinate i by t**w_i."""
    x = np.asarray(x, dtype=complex)
    return x * float(t) ** np.asarray(w, dtype=float)
