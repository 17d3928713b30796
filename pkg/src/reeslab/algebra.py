"""Coefficient fields, monomial orders and sparse polynomials.

The working ring is B = k[x1..xn, T1..Tn], optionally extended by tag
variables u1, u2, ... that are used internally for elimination.  A monomial
is a dense exponent tuple laid out as (x-block, T-block, tag-block).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Callable, Iterable, Mapping, Union

Monomial = tuple  # tuple[int, ...], length ring.nvars
Scalar = Union[int, Fraction]


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    i = 3
    while i * i <= p:
        if p % i == 0:
            return False
        i += 2
    return True


@dataclass(frozen=True)
class PrimeField:
    """The field F_p for an odd prime p; elements are ints in [0, p)."""

    p: int = 32003

    def __post_init__(self):
        if self.p == 2 or not _is_prime(self.p):
            raise ValueError(f"field characteristic must be an odd prime, got {self.p}")

    zero = 0
    one = 1

    def norm(self, c: int) -> int:
        return c % self.p

    def inv(self, c: int) -> int:
        if c % self.p == 0:
            raise ZeroDivisionError("zero has no inverse")
        return pow(c, -1, self.p)

    def from_ratio(self, num: int, den: int = 1) -> int:
        if den % self.p == 0:
            raise ValueError(f"denominator {den} is not invertible modulo {self.p}")
        return num * pow(den, -1, self.p) % self.p

    def element(self, c: Scalar) -> int:
        if isinstance(c, Fraction):
            return self.from_ratio(c.numerator, c.denominator)
        return c % self.p

    def symmetric(self, c: int) -> int:
        """Representative in (-p/2, p/2], used for printing."""
        return c - self.p if c > self.p // 2 else c

    def __str__(self):
        return f"GF({self.p})"


@dataclass(frozen=True)
class RationalField:
    """The field Q with exact Fraction coefficients."""

    zero = Fraction(0)
    one = Fraction(1)

    def norm(self, c: Fraction) -> Fraction:
        return c

    def inv(self, c: Fraction) -> Fraction:
        return 1 / Fraction(c)

    def from_ratio(self, num: int, den: int = 1) -> Fraction:
        if den == 0:
            raise ValueError("zero denominator")
        return Fraction(num, den)

    def element(self, c: Scalar) -> Fraction:
        return Fraction(c)

    def symmetric(self, c: Fraction) -> Fraction:
        return c

    def __str__(self):
        return "QQ"


Field = Union[PrimeField, RationalField]
QQ = RationalField()
DEFAULT_FIELD = PrimeField(32003)


def field_from_spec(spec: Union[int, str]) -> Field:
    """Build a field from a prime (``32003``) or ``"QQ"``/``0`` for the rationals."""
    if isinstance(spec, str):
        if spec.strip().upper() in ("QQ", "Q", "0"):
            return QQ
        spec = int(spec)
    if spec == 0:
        return QQ
    return PrimeField(spec)


# ---------------------------------------------------------------------------
# term orders
# ---------------------------------------------------------------------------


def _grevlex_key(m):
    return (sum(m),) + tuple(-e for e in reversed(m))


@dataclass(frozen=True)
class TermOrder:
    """A monomial order on exponent tuples.

    kind is ``"grevlex"``, ``"lex"`` or ``"elim"``.  For ``"elim"`` the
    variables listed in ``eliminate`` form a block that dominates the rest;
    both blocks are ordered by grevlex internally.
    """

    kind: str = "grevlex"
    eliminate: frozenset = frozenset()

    def __post_init__(self):
        if self.kind not in ("grevlex", "lex", "elim"):
            raise ValueError(f"unknown term order {self.kind!r}")
        if self.kind == "elim" and not self.eliminate:
            raise ValueError("elimination order needs at least one eliminated variable")

    @classmethod
    def elimination(cls, variables: Iterable[int]) -> "TermOrder":
        return cls("elim", frozenset(variables))

    def key(self, m: Monomial) -> tuple:
        """Flat integer tuple whose lexicographic order is this term order."""
        return self.key_function(len(m))(m)

    def key_function(self, nvars: int) -> Callable[[Monomial], tuple]:
        return _key_function(self, nvars)

    def compare(self, m1: Monomial, m2: Monomial) -> int:
        """Return -1, 0 or 1 as m1 is less than, equal to or greater than m2."""
        k1, k2 = self.key(m1), self.key(m2)
        return (k1 > k2) - (k1 < k2)

    def __str__(self):
        if self.kind == "elim":
            return f"elim{sorted(self.eliminate)}"
        return self.kind


_KEY_CACHE: dict = {}


def _key_function(order: TermOrder, nvars: int):
    fn = _KEY_CACHE.get((order, nvars))
    if fn is not None:
        return fn
    if order.kind == "grevlex":
        fn = _grevlex_key
    elif order.kind == "lex":
        fn = tuple
    else:
        big = [i for i in range(nvars) if i in order.eliminate]
        rest = [i for i in range(nvars) if i not in order.eliminate]

        def fn(m, big=big, rest=rest):
            a = [m[i] for i in big]
            b = [m[i] for i in rest]
            return _grevlex_key(a) + _grevlex_key(b)

    _KEY_CACHE[(order, nvars)] = fn
    return fn


GREVLEX = TermOrder("grevlex")
LEX = TermOrder("lex")


# ---------------------------------------------------------------------------
# rings and polynomials
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Ring:
    """k[x1..xn, T1..Tn] plus ``tags`` auxiliary variables u1, u2, ..."""

    n: int
    field: Field = DEFAULT_FIELD
    tags: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("ring needs n >= 1")

    @property
    def nvars(self) -> int:
        return 2 * self.n + self.tags

    @cached_property
    def names(self) -> tuple:
        n = self.n
        return (
            tuple(f"x{i}" for i in range(1, n + 1))
            + tuple(f"T{i}" for i in range(1, n + 1))
            + tuple(f"u{i}" for i in range(1, self.tags + 1))
        )

    def with_tags(self, tags: int) -> "Ring":
        return Ring(self.n, self.field, tags)

    def zero(self) -> "Polynomial":
        return Polynomial(self, {})

    def one(self) -> "Polynomial":
        return self.const(1)

    def const(self, c: Scalar) -> "Polynomial":
        return self.term(c, (0,) * self.nvars)

    def term(self, c: Scalar, m: Monomial) -> "Polynomial":
        c = self.field.element(c)
        return Polynomial(self, {tuple(m): c} if c else {})

    def gen(self, index: int) -> "Polynomial":
        m = [0] * self.nvars
        m[index] = 1
        return Polynomial(self, {tuple(m): self.field.one})

    def x(self, i: int) -> "Polynomial":
        """x_i, 1-based."""
        if not 1 <= i <= self.n:
            raise IndexError(f"x{i} out of range 1..{self.n}")
        return self.gen(i - 1)

    def T(self, i: int) -> "Polynomial":
        """T_i, 1-based."""
        if not 1 <= i <= self.n:
            raise IndexError(f"T{i} out of range 1..{self.n}")
        return self.gen(self.n + i - 1)

    def tag(self, i: int) -> "Polynomial":
        return self.gen(2 * self.n + i - 1)

    def parse(self, text: str) -> "Polynomial":
        return parse_polynomial(text, self.n, self.field, ring=self)

    def __str__(self):
        return f"{self.field}[{','.join(self.names)}]"


class Polynomial:
    """Immutable sparse polynomial: a mapping monomial -> nonzero coefficient."""

    __slots__ = ("ring", "terms", "_hash")

    def __init__(self, ring: Ring, terms: Mapping[Monomial, Scalar], normalized: bool = True):
        self.ring = ring
        if not normalized:
            norm = ring.field.element
            clean = {}
            for m, c in terms.items():
                c = norm(c)
                if c:
                    clean[tuple(m)] = c
            terms = clean
        self.terms = terms
        self._hash = None

    # -- basic queries ------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.ring == other.ring and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self == self.ring.const(other)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ring, frozenset(self.terms.items())))
        return self._hash

    def is_constant(self) -> bool:
        return all(not any(m) for m in self.terms)

    def total_degree(self) -> int:
        return max((sum(m) for m in self.terms), default=-1)

    def is_homogeneous(self) -> bool:
        return len({sum(m) for m in self.terms}) <= 1

    def bidegree(self):
        """(x-degree, T-degree) if bihomogeneous, None if not, and "zero" for 0."""
        if not self.terms:
            return "zero"
        n = self.ring.n
        degs = {(sum(m[:n]), sum(m[n:2 * n])) for m in self.terms}
        if len(degs) != 1 or any(any(m[2 * n:]) for m in self.terms):
            return None
        return degs.pop()

    def is_bihomogeneous(self) -> bool:
        return isinstance(self.bidegree(), tuple)

    def lead(self, order: TermOrder = GREVLEX) -> Monomial:
        if not self.terms:
            raise ValueError("zero polynomial has no leading monomial")
        return max(self.terms, key=order.key_function(self.ring.nvars))

    def lead_coefficient(self, order: TermOrder = GREVLEX) -> Scalar:
        return self.terms[self.lead(order)]

    def monic(self, order: TermOrder = GREVLEX) -> "Polynomial":
        if not self.terms:
            return self
        return self.scale(self.ring.field.inv(self.lead_coefficient(order)))

    def sorted_terms(self, order: TermOrder = GREVLEX) -> list:
        key = order.key_function(self.ring.nvars)
        return sorted(self.terms.items(), key=lambda t: key(t[0]), reverse=True)

    # -- arithmetic ---------------------------------------------------------

    def _check(self, other: "Polynomial"):
        if self.ring != other.ring:
            raise ValueError(f"ring mismatch: {self.ring} vs {other.ring}")

    def _coerce(self, other):
        if isinstance(other, Polynomial):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction)):
            return self.ring.const(other)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        norm = self.ring.field.norm
        out = dict(self.terms)
        for m, c in other.terms.items():
            v = norm(out.get(m, 0) + c)
            if v:
                out[m] = v
            else:
                out.pop(m, None)
        return Polynomial(self.ring, out)

    __radd__ = __add__

    def __neg__(self):
        norm = self.ring.field.norm
        return Polynomial(self.ring, {m: norm(-c) for m, c in self.terms.items()})

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

    def scale(self, c: Scalar) -> "Polynomial":
        field = self.ring.field
        c = field.element(c)
        if not c:
            return self.ring.zero()
        norm = field.norm
        return Polynomial(self.ring, {m: norm(a * c) for m, a in self.terms.items()})

    def mul_term(self, c: Scalar, mono: Monomial) -> "Polynomial":
        """Multiply by the single term c * mono."""
        norm = self.ring.field.norm
        c = self.ring.field.element(c)
        if not c:
            return self.ring.zero()
        return Polynomial(
            self.ring,
            {tuple(a + b for a, b in zip(m, mono)): norm(v * c) for m, v in self.terms.items()},
        )

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        self._check(other)
        norm = self.ring.field.norm
        out: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                out[m] = out.get(m, 0) + c1 * c2
        return Polynomial(self.ring, {m: v for m, v in ((m, norm(v)) for m, v in out.items()) if v})

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative power")
        result = self.ring.one()
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    # -- substitutions and ring changes --------------------------------------

    def substitute_x_zero(self) -> "Polynomial":
        """Set every x-variable to 0: keep only the terms of x-degree 0."""
        n = self.ring.n
        return Polynomial(self.ring, {m: c for m, c in self.terms.items() if not any(m[:n])})

    def x_to_T(self) -> "Polynomial":
        """Replace each x_j by T_j."""
        n = self.ring.n
        out: dict = {}
        norm = self.ring.field.norm
        for m, c in self.terms.items():
            t = tuple(0 for _ in range(n)) + tuple(a + b for a, b in zip(m[:n], m[n:2 * n])) + m[2 * n:]
            out[t] = norm(out.get(t, 0) + c)
        return Polynomial(self.ring, {m: c for m, c in out.items() if c})

    def embed(self, ring: Ring) -> "Polynomial":
        """View this polynomial in a ring with more tag variables."""
        if ring.n != self.ring.n or ring.field != self.ring.field or ring.tags < self.ring.tags:
            raise ValueError(f"cannot embed {self.ring} into {ring}")
        pad = (0,) * (ring.tags - self.ring.tags)
        return Polynomial(ring, {m + pad: c for m, c in self.terms.items()})

    def project(self, ring: Ring) -> "Polynomial":
        """Drop trailing tag variables; they must not occur."""
        k = ring.nvars
        if any(any(m[k:]) for m in self.terms):
            raise ValueError("polynomial involves variables outside the target ring")
        return Polynomial(ring, {m[:k]: c for m, c in self.terms.items()})

    # -- printing -----------------------------------------------------------

    def __str__(self):
        return format_polynomial(self)

    def __repr__(self):
        return f"Polynomial({format_polynomial(self)!r})"


# ---------------------------------------------------------------------------
# parsing and printing
# ---------------------------------------------------------------------------


class PolynomialSyntaxError(ValueError):
    """Malformed polynomial text; ``position`` is the 0-based offset."""

    def __init__(self, message: str, position: int, text: str = ""):
        super().__init__(f"{message} at position {position}")
        self.position = position
        self.text = text


_TOKEN = re.compile(r"\s*(?:(?P<int>\d+)|(?P<var>[xT])(?P<idx>\d+)|(?P<op>[-+*/^]))")


def _tokenize(text: str):
    pos = 0
    tokens = []
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        mt = _TOKEN.match(text, pos)
        if mt is None:
            start = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise PolynomialSyntaxError(f"unexpected character {text[start]!r}", start, text)
        start = mt.end() - len(mt.group(0).lstrip())
        if mt.group("int") is not None:
            tokens.append(("int", int(mt.group("int")), start))
        elif mt.group("var") is not None:
            tokens.append(("var", (mt.group("var"), int(mt.group("idx"))), start))
        else:
            tokens.append((mt.group("op"), None, start))
        pos = mt.end()
    tokens.append(("end", None, len(text)))
    return tokens


def parse_polynomial(text: str, n: int, field: Field = DEFAULT_FIELD, ring: Ring = None) -> Polynomial:
    """Parse text such as ``"x1^2*x2 - 3/2*x1*T3"`` into a polynomial of ring(n, field).

    Multiplication must be written explicitly.  Raises PolynomialSyntaxError on
    malformed input and ValueError for out-of-range variables or coefficients
    that cannot be cast into the field.
    """
    if ring is None:
        ring = Ring(n, field)
    tokens = _tokenize(text)
    i = 0

    def peek():
        return tokens[i]

    def expect(kind):
        nonlocal i
        tok = tokens[i]
        if tok[0] != kind:
            what = "end of input" if tok[0] == "end" else repr(text[tok[2]:tok[2] + 1])
            raise PolynomialSyntaxError(f"expected {kind}, found {what}", tok[2], text)
        i += 1
        return tok

    def factor(exps):
        _, (name, idx), pos = expect("var")
        if not 1 <= idx <= ring.n:
            raise ValueError(f"variable {name}{idx} out of range 1..{ring.n} (position {pos})")
        e = 1
        if peek()[0] == "^":
            expect("^")
            e = expect("int")[1]
        slot = idx - 1 if name == "x" else ring.n + idx - 1
        exps[slot] += e

    def term(sign):
        nonlocal i
        if peek()[0] in ("+", "-"):
            if peek()[0] == "-":
                sign = -sign
            i += 1
        exps = [0] * ring.nvars
        if peek()[0] == "int":
            num = expect("int")[1]
            den = 1
            if peek()[0] == "/":
                _, _, pos = expect("/")
                den = expect("int")[1]
                if den == 0:
                    raise ValueError(f"zero denominator (position {pos})")
            while peek()[0] == "*":
                expect("*")
                factor(exps)
        else:
            num, den = 1, 1
            factor(exps)
            while peek()[0] == "*":
                expect("*")
                factor(exps)
        coeff = ring.field.from_ratio(sign * num, den)
        return tuple(exps), coeff

    norm = ring.field.norm
    acc: dict = {}
    m, c = term(1)
    acc[m] = c
    while peek()[0] in ("+", "-"):
        sign = 1 if expect(peek()[0])[0] == "+" else -1
        m, c = term(sign)
        acc[m] = norm(acc.get(m, 0) + c)
    if peek()[0] != "end":
        tok = peek()
        raise PolynomialSyntaxError(f"unexpected {text[tok[2]:tok[2] + 1]!r}", tok[2], text)
    return Polynomial(ring, {m: v for m, v in acc.items() if v})


def _format_coeff(c, field) -> str:
    c = field.symmetric(c)
    if isinstance(c, Fraction) and c.denominator != 1:
        return f"{abs(c.numerator)}/{c.denominator}"
    return str(abs(int(c)))


def format_polynomial(p: Polynomial, order: TermOrder = GREVLEX) -> str:
    """Render in the parser grammar, largest term first."""
    if not p.terms:
        return "0"
    names = p.ring.names
    field = p.ring.field
    parts = []
    for m, c in p.sorted_terms(order):
        sc = field.symmetric(c)
        negative = sc < 0
        factors = []
        for name, e in zip(names, m):
            if e == 1:
                factors.append(name)
            elif e > 1:
                factors.append(f"{name}^{e}")
        coeff = _format_coeff(c, field)
        if coeff != "1" or not factors:
            factors.insert(0, coeff)
        body = "*".join(factors)
        if not parts:
            parts.append(("-" if negative else "") + body)
        else:
            parts.append((" - " if negative else " + ") + body)
    return "".join(parts)
