"""Normal forms, Buchberger's algorithm and ideals with cached Groebner bases."""

from __future__ import annotations

import heapq
import threading
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .algebra import GREVLEX, Polynomial, Ring, TermOrder

DEFAULT_BUDGET = 10_000_000


class GroebnerBudgetExceeded(RuntimeError):
    """Raised when a computation uses more reduction steps than allowed."""

    def __init__(self, steps: int, basis_size: int, pending_pairs: int):
        super().__init__(
            f"Groebner budget of {steps} reduction steps exceeded "
            f"(basis size {basis_size}, {pending_pairs} pairs pending)"
        )
        self.steps = steps
        self.basis_size = basis_size
        self.pending_pairs = pending_pairs


class Budget:
    """Mutable reduction-step counter shared by one or more computations."""

    def __init__(self, limit: int = DEFAULT_BUDGET):
        self.limit = limit
        self.used = 0
        self.basis_size = 0
        self.pending = 0

    def spend(self, k: int = 1):
        self.used += k
        if self.used > self.limit:
            raise GroebnerBudgetExceeded(self.limit, self.basis_size, self.pending)


_local = threading.local()


def current_budget() -> Budget:
    """The budget used when none is passed explicitly (per thread)."""
    b = getattr(_local, "budget", None)
    if b is None:
        b = _local.budget = Budget()
    return b


def set_budget(limit: int) -> Budget:
    _local.budget = Budget(limit)
    return _local.budget


# ---------------------------------------------------------------------------
# raw reduction on term dictionaries
# ---------------------------------------------------------------------------


def _divides(a, b):
    for x, y in zip(a, b):
        if x > y:
            return False
    return True


def _mask(m):
    bits = 0
    for i, e in enumerate(m):
        if e:
            bits |= 1 << i
    return bits


class _Reducer:
    """Monic reducers (lead, tail) with divisibility masks, for one order."""

    def __init__(self, nvars, order, field):
        self.key = order.key_function(nvars)
        self.norm = field.norm
        self.leads = []
        self.masks = []
        self.tails = []

    def add(self, lead, tail):
        self.leads.append(lead)
        self.masks.append(_mask(lead))
        self.tails.append(tail)

    def find(self, m, mmask):
        for i, lead in enumerate(self.leads):
            if self.masks[i] & ~mmask == 0 and _divides(lead, m):
                return i
        return -1

    def reduce(self, terms: dict, budget: Budget, skip: int = -1) -> dict:
        """Fully reduce a term dictionary; ``skip`` excludes one reducer."""
        key = self.key
        norm = self.norm
        p = dict(terms)
        heap = [(tuple(-k for k in key(m)), m) for m in p]
        heapq.heapify(heap)
        rem = {}
        leads, masks, tails = self.leads, self.masks, self.tails
        push = heapq.heappush
        pop = heapq.heappop
        while heap:
            _, m = pop(heap)
            c = p.pop(m, None)
            if c is None:
                continue
            mmask = _mask(m)
            hit = -1
            for i, lead in enumerate(leads):
                if i != skip and masks[i] & ~mmask == 0 and _divides(lead, m):
                    hit = i
                    break
            if hit < 0:
                rem[m] = c
                continue
            q = tuple(b - a for a, b in zip(leads[hit], m))
            for e, a in tails[hit]:
                e2 = tuple(x + y for x, y in zip(e, q))
                v = p.get(e2)
                if v is None:
                    p[e2] = norm(-c * a)
                    push(heap, (tuple(-k for k in key(e2)), e2))
                else:
                    v = norm(v - c * a)
                    if v:
                        p[e2] = v
                    else:
                        del p[e2]
            budget.spend()
        return rem


def _split_monic(terms: dict, key, field):
    lead = max(terms, key=key)
    inv = field.inv(terms[lead])
    norm = field.norm
    tail = [(m, norm(c * inv)) for m, c in terms.items() if m != lead]
    tail.sort(key=lambda t: key(t[0]), reverse=True)
    return lead, tail


def normal_form(p: Polynomial, basis: Sequence[Polynomial], order: TermOrder = GREVLEX,
                budget: Optional[Budget] = None) -> Polynomial:
    """Remainder of p on division by ``basis`` (in listed order), fully reduced.

    The result r satisfies p - r in (basis) and no term of r is divisible by a
    leading monomial of a basis element.
    """
    ring = p.ring
    red = _Reducer(ring.nvars, order, ring.field)
    for g in basis:
        if g.ring != ring:
            raise ValueError(f"ring mismatch: {g.ring} vs {ring}")
        if not g.terms:
            raise ValueError("basis elements must be nonzero")
        red.add(*_split_monic(g.terms, red.key, ring.field))
    return Polynomial(ring, red.reduce(p.terms, budget or current_budget()))


def divide_exact(h: Polynomial, g: Polynomial, order: TermOrder = GREVLEX) -> Polynomial:
    """Return q with h = q * g; ValueError if g does not divide h."""
    if not g.terms:
        raise ZeroDivisionError("division by zero polynomial")
    ring = h.ring
    field = ring.field
    key = order.key_function(ring.nvars)
    glead = max(g.terms, key=key)
    ginv = field.inv(g.terms[glead])
    if len(g.terms) == 1:
        out = {}
        for m, c in h.terms.items():
            if not _divides(glead, m):
                raise ValueError("inexact division")
            out[tuple(a - b for a, b in zip(m, glead))] = field.norm(c * ginv)
        return Polynomial(ring, out)
    rest = h
    quotient = {}
    while rest.terms:
        m = max(rest.terms, key=key)
        if not _divides(glead, m):
            raise ValueError("inexact division")
        q = tuple(a - b for a, b in zip(m, glead))
        c = field.norm(rest.terms[m] * ginv)
        quotient[q] = c
        rest = rest - g.mul_term(c, q)
    return Polynomial(ring, quotient)


# ---------------------------------------------------------------------------
# Buchberger
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GroebnerBasis:
    """Reduced Groebner basis: monic, interreduced, sorted by increasing lead."""

    ring: Ring
    order: TermOrder
    elements: tuple

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def leads(self) -> list:
        return [g.lead(self.order) for g in self.elements]

    def reduce(self, p: Polynomial, budget: Optional[Budget] = None) -> Polynomial:
        return normal_form(p, self.elements, self.order, budget)

    def is_unit(self) -> bool:
        return len(self.elements) == 1 and self.elements[0].is_constant()


def _lcm(a, b):
    return tuple(x if x > y else y for x, y in zip(a, b))


def _coprime(a, b):
    for x, y in zip(a, b):
        if x and y:
            return False
    return True


def _interreduce(ring: Ring, order: TermOrder, elems: list, budget: Budget) -> GroebnerBasis:
    """Minimalize and interreduce monic (lead, tail) pairs known to form a Groebner basis."""
    key = order.key_function(ring.nvars)
    elems = sorted(elems, key=lambda e: key(e[0]))
    minimal = []
    for lead, tail in elems:
        if not any(_divides(l2, lead) for l2, _ in minimal):
            minimal.append((lead, tail))
    red = _Reducer(ring.nvars, order, ring.field)
    for lead, tail in minimal:
        red.add(lead, tail)
    out = []
    for i, (lead, tail) in enumerate(minimal):
        rem = red.reduce(dict(tail), budget, skip=i)
        rem[lead] = ring.field.one
        out.append(Polynomial(ring, rem))
    return GroebnerBasis(ring, order, tuple(out))


def buchberger(gens: Iterable[Polynomial], order: TermOrder = GREVLEX,
               ring: Optional[Ring] = None, budget: Optional[Budget] = None) -> GroebnerBasis:
    """Reduced Groebner basis of the ideal generated by ``gens``.

    Pairs are processed by the normal strategy (smallest lcm first, total
    degree leading) with the Gebauer-Moeller installation of Buchberger's
    coprime and chain criteria.
    """
    gens = list(gens)
    if ring is None:
        if not gens:
            raise ValueError("ring is required for an empty generator list")
        ring = gens[0].ring
    for g in gens:
        if g.ring != ring:
            raise ValueError(f"ring mismatch: {g.ring} vs {ring}")
    budget = budget or current_budget()
    field_ = ring.field
    nv = ring.nvars
    key = order.key_function(nv)
    norm = field_.norm

    red = _Reducer(nv, order, field_)
    basis = []  # (lead, tail) for every element ever added
    active = []  # indices still useful as reducers / pair partners
    pairs = []  # heap of (deg(lcm), key(lcm), i, j, lcm)

    def unit():
        return GroebnerBasis(ring, order, (ring.one(),))

    def install(terms):
        """Gebauer-Moeller update with a new monic element."""
        nonlocal pairs, active
        lead, tail = _split_monic(terms, key, field_)
        h = len(basis)
        basis.append((lead, tail))
        # new pairs (g, h)
        cand = [(_lcm(basis[g][0], lead), g) for g in active]
        keep = []
        for idx, (l, g) in enumerate(cand):
            if _coprime(basis[g][0], lead):
                keep.append((l, g, True))
                continue
            dominated = False
            for l2, g2 in cand[idx + 1:]:
                if _divides(l2, l):
                    dominated = True
                    break
            if not dominated:
                for l2, _, _ in keep:
                    if _divides(l2, l):
                        dominated = True
                        break
            if not dominated:
                keep.append((l, g, False))
        # among pairs with equal lcm keep one; drop coprime ones
        seen = set()
        new_pairs = []
        for l, g, cop in keep:
            if l in seen:
                continue
            seen.add(l)
            if not cop:
                new_pairs.append((sum(l), key(l), g, h, l))
        # chain criterion on old pairs
        kept_old = []
        for item in pairs:
            l = item[4]
            i, j = item[2], item[3]
            if (_divides(lead, l) and _lcm(basis[i][0], lead) != l
                    and _lcm(basis[j][0], lead) != l):
                continue
            kept_old.append(item)
        pairs = kept_old + new_pairs
        heapq.heapify(pairs)
        active = [g for g in active if not _divides(lead, basis[g][0])] + [h]
        # rebuild reducer list from active elements
        red.leads, red.masks, red.tails = [], [], []
        for g in active:
            red.add(*basis[g])
        budget.basis_size = len(active)
        budget.pending = len(pairs)

    for g in gens:
        if not g.terms:
            continue
        r = red.reduce(g.terms, budget)
        if not r:
            continue
        if len(r) == 1 and not any(next(iter(r))):
            return unit()
        install(r)

    while pairs:
        _, _, i, j, l = heapq.heappop(pairs)
        budget.pending = len(pairs)
        (li, ti), (lj, tj) = basis[i], basis[j]
        qi = tuple(a - b for a, b in zip(l, li))
        qj = tuple(a - b for a, b in zip(l, lj))
        s = {}
        for e, c in ti:
            s[tuple(a + b for a, b in zip(e, qi))] = c
        for e, c in tj:
            e2 = tuple(a + b for a, b in zip(e, qj))
            v = norm(s.get(e2, 0) - c)
            if v:
                s[e2] = v
            else:
                s.pop(e2, None)
        if not s:
            continue
        r = red.reduce(s, budget)
        if not r:
            continue
        if len(r) == 1 and not any(next(iter(r))):
            return unit()
        install(r)

    return _interreduce(ring, order, [basis[g] for g in active], budget)


def groebner_from_basis(elements: Sequence[Polynomial], order: TermOrder,
                        ring: Ring, budget: Optional[Budget] = None) -> GroebnerBasis:
    """Reduced form of a list already known to be a Groebner basis for ``order``."""
    key = order.key_function(ring.nvars)
    elems = [_split_monic(g.terms, key, ring.field) for g in elements if g.terms]
    if any(not any(lead) for lead, _ in elems):
        return GroebnerBasis(ring, order, (ring.one(),))
    return _interreduce(ring, order, elems, budget or current_budget())


def s_polynomial(f: Polynomial, g: Polynomial, order: TermOrder = GREVLEX) -> Polynomial:
    lf, lg = f.lead(order), g.lead(order)
    l = _lcm(lf, lg)
    a = f.monic(order).mul_term(1, tuple(x - y for x, y in zip(l, lf)))
    b = g.monic(order).mul_term(1, tuple(x - y for x, y in zip(l, lg)))
    return a - b


def is_groebner(elements: Sequence[Polynomial], order: TermOrder = GREVLEX) -> bool:
    """Buchberger's criterion: every S-polynomial reduces to zero."""
    elements = [g for g in elements if g.terms]
    for i in range(len(elements)):
        for j in range(i + 1, len(elements)):
            if normal_form(s_polynomial(elements[i], elements[j], order), elements, order):
                return False
    return True


def is_reduced(elements: Sequence[Polynomial], order: TermOrder = GREVLEX) -> bool:
    leads = [g.lead(order) for g in elements]
    for i, g in enumerate(elements):
        if g.lead_coefficient(order) != g.ring.field.one:
            return False
        for j, l in enumerate(leads):
            if i != j and any(_divides(l, m) for m in g.terms):
                return False
    return True


# ---------------------------------------------------------------------------
# ideals
# ---------------------------------------------------------------------------


@dataclass(eq=False)
class Ideal:
    """Ideal given by generators, with a per-order cache of reduced bases."""

    ring: Ring
    gens: tuple = ()
    _cache: dict = field(default_factory=dict, repr=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def __post_init__(self):
        gens = tuple(self.gens)
        for g in gens:
            if g.ring != self.ring:
                raise ValueError(f"ring mismatch: {g.ring} vs {self.ring}")
        self.gens = gens

    @classmethod
    def of(cls, *gens: Polynomial, ring: Optional[Ring] = None) -> "Ideal":
        if ring is None:
            if not gens:
                raise ValueError("ring is required for the zero ideal")
            ring = gens[0].ring
        return cls(ring, tuple(gens))

    @classmethod
    def from_basis(cls, basis: GroebnerBasis) -> "Ideal":
        ideal = cls(basis.ring, basis.elements)
        ideal._cache[basis.order] = basis
        return ideal

    @property
    def nonzero_gens(self) -> list:
        return [g for g in self.gens if g.terms]

    def is_bihomogeneous(self) -> bool:
        return all(g.is_bihomogeneous() for g in self.nonzero_gens)

    def is_homogeneous(self) -> bool:
        return all(g.is_homogeneous() for g in self.nonzero_gens)

    def groebner(self, order: TermOrder = GREVLEX, budget: Optional[Budget] = None) -> GroebnerBasis:
        gb = self._cache.get(order)
        if gb is not None:
            return gb
        with self._lock:
            gb = self._cache.get(order)
            if gb is None:
                gb = buchberger(self.gens, order, ring=self.ring, budget=budget)
                self._cache[order] = gb
        return gb

    def contains(self, p: Polynomial) -> bool:
        return contains(self, p)

    def __len__(self):
        return len(self.gens)

    def __iter__(self):
        return iter(self.gens)

    def __str__(self):
        return "(" + ", ".join(str(g) for g in self.gens) + ")"


def contains(ideal: Ideal, p: Polynomial) -> bool:
    """Ideal membership via the reduced grevlex basis."""
    if not p.terms:
        return True
    return not ideal.groebner().reduce(p).terms


def ideal_equal(a: Ideal, b: Ideal, order: TermOrder = GREVLEX) -> bool:
    """Equality of ideals by comparing reduced Groebner bases element-wise."""
    if a.ring != b.ring:
        raise ValueError(f"ring mismatch: {a.ring} vs {b.ring}")
    return a.groebner(order).elements == b.groebner(order).elements
