"""Ideal operations: sums, products, intersection, colon, saturation,
minimal generators, Hilbert series, dimension and a depth probe."""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass, field
from functools import reduce
from itertools import combinations_with_replacement
from typing import Optional, Sequence

from .algebra import GREVLEX, Polynomial, PrimeField, Ring, TermOrder
from .groebner import (
    Budget, Ideal, buchberger, divide_exact, groebner_from_basis, ideal_equal,
    normal_form,
)


class SaturationError(RuntimeError):
    """The colon iteration did not stabilize within its cap."""


def ideal_sum(a: Ideal, b: Ideal) -> Ideal:
    _same_ring(a, b)
    return Ideal(a.ring, a.gens + b.gens)


def ideal_product(a: Ideal, b: Ideal) -> Ideal:
    _same_ring(a, b)
    return Ideal(a.ring, tuple(f * g for f in a.gens for g in b.gens))


def ideal_power(a: Ideal, e: int) -> Ideal:
    if e < 1:
        raise ValueError("exponent must be positive")
    gens = []
    for combo in combinations_with_replacement(range(len(a.gens)), e):
        gens.append(reduce(lambda p, i: p * a.gens[i], combo, a.ring.one()))
    return Ideal(a.ring, tuple(gens))


def _same_ring(a: Ideal, b: Ideal):
    if a.ring != b.ring:
        raise ValueError(f"ring mismatch: {a.ring} vs {b.ring}")


def intersect(a: Ideal, b: Ideal, budget: Optional[Budget] = None) -> Ideal:
    """a ∩ b by eliminating a tag variable u from u*a + (1-u)*b.

    The returned ideal carries its reduced grevlex basis in the cache: the
    u-free part of the elimination basis is already that basis.
    """
    _same_ring(a, b)
    ring = a.ring
    if not a.nonzero_gens or not b.nonzero_gens:
        return Ideal(ring, ())
    big = ring.with_tags(ring.tags + 1)
    u = big.gen(big.nvars - 1)
    one_minus_u = big.one() - u
    gens = [u * g.embed(big) for g in a.nonzero_gens]
    gens += [one_minus_u * g.embed(big) for g in b.nonzero_gens]
    order = TermOrder.elimination({big.nvars - 1})
    gb = buchberger(gens, order, ring=big, budget=budget)
    kept = [g.project(ring) for g in gb.elements if not any(m[-1] for m in g.terms)]
    return Ideal.from_basis(groebner_from_basis(kept, GREVLEX, ring, budget))


def colon_element(ideal: Ideal, g: Polynomial, budget: Optional[Budget] = None) -> Ideal:
    """ideal : (g), computed as (ideal ∩ (g)) / g."""
    if not g.terms:
        raise ValueError("colon by the zero polynomial")
    if g.is_constant():
        return ideal
    inter = intersect(ideal, Ideal(ideal.ring, (g,)), budget)
    quotients = [divide_exact(h, g) for h in inter.gens]
    # a Groebner basis of ideal ∩ (g) divided by g is a Groebner basis of the colon
    return Ideal.from_basis(groebner_from_basis(quotients, GREVLEX, ideal.ring, budget))


def colon_ideal(ideal: Ideal, other: Ideal, budget: Optional[Budget] = None) -> Ideal:
    """ideal : other, the intersection of the element colons over other's generators."""
    _same_ring(ideal, other)
    gens = other.nonzero_gens
    if not gens:
        raise ValueError("colon by the zero ideal")
    parts = [colon_element(ideal, g, budget) for g in gens]
    return reduce(lambda x, y: intersect(x, y, budget), parts)


def iterated_colon(ideal: Ideal, other: Ideal, times: int, budget: Optional[Budget] = None) -> Ideal:
    """(((ideal : other) : other) ...), ``times`` colons; equals ideal : other^times."""
    for _ in range(times):
        ideal = colon_ideal(ideal, other, budget)
    return ideal


def saturation_chain(ideal: Ideal, other: Ideal, max_iter: int = 32,
                     budget: Optional[Budget] = None) -> list:
    """[I, I:J, I:J^2, ...] up to and including the first repeated ideal's predecessor."""
    chain = [ideal]
    while True:
        nxt = colon_ideal(chain[-1], other, budget)
        if ideal_equal(nxt, chain[-1]):
            return chain
        if len(chain) > max_iter:
            raise SaturationError(f"saturation did not stabilize after {max_iter} colon steps")
        chain.append(nxt)


def saturate(ideal: Ideal, other: Ideal, max_iter: int = 32,
             budget: Optional[Budget] = None) -> tuple:
    """(ideal : other^∞, number of colon steps needed to reach it)."""
    chain = saturation_chain(ideal, other, max_iter, budget)
    return chain[-1], len(chain) - 1


def minimalize_generators(gens: Sequence[Polynomial], budget: Optional[Budget] = None) -> list:
    """Subset of homogeneous generators in which no element is redundant.

    Works degree by degree: generators of degree D are reduced modulo a basis
    of the lower-degree part and kept only if linearly independent of the
    already kept ones of degree D.  For graded ideals this gives a minimal
    generating set.
    """
    gens = [g for g in gens if g.terms]
    for g in gens:
        if not g.is_homogeneous():
            raise ValueError(f"minimalize_generators needs homogeneous input, got {g}")
        if g.is_constant():
            return [g]
    if not gens:
        return []
    ring = gens[0].ring
    by_degree: dict = {}
    for g in gens:
        by_degree.setdefault(g.total_degree(), []).append(g)
    kept: list = []
    for deg in sorted(by_degree):
        lower = buchberger(kept, GREVLEX, ring=ring, budget=budget).elements if kept else ()
        echelon: dict = {}  # pivot monomial -> reduced row
        for g in by_degree[deg]:
            r = normal_form(g, lower, GREVLEX, budget) if lower else g
            r = _row_reduce(r, echelon)
            if r.terms:
                echelon[r.lead()] = r.monic()
                kept.append(g)
    return kept


def _row_reduce(p: Polynomial, echelon: dict) -> Polynomial:
    changed = True
    while changed and p.terms:
        changed = False
        for m in sorted(p.terms, key=GREVLEX.key_function(p.ring.nvars), reverse=True):
            row = echelon.get(m)
            if row is not None:
                p = p - row.scale(p.terms[m])
                changed = True
                break
    return p


# ---------------------------------------------------------------------------
# Hilbert series
# ---------------------------------------------------------------------------


def _poly_add(a, b):
    out = [0] * max(len(a), len(b))
    for i, c in enumerate(a):
        out[i] += c
    for i, c in enumerate(b):
        out[i] += c
    while len(out) > 1 and out[-1] == 0:
        out.pop()
    return out


def _poly_mul(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    while len(out) > 1 and out[-1] == 0:
        out.pop()
    return out


def _minimal_monomials(monos):
    monos = sorted(set(monos), key=sum)
    out = []
    for m in monos:
        if not any(all(a <= b for a, b in zip(k, m)) for k in out):
            out.append(m)
    return out


def _numerator(gens):
    if not gens:
        return [1]
    if any(not any(m) for m in gens):
        return [0]
    counts = Counter()
    for m in gens:
        for i, e in enumerate(m):
            if e:
                counts[i] += 1
    if all(c == 1 for c in counts.values()):
        # pairwise coprime generators: a complete intersection
        out = [1]
        for m in gens:
            d = sum(m)
            out = _poly_mul(out, [1] + [0] * (d - 1) + [-1])
        return out
    v = max(sorted(counts), key=lambda i: counts[i])
    unit = tuple(1 if i == v else 0 for i in range(len(gens[0])))
    plus = _minimal_monomials([m for m in gens if not m[v]] + [unit])
    colon = _minimal_monomials([m[:v] + (max(m[v] - 1, 0),) + m[v + 1:] for m in gens])
    return _poly_add(_numerator(plus), [0] + _numerator(colon))


@dataclass(frozen=True)
class HilbertData:
    """Hilbert series numerator/(1-t)^nvars and its reduced form numerator'/(1-t)^pole."""

    numerator: tuple
    nvars: int
    reduced_numerator: tuple
    pole_order: int

    def series(self, upto: int) -> list:
        """Coefficients of the power series up to degree ``upto``."""
        coeffs = list(self.reduced_numerator) + [0] * (upto + 1)
        for _ in range(self.pole_order):
            for i in range(1, len(coeffs)):
                coeffs[i] += coeffs[i - 1]
        return coeffs[: upto + 1]


def hilbert_numerator(monomials: Sequence[tuple], nvars: int) -> HilbertData:
    """Hilbert numerator of k[vars]/M for the monomial ideal M given by exponent tuples."""
    gens = _minimal_monomials([tuple(m) for m in monomials])
    for m in gens:
        if len(m) != nvars:
            raise ValueError("exponent length does not match nvars")
    num = _numerator(gens)
    reduced = list(num)
    pole = nvars
    if reduced == [0]:
        return HilbertData(tuple(num), nvars, (0,), -1)
    while pole > 0 and sum(reduced) == 0:
        # divide by (1 - t): coefficients of the quotient are prefix sums
        q, acc = [], 0
        for c in reduced[:-1]:
            acc += c
            q.append(acc)
        reduced = q
        pole -= 1
    return HilbertData(tuple(num), nvars, tuple(reduced), pole)


def hilbert_data(ideal: Ideal) -> HilbertData:
    """Hilbert series of B/I (total grading) from its grevlex leading terms."""
    if not ideal.is_homogeneous():
        raise ValueError("Hilbert series needs a homogeneous ideal")
    gb = ideal.groebner(GREVLEX)
    return hilbert_numerator(gb.leads(), ideal.ring.nvars)


def krull_dimension(ideal: Ideal) -> int:
    """dim B/I; -1 for the unit ideal."""
    return hilbert_data(ideal).pole_order


# ---------------------------------------------------------------------------
# depth
# ---------------------------------------------------------------------------


@dataclass
class DepthProbeResult:
    depth: int
    trials: list = field(default_factory=list)  # (seed, [step succeeded?])
    agreement: bool = True

    @property
    def trial_depths(self) -> list:
        out = []
        for _, steps in self.trials:
            k = 0
            for ok in steps:
                if not ok:
                    break
                k += 1
            out.append(k)
        return out


def _random_linear_form(ring: Ring, rng: random.Random) -> Polynomial:
    if isinstance(ring.field, PrimeField):
        coeffs = [rng.randrange(ring.field.p) for _ in range(ring.nvars)]
    else:
        coeffs = [rng.randrange(-32003, 32004) for _ in range(ring.nvars)]
    out = ring.zero()
    for i, c in enumerate(coeffs):
        if c:
            out = out + ring.gen(i).scale(c)
    return out


def depth_probe(ideal: Ideal, dim: int, trials: int = 3, seed: int = 0,
                budget: Optional[Budget] = None) -> DepthProbeResult:
    """Depth of B/I measured with random linear forms.

    A form is accepted as a nonzerodivisor when adding it multiplies the
    Hilbert numerator by exactly (1 - t).  Each trial uses its own generator
    seeded by (seed, trial index); ``agreement`` reports whether all trials
    measured the same depth.
    """
    if not ideal.is_homogeneous():
        raise ValueError("depth probe needs a homogeneous ideal")
    ring = ideal.ring
    base = hilbert_data(ideal).numerator
    records = []
    for t in range(trials):
        trial_seed = seed * 1000 + t
        rng = random.Random(trial_seed)
        forms = [_random_linear_form(ring, rng) for _ in range(dim)]
        steps = []
        current = ideal.groebner(GREVLEX).elements
        prev = list(base)
        for ell in forms:
            gb = buchberger(list(current) + [ell], GREVLEX, ring=ring, budget=budget)
            num = list(hilbert_numerator(gb.leads(), ring.nvars).numerator)
            ok = num == _poly_mul(prev, [1, -1])
            steps.append(ok)
            if not ok:
                break
            current, prev = gb.elements, num
        records.append((trial_seed, steps))
    result = DepthProbeResult(0, records)
    depths = result.trial_depths
    result.depth = min(depths) if depths else 0
    result.agreement = len(set(depths)) <= 1
    return result
