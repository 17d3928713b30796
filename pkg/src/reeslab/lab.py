"""Defining equations of the Rees algebra of the maximal ideal of S/(f).

Everything lives in B = k[x1..xn, T1..Tn] with deg x_i = (1,0), deg T_i = (0,1).
The defining ideal J is built two independent ways:

* by downgrading: f_0 = f, f_i = [T] . ∂f_{i-1} where [x] . ∂g = g, and
  J = I_2(psi) + (f_0, ..., f_d);
* by saturation: J = (I_2(psi) + (f)) : (x1..xn)^∞.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from itertools import combinations
from math import comb
from typing import Optional

from .algebra import DEFAULT_FIELD, GREVLEX, Field, Polynomial, Ring
from .groebner import Budget, Ideal, contains, ideal_equal
from .ideals import (
    depth_probe, ideal_sum, krull_dimension, minimalize_generators,
    saturation_chain,
)

STRATEGIES = ("min", "max")


class SetupError(ValueError):
    """Input outside the hypersurface setting (n >= 2, f homogeneous in x, degree >= 1)."""


class TheoremViolation(AssertionError):
    """A computed invariant contradicts a proven statement; indicates a kernel bug."""


@dataclass(frozen=True)
class ReesSetup:
    n: int
    f: Polynomial
    d: int
    ring: Ring
    psi: tuple  # ((x1..xn), (T1..Tn))
    minors: tuple  # x_i T_j - x_j T_i for i < j, in lexicographic (i, j) order

    @property
    def field(self) -> Field:
        return self.ring.field

    def i2psi(self) -> Ideal:
        return Ideal(self.ring, self.minors)

    def maximal_x(self) -> Ideal:
        """The ideal (x1, ..., xn) of B."""
        return Ideal(self.ring, tuple(self.ring.x(i) for i in range(1, self.n + 1)))


def minor(ring: Ring, i: int, j: int) -> Polynomial:
    """The 2x2 minor x_i T_j - x_j T_i of psi (1-based)."""
    return ring.x(i) * ring.T(j) - ring.x(j) * ring.T(i)


def build_setup(n: int, f, field: Field = DEFAULT_FIELD) -> ReesSetup:
    """Validate (n, f) and materialize psi and its minors.  ``f`` may be text."""
    if n < 2:
        raise SetupError(f"n must be at least 2, got {n}")
    ring = Ring(n, field)
    if isinstance(f, str):
        f = ring.parse(f)
    if f.ring != ring:
        raise SetupError(f"f lives in {f.ring}, expected {ring}")
    if not f.terms:
        raise SetupError("f must be nonzero")
    bideg = f.bidegree()
    if bideg is None:
        if any(any(m[n:]) for m in f.terms):
            raise SetupError("f must not involve the T variables")
        raise SetupError("f must be homogeneous")
    d, tdeg = bideg
    if tdeg:
        raise SetupError("f must not involve the T variables")
    if d < 1:
        raise SetupError("f must have degree at least 1")
    psi = (
        tuple(ring.x(i) for i in range(1, n + 1)),
        tuple(ring.T(i) for i in range(1, n + 1)),
    )
    minors = tuple(minor(ring, i, j) for i, j in combinations(range(1, n + 1), 2))
    return ReesSetup(n, f, d, ring, psi, minors)


# ---------------------------------------------------------------------------
# downgrading
# ---------------------------------------------------------------------------


def partial_column(g: Polynomial, strategy: str = "min") -> list:
    """A column c with sum_j x_j c_j = g.

    Each term of g goes to the row of its smallest (``"min"``) or largest
    (``"max"``) x-variable, divided by that variable.  The zero polynomial
    gets the zero column.
    """
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}")
    ring = g.ring
    n = ring.n
    rows = [dict() for _ in range(n)]
    for m, c in g.terms.items():
        support = [j for j in range(n) if m[j]]
        if not support:
            raise ValueError(f"term of x-degree 0 in {g}: nothing to exchange")
        j = support[0] if strategy == "min" else support[-1]
        rows[j][m[:j] + (m[j] - 1,) + m[j + 1:]] = c
    return [Polynomial(ring, r) for r in rows]


@dataclass(frozen=True)
class DowngradedSequence:
    strategy: str
    entries: tuple  # f_0 .. f_d
    columns: tuple  # ∂f_0 .. ∂f_{d-1}

    def __len__(self):
        return len(self.entries)

    def __getitem__(self, i):
        return self.entries[i]

    def ideal(self, setup: ReesSetup, upto: Optional[int] = None) -> Ideal:
        """J_i = I_2(psi) + (f_0, ..., f_i); the full sequence by default."""
        upto = len(self.entries) - 1 if upto is None else upto
        return Ideal(setup.ring, setup.minors + self.entries[: upto + 1])


def downgrade_sequence(setup: ReesSetup, strategy: str = "min") -> DowngradedSequence:
    ring = setup.ring
    T = setup.psi[1]
    entries = [setup.f]
    columns = []
    for _ in range(setup.d):
        col = partial_column(entries[-1], strategy)
        nxt = ring.zero()
        for t, c in zip(T, col):
            nxt = nxt + t * c
        columns.append(tuple(col))
        entries.append(nxt)
    return DowngradedSequence(strategy, tuple(entries), tuple(columns))


def exchange_witness(setup: ReesSetup, seq: DowngradedSequence, i: int, j: int) -> dict:
    """Cofactors expressing x_j f_i - T_j f_{i-1} in the minors of psi.

    Returns {(a, b): cofactor} with a < b such that
    x_j f_i - T_j f_{i-1} = sum cofactor * (x_a T_b - x_b T_a).  Built from
    x_j f_i - T_j f_{i-1} = sum_k (x_j T_k - x_k T_j) (∂f_{i-1})_k.
    """
    col = seq.columns[i - 1]
    out: dict = {}
    for k in range(1, setup.n + 1):
        if k == j or not col[k - 1].terms:
            continue
        # x_j T_k - x_k T_j is +minor(j, k) if j < k else -minor(k, j)
        pair, sign = ((j, k), 1) if j < k else ((k, j), -1)
        out[pair] = out.get(pair, setup.ring.zero()) + col[k - 1].scale(sign)
    return {p: c for p, c in out.items() if c.terms}


def presentation_matrix(setup: ReesSetup, strategy: str = "min") -> list:
    """n x (C(n,2)+1) matrix [Koszul columns | ∂f] as a list of rows."""
    n, ring = setup.n, setup.ring
    cols = []
    for i, j in combinations(range(1, n + 1), 2):
        col = [ring.zero() for _ in range(n)]
        col[i - 1] = ring.x(j)
        col[j - 1] = -ring.x(i)
        cols.append(col)
    cols.append(partial_column(setup.f, strategy))
    return [[cols[c][r] for c in range(len(cols))] for r in range(n)]


def symmetric_ideal(setup: ReesSetup, strategy: str = "min") -> Ideal:
    """L = I_2(psi) + (f, f_1), defining the symmetric algebra."""
    T = setup.psi[1]
    f1 = setup.ring.zero()
    for t, c in zip(T, partial_column(setup.f, strategy)):
        f1 = f1 + t * c
    return Ideal(setup.ring, setup.minors + (setup.f, f1))


def rees_ideal_downgrade(setup: ReesSetup, strategy: str = "min") -> Ideal:
    return downgrade_sequence(setup, strategy).ideal(setup)


def _saturate_checked(setup: ReesSetup, start: Ideal, budget: Optional[Budget]) -> list:
    chain = saturation_chain(start, setup.maximal_x(), max_iter=2 * setup.d + 4, budget=budget)
    if len(chain) - 1 > setup.d:
        raise TheoremViolation(
            f"saturation index {len(chain) - 1} exceeds d = {setup.d}"
        )
    return chain


def rees_ideal_saturation(setup: ReesSetup, budget: Optional[Budget] = None) -> tuple:
    """((I_2(psi) + (f)) : (x)^∞, stabilization index).

    The chain stops at the first fixpoint; an index of at most d means the
    d-fold colon coincides with the saturation.
    """
    chain = _saturate_checked(setup, ideal_sum(setup.i2psi(), Ideal.of(setup.f)), budget)
    return chain[-1], len(chain) - 1


# ---------------------------------------------------------------------------
# verification and classification
# ---------------------------------------------------------------------------


@dataclass
class Verdict:
    holds: bool
    saturation_index: int
    symmetric_saturation_index: int
    downgrade_min_equals_saturation: bool
    downgrade_max_equals_saturation: bool
    symmetric_saturation_equals_saturation: bool
    strategy_independent: list  # J_i(min) == J_i(max), i = 0..d
    containment_chain: list  # every generator of J_i lies in J, i = 0..d
    intermediate_colon_equal: list  # observed only: (I_2+(f)) : n^i == J_i
    sequences: dict = field(repr=False, default_factory=dict)
    rees_ideal: Optional[Ideal] = field(repr=False, default=None)

    def as_dict(self) -> dict:
        return {
            "holds": self.holds,
            "saturation_index": self.saturation_index,
            "symmetric_saturation_index": self.symmetric_saturation_index,
            "downgrade_min_equals_saturation": self.downgrade_min_equals_saturation,
            "downgrade_max_equals_saturation": self.downgrade_max_equals_saturation,
            "symmetric_saturation_equals_saturation": self.symmetric_saturation_equals_saturation,
            "strategy_independent": self.strategy_independent,
            "containment_chain": self.containment_chain,
            "intermediate_colon_equal": self.intermediate_colon_equal,
        }


def verify_main_theorem(setup: ReesSetup, budget: Optional[Budget] = None) -> Verdict:
    """Compare the downgrade ideals (both strategies) with both saturations."""
    seqs = {s: downgrade_sequence(setup, s) for s in STRATEGIES}
    chain = _saturate_checked(setup, ideal_sum(setup.i2psi(), Ideal.of(setup.f)), budget)
    sat = chain[-1]
    sym_chain = _saturate_checked(setup, symmetric_ideal(setup, "min"), budget)
    sym_sat = sym_chain[-1]

    down_min = seqs["min"].ideal(setup)
    down_max = seqs["max"].ideal(setup)
    eq_min = ideal_equal(down_min, sat)
    eq_max = ideal_equal(down_max, sat)
    eq_sym = ideal_equal(sym_sat, sat)

    strategy_independent = []
    containment = []
    intermediate = []
    for i in range(setup.d + 1):
        ji_min = seqs["min"].ideal(setup, i)
        strategy_independent.append(ideal_equal(ji_min, seqs["max"].ideal(setup, i)))
        containment.append(all(contains(sat, g) for g in ji_min.gens))
        colon_i = chain[min(i, len(chain) - 1)]
        intermediate.append(ideal_equal(colon_i, ji_min))

    holds = eq_min and eq_max and eq_sym and all(containment) and all(strategy_independent)
    return Verdict(
        holds=holds,
        saturation_index=len(chain) - 1,
        symmetric_saturation_index=len(sym_chain) - 1,
        downgrade_min_equals_saturation=eq_min,
        downgrade_max_equals_saturation=eq_max,
        symmetric_saturation_equals_saturation=eq_sym,
        strategy_independent=strategy_independent,
        containment_chain=containment,
        intermediate_colon_equal=intermediate,
        sequences=seqs,
        rees_ideal=sat,
    )


@dataclass
class ReesReport:
    n: int
    d: int
    f: Polynomial
    downgrade_generators: int
    saturation_generators: int
    verdict: bool
    saturation_index: int
    min_gens: int
    relation_type: int
    fiber_generator: Optional[Polynomial]
    fiber_principal: bool
    dim: int
    depth: int
    depth_trials: list
    depth_agreement: bool
    cm: bool
    almost_cm: bool
    fiber_reg_T: int
    violations: list = field(default_factory=list)
    timings: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.verdict and not self.violations

    def as_dict(self, timings: bool = True) -> dict:
        out = {
            "n": self.n,
            "d": self.d,
            "f": str(self.f),
            "verdict": self.verdict,
            "relation_type": self.relation_type,
            "fiber_generator": str(self.fiber_generator) if self.fiber_generator is not None else None,
            "min_gens": self.min_gens,
            "dim": self.dim,
            "depth": self.depth,
            "cm": self.cm,
            "almost_cm": self.almost_cm,
            "fiber_reg_T": self.fiber_reg_T,
            "saturation_index": self.saturation_index,
            "downgrade_generators": self.downgrade_generators,
            "saturation_generators": self.saturation_generators,
            "depth_trials": [[s, steps] for s, steps in self.depth_trials],
            "depth_agreement": self.depth_agreement,
            "violations": list(self.violations),
        }
        if timings:
            out["timings"] = {k: round(v, 4) for k, v in self.timings.items()}
        return out


def classify(setup: ReesSetup, depth_trials: int = 3, depth_seed: int = 0,
             budget: Optional[Budget] = None) -> ReesReport:
    """Invariants of the Rees algebra, read off the saturation side.

    Relation type and fiber come from the saturation ideal, so agreement
    with d and f(x -> T) is a cross-check against the downgrade construction.
    Contradictions are collected as ``THEOREM-VIOLATION`` strings.
    """
    n, d = setup.n, setup.d
    timings = {}
    t0 = time.perf_counter()
    verdict = verify_main_theorem(setup, budget)
    timings["verify"] = time.perf_counter() - t0
    sat = verdict.rees_ideal

    t0 = time.perf_counter()
    sat_gens = list(sat.groebner(GREVLEX).elements)
    mins = minimalize_generators(sat_gens, budget)
    relation_type = max(g.bidegree()[1] for g in mins)
    fiber_images = [g.substitute_x_zero() for g in mins]
    fiber_gens = minimalize_generators([g for g in fiber_images if g.terms], budget)
    fiber_principal = len(fiber_gens) == 1
    fiber = fiber_gens[0].monic() if fiber_principal else None
    timings["generators"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    dim = krull_dimension(sat)
    probe = depth_probe(sat, dim, depth_trials, depth_seed, budget)
    timings["depth"] = time.perf_counter() - t0

    violations = []
    if not verdict.holds:
        violations.append("THEOREM-VIOLATION: downgrade and saturation ideals differ")
    if not fiber_principal:
        violations.append(f"THEOREM-VIOLATION: fiber ideal needs {len(fiber_gens)} generators")
    else:
        expected = setup.f.x_to_T().monic()
        if fiber != expected or fiber.total_degree() != d:
            violations.append(f"THEOREM-VIOLATION: fiber generator {fiber} is not {expected}")
    if relation_type != d:
        violations.append(f"THEOREM-VIOLATION: relation type {relation_type} != d = {d}")
    if dim != n:
        violations.append(f"THEOREM-VIOLATION: dimension {dim} != n = {n}")
    if not probe.agreement:
        violations.append(
            "THEOREM-VIOLATION: depth trials disagree "
            f"(seeds {[s for s, _ in probe.trials]}, depths {probe.trial_depths})"
        )
    if probe.depth < n - 1:
        violations.append(f"THEOREM-VIOLATION: depth {probe.depth} < n - 1 = {n - 1}")
    expected_cm = d <= n - 1
    if (probe.depth == n) != expected_cm:
        violations.append(
            f"THEOREM-VIOLATION: depth {probe.depth} but Cohen-Macaulay expected iff d <= n - 1"
        )
    if d >= 2 and len(mins) != comb(n, 2) + d + 1:
        violations.append(
            f"THEOREM-VIOLATION: {len(mins)} minimal generators, expected {comb(n, 2) + d + 1}"
        )

    return ReesReport(
        n=n,
        d=d,
        f=setup.f,
        downgrade_generators=len(verdict.sequences["min"].ideal(setup).gens),
        saturation_generators=len(sat.gens),
        verdict=verdict.holds,
        saturation_index=verdict.saturation_index,
        min_gens=len(mins),
        relation_type=relation_type,
        fiber_generator=fiber,
        fiber_principal=fiber_principal,
        dim=dim,
        depth=probe.depth,
        depth_trials=probe.trials,
        depth_agreement=probe.agreement,
        cm=probe.depth == n,
        almost_cm=probe.depth >= n - 1,
        fiber_reg_T=(fiber.total_degree() - 1) if fiber is not None else -1,
        violations=violations,
        timings=timings,
    )
