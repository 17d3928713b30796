import sys
from pathlib import Path

import pytest
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).parent))

from reeslab import PrimeField, Polynomial, Ring, build_setup  # noqa: E402

P = 32003
EXAMPLE_F = "x1^2*x2 + x1*x3^2"

ACCEPTANCE_LINES = []


def record_acceptance(criterion, ok, detail=""):
    ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] criterion {criterion}: {detail}")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def example_setup():
    return build_setup(3, EXAMPLE_F)


@pytest.fixture
def ring2():
    return Ring(2, PrimeField(P))


def polynomials(ring, max_terms=4, max_exp=2, prime=P):
    """Hypothesis strategy for small polynomials over ``ring``."""
    mono = st.tuples(*[st.integers(0, max_exp)] * ring.nvars)
    coeff = st.integers(1, prime - 1)
    return st.dictionaries(mono, coeff, max_size=max_terms).map(
        lambda d: Polynomial(ring, d, normalized=False)
    )


def monomials(nvars, max_exp=3):
    return st.tuples(*[st.integers(0, max_exp)] * nvars)


def forms(ring, max_deg=3, max_terms=3, prime=P):
    """Hypothesis strategy for homogeneous polynomials of degree 1..max_deg."""
    def of_degree(deg):
        mono = st.lists(st.integers(0, ring.nvars - 1), min_size=deg, max_size=deg).map(
            lambda idx: tuple(idx.count(i) for i in range(ring.nvars))
        )
        return st.dictionaries(mono, st.integers(1, prime - 1), min_size=1, max_size=max_terms)

    return st.integers(1, max_deg).flatmap(of_degree).map(lambda d: Polynomial(ring, d))
