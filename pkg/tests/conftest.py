import random
from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import strategies as st

from scatterdiag.algebra import GradedSeries, primitive, vneg
from scatterdiag.invariants import run_invariants
from scatterdiag.local import LocalDiagram, LocalRay

DATA = Path(__file__).parent / "data"

small_int = st.integers(-3, 3)
coeff = st.fractions(min_value=-3, max_value=3, max_denominator=4).filter(lambda c: c != 0)
exponent = st.tuples(small_int, small_int).filter(lambda m: m != (0, 0))


@st.composite
def series(draw, truncation=3, max_terms=4):
    terms = draw(st.dictionaries(st.tuples(exponent, st.integers(1, truncation)), coeff,
                                 max_size=max_terms))
    return GradedSeries(terms, truncation)


@st.composite
def ray_series(draw, m, truncation):
    """Function sum_k c_k z^(k m) t^k along a primitive exponent m."""
    cs = draw(st.lists(st.one_of(st.just(Fraction(0)), coeff),
                       min_size=truncation, max_size=truncation))
    terms = {((k * m[0], k * m[1]), k): c for k, c in enumerate(cs, 1)}
    return GradedSeries(terms, truncation)


def random_local_diagram(rng: random.Random, truncation: int, nrays: int) -> LocalDiagram:
    dirs = set()
    while len(dirs) < nrays:
        m = (rng.randint(-3, 3), rng.randint(-3, 3))
        if m != (0, 0) and primitive(m) == m:
            dirs.add(m)
    rays = []
    for m in sorted(dirs):
        terms = {}
        for k in range(1, truncation + 1):
            if k == 1 or rng.random() < 0.6:
                terms[((k * m[0], k * m[1]), k)] = Fraction(rng.choice([-3, -2, -1, 1, 2, 3]),
                                                            rng.randint(1, 3))
        rays.append(LocalRay(vneg(m), False, GradedSeries(terms, truncation)))
    return LocalDiagram(tuple(rays), truncation)


def two_ray_diagram(m1=(1, 0), m2=(0, 1), c1=1, c2=1) -> LocalDiagram:
    """Two ingoing rays c_i z^{m_i} u_i with square-zero orders u_1, u_2."""
    h1 = GradedSeries.monomial(m1, frozenset({1}), c1, 2)
    h2 = GradedSeries.monomial(m2, frozenset({2}), c2, 2)
    return LocalDiagram((LocalRay(vneg(m1), False, h1), LocalRay(vneg(m2), False, h2)), 2)


@pytest.fixture(scope="session")
def pipeline2():
    return run_invariants(2)


@pytest.fixture(scope="session")
def pipeline3():
    return run_invariants(3)
