import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from charpol.poly import (
    SparsePolynomial,
    divide_by_variable_difference,
    poly_add,
    poly_mul,
    poly_scale,
    vandermonde_poly,
)
from charpol.linalg import vandermonde


def test_variable_product():
    x0 = SparsePolynomial.variable(1, 0)
    assert (x0 * x0).terms == {(2,): 1.0}


def test_multiply_by_zero_is_empty():
    p = SparsePolynomial(2, {(1, 0): 2.0, (0, 3): -1.0})
    assert (p * 0).is_zero()
    assert poly_scale(p, 0.0).is_zero()


def test_vandermonde_expansion_matches_direct_product():
    delta = vandermonde_poly(3, (0, 1, 2))
    assert delta.evaluate((3.0, 2.0, 1.0)) == pytest.approx(2.0)
    assert delta.evaluate((3.0, 2.0, 1.0)) == pytest.approx(vandermonde((3, 2, 1)))


def test_add_and_scale():
    p = SparsePolynomial(2, {(1, 0): 1.0})
    q = SparsePolynomial(2, {(1, 0): -1.0, (0, 1): 2.0})
    assert poly_add(p, q).terms == {(0, 1): 2.0}
    assert poly_scale(q, 0.5).terms == {(1, 0): -0.5, (0, 1): 1.0}


def test_mismatched_nvars_rejected():
    p = SparsePolynomial(2, {(1, 0): 1.0})
    q = SparsePolynomial(3, {(1, 0, 0): 1.0})
    with pytest.raises(ValueError):
        poly_mul(p, q)
    with pytest.raises(ValueError):
        poly_add(p, q)


def test_tiny_coefficients_pruned():
    p = SparsePolynomial(1, {(0,): 1e-310, (1,): 1.0})
    assert p.terms == {(1,): 1.0}


def test_power():
    x = SparsePolynomial.variable(1, 0) + 1.0
    cube = x**3
    assert cube.coefficient((0,)) == 1.0
    assert cube.coefficient((1,)) == 3.0
    assert cube.coefficient((2,)) == 3.0
    assert cube.coefficient((3,)) == 1.0


@st.composite
def small_polys(draw):
    nterms = draw(st.integers(1, 5))
    terms = {}
    for _ in range(nterms):
        exps = tuple(draw(st.integers(0, 4)) for _ in range(2))
        coeff = complex(
            draw(st.floats(-3, 3, allow_nan=False)), draw(st.floats(-3, 3, allow_nan=False))
        )
        terms[exps] = coeff
    return SparsePolynomial(2, terms)


@settings(max_examples=60, deadline=None)
@given(small_polys(), small_polys())
def test_evaluation_commutes_with_product(p, q):
    point = (0.7 - 0.2j, -1.1 + 0.4j)
    lhs = (p * q).evaluate(point)
    rhs = p.evaluate(point) * q.evaluate(point)
    assert abs(lhs - rhs) <= 1e-10 * max(1.0, abs(rhs))


def test_divide_by_variable_difference_exact():
    rng = np.random.default_rng(5)
    delta = vandermonde_poly(3, (0, 1, 2))
    q = divide_by_variable_difference(delta, 0, 1)
    for _ in range(10):
        x = rng.standard_normal(3)
        expected = (x[0] - x[2]) * (x[1] - x[2])
        assert q.evaluate(x) == pytest.approx(expected, rel=1e-12)


def test_max_degrees_and_total_degree():
    p = SparsePolynomial(3, {(2, 0, 1): 1.0, (0, 4, 0): 2.0})
    assert p.max_degrees() == (2, 4, 1)
    assert p.total_degree() == 4
