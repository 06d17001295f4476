"""Scalar jet layer: exactness, Leibniz, and the finite-difference oracle."""

import random
from fractions import Fraction as F

import pytest

from liecartan.scalars import (Jet, JetOrderError, MalformedFieldError,
                               Polynomial, finite_difference_check, jet_at,
                               poly_field)


def test_product_rule_on_xy():
    f = poly_field(2, [((1, 1), F(1))])
    j = jet_at(f, (F(1), F(2)), 1)
    assert j.value == 2
    assert j.grad() == [2, 1]


def test_zero_polynomial_everywhere():
    f = poly_field(3, [])
    j = jet_at(f, (F(5), F(-7), F(13)), 3)
    assert j.value == 0
    assert j.terms == {}


def test_square_derivatives():
    f = poly_field(1, [((2,), F(1))])
    j = jet_at(f, (F(3),), 2)
    assert (j.value, j.deriv((0,)), j.deriv((0, 0))) == (9, 6, 2)


def test_cube_derivatives():
    f = poly_field(1, [((3,), F(1))])
    j = jet_at(f, (F(2),), 3)
    assert (j.value, j.deriv((0,)), j.deriv((0, 0)), j.deriv((0, 0, 0))) \
        == (8, 12, 12, 6)


def test_xy_hessian_off_diagonal():
    f = poly_field(2, [((1, 1), F(1))])
    j = jet_at(f, (F(0), F(0)), 2)
    assert j.value == 0
    assert j.grad() == [0, 0]
    assert j.hessian() == [[0, 1], [1, 0]]


def test_constant_field_all_orders():
    f = poly_field(2, [((0, 0), F(5))])
    j = jet_at(f, (F(9), F(-4)), 3)
    assert j.value == 5
    assert all(v == 0 for e, v in j.terms.items() if sum(e) > 0)


def test_duplicate_monomials_are_summed():
    f = poly_field(1, [((1,), F(2)), ((1,), F(3))])
    assert f.terms == {(1,): F(5)}


def test_negative_exponent_rejected():
    with pytest.raises(MalformedFieldError):
        poly_field(2, [((1, -1), F(1))])


def test_order_above_three_rejected():
    f = poly_field(1, [((1,), F(1))])
    with pytest.raises(JetOrderError):
        jet_at(f, (F(0),), 4)


def _random_poly(rng, n, deg=3, terms=5):
    out = {}
    for _ in range(terms):
        e = [0] * n
        for _ in range(rng.randint(0, deg)):
            e[rng.randrange(n)] += 1
        out[tuple(e)] = out.get(tuple(e), 0) + F(rng.randint(-3, 3))
    return Polynomial(n, out)


def test_leibniz_exact_on_random_pairs():
    rng = random.Random(19)
    for _ in range(30):
        n = rng.randint(1, 5)
        f = _random_poly(rng, n)
        g = _random_poly(rng, n)
        pt = tuple(F(rng.randint(-2, 2), rng.choice([1, 2, 3])) for _ in range(n))
        direct = jet_at(f * g, pt, 3)
        via_product = jet_at(f, pt, 3) * jet_at(g, pt, 3)
        assert direct.terms == via_product.terms


def test_partial_arrays_symmetric():
    rng = random.Random(5)
    for _ in range(10):
        n = rng.randint(2, 4)
        f = _random_poly(rng, n)
        j = jet_at(f, tuple(F(rng.randint(-2, 2)) for _ in range(n)), 3)
        h = j.hessian()
        t = j.third()
        for i in range(n):
            for k in range(n):
                assert h[i][k] == h[k][i]
                for m in range(n):
                    assert t[i][k][m] == t[k][i][m] == t[i][m][k]


def test_finite_difference_oracle_square():
    f = poly_field(1, [((2,), F(1))])
    assert finite_difference_check(f, (1.0,), 1e-4) <= 1e-6


def test_finite_difference_oracle_xy():
    f = poly_field(2, [((1, 1), F(1))])
    assert finite_difference_check(f, (1.0, 1.0), 1e-4) <= 1e-6


def test_finite_difference_constant_is_noise_free():
    f = poly_field(1, [((0,), F(7))])
    assert finite_difference_check(f, (0.3,), 1e-4) <= 1e-12


def test_jet_evaluation_is_deterministic():
    f = poly_field(2, [((2, 1), F(3, 7)), ((0, 1), F(-2))])
    pt = (F(1, 3), F(5, 2))
    assert jet_at(f, pt, 3).terms == jet_at(f, pt, 3).terms


def test_substitute_composes_polynomials():
    f = poly_field(2, [((2, 0), F(1))])          # x^2
    g = poly_field(2, [((0, 1), F(1)), ((0, 0), F(1))])   # y + 1
    comp = f.substitute({0: g})                  # (y+1)^2
    assert comp.eval((F(9), F(2))) == 9
