import numpy as np
import pytest
from hypothesis import given, strategies as st
from numpy.polynomial import chebyshev as C

from mna.net import count_resources, evaluate, evaluate_batch, hidden_states
from mna.poly import (Polynomial, chebyshev_to_monomial, horner_eval, realize, realize_chebyshev_poly,
                      realize_monomial_poly)

coeff_lists = st.lists(st.floats(-1, 1, allow_nan=False), min_size=1, max_size=14)


def test_horner_examples():
    assert horner_eval(Polynomial((1, 2, 3)), 0.5) == 2.75
    assert horner_eval(Polynomial((4.0, 9.0, -2.0)), 0.0) == 4.0
    assert horner_eval(Polynomial((0,) * 7 + (1,)), 2.0) == 128.0


def test_constant_polynomial():
    net = realize_monomial_poly(Polynomial((0.37,)))
    assert count_resources(net) == (1, 0)
    x = np.random.default_rng(0).uniform(-5, 5, 100)
    np.testing.assert_array_equal(evaluate_batch(net, x), 0.37)


def test_square():
    assert evaluate(realize_monomial_poly(Polynomial((0, 0, 1))), 2.0) == 4.0


def test_degree_twelve_against_horner():
    p = Polynomial(np.random.default_rng(1).uniform(-1, 1, 13))
    x = np.linspace(-1, 1, 1000)
    ref = horner_eval(p, x)
    got = evaluate_batch(realize_monomial_poly(p), x)
    assert np.all(np.abs(got - ref) <= 1e-10 * (1 + np.abs(ref)))


@given(coeff_lists)
def test_layer_states(coeffs):
    p = Polynomial(coeffs)
    net = realize_monomial_poly(p)
    x = np.random.default_rng(len(coeffs)).uniform(-1, 1, 50)
    for i, h in enumerate(hidden_states(net, x), start=1):
        expect = np.stack([x, x ** (i + 1), horner_eval(p.truncated(i), x)], axis=1)
        np.testing.assert_allclose(h, expect, rtol=1e-10, atol=1e-12)


@given(coeff_lists)
def test_resource_laws(coeffs):
    n = len(coeffs) - 1
    mono = realize_monomial_poly(Polynomial(coeffs))
    cheb = realize_chebyshev_poly(Polynomial(coeffs, "chebyshev", 2.0))
    if n == 0:
        assert count_resources(mono) == count_resources(cheb) == (1, 0)
    else:
        assert count_resources(mono) == (n + 1, 3 * n)
        assert count_resources(cheb) == (n + 1, 4 * n)


def test_zero_leading_coefficient_keeps_nominal_degree():
    assert count_resources(realize_monomial_poly(Polynomial((1, 2, 0, 0)))) == (4, 9)


def test_chebyshev_small_cases():
    assert evaluate(realize_chebyshev_poly(Polynomial((1.0,), "chebyshev")), 0.3) == 1.0
    assert evaluate(realize_chebyshev_poly(Polynomial((0.0, 1.0), "chebyshev")), 0.7) == pytest.approx(0.7, abs=1e-15)


def test_chebyshev_layer_states():
    a = np.random.default_rng(2).uniform(-1, 1, 9)
    M = 3.0
    net = realize_chebyshev_poly(Polynomial(a, "chebyshev", M))
    x = np.linspace(-M, M, 40)
    u = x / M
    for k, h in enumerate(hidden_states(net, x), start=1):
        Tk = C.chebval(u, np.eye(k + 1)[k])
        Tkm = C.chebval(u, np.eye(k)[k - 1])
        partial = C.chebval(u, a[:k])
        np.testing.assert_allclose(h, np.stack([u, Tk, Tkm, partial], axis=1), atol=1e-12)


def test_degree_thirty_chebyshev_is_stable_where_monomial_is_not():
    # Seed 41 is an ill-conditioned instance from a scan of random degree-30 coefficient vectors.
    a = np.random.default_rng(41).uniform(-1, 1, 31)
    p = Polynomial(a, "chebyshev")
    x = np.linspace(-1, 1, 1000)
    ref = C.chebval(x, a)  # Clenshaw
    assert np.max(np.abs(evaluate_batch(realize_chebyshev_poly(p), x) - ref)) <= 1e-10
    mono = realize_monomial_poly(chebyshev_to_monomial(p))
    assert np.max(np.abs(evaluate_batch(mono, x) - ref)) > 1e-6


@given(st.lists(st.floats(-1, 1, allow_nan=False), min_size=1, max_size=11), st.floats(1, 4))
def test_basis_equivalence(a, M):
    p = Polynomial(a, "chebyshev", M)
    x = np.linspace(-M, M, 200)
    mono = evaluate_batch(realize_monomial_poly(chebyshev_to_monomial(p)), x)
    cheb = evaluate_batch(realize_chebyshev_poly(p), x)
    np.testing.assert_allclose(mono, cheb, atol=1e-8)


def test_realize_threshold():
    low = Polynomial(np.ones(13), "chebyshev")
    high = Polynomial(np.ones(14), "chebyshev")
    assert realize(low).neurons == 3 * 12
    assert realize(high).neurons == 4 * 13


def test_invalid_polynomials():
    with pytest.raises(ValueError):
        Polynomial(())
    with pytest.raises(ValueError):
        Polynomial((1.0,), "chebyshev", 0.0)
    with pytest.raises(ValueError):
        Polynomial((1.0, float("nan")))
