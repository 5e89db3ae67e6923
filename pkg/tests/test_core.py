"""Generating functions, the 1/g recurrence and the Appell coefficient oracle."""

import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from appell.core import (
    InvalidGeneratingFunction,
    PolynomialC,
    appell_coefficients,
    bernoulli,
    eval_rescaled_direct,
    from_roots,
    inverse_taylor,
    polynomial,
    rescaled_coefficients,
)
from appell.logcomplex import LogComplex


def test_inverse_taylor_examples():
    assert np.allclose(inverse_taylor(polynomial([1, -1]), 5), np.ones(6))  # 1/(1-z)
    assert np.allclose(inverse_taylor(polynomial([-2, 1]), 3), [-1 / 2, -1 / 4, -1 / 8, -1 / 16])
    b = inverse_taylor(bernoulli(), 6)  # z/(e^z-1) = sum B_k z^k/k!
    assert np.allclose(b, [1, -1 / 2, 1 / 12, 0, -1 / 720, 0, 1 / 30240])


def test_appell_examples():
    assert np.allclose(appell_coefficients(polynomial([1]), 4).coefficients, [0, 0, 0, 0, 1])
    b2 = appell_coefficients(bernoulli(), 2).coefficients
    assert np.allclose(b2, [1 / 6, -1, 1])
    p1 = appell_coefficients(polynomial([-2, 1]), 1)
    # 1/(z-2) = -1/2 - z/4 - ..., so p_1(x) = -x/2 - 1/4
    assert np.allclose(p1.coefficients, [-0.25, -0.5])
    assert eval_rescaled_direct(polynomial([-2, 1]), 1, 1.0).to_complex() == pytest.approx(-0.75)


@pytest.mark.parametrize("g", [polynomial([1, 2, 3]), from_roots([1, -1j, 2 + 1j]), bernoulli()])
def test_derivative_identity(g):
    for n in range(1, 12):
        dp = appell_coefficients(g, n).derivative().coefficients
        prev = appell_coefficients(g, n - 1).coefficients
        assert np.allclose(dp, n * prev, rtol=1e-12, atol=1e-12 * np.abs(dp).max())


def test_generating_function_identity():
    g = from_roots([1.5, -2j])
    x, z = 0.3 - 0.2j, 0.25
    total = sum(appell_coefficients(g, n)(x) * z**n / math.factorial(n) for n in range(40))
    assert abs(total - np.exp(x * z) / g(z)) < 1e-13


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 40), st.complex_numbers(min_magnitude=0.05, max_magnitude=2, allow_nan=False, allow_infinity=False))
def test_rescaled_matches_exact_rationals(n, x):
    g = polynomial([3, -1, 1])  # rational coefficients, so Fractions give an exact oracle
    c = [Fraction(1, 3)]
    gt = [Fraction(3), Fraction(-1), Fraction(1)]
    for k in range(1, n + 1):
        c.append(-sum(gt[j] * c[k - j] for j in range(1, min(k, 2) + 1)) / gt[0])
    with mpmath.workdps(80):
        xm = mpmath.mpc(x.real, x.imag)
        exact = mpmath.fsum(mpmath.mpf(c[n - j].numerator) / c[n - j].denominator * (n * xm) ** j / mpmath.factorial(j)
                            for j in range(n + 1))
        got = eval_rescaled_direct(g, n, x)
        assert got.rel_diff(LogComplex.from_mpc(exact)) < 1e-13


def test_rescaled_coefficients_scale():
    g = bernoulli()
    n = 6
    a = rescaled_coefficients(g, n)
    p = appell_coefficients(g, n).coefficients
    assert np.allclose(a, p * n ** np.arange(n + 1) / math.factorial(n))


def test_large_n_returns_log_coefficients():
    coeffs = appell_coefficients(polynomial([1, 1]), 200)
    assert isinstance(coeffs, list) and len(coeffs) == 201
    # top coefficient of p_n is c_0 = 1
    assert abs(coeffs[-1].to_complex() - 1) < 1e-12


def test_zeros_and_validation():
    g = from_roots([1, 1, 2])
    zs = g.zeros()
    assert len(zs) == 2
    assert abs(zs[0][0] - 1) < 1e-8 and zs[0][1] == 2 and abs(zs[1][0] - 2) < 1e-10 and zs[1][1] == 1
    g.check()
    with pytest.raises(InvalidGeneratingFunction):
        polynomial([0, 1])
    with pytest.raises(InvalidGeneratingFunction):
        polynomial([0, 0])
    with pytest.raises(ValueError):
        bernoulli().zeros()
    bz = bernoulli().zeros(13.0)
    assert sorted(abs(z.imag) for z, _ in bz) == pytest.approx([2 * math.pi] * 2 + [4 * math.pi] * 2)
    bernoulli().check(20.0)


@pytest.mark.parametrize("z", [0.0, 1e-9, 2.5 + 1j, -3 + 4j, 30 + 2j, -40 - 1j])
def test_bernoulli_g_and_reciprocal(z):
    g = bernoulli()
    ref = mpmath.expm1(mpmath.mpc(z)) / z if z else mpmath.mpf(1)
    assert abs(g(z) - complex(ref)) <= 1e-13 * abs(complex(ref))
    assert abs(g.reciprocal(z) - 1 / complex(ref)) <= 1e-13 / abs(complex(ref))
    for m in range(4):
        d = mpmath.diff(lambda t: mpmath.expm1(t) / t if t else 1, mpmath.mpc(z) if z else mpmath.mpf(1e-30), m)
        assert abs(g.deriv(m, z) - complex(d)) <= 1e-9 * max(1, abs(complex(d)))


def test_polynomial_c():
    p = PolynomialC(np.array([1, 2, 0, 0], dtype=complex))
    assert p.degree == 1 and p(2.0) == 5 and p.term_sum(2.0) == 5
    assert np.allclose(p.derivative().coefficients, [2])
