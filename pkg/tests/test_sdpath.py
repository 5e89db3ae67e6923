"""The steepest-descent path theta(tau), its Taylor data and the curve test psi."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.special import lambertw

from appell.sdpath import (
    lambert_branch,
    lambert_branch_contour,
    psi,
    tau_for_theta,
    theta_of_tau,
    theta_path,
    theta_plus_contour,
    theta_taylor_coeffs,
    tau_of_y,
)

SQ2 = math.sqrt(2)
# printed Taylor expansion through tau^8
PRINTED = [0, SQ2, -1j / 3, -1 / (9 * SQ2), 2j / 135, 1 / (540 * SQ2), 4j / 8505,
           139 / (340200 * SQ2), -2j / 25515]

taus = st.floats(min_value=-6, max_value=6, allow_nan=False)


def test_taylor_matches_printed_series():
    t = theta_taylor_coeffs(8).taylor
    assert np.allclose(t, PRINTED, rtol=1e-13, atol=1e-16)


@settings(max_examples=200)
@given(taus)
def test_path_satisfies_defining_equation(tau):
    th, dth = theta_path(tau)
    th, dth = th[0], dth[0]
    assert abs(np.exp(1j * th) - 1j * th - (1 - tau * tau)) < 1e-12 * max(1, tau * tau)
    assert -math.pi < th.real < math.pi
    # implicit derivative: (i e^{i theta} - i) theta' = -2 tau
    assert abs((1j * np.exp(1j * th) - 1j) * dth + 2 * tau) < 1e-11 * max(1, abs(tau))
    # the path is the curve itself
    assert abs(psi(th)) < 1e-10 * max(1, abs(th))


@pytest.mark.parametrize("tau", [-3.0, -0.4, -0.05, -1e-3, 1e-3, 0.03, 0.05, 0.07, 0.8, 4.0])
def test_derivative_by_finite_difference(tau):
    h = 1e-6
    th_p, _ = theta_path(tau + h)
    th_m, _ = theta_path(tau - h)
    _, d = theta_path(tau)
    assert abs((th_p[0] - th_m[0]) / (2 * h) - d[0]) < 1e-7


def test_real_part_monotone_and_symmetric():
    t = np.linspace(-8, 8, 2001)
    th, _ = theta_path(t)
    assert np.all(np.diff(th.real) > 0)
    assert np.all(th.imag <= 1e-15)
    assert np.allclose(theta_path(-t)[0], -np.conj(th), atol=1e-13)
    assert theta_of_tau(0.0).theta == 0 and abs(theta_of_tau(0.0).theta_prime - SQ2) < 1e-15


@pytest.mark.parametrize("tau", [0.01, 0.2, 1.0, 2.5, 5.0])
def test_lambert_branch_against_scipy(tau):
    w = lambert_branch(tau)
    ref = complex(lambertw(-math.exp(tau * tau - 1), k=-1))
    assert -math.pi < w.imag < 0
    assert abs(w - ref) < 1e-12 * max(1, abs(ref))


@pytest.mark.parametrize("tau", [0.3, 1.5])
def test_contour_integral_forms(tau):
    assert abs(lambert_branch_contour(tau) - lambert_branch(tau)) < 1e-9
    assert abs(theta_plus_contour(tau) - theta_of_tau(tau).theta) < 1e-9


def test_psi_sign_and_domain():
    assert psi(0.5j) > 0 and psi(-0.5j) < 0 and psi(0j) == 0
    X = 2.0
    on = complex(X, math.log(math.sin(X) / X))
    assert abs(psi(on)) < 1e-15
    assert psi(on + 1e-6j) > 0 and psi(on - 1e-6j) < 0
    with pytest.raises(ValueError):
        psi(complex(math.pi, 0))


@settings(max_examples=100)
@given(st.floats(min_value=0.01, max_value=3.0))
def test_tau_for_theta_inverts_path(tau):
    th = theta_of_tau(tau).theta
    assert abs(tau_for_theta(th) - tau) < 1e-9
    assert abs(tau_for_theta(theta_of_tau(-tau).theta) + tau) < 1e-9


def test_tau_of_y_limits():
    with pytest.raises(ValueError):
        tau_of_y(0.0)
    assert tau_of_y(-1e-4) < 1e-3
    assert tau_of_y(-math.pi + 1e-6) > 3
