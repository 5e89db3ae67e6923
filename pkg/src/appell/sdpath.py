"""The steepest-descent curve through the saddle theta = 0 of exp(i*theta) - i*theta.

Points of the curve solve ``exp(i*theta) - i*theta = 1 - tau**2`` for real
tau.  For tau > 0 the solution with 0 < Re(theta) < pi is

    theta_+(tau) = i (1 - tau**2 + W(-exp(tau**2 - 1))),

with W the Lambert branch whose imaginary part lies in (-pi, 0).  Near
tau = 0 that branch has a square-root singularity, so a Taylor series in tau
(obtained from a complete-Bell-polynomial recurrence) is used instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .quadrature import gauss_kronrod

TAU_SWITCH = 0.05
TAYLOR_ORDER = 12

_SQRT2 = math.sqrt(2.0)

# 1 - s cot s + log(s / sin s) = sum _G_SERIES[k] s^(2k+2)
_G_SERIES = np.array([
    1 / 2, 1 / 36, 1 / 405, 1 / 4200, 1 / 42525, 691 / 294698250, 2 / 8513505,
    3617 / 153243090000, 43867 / 18463876806375, 174611 / 729204507281250,
])


@dataclass(frozen=True)
class SDPoint:
    tau: float
    theta: complex
    theta_prime: complex


@dataclass(frozen=True)
class SeriesCoeffs:
    """Derivatives theta^(k)(0), k = 1..K."""

    derivs: tuple[complex, ...]

    @property
    def taylor(self) -> np.ndarray:
        """Taylor coefficients [0, theta'(0), theta''(0)/2!, ...]."""
        out = np.zeros(len(self.derivs) + 1, dtype=complex)
        for k, d in enumerate(self.derivs, start=1):
            out[k] = d / math.factorial(k)
        return out


# ---------------------------------------------------------------------------
# tau(y) and the Lambert branch


def _g_of_s(s: np.ndarray) -> np.ndarray:
    """tau**2 as a function of s = -y in (0, pi)."""
    s = np.asarray(s, dtype=float)
    small = s < 0.5
    out = np.empty_like(s)
    ss = s[small] ** 2
    acc = np.zeros_like(ss)
    for c in _G_SERIES[::-1]:
        acc = acc * ss + c
    out[small] = acc * ss
    sb = s[~small]
    out[~small] = 1.0 - sb / np.tan(sb) + np.log(sb / np.sin(sb))
    return out


def _g_prime_of_s(s: np.ndarray) -> np.ndarray:
    return s / np.sin(s) ** 2 + 1.0 / s - 2.0 / np.tan(s)


def tau_of_y(y):
    """tau(y) = sqrt(1 - y cot y + log(y / sin y)) for y in (-pi, 0)."""
    y = np.asarray(y, dtype=float)
    if np.any((y <= -math.pi) | (y >= 0)):
        raise ValueError("y must lie in (-pi, 0)")
    out = np.sqrt(_g_of_s(-y))
    return out if out.shape else float(out)


def _solve_y(tau: np.ndarray) -> np.ndarray:
    """Unique y in (-pi, 0) with tau(y) = tau (vectorised safeguarded Newton)."""
    t2 = tau**2
    lo = np.full(tau.shape, 1e-12)
    hi = np.full(tau.shape, math.pi - 1e-12)
    # small tau: s ~ sqrt(2) tau; large tau: pi - s ~ pi / tau^2
    s = np.minimum(_SQRT2 * tau, math.pi - math.pi / (t2 + 2.0))
    s = np.clip(s, lo, hi)
    for _ in range(100):
        f = _g_of_s(s) - t2
        hi = np.where(f > 0, s, hi)
        lo = np.where(f <= 0, s, lo)
        step = f / _g_prime_of_s(s)
        cand = s - step
        bad = ~((cand > lo) & (cand < hi)) | ~np.isfinite(cand)
        new = np.where(bad, 0.5 * (lo + hi), cand)
        done = np.abs(new - s) <= 4e-16 * np.maximum(s, 1e-300)
        s = new
        if np.all(done):
            break
    return -s


def _polish_theta(theta: np.ndarray, tau: np.ndarray, steps: int = 2) -> np.ndarray:
    """Newton on h(theta) = exp(i theta) - i theta - 1 + tau^2."""
    for _ in range(steps):
        em1 = np.expm1(1j * theta)
        h = em1 - 1j * theta + tau**2
        theta = theta - h / (1j * em1)
    return theta


def lambert_branch(tau: float) -> complex:
    """W(-exp(tau^2 - 1)) on the branch with imaginary part in (-pi, 0).

    This is the classical W_{-1} branch at these arguments.
    """
    tau = float(tau)
    if not tau > 0:
        raise ValueError("lambert_branch needs tau > 0 (tau = 0 is the branch point)")
    y = float(_solve_y(np.array([tau]))[0])
    w = complex(-y / math.tan(y), y)
    theta = _polish_theta(np.array([1j * (1 - tau * tau + w)]), np.array([tau]))[0]
    w = complex(-1j * theta) - 1 + tau * tau
    resid = abs(w * np.exp(w) + math.exp(tau * tau - 1))
    if resid > 1e-10 * math.exp(tau * tau - 1):
        raise ArithmeticError(f"Lambert branch solve failed at tau={tau}: residual {resid:.2e}")
    return w


# ---------------------------------------------------------------------------
# Taylor series at the saddle


@lru_cache(maxsize=16)
def theta_taylor_coeffs(K: int = TAYLOR_ORDER) -> SeriesCoeffs:
    """theta^(k)(0) for k = 1..K from the complete Bell polynomial recurrence.

    With a_k = i theta^(k)(0), matching Taylor coefficients of
    exp(i theta(tau)) = 1 - tau^2 + i theta(tau) gives a_1^2 = -2 and
    Y_n(a_1..a_n) = a_n for n >= 3.  Y_n - a_n is linear in a_{n-1} with
    coefficient n a_1, so level n fixes a_{n-1}.
    """
    if K < 1:
        raise ValueError("K must be >= 1")
    a = [0j] * (K + 2)  # a[k] for k = 1..K+1; a[0] unused
    a[1] = 1j * _SQRT2
    for m in range(2, K + 1):
        a[m] = 0j
        a[m + 1] = 0j
        rest = _bell(a, m + 1) - a[m + 1]
        a[m] = -rest / ((m + 1) * a[1])
    return SeriesCoeffs(tuple(complex(-1j * a[k]) for k in range(1, K + 1)))


def _bell(a: list[complex], n: int) -> complex:
    """Complete Bell polynomial Y_n(a_1, ..., a_n) via Y_{m+1} = sum C(m,k) Y_{m-k} a_{k+1}."""
    Y = [1 + 0j]
    for m in range(n):
        Y.append(sum(math.comb(m, k) * Y[m - k] * a[k + 1] for k in range(m + 1)))
    return Y[n]


# ---------------------------------------------------------------------------
# the full parametrisation


def theta_path(tau) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised theta(tau) and theta'(tau) for real tau (any sign)."""
    tau = np.atleast_1d(np.asarray(tau, dtype=float))
    theta = np.empty(tau.shape, dtype=complex)
    dtheta = np.empty(tau.shape, dtype=complex)
    at = np.abs(tau)

    near = at <= TAU_SWITCH
    if np.any(near):
        coef = theta_taylor_coeffs(TAYLOR_ORDER).taylor
        dcoef = coef[1:] * np.arange(1, coef.size)
        t = tau[near]
        acc = np.zeros(t.shape, dtype=complex)
        for c in coef[::-1]:
            acc = acc * t + c
        dacc = np.zeros(t.shape, dtype=complex)
        for c in dcoef[::-1]:
            dacc = dacc * t + c
        theta[near] = acc
        dtheta[near] = dacc

    far = ~near
    if np.any(far):
        t = at[far]
        y = _solve_y(t)
        w = -y / np.tan(y) + 1j * y
        th = _polish_theta(1j * (1 - t**2 + w), t)
        dth = 2j * t / (1j * th - t**2)
        neg = tau[far] < 0
        theta[far] = np.where(neg, -np.conj(th), th)
        dtheta[far] = np.where(neg, np.conj(dth), dth)
    return theta, dtheta


def theta_of_tau(tau: float) -> SDPoint:
    theta, dtheta = theta_path(np.array([float(tau)]))
    if tau == 0:
        return SDPoint(0.0, 0j, complex(_SQRT2))
    return SDPoint(float(tau), complex(theta[0]), complex(dtheta[0]))


def psi(theta):
    """Signed position of theta relative to the curve: > 0 above, 0 on, < 0 below.

    Im(theta) - log(sin X / X) with X = Re(theta) (just Im(theta) when X = 0).
    """
    th = np.asarray(theta, dtype=complex)
    X = th.real
    if np.any(np.abs(X) >= math.pi):
        raise ValueError("psi needs |Re(theta)| < pi")
    Xs = np.where(X == 0, 1.0, X)
    out = np.where(X == 0, th.imag, th.imag - np.log(np.sin(Xs) / Xs))
    return out if out.shape else float(out)


def tau_for_theta(theta: complex) -> complex:
    """tau (possibly complex) with theta(tau) = theta, from tau^2 = 1 + i theta - exp(i theta).

    The sign follows theta ~ sqrt(2) tau near the saddle and Re(theta) > 0 for tau > 0.
    """
    theta = complex(theta)
    t2 = -(np.expm1(1j * theta) - 1j * theta)
    t = complex(np.sqrt(t2))
    if (t * theta.conjugate()).real < 0:
        t = -t
    return t


# ---------------------------------------------------------------------------
# contour-integral validators (slow; diagnostics only)


def _rectangle_integral(f, x0: float, x1: float, y0: float, y1: float, rtol: float) -> complex:
    """Counter-clockwise integral of f(z) dz round [x0, x1] x [y0, y1]."""
    def seg(a: complex, b: complex) -> complex:
        d = b - a
        return d * gauss_kronrod(lambda t: f(a + d * t), 0.0, 1.0, rtol=rtol, max_intervals=4000).value

    c = [complex(x0, y0), complex(x1, y0), complex(x1, y1), complex(x0, y1)]
    return sum(seg(c[i], c[(i + 1) % 4]) for i in range(4))


def lambert_branch_contour(tau: float, right: float | None = None, rtol: float = 1e-12) -> complex:
    """W(z) = z/(2 pi i) * contour integral of (xi + 1)/(xi e^xi - z) round Re > -1, -pi < Im < 0.

    The region is cut at Re(xi) = ``right``, where the integrand is negligible.
    """
    z = -math.exp(tau * tau - 1)
    if right is None:
        right = 40.0 + tau * tau

    def f(xi):
        with np.errstate(over="ignore"):
            return (xi + 1) / (xi * np.exp(xi) - z)

    return z / (2j * math.pi) * _rectangle_integral(f, -1.0, right, -math.pi, 0.0, rtol)


def theta_plus_contour(tau: float, depth: float = 45.0, rtol: float = 1e-12) -> complex:
    """theta_+(tau) = (1/2pi) * contour integral round 0 < Re < pi, Im < 0 (cut at Im = -depth)."""
    t2 = tau * tau

    def f(xi):
        with np.errstate(over="ignore", invalid="ignore"):
            out = xi * (1j * xi - t2) / (np.exp(1j * xi) - 1j * xi - 1 + t2)
        return np.where(np.isfinite(out), out, 0.0)

    return _rectangle_integral(f, 0.0, math.pi, -depth, 0.0, rtol) / (2 * math.pi)
