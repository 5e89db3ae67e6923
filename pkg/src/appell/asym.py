"""Large-n expansions of pi_n(x)/n!.

The saddle contribution comes from Watson's lemma applied to the
steepest-descent integral: with theta'(tau)/g(e^{i theta(tau)}/x) = sum a_k tau^k,

    (e x)^n/(2 pi) int e^{-n tau^2} sum a_k tau^k dtau
        = (e x)^n n^{-1/2} sum_j a_{2j} Gamma(j + 1/2) / (2 pi) n^{-j}.

When 1/x is a simple zero of g the integrand has a pole at tau = 0; its
principal value keeps only the odd Laurent coefficients.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from . import series as ps
from .contour import Position, theta_of_zero, _axis_position
from .core import TOL_ZERO, GeneratingFunction
from .logcomplex import LogComplex, log_sum
from .sdpath import theta_taylor_coeffs

BOUNDARY_MARGIN = 1e-9


@dataclass(frozen=True)
class AsymptoticTerm:
    """scale * n^power * (series[0] + series[1]/n + ...), a contribution to pi_n(x)/n!.

    ``scale`` carries every n-th power, e.g. (e x)^n for the saddle or
    (e^{zeta x}/zeta)^n for a residue.
    """

    kind: str  # "saddle", "saddle_pole" or "residue"
    scale: LogComplex
    power: float
    series: tuple[complex, ...]
    n: int
    zeta: complex | None = None
    order: int = 1
    flags: tuple[str, ...] = ()

    def value(self, terms: int | None = None) -> LogComplex:
        s = self.series if terms is None else self.series[:terms]
        acc = sum(c / self.n**k for k, c in enumerate(s))
        return self.scale * LogComplex(self.power * math.log(self.n)) * LogComplex.from_complex(acc)

    def leading(self) -> LogComplex:
        return self.value(1)

    @property
    def log_rate(self) -> float:
        """log|scale|/n, the exponential growth rate used for dominance."""
        return self.scale.log_mag / self.n


def g_derivs_at_inverse(g: GeneratingFunction, x: complex, m: int) -> np.ndarray:
    """[g(1/x), g'(1/x), ..., g^(m)(1/x)]."""
    w = 1 / complex(x)
    return np.array([complex(g.deriv(k, w)) for k in range(m + 1)])


def integrand_series(g: GeneratingFunction, x: complex, order: int) -> tuple[np.ndarray, bool]:
    """tau-series of theta'(tau)/g(e^{i theta(tau)}/x).

    Returns (coeffs, pole).  With pole=True the coefficients b_k belong to
    tau^(k-1), i.e. the integrand has a simple pole at tau = 0.
    """
    x = complex(x)
    M = order + 2
    theta = ps.as_series(theta_taylor_coeffs(max(M, 2)).taylor, M)
    dtheta = ps.derivative(theta)
    w = ps.exp(1j * theta) / x  # e^{i theta}/x, constant term 1/x
    dw = w.copy()
    dw[0] = 0.0
    derivs = g_derivs_at_inverse(g, x, M)
    local = derivs / np.array([math.factorial(k) for k in range(M + 1)])
    G = ps.compose(local, dw)
    scale = max(1.0, float(np.max(np.abs(derivs))))
    if abs(derivs[0]) > TOL_ZERO * scale:
        return ps.mul(dtheta, ps.reciprocal(G))[: order + 1], False
    if abs(derivs[1]) <= TOL_ZERO * scale:
        raise ValueError(f"1/x = {1 / x} is a zero of order >= 2; no expansion available")
    H = ps.shift_down(G, 1)[:M]
    return ps.mul(dtheta[:M], ps.reciprocal(H))[: order + 1], True


def asymp_steepest(g: GeneratingFunction, n: int, x: complex, terms: int = 2) -> AsymptoticTerm:
    """Watson-lemma expansion of the steepest-descent integral term, ``terms`` orders in 1/n."""
    x = complex(x)
    if x == 0:
        raise ValueError("x = 0 is not allowed")
    coeffs, pole = integrand_series(g, x, 2 * terms + 1)
    idx = [2 * j + 1 if pole else 2 * j for j in range(terms)]
    ser = tuple(complex(coeffs[k] * math.gamma(j + 0.5) / (2 * math.pi)) for j, k in enumerate(idx))
    scale = LogComplex(float(n)) * LogComplex.from_complex(x) ** n
    return AsymptoticTerm("saddle_pole" if pole else "saddle", scale, -0.5, ser, n)


def asymp_steepest_two_term(g: GeneratingFunction, n: int, x: complex) -> AsymptoticTerm:
    return asymp_steepest(g, n, x, terms=2)


def two_term_closed_form(g: GeneratingFunction, n: int, x: complex) -> complex:
    """The explicit two-term formula in g_k = g^(k)(1/x) (regular case), as a plain complex.

    (e x)^n / sqrt(2 pi n) * [1/g0 - (1/(12 g0) + g1^2/(x^2 g0^3) - g2/(2 x^2 g0^2)) / n]
    """
    g0, g1, g2 = g_derivs_at_inverse(g, x, 2)
    bracket = 1 / g0 - (1 / (12 * g0) + g1**2 / (x**2 * g0**3) - g2 / (2 * x**2 * g0**2)) / n
    return (cmath.exp(1) * x) ** n / math.sqrt(2 * math.pi * n) * bracket


def two_term_pole_closed_form(g: GeneratingFunction, n: int, x: complex) -> complex:
    """Explicit two-term PV formula when 1/x is a simple zero of g."""
    _, g1, g2, g3, g4 = g_derivs_at_inverse(g, x, 4)
    lead = -(4 * x * g1 + 3 * g2) / (3 * g1**2)
    nxt = (92 * x**3 * g1**3 + 135 * g2**3 - 180 * g1 * g2 * g3 + 45 * g1**2 * (x**2 * g2 + g4)) / (540 * x**2 * g1**4)
    return (cmath.exp(1) * x) ** n / (2 * math.sqrt(2 * math.pi * n)) * (lead + nxt / n)


def residue_asymptotic(g: GeneratingFunction, n: int, x: complex, zeta: complex, p: int, weight: float) -> AsymptoticTerm:
    """Leading large-n form of -i w x^n Res(F; theta_k) for a zero of order p.

    Res ~ c_k (i zeta x - i)^(p-1) n^(p-1) (e^{zeta x}/(zeta x))^n with
    c_k = p / (g^(p)(zeta) (i zeta)^p).
    """
    c = p / (complex(g.deriv(p, zeta)) * (1j * zeta) ** p)
    lead = -1j * weight * c * (1j * (zeta * x - 1)) ** (p - 1)
    scale = LogComplex.from_log(n * (zeta * x - cmath.log(zeta)))
    return AsymptoticTerm("residue", scale, float(p - 1), (lead,), n, zeta=zeta, order=p)


def asymp_theorem1_terms(g: GeneratingFunction, n: int, x: complex) -> list[AsymptoticTerm]:
    """Saddle term plus one term per zero with |zeta x| <= 1, most dominant first.

    Terms whose growth rates tie within BOUNDARY_MARGIN carry the flag
    "boundary": x sits on a dominance boundary and the expansion is not uniform.
    """
    x = complex(x)
    if x == 0:
        raise ValueError("x = 0 is not allowed")
    terms = [asymp_steepest(g, n, x, terms=2)]
    radius = (1 + 2e-12) / abs(x)
    for zeta, p in g.zeros(radius):
        pos = _axis_position(zeta, x)
        if pos is Position.BELOW:
            continue
        terms.append(residue_asymptotic(g, n, x, zeta, p, pos.weight))
    terms.sort(key=lambda t: -t.log_rate)
    if len(terms) > 1 and terms[0].log_rate - terms[1].log_rate < BOUNDARY_MARGIN:
        top = terms[0].log_rate
        terms = [
            AsymptoticTerm(t.kind, t.scale, t.power, t.series, t.n, t.zeta, t.order, t.flags + ("boundary",))
            if top - t.log_rate < BOUNDARY_MARGIN else t
            for t in terms
        ]
    return terms


def asymptotic_total(terms: list[AsymptoticTerm], order: int | None = None) -> LogComplex:
    return log_sum([t.value(order) for t in terms])
