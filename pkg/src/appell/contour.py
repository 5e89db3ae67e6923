"""pi_n(x)/n! as a principal-value integral over theta in [-pi, pi] plus residues.

    pi_n(x)/n! = x^n/(2 pi) * ( PV int_{-pi}^{pi} F(theta) dtheta
                                - 2 pi i sum_k w_k Res(F; theta_k) ),
    F(theta) = exp(n (e^{i theta} - i theta)) / g(e^{i theta}/x),

where theta_k = Arg(x zeta_k) - i log|x zeta_k| for each zero zeta_k of g and
w_k is 1 above the real axis, 1/2 on it, 0 below.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass, field

import numpy as np

from . import series as ps
from .core import GeneratingFunction
from .logcomplex import LogComplex, log_sum
from .quadrature import gauss_kronrod
from .sdpath import psi

TOL_ON = 1e-12
TOL_ON_C = 1e-12
# poles closer than this (in Im theta) to the integration path get their pole part subtracted
NEAR_BAND = 0.25
QUAD_RTOL = 1e-10


class Position(enum.Enum):
    ABOVE = "above"
    ON = "on"
    BELOW = "below"

    @property
    def weight(self) -> float:
        return {Position.ABOVE: 1.0, Position.ON: 0.5, Position.BELOW: 0.0}[self]


class DegenerateSingularity(ValueError):
    """A pole of order >= 2 lies on the integration path."""


class InfiniteSingularities(ValueError):
    """Infinitely many residues would contribute (use the closed form instead)."""


@dataclass(frozen=True)
class Singularity:
    theta: complex
    zeta: complex
    order: int
    axis: Position
    curve: Position

    def position(self, reference: str) -> Position:
        return self.axis if reference == "real_axis" else self.curve


@dataclass(frozen=True)
class ResidueTerm:
    singularity: Singularity
    value: LogComplex  # Res(F; theta_k), F including exp(n(...))
    weight: float


@dataclass
class RepresentationBreakdown:
    theorem: int
    n: int
    x: complex
    integral: LogComplex  # PV integral, exp(n) included
    residues: list[ResidueTerm]
    prefactor: LogComplex  # x^n / (2 pi)
    total: LogComplex
    diagnostics: dict = field(default_factory=dict)

    def residue_sum(self) -> LogComplex:
        return log_sum([r.value * r.weight for r in self.residues if r.weight])

    def assemble(self) -> LogComplex:
        """prefactor * (integral - 2 pi i sum w_k Res_k)."""
        return self.prefactor * (self.integral + LogComplex.from_complex(-2j * math.pi) * self.residue_sum())

    @property
    def value(self) -> complex:
        return self.total.to_complex()


# ---------------------------------------------------------------------------
# singularity bookkeeping


def theta_of_zero(zeta: complex, x: complex) -> complex:
    """The zero of g(e^{i theta}/x) coming from zeta inside Re(theta) in (-pi, pi]."""
    w = x * zeta
    return complex(cmath.phase(w), -math.log(abs(w)))


def _axis_position(zeta: complex, x: complex) -> Position:
    r = abs(zeta * x)
    if abs(r - 1.0) <= TOL_ON:
        return Position.ON
    return Position.ABOVE if r < 1.0 else Position.BELOW


def _curve_position(theta: complex) -> Position:
    if theta.real >= math.pi or theta.real <= -math.pi:
        # the curve approaches Re = +-pi only as Im -> -inf
        return Position.ABOVE
    s = float(psi(theta))
    if abs(s) <= TOL_ON_C * max(1.0, abs(theta)):
        return Position.ON
    return Position.ABOVE if s > 0 else Position.BELOW


def curve_radius(g: GeneratingFunction, x: complex) -> float:
    """Radius containing every zero whose theta lies on or above the curve."""
    if g.zero_directions is None:
        return math.inf
    best = 0.0
    for d in g.zero_directions:
        X = cmath.phase(x * cmath.exp(1j * d))
        if abs(abs(X) - math.pi) < 1e-14:
            raise InfiniteSingularities(
                f"{g.name}: all zeros on the ray arg={d:.4f} lie above the curve for x={x}")
        ratio = 1.0 if X == 0 else X / math.sin(X)
        best = max(best, ratio / abs(x))
    return best * (1 + 1e-9)


def _classify(zeta: complex, p: int, x: complex) -> Singularity:
    th = theta_of_zero(zeta, x)
    return Singularity(th, zeta, p, _axis_position(zeta, x), _curve_position(th))


def theta_singularities(g: GeneratingFunction, x: complex, reference: str = "real_axis") -> list[Singularity]:
    """Singularities on or above the chosen reference path, by descending Im(theta)."""
    x = complex(x)
    if x == 0:
        raise ValueError("x = 0 is not allowed")
    if reference == "real_axis":
        radius = (1.0 + 2 * TOL_ON) / abs(x)
        sings = [_classify(z, p, x) for z, p in g.zeros(radius)]
        sings = [s for s in sings if s.axis is not Position.BELOW]
    elif reference == "curve_C":
        radius = curve_radius(g, x)
        sings = [_classify(z, p, x) for z, p in g.zeros(radius)]
        sings = [s for s in sings if s.curve is not Position.BELOW]
    else:
        raise ValueError(f"unknown reference {reference!r}")
    sings.sort(key=lambda s: -s.theta.imag)
    return sings


# ---------------------------------------------------------------------------
# residues


def residue(g: GeneratingFunction, n: int, x: complex, sing: Singularity) -> LogComplex:
    """Res of exp(n(e^{i theta} - i theta))/g(e^{i theta}/x) at sing.theta.

    Simple poles: exp(n(x zeta - i theta_k)) / (i zeta g'(zeta)).  Order p:
    expand both factors in u = theta - theta_k and read off u^(p-1).
    """
    zeta, p, th = sing.zeta, sing.order, sing.theta
    xz = x * zeta
    expo = n * xz - 1j * n * th
    if p == 1:
        return LogComplex.from_log(expo - cmath.log(1j * zeta * complex(g.deriv(1, zeta))))
    order = 2 * p - 1
    # e^{iu} - 1 as a series in u
    e = np.array([(1j) ** k / math.factorial(k) for k in range(order + 1)], dtype=complex)
    e[0] = 0
    local = np.array([complex(g.deriv(m, zeta)) / math.factorial(m) for m in range(order + 1)])
    G = ps.compose(local, zeta * e)
    Gs = ps.shift_down(G, p)[:p]
    u = np.zeros(p, dtype=complex)
    if p > 1:
        u[1] = 1.0
    N = ps.exp(n * (xz * e[:p] - 1j * u))
    q = ps.mul(N, ps.reciprocal(Gs))[p - 1]
    return LogComplex.from_log(expo) * LogComplex.from_complex(q)


def residue_terms(g, n, x, sings, reference: str) -> list[ResidueTerm]:
    return [ResidueTerm(s, residue(g, n, x, s), s.position(reference).weight) for s in sings]


# ---------------------------------------------------------------------------
# principal-value integral over the real segment


def _segment_log_integral(c: complex, lo: float, hi: float) -> complex:
    """int_lo^hi dt/(t - c) (principal value when c is real and inside)."""
    if c.imag != 0:
        return cmath.log(hi - c) - cmath.log(lo - c)
    a, b = abs(hi - c.real), abs(lo - c.real)
    la = math.log(a) if a > 0 else 0.0  # endpoint poles come in cancelling pairs
    lb = math.log(b) if b > 0 else 0.0
    return complex(la - lb)


def _theorem1_integrand(g, n, x):
    def f(theta):
        e = np.exp(1j * theta)
        return np.exp(n * (e - 1j * theta - 1.0)) * g.reciprocal(e / x)
    return f


def principal_integral_axis(g: GeneratingFunction, n: int, x: complex, *, rtol: float = QUAD_RTOL,
                            atol_scaled: float = 0.0) -> tuple[complex, dict]:
    """PV int_{-pi}^{pi} exp(n(e^{i t} - i t - 1)) / g(e^{i t}/x) dt (note the exp(-n)).

    Simple poles within NEAR_BAND of the axis (and their 2 pi images) are
    subtracted and integrated in closed form.
    """
    x = complex(x)
    poles: list[tuple[complex, complex]] = []  # (location, residue of scaled integrand)
    radius = math.exp(NEAR_BAND) / abs(x)
    for zeta, p in g.zeros(radius):
        th = theta_of_zero(zeta, x)
        if abs(th.imag) > NEAR_BAND:
            continue
        if p > 1:
            if abs(abs(zeta * x) - 1.0) <= TOL_ON:
                raise DegenerateSingularity(f"pole of order {p} on the real axis at theta={th}")
            continue
        sing = Singularity(th, zeta, p, _axis_position(zeta, x), Position.BELOW)
        res = (residue(g, n, x, sing) / LogComplex(float(n))).to_complex()
        if sing.axis is Position.ON:
            th = complex(th.real, 0.0)
        for shift in (-2 * math.pi, 0.0, 2 * math.pi):
            c = th + shift
            if -math.pi - 1.0 < c.real < math.pi + 1.0:
                poles.append((c, res))

    base = _theorem1_integrand(g, n, x)
    if poles:
        locs = np.array([c for c, _ in poles])
        ress = np.array([r for _, r in poles])

        def f(t):
            return base(t) - (ress[None, :] / (t[:, None] - locs[None, :])).sum(axis=1)
    else:
        f = base
    breaks = [c.real for c, _ in poles if c.imag == 0]
    qr = gauss_kronrod(f, -math.pi, math.pi, rtol=rtol, atol=atol_scaled, breakpoints=breaks)
    value = qr.value + sum(r * _segment_log_integral(c, -math.pi, math.pi) for c, r in poles)
    return value, {"quad_error": qr.error, "quad_intervals": qr.intervals, "subtracted_poles": len(poles)}


def eval_theorem1(g: GeneratingFunction, n: int, x: complex) -> RepresentationBreakdown:
    """Evaluate pi_n(x)/n! from the real-axis representation."""
    if n < 1:
        raise ValueError("n must be >= 1")
    x = complex(x)
    if x == 0:
        raise ValueError("x = 0 is not allowed")
    sings = theta_singularities(g, x, "real_axis")
    for s in sings:
        if s.axis is Position.ON and s.order > 1:
            raise DegenerateSingularity(f"pole of order {s.order} on the real axis at theta={s.theta}")
    terms = residue_terms(g, n, x, sings, "real_axis")
    rsum = log_sum([t.value * t.weight for t in terms if t.weight])
    # residues already fix the size of the answer; no point resolving the integral far below it
    scaled_res = 2 * math.pi * math.exp(min(rsum.log_mag - n, 700.0)) if not rsum.is_zero else 0.0
    integral, diag = principal_integral_axis(g, n, x, atol_scaled=QUAD_RTOL * 1e-2 * scaled_res)
    integral_lc = LogComplex.from_complex(integral) * LogComplex(float(n))
    prefactor = LogComplex.from_complex(x) ** n / (2 * math.pi)
    bd = RepresentationBreakdown(1, n, x, integral_lc, terms, prefactor, LogComplex.zero(), diag)
    bd.total = bd.assemble()
    if math.isfinite(g.r0):
        bd.diagnostics["eta_x"] = -math.log(0.5 * g.r0 * abs(x))
    return bd
