"""pi_n(x)/n! from the steepest-descent integral plus residues above the curve.

    pi_n(x)/n! = x^n/(2 pi) * ( e^n PV int theta'(tau) e^{-n tau^2} / g(e^{i theta(tau)}/x) dtau
                                - 2 pi i sum_k Theta(psi(theta_k)) Res(F; theta_k) )

The tau-integral runs over the whole real line; it is truncated at
|tau| = sqrt(36/n) + 1 where the Gaussian factor is below 1e-15.
"""

from __future__ import annotations

import math
from collections import OrderedDict

import numpy as np

from .contour import (
    NEAR_BAND,
    DegenerateSingularity,
    Position,
    RepresentationBreakdown,
    Singularity,
    _classify,
    _curve_position,
    _segment_log_integral,
    curve_radius,
    residue,
    residue_terms,
    theta_of_zero,
    theta_singularities,
)
from .core import GeneratingFunction
from .logcomplex import LogComplex, log_sum
from .quadrature import gauss_kronrod
from .sdpath import theta_path, tau_for_theta

QUAD_RTOL = 1e-11
# an infinite zero set is enumerated in doubling shells; a shell whose largest
# residue is below this fraction of the running sum (and shrinking) ends the sum
SUM_CUTOFF = 1e-18
SHELL_START = 64.0  # first shell radius, in units of the smallest zero modulus

_PATH_CACHE: OrderedDict[bytes, tuple[np.ndarray, np.ndarray]] = OrderedDict()
_PATH_CACHE_SIZE = 50_000


def cached_theta_path(tau: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """theta_path with memoisation on the exact node array (the path does not depend on g, n, x)."""
    key = tau.tobytes()
    hit = _PATH_CACHE.get(key)
    if hit is not None:
        _PATH_CACHE.move_to_end(key)
        return hit
    val = theta_path(tau)
    _PATH_CACHE[key] = val
    if len(_PATH_CACHE) > _PATH_CACHE_SIZE:
        _PATH_CACHE.popitem(last=False)
    return val


def truncation(n: int) -> float:
    return math.sqrt(36.0 / n) + 1.0


def _near_poles(g: GeneratingFunction, n: int, x: complex, T: float, radius: float | None = None):
    """(tau*, residue of the e^{-n}-scaled tau-integrand) for simple poles hugging the path.

    ``radius`` bounds the zeros that can sit on or above the curve; by
    default it comes from curve_radius.
    """
    radius = (curve_radius(g, x) if radius is None else radius) * math.exp(NEAR_BAND)
    # |tau*|^2 >= |x zeta| - 1 - |theta|, so farther zeros map beyond the truncation
    radius = min(radius, 4 * (T + 2) ** 2 / abs(x))
    out = []
    for zeta, p in g.zeros(radius):
        th = theta_of_zero(zeta, x)
        if abs(th.real) >= math.pi:
            continue
        pos = _curve_position(th)
        if p > 1:
            if pos is Position.ON:
                raise DegenerateSingularity(f"pole of order {p} on the steepest-descent curve at theta={th}")
            continue
        ts = tau_for_theta(th)
        if pos is Position.ON:
            ts = complex(ts.real, 0.0)
        elif abs(ts.imag) > NEAR_BAND or abs(ts.real) > T + 1.0:
            continue
        else:
            # keep only genuine poles of the real-tau continuation
            th_r, dth_r = theta_path(np.array([ts.real]))
            if abs(th_r[0] - th) > 2 * abs(dth_r[0]) * abs(ts.imag) + 1e-10:
                continue
        sing = Singularity(th, zeta, p, Position.BELOW, pos)
        r = (residue(g, n, x, sing) / LogComplex(float(n))).to_complex()
        out.append((ts, r))
    return out


def principal_integral_curve(g: GeneratingFunction, n: int, x: complex, *, T: float | None = None,
                             rtol: float = QUAD_RTOL, atol_scaled: float = 0.0,
                             radius: float | None = None) -> tuple[complex, dict]:
    """PV int_{-T}^{T} theta'(tau) e^{-n tau^2} / g(e^{i theta(tau)}/x) dtau."""
    x = complex(x)
    T = truncation(n) if T is None else T
    poles = _near_poles(g, n, x, T, radius)

    def base(t):
        th, dth = cached_theta_path(t)
        return dth * np.exp(-n * t * t) * g.reciprocal(np.exp(1j * th) / x)

    if poles:
        locs = np.array([c for c, _ in poles])
        ress = np.array([r for _, r in poles])

        def f(t):
            return base(t) - (ress[None, :] / (t[:, None] - locs[None, :])).sum(axis=1)
    else:
        f = base
    breaks = [c.real for c, _ in poles]
    qr = gauss_kronrod(f, -T, T, rtol=rtol, atol=atol_scaled, breakpoints=breaks, max_intervals=4000)
    value = qr.value + sum(r * _segment_log_integral(c, -T, T) for c, r in poles)
    return value, {"quad_error": qr.error, "quad_intervals": qr.intervals,
                   "subtracted_poles": len(poles), "T": T}


def eval_theorem2(g: GeneratingFunction, n: int, x: complex, *, T: float | None = None) -> RepresentationBreakdown:
    """Evaluate pi_n(x)/n! from the steepest-descent representation.

    Raises InfiniteSingularities when infinitely many zeros sit above the
    curve (Bernoulli g at purely imaginary x).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    x = complex(x)
    if x == 0:
        raise ValueError("x = 0 is not allowed")
    terms, truncated = _curve_residues(g, n, x)
    rsum = log_sum([t.value * t.weight for t in terms if t.weight])
    scaled_res = 2 * math.pi * math.exp(min(rsum.log_mag - n, 700.0)) if not rsum.is_zero else 0.0
    integral, diag = principal_integral_curve(g, n, x, T=T, atol_scaled=QUAD_RTOL * 1e-2 * scaled_res)
    integral_lc = LogComplex.from_complex(integral) * LogComplex(float(n))
    prefactor = LogComplex.from_complex(x) ** n / (2 * math.pi)
    diag["residues_truncated_at"] = truncated
    bd = RepresentationBreakdown(2, n, x, integral_lc, terms, prefactor, LogComplex.zero(), diag)
    bd.total = bd.assemble()
    return bd


def _check_on_curve(sings) -> None:
    for s in sings:
        if s.curve is Position.ON and s.order > 1:
            raise DegenerateSingularity(f"pole of order {s.order} on the curve at theta={s.theta}")


def _curve_residues(g: GeneratingFunction, n: int, x: complex):
    """Residue terms for zeros on or above the curve, and the radius where the sum was cut (None if complete).

    Near the rays' critical directions the curve radius is huge (Bernoulli g
    at nearly imaginary x), so infinite zero sets are walked in doubling shells.
    """
    if g.zero_directions is None:
        sings = theta_singularities(g, x, "curve_C")
        _check_on_curve(sings)
        return residue_terms(g, n, x, sings, "curve_C"), None
    radius = curve_radius(g, x)
    terms: list = []
    acc = LogComplex.zero()
    lo, hi, prev = 0.0, min(radius, SHELL_START * g.r0), math.inf
    while True:
        shell = [_classify(z, p, x) for z, p in g.zeros(hi) if abs(z) > lo]
        shell = [s for s in shell if s.curve is not Position.BELOW]
        _check_on_curve(shell)
        new = residue_terms(g, n, x, shell, "curve_C")
        terms += new
        weighted = [t.value * t.weight for t in new if t.weight]
        acc = acc + log_sum(weighted)
        top = max((w.log_mag for w in weighted), default=-math.inf)
        if hi >= radius:
            break
        if not acc.is_zero and top < acc.log_mag + math.log(SUM_CUTOFF) and top < prev:
            terms.sort(key=lambda t: -t.singularity.theta.imag)
            return terms, hi
        lo, hi, prev = hi, min(2 * hi, radius), top
    terms.sort(key=lambda t: -t.singularity.theta.imag)
    return terms, None
