"""The Bernoulli case g(z) = (e^z - 1)/z, whose zeros are the simple points 2 pi i k, k != 0.

The residues come in pairs theta_k^{+-} (zeta = +-2 pi i k) and combine into
closed forms: a cosine sum against the real axis, and either two finite sums
or a polylogarithm against the steepest-descent curve.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import mpmath
import numpy as np

from .asym import AsymptoticTerm
from .contour import (
    TOL_ON,
    TOL_ON_C,
    Position,
    RepresentationBreakdown,
    ResidueTerm,
    Singularity,
    curve_radius,
    principal_integral_axis,
    theta_of_zero,
    theta_singularities,
)
from .core import PolynomialC, bernoulli
from .logcomplex import LogComplex, log_sum
from .sdrep import principal_integral_curve

TWO_PI = 2.0 * math.pi
# relative size below which trailing residue terms are dropped
SUM_CUTOFF = 1e-18
# on-axis test for x, relative to |x|
IMAG_AXIS_TOL = 1e-14


@lru_cache(maxsize=None)
def bernoulli_numbers(N: int) -> tuple[Fraction, ...]:
    """B_0..B_N (B_1 = -1/2) from sum_{j=0}^{m} C(m+1, j) B_j = 0."""
    B = [Fraction(1)]
    for m in range(1, N + 1):
        B.append(-sum(math.comb(m + 1, j) * B[j] for j in range(m)) / (m + 1))
    return tuple(B)


def bernoulli_exact(n: int) -> list[Fraction]:
    """Coefficients of B_n(x), lowest first: [x^k] = C(n, k) B_{n-k}."""
    if n < 0:
        raise ValueError("n must be >= 0")
    B = bernoulli_numbers(n)
    return [math.comb(n, k) * B[n - k] for k in range(n + 1)]


def bernoulli_oracle(n: int) -> PolynomialC:
    """B_n(x) with exact rational coefficients rounded once to doubles."""
    return PolynomialC(np.array([complex(float(c)) for c in bernoulli_exact(n)]))


def bernoulli_rescaled_oracle(n: int, x: complex) -> LogComplex:
    """B_n(n x)/n! by multiprecision evaluation of the exact coefficients."""
    coeffs = bernoulli_exact(n)
    dps = 30 + n // 2
    x = complex(x)
    for _ in range(12):
        with mpmath.workdps(dps):
            u = n * mpmath.mpc(x.real, x.imag)
            acc = mpmath.mpc(0)
            mag = mpmath.mpf(0)
            for c in reversed(coeffs):
                cm = mpmath.mpf(c.numerator) / c.denominator
                acc = acc * u + cm
                mag = mag * abs(u) + abs(cm)
            if acc == 0 and mag == 0:
                return LogComplex.zero()
            if acc != 0 and float(mpmath.log10(mag / abs(acc))) + 17 < dps:
                return LogComplex.from_mpc(acc / mpmath.factorial(n))
        dps = int(dps * 1.6) + 10
    raise ArithmeticError(f"oracle evaluation of B_{n}({n}*{x}) did not stabilise")


def polylog(n: int, z: complex, *, max_terms: int = 1_000_000) -> complex:
    """Li_n(z) = sum_{k>=1} z^k / k^n for |z| < 1, by direct summation."""
    z = complex(z)
    if abs(z) >= 1:
        raise ValueError("polylog series needs |z| < 1")
    total = 0j
    zk = 1 + 0j
    for k in range(1, max_terms + 1):
        zk *= z
        term = zk / k**n
        total += term
        if abs(term) < 1e-17 * abs(total) or zk == 0:
            return total
    raise ArithmeticError(f"polylog series did not converge in {max_terms} terms")


@dataclass
class BernoulliEval:
    """beta_n(x)/n! split into integral and residue parts.

    ``extra`` holds any closed-form piece not in breakdown.residues (the
    polylog term).  When ``conjugated`` is set the breakdown was computed at
    conj(x) and the total is conjugated back.
    """

    n: int
    x: complex
    k_max: int
    breakdown: RepresentationBreakdown
    extra: LogComplex = field(default_factory=LogComplex.zero)
    conjugated: bool = False
    diagnostics: dict = field(default_factory=dict)

    @property
    def total(self) -> LogComplex:
        t = self.breakdown.total + self.extra
        return LogComplex(t.log_mag, -t.phase) if self.conjugated and not t.is_zero else t

    @property
    def value(self) -> complex:
        return self.total.to_complex()


def k_max(x: complex) -> int:
    """Largest k with 2 pi k |x| <= 1 (zeros on or above the real axis)."""
    bound = 1.0 / (TWO_PI * abs(complex(x)))
    k = math.floor(bound)
    if abs(TWO_PI * (k + 1) * abs(x) - 1.0) <= TOL_ON:
        k += 1
    return k


def _residue_closed(n: int, x: complex, k: int, sign: int) -> LogComplex:
    """Res at zeta = sign*2 pi i k: -i e^{n x zeta} / (x zeta)^n."""
    zeta = sign * TWO_PI * 1j * k
    return LogComplex.from_log(n * x * zeta - n * cmath.log(x * zeta) - 1j * math.pi / 2)


def _singularity(x: complex, k: int, sign: int, axis: Position, curve: Position) -> Singularity:
    zeta = sign * TWO_PI * 1j * k
    return Singularity(theta_of_zero(zeta, x), zeta, 1, axis, curve)


def _cos_log(w: complex) -> LogComplex:
    """cos(w) without overflow for large |Im w|."""
    return (LogComplex.from_log(1j * w) + LogComplex.from_log(-1j * w)) / 2


def eval_corollary1(n: int, x: complex) -> BernoulliEval:
    """Real-axis form: PV integral plus -2 (2 pi)^{-n} sum_k k^{-n} cos(n (pi/2 - 2 pi k x))."""
    if n < 1:
        raise ValueError("n must be >= 1")
    x = complex(x)
    if x == 0:
        raise ValueError("x = 0 is not allowed")
    g = bernoulli()
    km = k_max(x)
    bound = 1.0 / (TWO_PI * abs(x))
    res_terms: list[ResidueTerm] = []
    cos_terms: list[LogComplex] = []
    for k in range(1, km + 1):
        on = abs(TWO_PI * k * abs(x) - 1.0) <= TOL_ON
        pos = Position.ON if on else Position.ABOVE
        w = pos.weight
        for sign in (1, -1):
            res_terms.append(ResidueTerm(_singularity(x, k, sign, pos, Position.ABOVE),
                                         _residue_closed(n, x, k, sign), w))
        c = _cos_log(n * (math.pi / 2 - TWO_PI * k * x)) * LogComplex(-n * math.log(TWO_PI * k))
        cos_terms.append(c * (-2.0 * w))
    cos_sum = log_sum(cos_terms)
    rsum = log_sum([t.value * t.weight for t in res_terms])
    scaled_res = TWO_PI * math.exp(min(rsum.log_mag - n, 700.0)) if not rsum.is_zero else 0.0
    integral, diag = principal_integral_axis(g, n, x, atol_scaled=1e-12 * scaled_res)
    integral_lc = LogComplex.from_complex(integral) * LogComplex(float(n))
    prefactor = LogComplex.from_complex(x) ** n / TWO_PI
    bd = RepresentationBreakdown(1, n, x, integral_lc, res_terms, prefactor, LogComplex.zero(), diag)
    bd.total = prefactor * integral_lc + cos_sum
    diag["cosine_sum"] = cos_sum
    diag["residue_form_gap"] = bd.total.rel_diff(bd.assemble())
    diag["bound"] = bound
    return BernoulliEval(n, x, km, bd, diagnostics=diag)


def _theta_bound(v: complex) -> float:
    """Arg(v) / (2 pi Im v) for v = +-i x: the family zeta = +-2 pi i k is above the curve for k below it."""
    return cmath.phase(v) / (TWO_PI * v.imag)


def bound_count(bound: float) -> int:
    """Number of k >= 1 with k <= bound, allowing k = bound within TOL_ON_C."""
    k = math.floor(bound * (1 + TOL_ON_C) + 1e-12)
    return max(k, 0)


def _family(n: int, x: complex, sign: int, bound: float) -> list[ResidueTerm]:
    """Residues of the family zeta = sign*2 pi i k with k <= bound (half weight at equality).

    Terms decay like |e^{x zeta}/(x zeta)|^n; the loop stops once they are
    negligible, so a huge bound (Re x near 0) stays cheap.
    """
    out: list[ResidueTerm] = []
    k = 1
    acc = LogComplex.zero()
    while k <= bound * (1 + TOL_ON_C) + 1e-12:
        on = abs(k - bound) <= TOL_ON_C * max(1.0, bound)
        pos = Position.ON if on else Position.ABOVE
        axis = Position.ABOVE if TWO_PI * k * abs(x) < 1 - TOL_ON else (
            Position.ON if abs(TWO_PI * k * abs(x) - 1) <= TOL_ON else Position.BELOW)
        r = _residue_closed(n, x, k, sign)
        out.append(ResidueTerm(_singularity(x, k, sign, axis, pos), r, pos.weight))
        acc = acc + r * pos.weight
        if k > 2 and r.log_mag < acc.log_mag + math.log(SUM_CUTOFF) and \
                _residue_closed(n, x, k + 1, sign).log_mag < r.log_mag:
            break
        k += 1
    return out


def _psi_counts(x: complex, limit: int = 10_000) -> tuple[int, int] | None:
    """Zeros above or on the curve for each family, by direct psi classification."""
    g = bernoulli()
    if curve_radius(g, x) * abs(x) > TWO_PI * limit:
        return None
    sings = theta_singularities(g, x, "curve_C")
    up = sum(1 for s in sings if s.zeta.imag > 0)
    return up, len(sings) - up


def eval_sd_bernoulli(n: int, x: complex) -> BernoulliEval:
    """Steepest-descent form.

    Re x != 0: curve integral plus the two finite residue sums bounded by
    Arg(+-ix)/(2 pi Im(+-ix)).  Re x = 0 (x = iq, q > 0): the family
    zeta = 2 pi i k sums to -Li_n(e^{2 pi i n x})/(2 pi i)^n; q < 0 by conjugation.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    x = complex(x)
    if x == 0:
        raise ValueError("x = 0 is not allowed")
    g = bernoulli()
    imaginary = abs(x.real) <= IMAG_AXIS_TOL * abs(x)
    conjugated = imaginary and x.imag < 0
    xe = x.conjugate() if conjugated else x
    if imaginary:
        xe = complex(0.0, xe.imag)
    prefactor = LogComplex.from_complex(xe) ** n / TWO_PI
    diag: dict = {}
    extra = LogComplex.zero()
    if imaginary:
        q = xe.imag
        terms = _family(n, xe, -1, 1.0 / (TWO_PI * q))
        n_plus, n_minus = None, bound_count(1.0 / (TWO_PI * q))
        li = polylog(n, cmath.exp(TWO_PI * 1j * n * xe))
        extra = -LogComplex.from_complex(li) / LogComplex.from_complex((TWO_PI * 1j)) ** n
        diag["polylog"] = extra
        radius = (1 + 1e-9) / abs(xe)
    else:
        bp, bm = _theta_bound(1j * xe), _theta_bound(-1j * xe)
        terms = _family(n, xe, 1, bp) + _family(n, xe, -1, bm)
        n_plus, n_minus = bound_count(bp), bound_count(bm)
        radius = None
        counts = _psi_counts(xe)
        if counts is not None:
            diag["psi_counts"] = counts
            diag["psi_mismatch"] = counts != (n_plus, n_minus)
    rsum = log_sum([t.value * t.weight for t in terms if t.weight])
    scaled = TWO_PI * math.exp(min(rsum.log_mag - n, 700.0)) if not rsum.is_zero else 0.0
    if not extra.is_zero:
        scaled = max(scaled, math.exp(min((extra / prefactor).log_mag - n, 700.0)))
    integral, qd = principal_integral_curve(g, n, xe, atol_scaled=1e-13 * scaled, radius=radius)
    diag.update(qd)
    # (family +2 pi i k, family -2 pi i k) above or on the curve; None means infinitely many
    diag["counts"] = (n_plus, n_minus)
    diag["summed"] = len(terms)
    integral_lc = LogComplex.from_complex(integral) * LogComplex(float(n))
    bd = RepresentationBreakdown(2, n, xe, integral_lc, terms, prefactor, LogComplex.zero(), diag)
    bd.total = bd.assemble()
    return BernoulliEval(n, x, k_max(x), bd, extra, conjugated, diag)


# ---------------------------------------------------------------------------
# large-n expansions of the curve integral


def _pole_index(x: complex) -> int | None:
    """m with 1/x = 2 pi i m, if any."""
    w = 1 / complex(x)
    m = round((w / (TWO_PI * 1j)).real)
    if m != 0 and abs(w - TWO_PI * 1j * m) <= 1e-10 * abs(w):
        return m
    return None


def bernoulli_asymp(n: int, x: complex) -> AsymptoticTerm:
    """Two-term expansion of (e x)^n/(2 pi) PV int e^{-n tau^2} theta'/g dtau.

    Regular case:  e^n x^{n-1} / ((e^{1/x} - 1) sqrt(2 pi n)) (1 - C(x)/n).
    1/x = 2 pi i m: (e x)^n / (2 sqrt(2 pi n)) (2/3 - 2 pi i m + (1/270 + m pi i/6 + 2 m^2 pi^2/3)/n).
    """
    x = complex(x)
    if x == 0:
        raise ValueError("x = 0 is not allowed")
    scale = LogComplex(float(n)) * LogComplex.from_complex(x) ** n
    m = _pole_index(x)
    if m is not None:
        c0 = (2 / 3 - TWO_PI * 1j * m) / (2 * math.sqrt(TWO_PI))
        c1 = (1 / 270 + m * math.pi * 1j / 6 + 2 * m * m * math.pi**2 / 3) / (2 * math.sqrt(TWO_PI))
        return AsymptoticTerm("saddle_pole", scale, -0.5, (c0, c1), n)
    w = 1 / x
    if w.real > 0:
        # divide through by e^{2/x}
        u = cmath.exp(-w)
        num = x * x * u * u + (6 - 12 * x + x * x) - 2 * u * (x * x - 6 * x - 3)
        C = num / (12 * x * x * (1 - u) ** 2)
        lead_log = -w - cmath.log(x) - cmath.log(1 - u)
    else:
        E = cmath.exp(w)
        num = x * x + E * E * (6 - 12 * x + x * x) - 2 * E * (x * x - 6 * x - 3)
        C = num / (12 * x * x * (E - 1) ** 2)
        lead_log = -cmath.log(x) - cmath.log(E - 1)
    lead = LogComplex.from_log(lead_log) / math.sqrt(TWO_PI)
    return AsymptoticTerm("saddle", scale * lead, -0.5, (1 + 0j, -C), n)
