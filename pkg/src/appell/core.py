"""Generating functions, the exact coefficient oracle, and direct evaluation of pi_n(x)/n!.

The Appell polynomials of an entire ``g`` with ``g(0) != 0`` are

    sum_n p_n(x) z**n / n! = exp(x z) / g(z),

so ``p_n(x) = sum_j n!/j! c_{n-j} x**j`` where ``c`` are the Taylor
coefficients of ``1/g``.  Everything else in the package is checked against
the values produced here.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import mpmath
import numpy as np

from .logcomplex import LogComplex
from .roots import aberth, polish_mp

TOL_ZERO = 1e-10


class InvalidGeneratingFunction(ValueError):
    """g violates a precondition (typically g(0) == 0)."""


class GeneratingFunction:
    """Entire function g with g(0) != 0, its derivatives, Taylor data and zeros.

    Subclasses supply ``eval``, ``deriv``, ``taylor0``, ``_taylor0_exact``
    and ``zeros``.  ``zero_directions`` is ``None`` when the zero set is
    finite, otherwise the arguments of the rays carrying the zeros.
    """

    name = "g"
    zero_directions: tuple[float, ...] | None = None

    def __call__(self, z):
        return self.eval(z)

    def eval(self, z):
        raise NotImplementedError

    def reciprocal(self, z):
        """1/g(z), with overflow handled where g grows exponentially."""
        return 1.0 / self.eval(z)

    def deriv(self, m: int, z):
        raise NotImplementedError

    def taylor0(self, order: int) -> np.ndarray:
        raise NotImplementedError

    def _taylor0_exact(self, order: int) -> list:
        """Taylor coefficients as Fractions (rational g) or mpmath numbers."""
        raise NotImplementedError

    def zeros(self, radius: float = math.inf) -> list[tuple[complex, int]]:
        raise NotImplementedError

    @property
    def r0(self) -> float:
        zs = self.zeros(radius=math.inf if self.zero_directions is None else 1e3)
        return abs(zs[0][0]) if zs else math.inf

    def check(self, radius: float = 10.0) -> None:
        """Raise InvalidGeneratingFunction if an invariant fails."""
        if abs(self.taylor0(0)[0]) < TOL_ZERO:
            raise InvalidGeneratingFunction(f"{self.name}: g(0) = 0 is not allowed")
        for zeta, p in self.zeros(radius):
            scale = self._scale(zeta)
            for m in range(p):
                if abs(self.deriv(m, zeta)) > TOL_ZERO * scale:
                    raise InvalidGeneratingFunction(
                        f"{self.name}: g^({m})({zeta}) does not vanish for listed zero of order {p}")
            if abs(self.deriv(p, zeta)) <= TOL_ZERO * scale:
                raise InvalidGeneratingFunction(f"{self.name}: zero {zeta} has order above {p}")

    def _scale(self, z: complex) -> float:
        return 1.0


def _as_complex_array(z):
    return np.asarray(z, dtype=complex)


class PolynomialG(GeneratingFunction):
    """g(z) = sum_k coeffs[k] z**k with complex coefficients."""

    def __init__(self, coeffs: Sequence[complex], name: str | None = None):
        c = np.asarray(coeffs, dtype=complex)
        nz = np.flatnonzero(c)
        if nz.size == 0:
            raise InvalidGeneratingFunction("g is identically zero")
        self.coeffs = c[: nz[-1] + 1]
        self.degree = len(self.coeffs) - 1
        self.name = name or "poly[" + ",".join(_fmt_c(v) for v in self.coeffs) + "]"
        if abs(self.coeffs[0]) < TOL_ZERO:
            raise InvalidGeneratingFunction(f"{self.name}: g(0) = 0 is not allowed")
        self._zeros = self._find_zeros() if self.degree > 0 else []

    def __repr__(self) -> str:
        return f"PolynomialG({self.name})"

    def eval(self, z):
        z = _as_complex_array(z)
        out = np.zeros(z.shape, dtype=complex)
        for c in self.coeffs[::-1]:
            out = out * z + c
        return out if out.shape else complex(out)

    def deriv(self, m: int, z):
        if m < 0:
            raise ValueError("derivative order must be >= 0")
        if m > self.degree:
            z = _as_complex_array(z)
            return np.zeros(z.shape, dtype=complex) if z.shape else 0j
        k = np.arange(m, self.degree + 1)
        falling = np.array([math.perm(int(j), m) for j in k], dtype=float)
        return self._horner(self.coeffs[m:] * falling, z)

    @staticmethod
    def _horner(c, z):
        z = _as_complex_array(z)
        out = np.zeros(z.shape, dtype=complex)
        for v in c[::-1]:
            out = out * z + v
        return out if out.shape else complex(out)

    def taylor0(self, order: int) -> np.ndarray:
        out = np.zeros(order + 1, dtype=complex)
        m = min(order, self.degree) + 1
        out[:m] = self.coeffs[:m]
        return out

    def _taylor0_exact(self, order: int) -> list:
        vals = [self.coeffs[k] if k <= self.degree else 0j for k in range(order + 1)]
        if all(v.imag == 0 for v in vals):
            return [Fraction(v.real) for v in vals]
        return [mpmath.mpc(v.real, v.imag) for v in vals]

    def _scale(self, z: complex) -> float:
        return float(np.sum(np.abs(self.coeffs) * abs(z) ** np.arange(self.degree + 1)))

    def _find_zeros(self) -> list[tuple[complex, int]]:
        res = aberth(self.coeffs)
        roots, _ = polish_mp([mpmath.mpc(c.real, c.imag) for c in self.coeffs], res.roots, dps=40)
        # multiple roots come back as clusters of spread ~ eps**(1/p)
        groups: list[list[complex]] = []
        for r in sorted(roots, key=lambda v: (abs(v), cmath.phase(v))):
            for grp in groups:
                if abs(grp[0] - r) < 1e-4 * max(1.0, abs(r)):
                    grp.append(r)
                    break
            else:
                groups.append([r])
        zeros = []
        for grp in groups:
            p = len(grp)
            zeta = complex(np.mean(grp))
            if p > 1:
                # polish as a simple root of g^(p-1)
                for _ in range(8):
                    d = self.deriv(p, zeta)
                    if d == 0:
                        break
                    zeta -= self.deriv(p - 1, zeta) / d
            zeros.append((zeta, p))
        zeros.sort(key=lambda t: (abs(t[0]), cmath.phase(t[0])))
        return zeros

    def zeros(self, radius: float = math.inf) -> list[tuple[complex, int]]:
        return [(z, p) for z, p in self._zeros if abs(z) <= radius]


class BernoulliG(GeneratingFunction):
    """g(z) = (exp(z) - 1)/z; zeros 2*pi*i*k, k != 0, all simple."""

    name = "bernoulli"
    zero_directions = (math.pi / 2, -math.pi / 2)

    def __repr__(self) -> str:
        return "BernoulliG()"

    def eval(self, z):
        z = _as_complex_array(z)
        safe = np.where(z == 0, 1.0, z)
        out = np.where(z == 0, 1.0 + 0j, np.expm1(z) / safe)
        return out if out.shape else complex(out)

    def reciprocal(self, z):
        z = _as_complex_array(z)
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            pos = z.real > 0
            # w/(e^w - 1) = -w e^{-w} / expm1(-w) for Re w > 0
            zz = np.where(z == 0, 1.0, z)
            a = zz / np.expm1(np.where(pos, 1.0, zz))
            b = -zz * np.exp(-np.where(pos, zz, 0.0)) / np.expm1(-np.where(pos, zz, 1.0))
            out = np.where(pos, b, a)
            out = np.where(z == 0, 1.0 + 0j, out)
        return out if out.shape else complex(out)

    def deriv(self, m: int, z):
        z = _as_complex_array(z)
        out = np.array([_bernoulli_g_deriv(m, complex(v)) for v in z.ravel()], dtype=complex).reshape(z.shape)
        return out if out.shape else complex(out)

    def taylor0(self, order: int) -> np.ndarray:
        return np.array([1.0 / math.factorial(k + 1) for k in range(order + 1)], dtype=complex)

    def _taylor0_exact(self, order: int) -> list:
        return [Fraction(1, math.factorial(k + 1)) for k in range(order + 1)]

    def zeros(self, radius: float = math.inf) -> list[tuple[complex, int]]:
        if math.isinf(radius):
            raise ValueError("Bernoulli g has infinitely many zeros; give a finite radius")
        kmax = int(math.floor(radius / (2 * math.pi)))
        out = []
        for k in range(1, kmax + 1):
            out.append((complex(0, 2 * math.pi * k), 1))
            out.append((complex(0, -2 * math.pi * k), 1))
        return out

    @property
    def r0(self) -> float:
        return 2 * math.pi

    def _scale(self, z: complex) -> float:
        return max(1.0, math.exp(min(z.real, 700.0)))


def _bernoulli_g_deriv(m: int, z: complex) -> complex:
    """g^(m)(z) = int_0^1 t^m e^{z t} dt for g = (e^z - 1)/z."""
    if abs(z) < max(2.0, float(m)):
        total = 0j
        term = 1 + 0j  # z^k / k!
        k = 0
        while True:
            add = term / (k + m + 1)
            total += add
            if k > 4 and abs(add) < 1e-17 * abs(total):
                break
            k += 1
            term *= z / k
        return total
    ez = cmath.exp(z)
    val = (ez - 1) / z if abs(z) > 1e-3 else complex(_bernoulli_g_deriv(0, z))
    for j in range(1, m + 1):
        val = (ez - j * val) / z
    return val


def polynomial(coeffs: Sequence[complex], name: str | None = None) -> PolynomialG:
    return PolynomialG(coeffs, name)


def from_roots(roots: Sequence[complex], lead: complex = 1.0, name: str | None = None) -> PolynomialG:
    """Polynomial lead * prod (z - r), coefficients lowest first."""
    c = np.array([lead], dtype=complex)
    for r in roots:
        c = np.convolve(c, np.array([-r, 1.0], dtype=complex))
    return PolynomialG(c, name)


def bernoulli() -> BernoulliG:
    return BernoulliG()


def _fmt_c(v: complex) -> str:
    v = complex(v)
    if v.imag == 0:
        return f"{v.real:g}"
    return f"{v.real:g}{v.imag:+g}i"


# ---------------------------------------------------------------------------
# coefficient oracle


@dataclass(frozen=True)
class PolynomialC:
    """Polynomial with complex coefficients, lowest degree first."""

    coefficients: np.ndarray = field(repr=False)

    def __post_init__(self):
        c = np.asarray(self.coefficients, dtype=complex)
        nz = np.flatnonzero(c)
        c = c[: nz[-1] + 1] if nz.size else c[:1]
        object.__setattr__(self, "coefficients", c)

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1 if np.any(self.coefficients) else 0

    def __call__(self, x):
        x = _as_complex_array(x)
        out = np.zeros(x.shape, dtype=complex)
        for c in self.coefficients[::-1]:
            out = out * x + c
        return out if out.shape else complex(out)

    def term_sum(self, x: complex) -> complex:
        return complex(sum(c * x**k for k, c in enumerate(self.coefficients)))

    def derivative(self) -> "PolynomialC":
        c = self.coefficients
        if len(c) == 1:
            return PolynomialC(np.zeros(1, dtype=complex))
        return PolynomialC(c[1:] * np.arange(1, len(c)))

    def __repr__(self) -> str:
        return f"PolynomialC({', '.join(_fmt_c(v) for v in self.coefficients)})"


def inverse_taylor(g: GeneratingFunction, N: int) -> np.ndarray:
    """Taylor coefficients c_0..c_N of 1/g at the origin.

    Division recurrence c_n = (delta_{n0} - sum_{j=1..n} g_j c_{n-j}) / g_0.
    """
    if N < 0:
        raise ValueError("N must be >= 0")
    gt = g.taylor0(N)
    if abs(gt[0]) < TOL_ZERO:
        raise InvalidGeneratingFunction(f"{g.name}: g(0) = 0 is not allowed")
    c = np.zeros(N + 1, dtype=complex)
    c[0] = 1.0 / gt[0]
    for n in range(1, N + 1):
        c[n] = -np.dot(gt[1 : n + 1], c[n - 1 :: -1][:n]) / gt[0]
    return c


@lru_cache(maxsize=256)
def _inverse_taylor_exact(g: GeneratingFunction, N: int, dps: int) -> tuple:
    """Same recurrence in exact rationals when possible, else at ``dps`` digits."""
    gt = g._taylor0_exact(N)
    if gt[0] == 0:
        raise InvalidGeneratingFunction(f"{g.name}: g(0) = 0 is not allowed")
    if all(isinstance(v, Fraction) for v in gt):
        c = [Fraction(1) / gt[0]]
        for n in range(1, N + 1):
            c.append(-sum(gt[j] * c[n - j] for j in range(1, n + 1)) / gt[0])
        return tuple(c)
    with mpmath.workdps(dps):
        gt = [mpmath.mpc(v) for v in gt]
        c = [1 / gt[0]]
        for n in range(1, N + 1):
            c.append(-mpmath.fsum(gt[j] * c[n - j] for j in range(1, n + 1)) / gt[0])
        return tuple(c)


def appell_coefficients(g: GeneratingFunction, n: int, log_threshold: int = 170):
    """Coefficients of p_n (lowest first): [x^j] p_n = n!/j! c_{n-j}.

    Returns a PolynomialC for n <= log_threshold; above it n! overflows
    doubles and a list of LogComplex coefficients is returned instead.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    dps = 30 + n // 2
    c = _inverse_taylor_exact(g, n, dps)
    with mpmath.workdps(dps):
        vals = [mpmath.factorial(n) / mpmath.factorial(j) * _to_mp(c[n - j]) for j in range(n + 1)]
        if n <= log_threshold:
            return PolynomialC(np.array([complex(v) for v in vals]))
        return [LogComplex.from_mpc(v) for v in vals]


def _to_mp(v):
    if isinstance(v, Fraction):
        return mpmath.mpf(v.numerator) / v.denominator
    return v


@lru_cache(maxsize=256)
def rescaled_coefficients_mp(g: GeneratingFunction, n: int, dps: int) -> tuple:
    """Coefficients a_j of pi_n(x)/n! = sum_j a_j x^j, as mpmath numbers at ``dps`` digits."""
    c = _inverse_taylor_exact(g, n, dps)
    with mpmath.workdps(dps):
        out = []
        nn = mpmath.mpf(n)
        for j in range(n + 1):
            cj = c[n - j]
            if isinstance(cj, Fraction):
                # exact up to the final rounding
                val = cj * Fraction(n**j, math.factorial(j))
                out.append(mpmath.mpf(val.numerator) / val.denominator)
            else:
                out.append(cj * nn**j / mpmath.factorial(j))
        return tuple(out)


def rescaled_coefficients(g: GeneratingFunction, n: int) -> np.ndarray:
    """Coefficients of pi_n(x)/n! in x, rounded to doubles."""
    return np.array([complex(v) for v in rescaled_coefficients_mp(g, n, 30 + n // 2)])


def eval_rescaled_direct(g: GeneratingFunction, n: int, x: complex) -> LogComplex:
    """pi_n(x)/n! = p_n(n x)/n! by multiprecision Horner on the exact coefficients.

    The working precision is raised until the evaluation's condition number
    (sum |a_j x^j| / |sum a_j x^j|) leaves at least 17 correct digits.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    dps = 30 + n // 2
    for _ in range(12):
        a = rescaled_coefficients_mp(g, n, dps)
        with mpmath.workdps(dps):
            z = mpmath.mpc(complex(x).real, complex(x).imag)
            acc = mpmath.mpc(0)
            mag = mpmath.mpf(0)
            az = abs(z)
            for coef in reversed(a):
                acc = acc * z + coef
                mag = mag * az + abs(coef)
            if acc == 0:
                if mag == 0:
                    return LogComplex.zero()
            else:
                digits_lost = float(mpmath.log10(mag / abs(acc))) if mag > 0 else 0.0
                if digits_lost + 17 < dps:
                    return LogComplex.from_mpc(acc)
        dps = int(dps * 1.6) + 10
    raise ArithmeticError(f"direct evaluation of pi_{n}({x}) did not stabilise")
