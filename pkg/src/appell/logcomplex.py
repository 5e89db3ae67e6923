"""Complex numbers stored as (log-magnitude, phase).

Values such as ``(e*x)**n / n!`` overflow or underflow doubles long before the
quantities built from them do, so everything that crosses a module boundary is
carried in this form and only converted at the end.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

_TWO_PI = 2.0 * math.pi
# exp() of anything above this overflows a double
OVERFLOW_LOG = 709.0


def wrap_phase(phase: float) -> float:
    """Map an angle into (-pi, pi]."""
    p = math.fmod(phase, _TWO_PI)
    if p <= -math.pi:
        p += _TWO_PI
    elif p > math.pi:
        p -= _TWO_PI
    return p


@dataclass(frozen=True)
class LogComplex:
    log_mag: float
    phase: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "log_mag", float(self.log_mag))
        if self.log_mag == -math.inf:
            object.__setattr__(self, "phase", 0.0)
        else:
            object.__setattr__(self, "phase", wrap_phase(float(self.phase)))

    # construction -------------------------------------------------------
    @classmethod
    def zero(cls) -> "LogComplex":
        return cls(-math.inf, 0.0)

    @classmethod
    def one(cls) -> "LogComplex":
        return cls(0.0, 0.0)

    @classmethod
    def from_complex(cls, z: complex) -> "LogComplex":
        z = complex(z)
        if z == 0:
            return cls.zero()
        if not cmath.isfinite(z):
            raise OverflowError(f"cannot store non-finite value {z!r}")
        return cls(math.log(abs(z)), _arg(z))

    @classmethod
    def from_log(cls, log_value: complex) -> "LogComplex":
        """exp(log_value) for a complex logarithm."""
        log_value = complex(log_value)
        return cls(log_value.real, log_value.imag)

    @classmethod
    def from_mpc(cls, value) -> "LogComplex":
        import mpmath

        if value == 0:
            return cls.zero()
        return cls(float(mpmath.log(abs(value))), float(mpmath.arg(value)))

    # conversion ---------------------------------------------------------
    def to_complex(self) -> complex:
        if self.log_mag == -math.inf:
            return 0j
        if self.log_mag > OVERFLOW_LOG:
            raise OverflowError(f"log magnitude {self.log_mag:.3f} too large for a double")
        return cmath.rect(math.exp(self.log_mag), self.phase)

    def __complex__(self) -> complex:
        return self.to_complex()

    def log(self) -> complex:
        """Principal complex logarithm."""
        return complex(self.log_mag, self.phase)

    @property
    def is_zero(self) -> bool:
        return self.log_mag == -math.inf

    def __abs__(self) -> float:
        return math.exp(self.log_mag) if self.log_mag <= OVERFLOW_LOG else math.inf

    # arithmetic ---------------------------------------------------------
    def _coerce(self, other) -> "LogComplex":
        if isinstance(other, LogComplex):
            return other
        return LogComplex.from_complex(other)

    def __mul__(self, other) -> "LogComplex":
        other = self._coerce(other)
        if self.is_zero or other.is_zero:
            return LogComplex.zero()
        return LogComplex(self.log_mag + other.log_mag, self.phase + other.phase)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "LogComplex":
        other = self._coerce(other)
        if other.is_zero:
            raise ZeroDivisionError("LogComplex division by zero")
        if self.is_zero:
            return LogComplex.zero()
        return LogComplex(self.log_mag - other.log_mag, self.phase - other.phase)

    def __rtruediv__(self, other) -> "LogComplex":
        return self._coerce(other) / self

    def __neg__(self) -> "LogComplex":
        if self.is_zero:
            return self
        return LogComplex(self.log_mag, self.phase + math.pi)

    def __pow__(self, k: int) -> "LogComplex":
        if self.is_zero:
            return LogComplex.one() if k == 0 else LogComplex.zero()
        # phase*k loses ~log10(k) digits; acceptable for k up to a few thousand
        return LogComplex(k * self.log_mag, k * self.phase)

    def __add__(self, other) -> "LogComplex":
        return log_sum([self, self._coerce(other)])

    __radd__ = __add__

    def __sub__(self, other) -> "LogComplex":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "LogComplex":
        return self._coerce(other) - self

    def rel_diff(self, other: "LogComplex") -> float:
        """|self - other| / |other|, computed without leaving log space."""
        other = self._coerce(other)
        if other.is_zero:
            return 0.0 if self.is_zero else math.inf
        ratio = (self / other).to_complex() if (self.log_mag - other.log_mag) < OVERFLOW_LOG else math.inf
        return abs(ratio - 1.0)

    def __repr__(self) -> str:
        return f"LogComplex(log_mag={self.log_mag!r}, phase={self.phase!r})"


def _arg(z: complex) -> float:
    # cmath.phase raises OverflowError when atan2 underflows on subnormal parts
    return math.atan2(z.imag, z.real)


def log_sum(terms: Iterable[LogComplex]) -> LogComplex:
    """Sum of LogComplex values via a complex log-sum-exp."""
    terms = [t for t in terms if not t.is_zero]
    if not terms:
        return LogComplex.zero()
    logs = np.array([t.log() for t in terms])
    return log_sum_exp(logs)


def log_sum_exp(logs: np.ndarray) -> LogComplex:
    """LogComplex of sum(exp(logs)) for an array of complex logarithms."""
    logs = np.asarray(logs, dtype=complex)
    logs = logs[np.isfinite(logs.real)]
    if logs.size == 0:
        return LogComplex.zero()
    m = logs.real.max()
    s = np.exp(logs - m).sum()
    if s == 0:
        return LogComplex.zero()
    return LogComplex(m + math.log(abs(s)), _arg(s))
