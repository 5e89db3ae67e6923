"""Truncated complex power series (coefficient arrays, lowest order first)."""

from __future__ import annotations

import numpy as np


def as_series(coeffs, order: int) -> np.ndarray:
    """Pad or cut ``coeffs`` to ``order + 1`` complex coefficients."""
    out = np.zeros(order + 1, dtype=complex)
    c = np.asarray(coeffs, dtype=complex)[: order + 1]
    out[: c.size] = c
    return out


def mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    order = min(a.size, b.size) - 1
    return np.convolve(a, b)[: order + 1]


def reciprocal(a: np.ndarray) -> np.ndarray:
    if a[0] == 0:
        raise ZeroDivisionError("series with zero constant term has no reciprocal")
    out = np.zeros_like(a, dtype=complex)
    out[0] = 1.0 / a[0]
    for k in range(1, a.size):
        out[k] = -np.dot(a[1 : k + 1], out[k - 1 :: -1][:k]) / a[0]
    return out


def div(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return mul(a, reciprocal(b))


def exp(a: np.ndarray) -> np.ndarray:
    """exp of a series, via f' = a' f."""
    out = np.zeros_like(a, dtype=complex)
    out[0] = np.exp(a[0])
    da = np.arange(a.size) * a  # k * a_k
    for k in range(1, a.size):
        out[k] = np.dot(da[1 : k + 1], out[k - 1 :: -1][:k]) / k
    return out


def compose(outer: np.ndarray, inner: np.ndarray) -> np.ndarray:
    """outer(inner(t)) for inner with zero constant term."""
    if inner[0] != 0:
        raise ValueError("inner series must vanish at the origin")
    order = inner.size - 1
    out = np.zeros(order + 1, dtype=complex)
    for c in outer[::-1]:
        out = mul(out, inner)
        out[0] += c
    return out


def derivative(a: np.ndarray) -> np.ndarray:
    """Derivative series; the result keeps the same length (top coefficient 0)."""
    out = np.zeros_like(a, dtype=complex)
    out[:-1] = a[1:] * np.arange(1, a.size)
    return out


def shift_down(a: np.ndarray, p: int) -> np.ndarray:
    """Divide by t**p, assuming the first p coefficients are (numerically) zero."""
    out = np.zeros_like(a, dtype=complex)
    out[: a.size - p] = a[p:]
    return out


def evaluate(a: np.ndarray, t):
    """Horner evaluation of the truncated series at t (scalar or array)."""
    t = np.asarray(t)
    out = np.zeros(t.shape, dtype=complex)
    for c in a[::-1]:
        out = out * t + c
    return out
