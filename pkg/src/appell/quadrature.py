"""Globally adaptive 21-point Gauss-Kronrod quadrature for complex integrands.

The integrand is called with a 1-D float array of nodes and must return a
complex array of the same shape.  Interval error estimates follow QUADPACK's
QK21 heuristic.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

# Kronrod abscissae (descending, last is the midpoint) and weights for the
# 21-point rule; every other abscissa from index 1 is a 10-point Gauss node.
_XGK = np.array([
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.0,
])
_WGK = np.array([
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077208980221879,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
])
_WG = np.array([
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
])

NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])  # ascending, 21 points
KRONROD_W = np.concatenate([_WGK[:-1], _WGK[::-1]])
GAUSS_W = np.zeros(21)
GAUSS_W[1:10:2] = _WG
GAUSS_W[11:20:2] = _WG[::-1]

_EPS = np.finfo(float).eps


class QuadratureError(RuntimeError):
    """Adaptive quadrature failed to reach the requested tolerance."""

    def __init__(self, message: str, value: complex, error: float, worst: tuple[float, float]):
        super().__init__(message)
        self.value = value
        self.error = error
        self.worst = worst


@dataclass
class QuadResult:
    value: complex
    error: float
    intervals: int
    evaluations: int


def _rule(f, a: float, b: float):
    half = 0.5 * (b - a)
    center = 0.5 * (a + b)
    fx = np.asarray(f(center + half * NODES), dtype=complex)
    if not np.all(np.isfinite(fx)):
        raise FloatingPointError(f"non-finite integrand on [{a}, {b}]")
    k = half * np.dot(KRONROD_W, fx)
    g = half * np.dot(GAUSS_W, fx)
    mean = k / (b - a) if b != a else 0.0
    resabs = abs(half) * np.dot(KRONROD_W, np.abs(fx))
    resasc = abs(half) * np.dot(KRONROD_W, np.abs(fx - mean))
    err = abs(k - g)
    if resasc != 0 and err != 0:
        err = resasc * min(1.0, (200.0 * err / resasc) ** 1.5)
    if resabs > np.finfo(float).tiny / (50 * _EPS):
        err = max(err, 50 * _EPS * resabs)
    return k, err


def gauss_kronrod(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    *,
    rtol: float = 1e-10,
    atol: float = 0.0,
    breakpoints: Sequence[float] = (),
    max_intervals: int = 2000,
) -> QuadResult:
    """Integrate complex-valued ``f`` over [a, b] to max(atol, rtol*|I|).

    ``breakpoints`` inside (a, b) are used as initial interval edges, which
    keeps nodes off known trouble spots (nodes are strictly interior).
    """
    edges = sorted({a, b, *(p for p in breakpoints if a < p < b)})
    heap: list[tuple[float, int, float, float, complex]] = []
    total = 0j
    total_err = 0.0
    counter = 0
    for lo, hi in zip(edges[:-1], edges[1:]):
        v, e = _rule(f, lo, hi)
        heapq.heappush(heap, (-e, counter, lo, hi, v))
        counter += 1
        total += v
        total_err += e
    evaluations = 21 * counter

    while total_err > max(atol, rtol * abs(total)):
        if len(heap) >= max_intervals:
            worst = heap[0]
            raise QuadratureError(
                f"no convergence after {len(heap)} intervals: error {total_err:.3e}, "
                f"worst interval [{worst[2]:.6g}, {worst[3]:.6g}]",
                total, total_err, (worst[2], worst[3]),
            )
        neg_e, _, lo, hi, v = heapq.heappop(heap)
        mid = 0.5 * (lo + hi)
        if not (lo < mid < hi):
            # interval exhausted at double resolution; keep its estimate
            heapq.heappush(heap, (0.0, counter, lo, hi, v))
            counter += 1
            total_err += neg_e
            continue
        v1, e1 = _rule(f, lo, mid)
        v2, e2 = _rule(f, mid, hi)
        evaluations += 42
        total += v1 + v2 - v
        total_err += e1 + e2 + neg_e
        heapq.heappush(heap, (-e1, counter, lo, mid, v1))
        heapq.heappush(heap, (-e2, counter + 1, mid, hi, v2))
        counter += 2

    # re-sum to shed the drift of incremental updates
    total = sum(item[4] for item in heap)
    return QuadResult(complex(total), float(total_err), len(heap), evaluations)
