"""Aberth-Ehrlich simultaneous root finding with optional multiprecision polishing."""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
import numpy as np


@dataclass
class RootResult:
    roots: np.ndarray
    steps: np.ndarray  # last |p/p'| per root
    converged: np.ndarray  # bool per root
    iterations: int


def _horner_pair(coeffs_desc: np.ndarray, z: np.ndarray):
    p = np.full(z.shape, coeffs_desc[0], dtype=complex)
    dp = np.zeros(z.shape, dtype=complex)
    for c in coeffs_desc[1:]:
        dp = dp * z + p
        p = p * z + c
    return p, dp


def seed_radius(coeffs: np.ndarray) -> float:
    """Upper root-modulus estimate max_k |a_k/a_deg|^(1/(deg-k)) (coefficients lowest first)."""
    deg = len(coeffs) - 1
    lead = abs(coeffs[-1])
    best = 0.0
    for k in range(deg):
        if coeffs[k] != 0:
            best = max(best, (abs(coeffs[k]) / lead) ** (1.0 / (deg - k)))
    return best


def aberth(coeffs, *, tol: float = 1e-15, max_iter: int = 1000) -> RootResult:
    """All roots of sum(coeffs[k] x**k) by Aberth-Ehrlich iteration.

    Updates are simultaneous (Jacobi style): every root in a sweep sees the
    previous sweep's approximations.
    """
    c = np.asarray(coeffs, dtype=complex)
    nz = np.flatnonzero(c)
    if nz.size == 0:
        raise ValueError("the zero polynomial has no well-defined roots")
    c = c[: nz[-1] + 1]
    low = nz[0]  # roots exactly at zero
    c = c[low:]
    deg = len(c) - 1
    if deg == 0:
        zeros = np.zeros(low, dtype=complex)
        return RootResult(zeros, np.zeros(low), np.ones(low, bool), 0)

    radius = 1.2 * seed_radius(c)
    angles = 2 * math.pi * np.arange(deg) / deg + 0.4
    z = radius * np.exp(1j * angles)
    desc = c[::-1] / c[-1]
    steps = np.full(deg, np.inf)
    active = np.ones(deg, bool)
    it = 0
    for it in range(1, max_iter + 1):
        p, dp = _horner_pair(desc, z)
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, 1.0)
        s = (1.0 / diff).sum(axis=1) - 1.0  # remove the diagonal's 1/1
        ratio = np.where(dp != 0, p / np.where(dp != 0, dp, 1), np.inf)
        with np.errstate(divide="ignore", invalid="ignore"):
            w = ratio / (1.0 - ratio * s)
        w = np.where(np.isfinite(w), w, 0.0)
        w[~active] = 0.0
        z = z - w
        steps = np.where(active, np.abs(w), steps)
        active &= np.abs(w) > tol * np.maximum(1.0, np.abs(z))
        if not active.any():
            break
    roots = np.concatenate([np.zeros(low, dtype=complex), z])
    steps = np.concatenate([np.zeros(low), steps])
    converged = np.concatenate([np.ones(low, bool), ~active])
    return RootResult(roots, steps, converged, it)


def polish_mp(coeffs_mp, roots, *, dps: int = 40, iterations: int = 3):
    """Newton-polish double roots against multiprecision coefficients (lowest first).

    Returns (roots, steps) where steps[i] is the size of the last Newton step.
    """
    desc = list(coeffs_mp)[::-1]
    out = np.empty(len(roots), dtype=complex)
    steps = np.empty(len(roots))
    with mpmath.workdps(dps):
        desc = [mpmath.mpmathify(c) for c in desc]
        for i, r in enumerate(roots):
            z = mpmath.mpc(r)
            step = mpmath.mpf(0)
            for _ in range(iterations):
                p, dp = mpmath.polyval(desc, z, derivative=True)
                if dp == 0:
                    break
                step = p / dp
                z -= step
            out[i] = complex(z)
            steps[i] = float(abs(step))
    return out, steps


def aberth_mp(coeffs_mp, seeds, *, dps: int = 40, tol: float | None = None, max_sweeps: int = 200) -> RootResult:
    """Aberth-Ehrlich sweeps at ``dps`` digits, starting from ``seeds`` (Gauss-Seidel order).

    Unlike plain Newton polishing this keeps the approximations apart, so
    clustered roots of an ill-conditioned polynomial do not merge.
    Coefficients are lowest first; seeds must number the degree.
    """
    with mpmath.workdps(dps):
        c = [mpmath.mpmathify(v) for v in coeffs_mp]
        while c and c[-1] == 0:
            c.pop()
        deg = len(c) - 1
        if len(seeds) != deg:
            raise ValueError(f"need {deg} seeds, got {len(seeds)}")
        desc = [v / c[-1] for v in c[::-1]]
        z = [mpmath.mpc(complex(s)) for s in seeds]
        eps = mpmath.mpf(10) ** (-(dps - 5)) if tol is None else mpmath.mpf(tol)
        steps = [mpmath.inf] * deg
        active = [True] * deg
        sweep = 0
        for sweep in range(1, max_sweeps + 1):
            for i in range(deg):
                if not active[i]:
                    continue
                zi = z[i]
                p, dp = mpmath.polyval(desc, zi, derivative=True)
                if p == 0:
                    steps[i] = mpmath.mpf(0)
                    active[i] = False
                    continue
                ratio = p / dp if dp != 0 else mpmath.inf
                s = mpmath.fsum(1 / (zi - z[j]) for j in range(deg) if j != i)
                w = ratio / (1 - ratio * s)
                z[i] = zi - w
                steps[i] = abs(w)
                if steps[i] <= eps * max(1, abs(z[i])):
                    active[i] = False
            if not any(active):
                break
        roots = np.array([complex(v) for v in z])
        return RootResult(roots, np.array([float(s) for s in steps]), ~np.array(active), sweep)
