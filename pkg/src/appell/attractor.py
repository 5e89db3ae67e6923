"""Zero attractors of pi_n: boundaries between the regions where one exponential term dominates.

Each candidate term has a log-growth rate per unit n:

    saddle:          1
    zero zeta_k:     Re(zeta_k x) - log|zeta_k x|     (only while |zeta_k x| < 1)

The attractor consists of the curves where the two largest rates tie.  A tie
between the saddle and zeta is the Szego curve |z e^{1-z}| = 1, |z| <= 1,
pulled back by x = z/zeta.  A tie between two zeros is the straight line
Re((zeta_k - zeta_j) x) = log|zeta_k/zeta_j|.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .core import GeneratingFunction, rescaled_coefficients, rescaled_coefficients_mp
from .roots import aberth, aberth_mp

TIE_TOL = 1e-12
MAX_ROOT_DEGREE = 200
# zeros beyond this radius are ignored for g with infinitely many zeros
DEFAULT_ZERO_RADIUS = 4 * math.pi + 1e-9


@dataclass(frozen=True)
class DominanceReport:
    x: complex
    champion: complex | None  # the dominating zero, None for the saddle
    log_phi: float
    margin: float  # log-gap to the runner-up (inf when unopposed)

    @property
    def phi(self) -> float:
        return math.exp(self.log_phi)

    @property
    def label(self) -> str:
        return "saddle" if self.champion is None else f"zeta={_fmt(self.champion)}"


@dataclass
class AttractorArc:
    """A sampled attractor piece.

    kind is "szego" (zetas = (zeta,), param = angle of z = zeta x) or
    "line" (zetas = (zeta_k, zeta_j), param = arclength along the line).
    """

    kind: str
    zetas: tuple[complex, ...]
    params: np.ndarray
    samples: np.ndarray
    validity: dict = field(default_factory=dict)

    @property
    def param_range(self) -> tuple[float, float]:
        return float(self.params[0]), float(self.params[-1])

    def residuals(self) -> np.ndarray:
        """Defining-equation residuals at the samples."""
        x = self.samples
        if self.kind == "szego":
            w = self.zetas[0] * x
            return np.abs(w.real - np.log(np.abs(w)) - 1.0)
        zk, zj = self.zetas
        return np.abs(((zk - zj) * x).real - math.log(abs(zk) / abs(zj)))


def _fmt(z: complex) -> str:
    # drop root-finding noise in a part that is negligible next to |z|
    tiny = 1e-14 * abs(z)
    re = 0.0 if abs(z.real) <= tiny else z.real
    im = 0.0 if abs(z.imag) <= tiny else z.imag
    return f"{re:.12g}{im:+.12g}i"


def _zero_list(g: GeneratingFunction, radius: float | None) -> list[complex]:
    if radius is None:
        radius = DEFAULT_ZERO_RADIUS if g.zero_directions is not None else math.inf
    return [z for z, _ in g.zeros(radius)]


def _rates(zetas: np.ndarray, x: np.ndarray, closed: bool = True) -> np.ndarray:
    """Growth rates, shape (len(x), 1 + len(zetas)); column 0 is the saddle, -inf marks inadmissible.

    ``closed`` admits |zeta x| = 1, where the rate Re(zeta x) <= 1 can only tie
    the saddle (at zeta x = 1, the Szego corner).
    """
    x = np.atleast_1d(np.asarray(x, dtype=complex))
    w = x[:, None] * zetas[None, :]
    aw = np.abs(w)
    ok = aw <= 1.0 if closed else aw < 1.0
    with np.errstate(divide="ignore"):
        r = np.where(ok, w.real - np.log(aw), -np.inf)
    return np.concatenate([np.ones((x.size, 1)), r], axis=1)


def dominance(g: GeneratingFunction, x: complex, *, radius: float | None = None) -> DominanceReport:
    """Which exponential term wins at x, with log-margin to the runner-up."""
    x = complex(x)
    if x == 0:
        raise ValueError("x = 0 is not allowed")
    zetas = np.array(_zero_list(g, radius), dtype=complex)
    r = _rates(zetas, np.array([x]), closed=False)[0]
    order = np.argsort(-r, kind="stable")
    best = int(order[0])
    margin = float(r[best] - r[order[1]]) if r.size > 1 and np.isfinite(r[order[1]]) else math.inf
    champ = None if best == 0 else complex(zetas[best - 1])
    return DominanceReport(x, champ, float(r[best]), margin)


def dominance_grid(g: GeneratingFunction, xs: np.ndarray, *, radius: float | None = None) -> np.ndarray:
    """Champion column index per point (0 saddle, k for the k-th zero of the list)."""
    zetas = np.array(_zero_list(g, radius), dtype=complex)
    r = _rates(zetas, np.asarray(xs, dtype=complex).ravel(), closed=False)
    return np.argmax(r, axis=1).reshape(np.shape(xs))


# ---------------------------------------------------------------------------
# Szego curve


def szego_radius(phi) -> np.ndarray:
    """r in (0, 1] with log r + 1 - r cos(phi) = 0 (safeguarded Newton in s = log r)."""
    phi = np.atleast_1d(np.asarray(phi, dtype=float))
    c = np.cos(phi)
    lo = np.full(phi.shape, -2.0)
    hi = np.zeros(phi.shape)
    s = np.full(phi.shape, -0.5)
    for _ in range(200):
        f = s + 1.0 - np.exp(s) * c
        lo = np.where(f < 0, s, lo)
        hi = np.where(f >= 0, s, hi)
        d = 1.0 - np.exp(s) * c
        with np.errstate(divide="ignore", invalid="ignore"):
            cand = s - f / d
        bad = ~np.isfinite(cand) | (cand <= lo) | (cand >= hi)
        new = np.where(bad, 0.5 * (lo + hi), cand)
        if np.all(np.abs(new - s) <= 1e-17):
            s = new
            break
        s = new
    r = np.exp(s)
    r[phi == 0] = 1.0
    return r


def szego_points(phi) -> np.ndarray:
    phi = np.asarray(phi, dtype=float)
    return szego_radius(phi) * np.exp(1j * phi)


# ---------------------------------------------------------------------------
# arc assembly


def _line_frame(zk: complex, zj: complex) -> tuple[complex, complex]:
    """(x0, d): the tie line is x0 + t d, t real, |d| = 1."""
    a = zk - zj
    c = math.log(abs(zk) / abs(zj))
    return c * a.conjugate() / abs(a) ** 2, 1j * a.conjugate() / abs(a)


def _disk_interval(x0: complex, d: complex, zeta: complex) -> tuple[float, float] | None:
    """t-range where |zeta (x0 + t d)| <= 1."""
    # |x0 + t d|^2 = t^2 + 2 t Re(x0 conj d) + |x0|^2 <= 1/|zeta|^2
    b = (x0 * d.conjugate()).real
    disc = b * b - (abs(x0) ** 2 - 1.0 / abs(zeta) ** 2)
    if disc <= 0:
        return None
    s = math.sqrt(disc)
    return -b - s, -b + s


def _valid_mask(rates: np.ndarray, pair: tuple[int, int]) -> np.ndarray:
    """Points where the tying pair is admissible and no third term beats it by more than TIE_TOL."""
    i, j = pair
    tie = np.minimum(rates[:, i], rates[:, j])
    others = rates.copy()
    others[:, [i, j]] = -np.inf
    return np.isfinite(tie) & (others.max(axis=1) <= tie + TIE_TOL)


def _runs(mask: np.ndarray) -> list[tuple[int, int]]:
    out = []
    i = 0
    while i < mask.size:
        if mask[i]:
            j = i
            while j + 1 < mask.size and mask[j + 1]:
                j += 1
            out.append((i, j))
            i = j + 1
        else:
            i += 1
    return out


def _refine_end(point, zetas, pair, inside: float, outside: float, iters: int = 60) -> float:
    """Bisect the parameter between a valid and an invalid sample."""
    for _ in range(iters):
        mid = 0.5 * (inside + outside)
        ok = _valid_mask(_rates(zetas, point(np.array([mid]))), pair)[0]
        if ok:
            inside = mid
        else:
            outside = mid
    return inside


def _clip(kind, zk_tuple, params, point, zetas, pair) -> list[AttractorArc]:
    pts = point(params)
    mask = _valid_mask(_rates(zetas, pts), pair)
    arcs = []
    for a, b in _runs(mask):
        p = params[a : b + 1].copy()
        if a > 0:
            p[0] = _refine_end(point, zetas, pair, params[a], params[a - 1])
        if b + 1 < params.size:
            p[-1] = _refine_end(point, zetas, pair, params[b], params[b + 1])
        if p.size < 2 or p[-1] == p[0]:
            continue
        validity = {"pair": tuple("saddle" if k == 0 else _fmt(zetas[k - 1]) for k in pair),
                    "clipped_start": a > 0, "clipped_end": b + 1 < params.size}
        arcs.append(AttractorArc(kind, zk_tuple, p, point(p), validity))
    return arcs


def _closed_grid(phi: np.ndarray, point, zetas, pair) -> np.ndarray:
    """Rotate a closed-curve grid [-pi, pi] to start at an invalid sample so no arc straddles the seam."""
    mask = _valid_mask(_rates(zetas, point(phi[:-1])), pair)
    bad = np.flatnonzero(~mask)
    if bad.size == 0 or bad[0] == 0:
        return phi
    f = int(bad[0])
    base = phi[:-1]
    return np.concatenate([base[f:], base[:f] + 2 * math.pi, [base[f] + 2 * math.pi]])


def attractor_arcs(g: GeneratingFunction, resolution: int = 2000, *, radius: float | None = None) -> list[AttractorArc]:
    """Szego arcs and equimodulus lines, each clipped to where its two terms jointly dominate.

    ``radius`` limits the zeros considered (needed for g with infinitely many).
    """
    if resolution < 8:
        raise ValueError("resolution must be >= 8")
    zl = _zero_list(g, radius)
    zetas = np.array(zl, dtype=complex)
    arcs: list[AttractorArc] = []
    # even count keeps phi = 0 (the corner z = 1) on the grid
    m = resolution + (resolution % 2) + 1
    phi = np.linspace(-math.pi, math.pi, m)
    for k, zeta in enumerate(zl, start=1):
        def point(t, zeta=zeta):
            return szego_points(t) / zeta
        arcs += _clip("szego", (zeta,), _closed_grid(phi, point, zetas, (0, k)), point, zetas, (0, k))
    for k in range(len(zl)):
        for j in range(k + 1, len(zl)):
            zk, zj = zl[k], zl[j]
            x0, d = _line_frame(zk, zj)
            ik, ij = _disk_interval(x0, d, zk), _disk_interval(x0, d, zj)
            if ik is None or ij is None:
                continue
            lo, hi = max(ik[0], ij[0]), min(ik[1], ij[1])
            if hi <= lo:
                continue
            t = np.linspace(lo, hi, resolution + 1)[1:-1]

            def point(s, x0=x0, d=d):
                return x0 + np.asarray(s) * d
            arcs += _clip("line", (zk, zj), t, point, zetas, (k + 1, j + 1))
    return arcs


def arc_corners(arcs: list[AttractorArc], min_turn: float = 0.5, stencil: int = 3) -> list[complex]:
    """Interior samples where an arc turns by more than ``min_turn`` radians (cusps and corners)."""
    out = []
    for arc in arcs:
        s = arc.samples
        for i in range(stencil, len(s) - stencil):
            a = s[i] - s[i - stencil]
            b = s[i + stencil] - s[i]
            if abs(a) == 0 or abs(b) == 0:
                continue
            turn = abs(np.angle(b / a))
            if turn > min_turn:
                local = [abs(np.angle((s[k + stencil] - s[k]) / (s[k] - s[k - stencil])))
                         for k in range(max(stencil, i - stencil), min(len(s) - stencil, i + stencil + 1))]
                if turn >= max(local):
                    out.append(complex(s[i]))
    return out


def junction_points(arcs: list[AttractorArc], tol: float = 1e-9) -> list[complex]:
    """Clipped arc ends, where a third term takes over (merged within tol)."""
    pts: list[complex] = []
    for arc in arcs:
        ends = []
        if arc.validity.get("clipped_start"):
            ends.append(complex(arc.samples[0]))
        if arc.validity.get("clipped_end"):
            ends.append(complex(arc.samples[-1]))
        for e in ends:
            if all(abs(e - p) > tol for p in pts):
                pts.append(e)
    return pts


# ---------------------------------------------------------------------------
# empirical roots


def roots_rescaled(g: GeneratingFunction, n: int, *, tol: float = 1e-18) -> np.ndarray:
    """All n roots of pi_n(x).

    A double-precision Aberth pass seeds a multiprecision Aberth refinement on
    the exact coefficients; double precision alone cannot resolve the roots.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if n > MAX_ROOT_DEGREE:
        raise ValueError(f"n = {n} exceeds {MAX_ROOT_DEGREE}: roots need more precision than this tool carries")
    dps = 30 + n // 2
    coeffs = rescaled_coefficients(g, n)
    seed = aberth(coeffs, max_iter=300)
    cm = rescaled_coefficients_mp(g, n, dps)
    low = int(np.flatnonzero(coeffs)[0])
    if low == n:
        return np.zeros(n, dtype=complex)
    res = aberth_mp(cm[low:], seed.roots[low:], dps=dps, tol=tol)
    if not res.converged.all():
        bad = np.flatnonzero(~res.converged)
        raise ArithmeticError(f"root refinement did not converge for {bad.size} roots (e.g. {res.roots[bad[0]]})")
    return np.concatenate([np.zeros(low, dtype=complex), res.roots])


def distance_to_arcs(points: np.ndarray, arcs: list[AttractorArc]) -> np.ndarray:
    """Distance from each point to the polyline union of the arcs."""
    p = np.atleast_1d(np.asarray(points, dtype=complex))
    best = np.full(p.shape, np.inf)
    for arc in arcs:
        a = arc.samples[:-1]
        b = arc.samples[1:]
        ab = b - a
        L2 = np.abs(ab) ** 2
        L2 = np.where(L2 == 0, 1.0, L2)
        t = ((p[:, None] - a[None, :]) * ab.conjugate()[None, :]).real / L2[None, :]
        t = np.clip(t, 0.0, 1.0)
        d = np.abs(p[:, None] - (a[None, :] + t * ab[None, :])).min(axis=1)
        best = np.minimum(best, d)
    return best


def hausdorff_one_sided(points: np.ndarray, arcs: list[AttractorArc]) -> float:
    """max over points of the distance to the arcs."""
    return float(distance_to_arcs(points, arcs).max())


# ---------------------------------------------------------------------------
# serialisation


def arcs_rows(arcs: list[AttractorArc]) -> list[dict]:
    rows = []
    for idx, arc in enumerate(arcs):
        kind = f"{arc.kind}:{'|'.join(_fmt(z) for z in arc.zetas)}:{idx}"
        for t, x in zip(arc.params, arc.samples):
            rows.append({"re": f"{x.real:.15g}", "im": f"{x.imag:.15g}", "kind": kind, "param": f"{t:.15g}"})
    return rows


def points_rows(points, kind: str) -> list[dict]:
    return [{"re": f"{z.real:.15g}", "im": f"{z.imag:.15g}", "kind": kind, "param": str(i)}
            for i, z in enumerate(points)]


def rows_to_csv(rows: list[dict], columns=("re", "im", "kind", "param")) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(columns), lineterminator="\n", extrasaction="ignore")
    w.writeheader()
    w.writerows(rows)
    return buf.getvalue()


def rows_to_json(rows: list[dict]) -> str:
    return json.dumps(rows, indent=1)
