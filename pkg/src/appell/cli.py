"""Command-line entry point: ``appell compare | attractor | asymp``.

Exit status: 0 when every tolerance is met, 1 on a tolerance violation,
2 on invalid input.
"""

from __future__ import annotations

import argparse
import math
import os
import re
import shlex
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import attractor as att
from .asym import asymp_theorem1_terms
from .bernoulli import eval_sd_bernoulli
from .contour import InfiniteSingularities, eval_theorem1
from .core import GeneratingFunction, InvalidGeneratingFunction, bernoulli, eval_rescaled_direct, polynomial
from .logcomplex import log_sum
from .sdrep import eval_theorem2

COMMANDS = ("compare", "attractor", "asymp")
FORMATS = ("csv", "json", "gnuplot")


class InputError(ValueError):
    """Bad command-line input (exit status 2)."""


# ---------------------------------------------------------------------------
# parsing helpers

_NUM = r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"


def parse_complex(text: str) -> complex:
    """'a+bi', 'a', 'bi', '-i', with i or j as the imaginary unit; no spaces."""
    s = text.strip()
    if not s or " " in s or "(" in s:
        raise InputError(f"cannot parse complex number {text!r}")
    try:
        return complex(s.replace("i", "j"))
    except ValueError:
        raise InputError(f"cannot parse complex number {text!r}") from None


def format_complex(z: complex) -> str:
    return f"{z.real!r}{z.imag:+}i" if z.imag else f"{z.real!r}"


@dataclass(frozen=True)
class Grid:
    lo: float
    hi: float
    steps: int

    @classmethod
    def parse(cls, text: str) -> "Grid":
        parts = text.split(":")
        if len(parts) != 3:
            raise InputError(f"grid {text!r} must be min:max:steps")
        try:
            lo, hi, steps = float(parts[0]), float(parts[1]), int(parts[2])
        except ValueError as exc:
            raise InputError(f"grid {text!r}: {exc}") from None
        if steps < 1 or not hi >= lo:
            raise InputError(f"grid {text!r} needs steps >= 1 and max >= min")
        return cls(lo, hi, steps)

    def values(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.steps) if self.steps > 1 else np.array([self.lo])

    def __str__(self) -> str:
        return f"{self.lo!r}:{self.hi!r}:{self.steps}"


class _PolyParser:
    """Recursive descent over +, -, *, ^ (integer powers), parentheses, complex literals and x (or z)."""

    _TOKEN = re.compile(rf"\s*(?:(?P<num>{_NUM}[ij]?|[ij])|(?P<var>[xz])|(?P<op>[-+*^()]))")

    def __init__(self, text: str):
        self.text = text
        self.tokens: list[tuple[str, str]] = []
        pos = 0
        while pos < len(text):
            if text[pos:].strip() == "":
                break
            m = self._TOKEN.match(text, pos)
            if not m or m.end() == pos:
                raise InputError(f"unexpected character in {text!r} at position {pos}")
            kind = m.lastgroup
            self.tokens.append((kind, m.group(kind)))
            pos = m.end()
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else (None, None)

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def parse(self) -> np.ndarray:
        if not self.tokens:
            raise InputError("empty polynomial")
        p = self.expr()
        if self.i != len(self.tokens):
            raise InputError(f"trailing input in {self.text!r}")
        return p

    def expr(self) -> np.ndarray:
        p = self.term()
        while self.peek() in (("op", "+"), ("op", "-")):
            op = self.take()[1]
            q = self.term()
            p = _padd(p, q if op == "+" else -q)
        return p

    def term(self) -> np.ndarray:
        p = self.unary()
        while True:
            kind, val = self.peek()
            if (kind, val) == ("op", "*"):
                self.take()
                p = np.convolve(p, self.unary())
            elif kind in ("num", "var") or (kind, val) == ("op", "("):
                p = np.convolve(p, self.power())  # implicit product
            else:
                return p

    def unary(self) -> np.ndarray:
        if self.peek() == ("op", "-"):
            self.take()
            return -self.unary()
        if self.peek() == ("op", "+"):
            self.take()
            return self.unary()
        return self.power()

    def power(self) -> np.ndarray:
        base = self.primary()
        if self.peek() == ("op", "^"):
            self.take()
            kind, val = self.take()
            if kind != "num" or not val.isdigit():
                raise InputError(f"exponent must be a non-negative integer in {self.text!r}")
            out = np.array([1.0 + 0j])
            for _ in range(int(val)):
                out = np.convolve(out, base)
            return out
        return base

    def primary(self) -> np.ndarray:
        kind, val = self.take()
        if kind == "num":
            return np.array([parse_complex(val)])
        if kind == "var":
            return np.array([0j, 1.0 + 0j])
        if (kind, val) == ("op", "("):
            p = self.expr()
            if self.take() != ("op", ")"):
                raise InputError(f"missing ')' in {self.text!r}")
            return p
        raise InputError(f"unexpected token {val!r} in {self.text!r}")


def _padd(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    n = max(len(a), len(b))
    out = np.zeros(n, dtype=complex)
    out[: len(a)] += a
    out[: len(b)] += b
    return out


def parse_g(spec: str) -> GeneratingFunction:
    """'bernoulli', a coefficient list 'c0,c1,...' (lowest first) or an expression like '(x-1)(x^2+2)'."""
    s = spec.strip()
    if s.lower() == "bernoulli":
        return bernoulli()
    try:
        if re.search(r"[xz()^*]", s):
            coeffs = _PolyParser(s).parse()
        else:
            coeffs = np.array([parse_complex(t) for t in s.split(",")])
        return polynomial(coeffs, name=s)
    except InvalidGeneratingFunction as exc:
        raise InputError(str(exc)) from None


def _int_list(text: str) -> list[int]:
    try:
        out = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise InputError(f"bad integer list {text!r}") from None
    if not out or any(v < 1 for v in out):
        raise InputError(f"n values must be positive integers: {text!r}")
    return out


# ---------------------------------------------------------------------------
# configuration


@dataclass(frozen=True)
class RunConfig:
    command: str
    g_spec: str
    n_list: tuple[int, ...]
    points: tuple[complex, ...] = ()
    grid_re: Grid | None = None
    grid_im: Grid | None = None
    tol: float = 1e-8
    output: str = "-"
    fmt: str = "csv"
    resolution: int = 2000
    zero_radius: float | None = None

    def x_values(self) -> list[complex]:
        """Explicit points, then the grid in row-major (im outer, re inner) order, skipping x = 0."""
        xs = list(self.points)
        if self.grid_re is not None:
            gi = self.grid_im or self.grid_re
            for b in gi.values():
                for a in self.grid_re.values():
                    if a != 0 or b != 0:
                        xs.append(complex(a, b))
        return xs

    def to_argv(self) -> list[str]:
        argv = [self.command, f"--g={self.g_spec}", "--n=" + ",".join(map(str, self.n_list))]
        if self.points:
            argv.append("--points=" + ",".join(format_complex(p) for p in self.points))
        if self.grid_re is not None:
            argv.append(f"--grid={self.grid_re}")
        if self.grid_im is not None:
            argv.append(f"--grid-im={self.grid_im}")
        argv += [f"--tol={self.tol!r}", f"--output={self.output}", f"--format={self.fmt}",
                 f"--resolution={self.resolution}"]
        if self.zero_radius is not None:
            argv.append(f"--zero-radius={self.zero_radius!r}")
        return argv

    def serialize(self) -> str:
        return shlex.join(self.to_argv())


_VALUE_OPTS = {"--g", "--n", "--points", "--x", "--grid", "--grid-im", "--tol", "--output", "-o",
               "--format", "--resolution", "--zero-radius"}


def _glue_values(argv: list[str]) -> list[str]:
    """Turn '--grid -1:1:5' into '--grid=-1:1:5' so values may start with '-'."""
    out, i = [], 0
    while i < len(argv):
        a = argv[i]
        if a in _VALUE_OPTS and i + 1 < len(argv):
            out.append(f"{a}={argv[i + 1]}")
            i += 2
        else:
            out.append(a)
            i += 1
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="appell", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "compare": "oracle vs. real-axis and steepest-descent representations",
        "attractor": "attractor arcs, empirical roots and dominance regions",
        "asymp": "asymptotic error tables",
    }
    for name in COMMANDS:
        p = sub.add_parser(name, help=helps[name])
        p.add_argument("--g", required=True, help="'bernoulli', 'c0,c1,...' or an expression in x")
        p.add_argument("--n", required=name != "attractor", default=None, help="comma-separated degrees")
        p.add_argument("--points", "--x", dest="points", default=None, help="comma-separated complex points, e.g. 0.3+0.2i")
        p.add_argument("--grid", default=None, help="min:max:steps for Re x (and Im x unless --grid-im)")
        p.add_argument("--grid-im", default=None, help="min:max:steps for Im x")
        p.add_argument("--tol", type=float, default=1e-8)
        p.add_argument("--output", "-o", default="-", help="output file (directory for attractor)")
        p.add_argument("--format", dest="fmt", choices=FORMATS, default="csv")
        p.add_argument("--resolution", type=int, default=2000, help="samples per attractor arc")
        p.add_argument("--zero-radius", type=float, default=None,
                       help="ignore zeros of g beyond this modulus in attractor work")
    return parser


def parse_config(argv: list[str]) -> RunConfig:
    ns = build_parser().parse_args(_glue_values(list(argv)))
    n_text = ns.n if ns.n is not None else "50,100"
    points = tuple(parse_complex(t) for t in ns.points.split(",")) if ns.points else ()
    cfg = RunConfig(
        command=ns.command,
        g_spec=ns.g,
        n_list=tuple(_int_list(n_text)),
        points=points,
        grid_re=Grid.parse(ns.grid) if ns.grid else None,
        grid_im=Grid.parse(ns.grid_im) if ns.grid_im else None,
        tol=ns.tol,
        output=ns.output,
        fmt=ns.fmt,
        resolution=ns.resolution,
        zero_radius=ns.zero_radius,
    )
    if cfg.resolution < 8:
        raise InputError("--resolution must be >= 8")
    return cfg


# ---------------------------------------------------------------------------
# execution helpers


def worker_count() -> int:
    env = os.environ.get("APPELL_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise InputError(f"APPELL_THREADS must be an integer, got {env!r}") from None
    return os.cpu_count() or 1


def _map(fn, tasks: list) -> list:
    """Ordered map; worker processes (mpmath precision is process-global, so no threads)."""
    workers = min(worker_count(), len(tasks))
    if workers <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, tasks, chunksize=max(1, len(tasks) // (4 * workers))))


def _f(v: float) -> str:
    return f"{v:.10e}" if math.isfinite(v) else ("inf" if v > 0 else ("-inf" if v < 0 else "nan"))


def _write(cfg: RunConfig, rows: list[dict], columns: list[str], path: str | None = None) -> None:
    text = render(rows, columns, cfg.fmt)
    target = path or cfg.output
    if target == "-":
        sys.stdout.write(text)
    else:
        Path(target).write_text(text)


def render(rows: list[dict], columns: list[str], fmt: str) -> str:
    if fmt == "json":
        return att.rows_to_json([{c: r[c] for c in columns} for r in rows]) + "\n"
    if fmt == "gnuplot":
        lines = ["# " + " ".join(columns)]
        lines += [" ".join(str(r[c]).replace(" ", "_") for c in columns) for r in rows]
        return "\n".join(lines) + "\n"
    return att.rows_to_csv(rows, columns)


# ---------------------------------------------------------------------------
# compare

COMPARE_COLUMNS = ["n", "x_re", "x_im", "oracle_log_abs", "oracle_arg", "t1_log_abs", "t1_arg",
                   "t2_log_abs", "t2_arg", "gap_t1", "gap_t2", "gap_t1_t2", "res_t1", "res_t2", "status"]


def _compare_task(task) -> dict:
    g, n, x, tol = task
    oracle = eval_rescaled_direct(g, n, x)
    t1 = eval_theorem1(g, n, x)
    note = ""
    try:
        t2 = eval_theorem2(g, n, x)
        t2_total, res2 = t2.total, sum(1 for r in t2.residues if r.weight)
    except InfiniteSingularities:
        if g.name != "bernoulli":
            raise
        be = eval_sd_bernoulli(n, x)
        t2_total, res2 = be.total, len(be.breakdown.residues)
        note = "polylog"
    gaps = (t1.total.rel_diff(oracle), t2_total.rel_diff(oracle), t1.total.rel_diff(t2_total))
    ok = all(gp <= tol for gp in gaps)
    status = ("ok" if ok else "FAIL") + (f";{note}" if note else "")
    return {
        "n": n, "x_re": repr(x.real), "x_im": repr(x.imag),
        "oracle_log_abs": _f(oracle.log_mag), "oracle_arg": _f(oracle.phase),
        "t1_log_abs": _f(t1.total.log_mag), "t1_arg": _f(t1.total.phase),
        "t2_log_abs": _f(t2_total.log_mag), "t2_arg": _f(t2_total.phase),
        "gap_t1": f"{gaps[0]:.3e}", "gap_t2": f"{gaps[1]:.3e}", "gap_t1_t2": f"{gaps[2]:.3e}",
        "res_t1": sum(1 for r in t1.residues if r.weight), "res_t2": res2, "status": status,
        "_ok": ok,
    }


def cmd_compare(cfg: RunConfig) -> int:
    g = parse_g(cfg.g_spec)
    xs = cfg.x_values() or [complex(0.5, 0.25)]
    if any(x == 0 for x in xs):
        raise InputError("x = 0 is not allowed")
    tasks = [(g, n, x, cfg.tol) for n in cfg.n_list for x in xs]
    rows = _map(_compare_task, tasks)
    _write(cfg, rows, COMPARE_COLUMNS)
    return 0 if all(r["_ok"] for r in rows) else 1


# ---------------------------------------------------------------------------
# attractor

GNUPLOT_TEMPLATE = """\
set datafile separator ','
set size ratio -1
set key outside
set xlabel 'Re x'
set ylabel 'Im x'
plot {plots}
"""


def cmd_attractor(cfg: RunConfig) -> int:
    g = parse_g(cfg.g_spec)
    too_big = [n for n in cfg.n_list if n > att.MAX_ROOT_DEGREE]
    if too_big:
        raise InputError(f"n = {too_big[0]} exceeds {att.MAX_ROOT_DEGREE}; root clouds beyond that "
                         "need more precision than double-seeded refinement provides")
    outdir = Path("." if cfg.output == "-" else cfg.output)
    outdir.mkdir(parents=True, exist_ok=True)
    ext = "json" if cfg.fmt == "json" else "csv"
    fmt = "json" if cfg.fmt == "json" else "csv"
    cols = ["re", "im", "kind", "param"]
    arcs = att.attractor_arcs(g, cfg.resolution, radius=cfg.zero_radius)
    (outdir / f"arcs.{ext}").write_text(render(att.arcs_rows(arcs), cols, fmt))
    marks = att.points_rows(att.arc_corners(arcs), "corner") + att.points_rows(att.junction_points(arcs), "junction")
    (outdir / f"points.{ext}").write_text(render(marks, cols, fmt))
    roots = _map(_roots_task, [(g, n) for n in cfg.n_list])
    for n, r in zip(cfg.n_list, roots):
        r = sorted(r, key=lambda z: (round(z.real, 12), round(z.imag, 12)))
        (outdir / f"roots_n{n}.{ext}").write_text(render(att.points_rows(r, f"root_n{n}"), cols, fmt))
    grid_re = cfg.grid_re or Grid(-1.5, 1.5, 301)
    xs = RunConfig("attractor", cfg.g_spec, cfg.n_list, (), grid_re, cfg.grid_im).x_values()
    champ = att.dominance_grid(g, np.array(xs), radius=cfg.zero_radius)
    zl = att._zero_list(g, cfg.zero_radius)
    labels = ["saddle"] + [f"zeta={att._fmt(z)}" for z in zl]
    regions = [{"re": f"{x.real:.15g}", "im": f"{x.imag:.15g}", "kind": labels[c], "param": str(int(c))}
               for x, c in zip(xs, champ)]
    (outdir / f"regions.{ext}").write_text(render(regions, cols, fmt))
    plots = ["'arcs.csv' using 1:2 with dots title 'attractor'"]
    plots += [f"'roots_n{n}.csv' using 1:2 with points pt 7 ps 0.4 title 'n={n}'" for n in cfg.n_list]
    plots.append("'points.csv' using 1:2 with points pt 6 ps 1.2 title 'corners/junctions'")
    (outdir / "attractor.gp").write_text(GNUPLOT_TEMPLATE.format(plots=", \\\n     ".join(plots)))
    return 0


def _roots_task(task):
    g, n = task
    return list(att.roots_rescaled(g, n))


# ---------------------------------------------------------------------------
# asymp

ASYMP_COLUMNS = ["n", "x_re", "x_im", "exact_log_abs", "exact_arg", "err_leading", "err_two_term",
                 "order_leading", "order_two_term", "flags"]


def _asymp_task(task) -> dict:
    g, n, x = task
    exact = eval_rescaled_direct(g, n, x)
    terms = asymp_theorem1_terms(g, n, x)
    lead = log_sum([t.value(1) for t in terms])
    two = log_sum([t.value(2) for t in terms])
    flags = sorted({f for t in terms for f in t.flags} | ({"saddle_pole"} if terms[0].kind == "saddle_pole" else set()))
    return {"n": n, "x": x, "exact": exact, "err_leading": lead.rel_diff(exact),
            "err_two_term": two.rel_diff(exact), "flags": ";".join(flags)}


def fitted_order(ns, errs) -> float:
    """Least-squares slope of log(err) against log(n)."""
    ln = np.log(np.asarray(ns, dtype=float))
    le = np.log(np.maximum(np.asarray(errs, dtype=float), 1e-300))
    return float(np.polyfit(ln, le, 1)[0]) if len(ns) > 1 else float("nan")


def cmd_asymp(cfg: RunConfig) -> int:
    g = parse_g(cfg.g_spec)
    xs = cfg.x_values() or [complex(2.0)]
    if any(x == 0 for x in xs):
        raise InputError("x = 0 is not allowed")
    res = _map(_asymp_task, [(g, n, x) for x in xs for n in cfg.n_list])
    rows = []
    for x in xs:
        group = [r for r in res if r["x"] == x]
        ol = fitted_order([r["n"] for r in group], [r["err_leading"] for r in group])
        ot = fitted_order([r["n"] for r in group], [r["err_two_term"] for r in group])
        for r in group:
            rows.append({
                "n": r["n"], "x_re": repr(x.real), "x_im": repr(x.imag),
                "exact_log_abs": _f(r["exact"].log_mag), "exact_arg": _f(r["exact"].phase),
                "err_leading": f"{r['err_leading']:.6e}", "err_two_term": f"{r['err_two_term']:.6e}",
                "order_leading": f"{ol:.4f}", "order_two_term": f"{ot:.4f}", "flags": r["flags"] or "-",
            })
            if "boundary" in r["flags"]:
                print(f"warning: x={format_complex(x)} lies on a dominance boundary; expansion is not uniform",
                      file=sys.stderr)
    _write(cfg, rows, ASYMP_COLUMNS)
    return 0


# ---------------------------------------------------------------------------


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg = parse_config(argv)
        handler = {"compare": cmd_compare, "attractor": cmd_attractor, "asymp": cmd_asymp}[cfg.command]
        return handler(cfg)
    except SystemExit as exc:  # argparse
        return int(exc.code or 0)
    except InputError as exc:
        print(f"appell: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
