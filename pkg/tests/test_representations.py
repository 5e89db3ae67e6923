"""Real-axis and steepest-descent representations against the coefficient oracle."""

import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from appell.contour import (
    DegenerateSingularity,
    InfiniteSingularities,
    Position,
    Singularity,
    eval_theorem1,
    residue,
    theta_singularities,
)
from appell.core import bernoulli, eval_rescaled_direct, from_roots, polynomial
from appell.sdrep import eval_theorem2, truncation

X_REF = cmath.exp(2j * math.pi / 3) / (6 * math.pi)

xs = st.complex_numbers(min_magnitude=0.05, max_magnitude=2.5, allow_nan=False, allow_infinity=False)


def test_bernoulli_axis_singularities_at_reference_point():
    sings = theta_singularities(bernoulli(), X_REF)
    assert len(sings) == 6
    for s in sings:
        k = round(abs(s.zeta) / (2 * math.pi))
        X = -5 * math.pi / 6 if s.zeta.imag > 0 else math.pi / 6
        assert abs(s.theta - complex(X, -math.log(k / 3))) < 1e-13
        assert s.axis is (Position.ON if k == 3 else Position.ABOVE)


@pytest.mark.parametrize("x", [0.7 + 0.2j, -0.4 + 1.1j, 1.8, 0.2 - 0.9j])
def test_theorems_agree_with_oracle(gs, x):
    for name, g in gs.items():
        n = 17
        exact = eval_rescaled_direct(g, n, x)
        t1 = eval_theorem1(g, n, x)
        t2 = eval_theorem2(g, n, x)
        assert t1.total.rel_diff(exact) < 1e-9, name
        assert t2.total.rel_diff(exact) < 1e-9, name
        assert t1.total.rel_diff(t1.assemble()) < 1e-15
        assert abs(t1.prefactor.to_complex() - x**n / (2 * math.pi)) <= 1e-13 * abs(x) ** n


@settings(max_examples=30, deadline=None)
@given(xs, st.integers(1, 30))
def test_theorem1_random(x, n):
    g = from_roots([1, -0.5 + 0.8j])
    assert eval_theorem1(g, n, x).total.rel_diff(eval_rescaled_direct(g, n, x)) < 1e-9


def test_continuity_across_unit_circle():
    g = polynomial([-1, 1])  # zero at 1 crosses the axis at x = 1
    n = 12
    vals = [eval_theorem1(g, n, x) for x in (1 - 1e-9, 1.0, 1 + 1e-9)]
    assert [len([r for r in v.residues if r.weight]) for v in vals] == [1, 1, 0]
    assert vals[1].residues[0].weight == 0.5
    for v in vals:
        assert v.total.rel_diff(vals[1].total) < 1e-6
        assert v.total.rel_diff(eval_rescaled_direct(g, n, 1.0)) < 1e-6


def test_residue_is_periodic():
    g = from_roots([2j, -1.5])
    x, n = 0.3 + 0.1j, 9
    s = theta_singularities(g, x)[0]
    shifted = Singularity(s.theta + 2 * math.pi, s.zeta, s.order, s.axis, s.curve)
    assert residue(g, n, x, s).rel_diff(residue(g, n, x, shifted)) < 1e-12


def test_double_pole_residue():
    g = from_roots([0.8j, 0.8j, -2.0])
    for x in (0.9 + 0.3j, -1.0 + 0.5j):
        assert eval_theorem1(g, 11, x).total.rel_diff(eval_rescaled_direct(g, 11, x)) < 1e-9
        assert eval_theorem2(g, 11, x).total.rel_diff(eval_rescaled_direct(g, 11, x)) < 1e-9


def test_double_pole_on_axis_raises():
    with pytest.raises(DegenerateSingularity):
        eval_theorem1(from_roots([1, 1]), 5, 1.0)


def test_truncation_doubling():
    g = from_roots([1 + 1j, -2])
    x, n = 0.6 - 0.3j, 15
    a = eval_theorem2(g, n, x)
    b = eval_theorem2(g, n, x, T=2 * truncation(n))
    assert a.total.rel_diff(b.total) < 1e-12


def test_weight_sets_differ_by_region_between_paths():
    g = bernoulli()
    x, n = 0.25 + 0.12j, 10
    t1 = {(round(r.singularity.zeta.imag, 6)): r.weight for r in eval_theorem1(g, n, x).residues}
    t2 = {(round(r.singularity.zeta.imag, 6)): r.weight for r in eval_theorem2(g, n, x).residues}
    # every pole above the real axis is also above the curve (the curve lies below the axis)
    assert all(t2.get(k, 0) >= w for k, w in t1.items())
    assert sum(t2.values()) > sum(t1.values())
    extra = [k for k in t2 if t2[k] and not t1.get(k)]
    for s in theta_singularities(g, x, "curve_C"):
        if round(s.zeta.imag, 6) in extra:
            assert s.theta.imag < 0  # below the axis, above the curve


@pytest.mark.parametrize("x", [1e-8 - 0.4j, 1e-6 + 0.05j])
def test_nearly_imaginary_bernoulli_truncates_residue_sum(x):
    # the curve radius is ~1e8 / |x| here; the shell walk must stop early
    t2 = eval_theorem2(bernoulli(), 30, x)
    assert t2.diagnostics["residues_truncated_at"] is not None and len(t2.residues) < 1000
    assert t2.total.rel_diff(eval_rescaled_direct(bernoulli(), 30, x)) < 1e-12


def test_bernoulli_imaginary_axis_rejected_by_generic_path():
    with pytest.raises(InfiniteSingularities):
        eval_theorem2(bernoulli(), 8, 0.3j)


def test_invalid_arguments():
    g = polynomial([1, 1])
    for f in (eval_theorem1, eval_theorem2):
        with pytest.raises(ValueError):
            f(g, 0, 0.5)
        with pytest.raises(ValueError):
            f(g, 3, 0)
