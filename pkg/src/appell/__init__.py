"""Rescaled Appell polynomials: exact coefficients, contour representations, asymptotics and zero attractors."""

from .asym import AsymptoticTerm, asymp_steepest, asymp_steepest_two_term, asymp_theorem1_terms
from .attractor import AttractorArc, DominanceReport, attractor_arcs, dominance, roots_rescaled
from .bernoulli import (
    BernoulliEval,
    bernoulli_asymp,
    bernoulli_oracle,
    eval_corollary1,
    eval_sd_bernoulli,
    polylog,
)
from .contour import (
    DegenerateSingularity,
    InfiniteSingularities,
    Position,
    RepresentationBreakdown,
    Singularity,
    eval_theorem1,
    theta_singularities,
)
from .core import (
    GeneratingFunction,
    InvalidGeneratingFunction,
    PolynomialC,
    appell_coefficients,
    bernoulli,
    eval_rescaled_direct,
    from_roots,
    inverse_taylor,
    polynomial,
)
from .logcomplex import LogComplex
from .sdpath import SDPoint, SeriesCoeffs, lambert_branch, psi, theta_of_tau, theta_taylor_coeffs
from .sdrep import eval_theorem2

__version__ = "0.1.0"
