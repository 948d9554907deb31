"""Gap probabilities for higher-order Airy kernels and their PDEs.

The package computes Fredholm determinants det(I - K chi_E) for a
family of contour-integral kernels indexed by an integer p >= 2 (p = 2
is the Airy kernel, p = 3 the Pearcey case after a change of
variables), and derives, symbolically, the nonlinear PDEs those gap
probabilities satisfy in the endpoints of E and the deformation
parameters.  Exact rational arithmetic backs the symbolic layer;
numerics are vectorized numpy/scipy quadrature.
"""

from .algebra import (
    MultiPoly,
    PuiseuxSeries,
    puiseux_pow,
    puiseux_revert,
    residue,
    schur_polynomials,
)
from .potential import (
    PotentialVp,
    consistency_71_72,
    phase_polynomial,
    solve_theta,
    topological_tau_log,
)
from .hirota import (
    Atom,
    DiffExpr,
    GapPDE,
    HirotaOperator,
    UnsupportedEquationError,
    boussinesq_form,
    derive_gap_pde,
    from_u_poly,
    general_targets,
    hirota_apply,
    hirota_equation,
    match_targets,
    proportional_scale,
    schur_shape,
    target_expression,
    to_intro_form,
    to_logtau_pde,
    virasoro_substitute,
)

__version__ = "0.1.0"
