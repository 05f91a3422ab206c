"""Nilpotent Lie algebras, Lie-Poisson structures, Casimir polynomials,
Euler/magnetic flows, Chevalley-Eilenberg forms and the nilpotent group law."""

__version__ = "0.1.0"

from .exactmath import CompatibilityError, ExtForm, Poly, Rat, integrate_exact_form, rank_exact, variables
from .liealg import (
    Cocycle2,
    JacobiViolation,
    LieAlgebra,
    NotClosed,
    Subspace,
    abelian,
    central_extension,
    derived_series,
    heisenberg,
    invariant_profile,
    jacobi_check,
    lower_central_series,
    make_family,
)
from .coadjoint import (
    IncompleteBasis,
    casimir_basis,
    casimir_solver_V_even,
    classify_orbit,
    det_Btilde,
    generic_rank,
    is_casimir,
    lie_poisson_bracket,
    poisson_matrix,
)
from .flows import MagneticSetup, NonFinite, euler_field, integrate, magnetic_field_equations, quadratic_hamiltonian
from .forms import ce_differential, check_contact, check_symplectic, cohomology_dims
from .group import ClassTooHigh, NotNilpotent, bch_product, group_axioms_check
