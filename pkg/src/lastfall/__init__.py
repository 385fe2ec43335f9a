"""Weil descent, last fall degrees and linearized systems over small fields."""

from .errors import (CoordinateNotInField, DegreeExceedsBound, DegreeTooHigh,
                     DivisionByZero, GcdConditionFailed, LastfallError,
                     NonPrimeCharacteristic, NotABasis, NotADivisor, NotCoprime,
                     NotReducible, ReducibleModulus, RingMismatch,
                     SearchBudgetExceeded, StepBudgetExceeded,
                     UnassignedVariable)
from .gf import FieldElement, FieldSpec, FrobeniusMatrix, frobenius_q, make_field, moore_matrix
from .poly import NEG_INF, MultiPoly, PolySystem, Ring
from .falldeg import (DegreeSpan, FallProfile, GroebnerOracle, PointsOracle,
                      equiv_mod, groebner_toy, ideal_truncation_dim,
                      last_fall_degree, span_closure)
from .descent import (DescentContext, build_F1, build_Fprime, build_Fprime1,
                      build_G1, build_G2, build_sigma_orbit_G,
                      make_descent_context, solution_transport, weil_descend)
from .linsys import (InvariantSubspace, LinearForm, LinearizedPoly,
                     SolutionBasis, bezout, brute_force_solve, build_Qbar,
                     compose, ell_op, eliminate_stage, enumerate_solutions,
                     frobenius_step, full_space, L_op, lcompose_reduce,
                     reducibility_check, solve_structured, subfield_space,
                     subspace_equal, subspace_from_fW, symbolic_ext_gcd,
                     symbolic_gcd, symbolic_mul, symbolic_rdivmod)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
