"""Box-derivative (scale) calculus on sampled Hoelder functions.

Fixed-step complex box derivatives, the numerical h -> 0 scale limit,
identity defect meters, Euler-Lagrange residuals for every variational
variant, and linear solvers for quadratic Lagrangians.
"""

from .box import (box_derivative_h, box_derivative_n, h_derivative, partial_box_derivative_h,
                  partial_box_derivative_n)
from .exceptions import (ArityMismatch, BoundaryIncomplete, BoundaryNotZero, ConfigInvalid,
                         ConstraintViolated, FitDegenerate, GridMismatch, InsufficientResolution,
                         NondegeneracyFailure, NonUniformShift, OutOfDomain, ParameterOutOfRange,
                         ScaleCalcError, SingularSystem, VariationClassViolation)
from .grid import Grid1D, Grid2D, GridFunction1D, GridFunction2D
from .holder import estimate_holder_exponent, weierstrass
from .identities import (DefectReport, barrow_defect, boundary_integral, byparts2d_defect,
                         econdition_estimate, green_defect, leibniz_defect, quad_1d, quad_2d)
from .lagrangian import Lagrangian
from .scale_limit import BoxDerivativeConfig, ScaleLimitResult, scale_derivative
from .solver import (AffineConstraint, LinearELSystem, QuadraticLagrangian, solve_linear_el_1d,
                     solve_membrane)
from .variational import (Action, ELReport, Trajectory, admissible_variations,
                          admissible_variations_2d, el_residual_1d, el_residual_2d,
                          el_residual_higher, el_residual_parameter, gateaux_derivative, iso_solve,
                          natural_bc_1d, natural_bc_2d)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
