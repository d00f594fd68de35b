"""Value of information in finite Bayesian decision problems."""

from __future__ import annotations

__version__ = "0.1.0"

from .acquisition import (AffineShiftOfValue, AcquisitionSolution, MaxParaboloid,  # noqa: E402
                          PosteriorDistribution, Quadratic, ScaledEntropy, UPSCost,
                          adversarial_cost, eval_cost, incomparable_pair_construction, is_mpc,
                          is_nonredundant, is_strict_mpc, simplex_grid, solve_acquisition,
                          synthesize_cost)
from .applications import (ScreeningInstance, ScreeningSolution, delegation_compare,  # noqa: E402
                           screening_solve, virtual_value)
from .comparative import (NonconvexityWitness, ShiftWitness, TransformationVerdict,  # noqa: E402
                          classify_transformation, common_refinement, difference_function,
                          has_leftovers, is_consequential, is_convex_difference,
                          is_generic_prior, is_refining, is_strictly_dominated,
                          is_strictly_refining, is_totally_refining, is_totally_strictly_refining,
                          is_weakly_dominated, lower_convex_envelope_at, optimality_region,
                          refines, shift_majorizes, verify_shift_witness)
from .decision import (Action, Cell, CellwiseAffine, DecisionProblem, MaxAffine,  # noqa: E402
                       Subdivision, optimal_action_set, restrict_to_cellwise, subdivision,
                       subdivision_of, undominated_actions, value_at)
from .errors import (InapplicableError, InfoValueError, MalformedInputError,  # noqa: E402
                     NumericDomainError, PlausibilityError, PreconditionError,
                     RepresentationError, SynthesisError)
from .geometry import Polytope, contains, enumerate_vertices, intersect, simplex  # noqa: E402
from .lp import Constraint, LinearProgram, LPResult, Status, solve_lp, strict_feasibility  # noqa: E402
from .numeric import STRICT_TOL, Mode  # noqa: E402
from .transforms import (UtilityMap, add_actions, affine_transform, cara_wealth_factor,  # noqa: E402
                         compose_utility, perturb_break_refinement, remove_actions)
