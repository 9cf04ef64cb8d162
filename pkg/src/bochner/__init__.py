"""Banach-space-valued integration on finite measure spaces.

The integral of a simple map is the weighted sum of its values; integrable
targets are limits of simple maps along uniformly integrable schemes, and
their integral is the Cauchy limit of the simple-map integrals.  The package
exposes the construction together with executable audits of its theorems
(norm domination, density, the Vitali equivalence, completeness) and a
scenario-driven CLI.
"""

from .errors import (BochnerError, DomainError, NotConvergingError,
                     NotElementaryError, ResolutionError, ScenarioError,
                     StructuralError)
from .measures import (DISCRETE, INTERVAL, MeasurableSet, MeasureSpace,
                      Partition, WorstSubset, atom_set, combine, complement,
                      difference, discrete_space, empty_set, full_set,
                      intersect, interval_set, interval_space, measure,
                      partition, refine_common, union, worst_subset)
from .values import (BanachElement, ValueSpace, element, norm, scalar,
                     scalar_space, vector_space, zero)
from .values import combine as combine_elements
from .simple import (SimpleMap, atom_map, constant_map, evaluate, from_cells,
                     indicator_map, integrate_simple, linear_combine,
                     norm_map, restrict, step_map)
from .metrics import (InequalitySlack, inequality_audit, ky_fan_distance,
                      l1_distance, maps_equal_ae)
from .integrability import (DEFAULT_DELTA_GRID, DEFAULT_EPSILON_GRID,
                            UIModulusReport, UIVerdict, epsilon_net,
                            linear_combination_ui, sequence_ui_probe,
                            ui_certificate, ui_modulus)
from .extension import (ApproximableMap, ApproximationScheme, ExtensionResult,
                        WellDefinednessResult, combine_schemes, dyadic_scheme,
                        explicit_scheme, extend_integral, from_evaluator,
                        from_simple, generated_scheme, reference_map,
                        well_definedness_audit)
from .theorems import (ComparisonResult, DensityResult, NormDominationResult,
                       RieszFischerResult, VitaliVerdict, VitaliWitness,
                       density_approximation, norm_domination_check,
                       positivity_monotonicity_check, riesz_fischer_construct,
                       vitali_audit)
from .expressions import parse_expression, expression_evaluator
from .scenario import (ReportRecord, ScenarioSpec, emit_report, exit_code,
                       parse_scenario, render_report, run_campaign)

__version__ = "0.1.0"
