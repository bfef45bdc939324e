"""Magnetic fractional Orlicz-Sobolev modulars, norms and small-s limits."""

from .errors import (AdmissibilityError, ConvergenceError, DomainError, MagOrliczError, ParseError,
                     PointEvaluationError, RangeError, ValidationError)
from .expr import evaluate, parse_expression
from .fields import (ScalarField, VectorPotential, bump, constant_potential, eval_potential,
                     eval_scalar, expression_field, expression_potential, linear_potential,
                     parse_field, parse_potential, ray_exit_radius, tent, zero_potential)
from .integrals import (ModularValue, QuadratureSpec, luxemburg_norm, luxemburg_seminorm,
                        modular_IG, modular_IsGA, tail_selftest)
from .limits import HardyReport, LimitReport, hardy_check, ms_scan, sphere_measure
from .magnetic import DiamagneticReport, QuotientSample, diamagnetic_scan, phase, quotient
from .young import (StructureReport, YoungFunction, custom, estimate_indices, eval_G, eval_Gbar,
                    inverse_G, parse_young, power, power_log, verify_structure)

__version__ = "0.1.0"
