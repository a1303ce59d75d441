"""Numerical laboratory for intrinsic square functions, Orlicz/Morrey
norms and their commutator estimates on sampled fields."""

from .backend import active_backend
from .fields import Ball, SampledField
from .young import (YoungFunction, PowerYoung, NormalizedPowerYoung,
                    ExpYoung, LLogLYoung, TabulatedYoung, young_from_id,
                    verify_inverse_bracket, estimate_growth_constants)
from .orlicz import (modular, luxemburg_norm, characteristic_norm,
                     holder_defect, l1_embedding_defect)
from .lp import (LipschitzDualProblem, lipschitz_dual_value,
                 kernel_constraints, unit_ball_nodes)
from .intrinsic import (ConeQuadrature, kernel_sup, commutator_kernel_sup,
                        lusin_square_function, vertical_square_function,
                        halfspace_square_function, aperture_report,
                        square_function)
from .morrey import (Weight, weight_from_id, ProbeSet, morrey_norm,
                     suffix_envelope, zygmund_constant, HardyConfig,
                     hardy_apply, hardy_best_constant, hardy_verify)
from .bmo import (ball_average, bmo_norm, log_drift_constant,
                  orlicz_oscillation, bmo_report,
                  commutator_square_function, symbol_from_id)
from .harness import (ExperimentConfig, VerificationReport, build_corpus,
                      run_experiment, emit, HypothesisUnmetError,
                      ConfigError, square_function_field)

__version__ = "0.1.0"
