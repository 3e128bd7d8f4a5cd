"""causticlab: caustic normal forms, oscillatory integrals, and scaling experiments."""

from .catalog import (
    SingularityType,
    HomogeneityProfile,
    PhaseFunction,
    SubordinationDag,
    build_phase,
    caustic_order,
    threshold,
    subordinates,
    dag_min_homogeneity,
    default_dag,
)
from .amplitudes import (AmplitudeProfile, make_amplitude, bump,
                         check_symbol_order, check_delta_regularity_torus)
from .oscint import IntegralSpec, IntegralResult, evaluate, evaluate_rescaled, closed_form_oracles
from .scaling import ScanPlan, ExponentFit, supnorm_scan, fit_exponent, threshold_sweep, geometric_grid
from .torus import (CapQuery, ExtremizerSum, ball_count, sphere_cap_count,
                    dyadic_lower_bound_search, extremizer, eval_sum)
from .fold import FoldExperiment, sharp_exponent, run_fold, fold_curve, l2_from_coefficients, lemma_62_suite

__version__ = "0.1.0"

__all__ = [
    "SingularityType", "HomogeneityProfile", "PhaseFunction", "SubordinationDag",
    "build_phase", "caustic_order", "threshold", "subordinates",
    "dag_min_homogeneity", "default_dag",
    "AmplitudeProfile", "make_amplitude", "bump",
    "check_symbol_order", "check_delta_regularity_torus",
    "IntegralSpec", "IntegralResult", "evaluate", "evaluate_rescaled",
    "closed_form_oracles",
    "ScanPlan", "ExponentFit", "supnorm_scan", "fit_exponent", "threshold_sweep",
    "geometric_grid",
    "CapQuery", "ExtremizerSum", "ball_count", "sphere_cap_count",
    "dyadic_lower_bound_search", "extremizer", "eval_sum",
    "FoldExperiment", "sharp_exponent", "run_fold", "fold_curve",
    "l2_from_coefficients", "lemma_62_suite",
    "__version__",
]
