"""Evaluate, optimize and certify the max-min frame energy objective

    max over c1 <= |v_i|^2 <= c2 of  min_k |v_k|^2 / (sigma^2 + sum_{l != k} <v_k, v_l>^2)

for N real vectors in R^d.
"""

__version__ = "0.1.0"

from framelab.frame_core import (  # noqa: E402
    FrameOperator,
    VectorSystem,
    frame_bounds,
    frame_operator,
    frame_potential,
    gram_matrix,
    max_coherence2,
    tightness_defect,
)
from framelab.objective import (  # noqa: E402
    IndeterminateRatioError,
    NormConstraints,
    RatioReport,
    evaluate,
    per_vector_ratio,
    row_energy,
    scaling_derivative_sign,
    shrink_vector,
    simultaneous_scaling,
)
from framelab.bounds import (  # noqa: E402
    bounds_report,
    mu_upper_bound,
    nonminimal_count_bound,
    sigma0_answer,
    sigma0_extremal_value,
    uniform_case,
    welch_bound,
)
from framelab.untf import (  # noqa: E402
    BuildRequest,
    TightFrameNotFound,
    build_untf,
    harmonic_frame,
    orthonormal_system,
    random_system,
    scale_system,
)
from framelab.optimizer import OptimizerConfig, OptResult, certify, optimize  # noqa: E402
