"""Low-discrepancy point sets on the torus and the log-sine energy that improves them."""

from .core import (
    BudgetExceededError,
    DegenerateSetError,
    InvalidArgumentError,
    LodesqError,
    ParseError,
    PointSet,
    QualityReport,
    is_degenerate,
    load_points_csv,
    save_points_csv,
    wrap,
)
from .discrepancy import (
    EtkSpec,
    etk_square_sum,
    l2_discrepancy,
    quality_report,
    star_discrepancy,
    star_discrepancy_sampled,
)
from .energy import (
    SpectralSpec,
    energy,
    energy_gradient,
    kernel_slope,
    logsin_kernel,
    normalized_energy,
    partial_cosine_sum,
    spectral_energy,
)
from .generators import (
    GeneratorSpec,
    halton,
    hammersley,
    kronecker,
    lattice_rule,
    radical_inverse,
    random_points,
    sobol,
    van_der_corput,
)
from .lattice import (
    LatticeReport,
    conjecture_sums,
    cot_csc_check,
    criticality_residual,
    lattice_report,
    local_min_probe,
    second_order_sums,
)
from .optimizer import OptimizerConfig, TraceRecord, gradient_step, jitter_degenerate, optimize

__version__ = "0.1.0"
