"""Randomized sketch-and-project iterations for the Moore-Penrose pseudoinverse."""
from .analysis import (
    RateReport,
    satax_rate_bound,
    satax_rate_exact,
    saxas_convergence_certificate,
    saxas_rate_bound,
)
from .linalg import kron, lambda_min_plus, pinv_exact, pinv_psd, residual, vec
from .sketching import (
    DiscreteSketchDistribution,
    SketchSample,
    convenient_probabilities,
    sample_adaptive,
    sample_batch_with_replacement,
    sample_uniform_batch,
)
from .solvers import (
    SolverConfig,
    init_saxas,
    init_satax,
    newton_schulz_step,
    project_step,
    run,
    run_hybrid,
    satax_step,
    sax_step,
    saxas_step,
    xa_step,
)

__version__ = "0.1.0"
