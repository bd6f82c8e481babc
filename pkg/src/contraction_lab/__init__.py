"""contraction-lab: randomized linear-system solvers, stochastic contraction
processes, the deterministic eigenvalue recursion bounding their worst-case
last-iterate rate, and exact rational certificates for the closed-form
inequality chains behind that rate."""

from .certificates import (
    CertificateReport,
    SeriesBound,
    a_envelope_max,
    all_certificates,
    l_series_bounds,
    l_series_lower,
    l_series_upper,
    one_point_check,
    verify_f300,
    verify_k_requirement,
    verify_lower_bound_chain,
)
from .estimators import (
    BlockKaczmarz,
    RandomizedCoordinateDescent,
    RandomizedKaczmarz,
    SketchAndProject,
)
from .lfunction import (
    b_discrete_vs_envelope,
    b_t_scaled,
    gamma_crossing_time,
    gamma_lower_eval,
    l_quadrature,
    l_series,
    ode_residual,
)
from .linalg import (
    EigenPair,
    m_norm_sq,
    pseudoinverse_apply,
    row_space_projection,
    spectral_norm,
    sym_eig,
)
from .process import (
    ContractionProcess,
    ContractionTrace,
    MonteCarloTrace,
    check_averaged_bound,
    coordinate_descent_process,
    fixed_matrix_process,
    kaczmarz_process,
    monte_carlo,
    process_step,
    run_process,
)
from .rational import exp_taylor_partial, format_rational, parse_rational, strictly_greater
from .recursion import (
    EigenRecursionState,
    RateFit,
    check_upper_hypothesis,
    eig_recursion_path,
    eig_recursion_step,
    fit_loglog,
    initial_state,
    increments_alternate,
    loglin_spectrum,
    lower_bound_family,
    matrix_recursion_step,
    max_trace,
)
from .solvers import (
    RowSampler,
    SolverConfig,
    SolveTrace,
    block_kaczmarz_step,
    fwht,
    kaczmarz_step,
    rcd_step,
    rht_preprocess,
    run_solver,
    sketch_project_step,
)
from .systems import LinearSystem, gaussian_system, load_system, make_system, save_system, with_solution

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
