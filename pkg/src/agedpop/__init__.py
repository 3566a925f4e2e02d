"""Age-structured arrival-departure particle systems on a bounded window.

Particles carry a position in a box window and a nonnegative age.  New
particles arrive as a Poisson stream with a bounded spatial profile and age
zero; existing particles age at unit speed and depart at an age- and
position-dependent hazard.  The package provides:

* the compactifying metrics on ages, configurations, and marked
  configurations, with certified truncation tails;
* exponential test functions, the process generator, the age flow, and the
  closed-form semigroup action;
* exact transient and stationary samplers (one-shot and event-driven);
* verification gates comparing closed forms, quadrature, and simulation.
"""

from .age_metric import age_distance, omega
from .config_space import (
    BasisFunction,
    MarkedConfiguration,
    MarkedParticle,
    basis_count_below_scale,
    configuration_from_json,
    configuration_to_json,
    ground_distance,
    ground_tail_bound,
    kappa_component,
    kappa_distance,
    kappa_tail_bound,
    load_configuration,
    save_configuration,
    v_enumerate,
    window_truncation_error,
)
from .generator import (
    ArrivalExponent,
    FlowedTheta,
    GeneratorBounds,
    apply_generator,
    compute_bounds,
    explicit_solution,
    flow,
    flow_pde_residual,
    flowed_log_F,
    kolmogorov_residual,
    resolvent,
    resolvent_identity_residual,
)
from .habitat import (
    DepartureModel,
    Habitat,
    chi_integral,
    chi_sample,
    constant_rate,
    cumulative_hazard,
    gauss_profile_nodes,
    linear_habitat,
    separable_rate,
    survival_factor,
    uniform_habitat,
)
from .mark_space import (
    DEFAULT_LADDER,
    MarkSet,
    SigmaLadder,
    mark_sums,
    rho_component,
    rho_distance,
    rho_tail_bound,
    u_basis,
    u_basis_derivative,
    u_basis_max,
    u_basis_second_derivative,
    u_prime_max_constant,
    w_basis,
)
from .sampler import (
    EventTrajectory,
    IntensityMeasure,
    PathBundle,
    event_driven_simulate,
    per_path_seeds,
    sample_poisson,
    sample_trajectory_marginals,
    stationary_intensity,
    thin_and_age,
    transient_intensity,
    transition_step,
)
from .test_functions import (
    F_theta,
    Theta,
    convolution_expectation,
    log_F_theta,
    poisson_expectation,
    star_product,
    theta_from_json,
    theta_to_json,
)
from .verify import (
    ConvolutionLaw,
    DiracLaw,
    ExplicitLaw,
    PoissonLaw,
    VerificationReport,
    chapman_kolmogorov_check,
    count_law_oracle,
    cross_sampler_check,
    ergodicity_check,
    ergodicity_gap_curve,
    fokker_planck_check,
    format_reports,
    laplace_uniqueness_check,
    martingale_residual,
    stationarity_check,
    survival_weighted_integral,
    write_reports_csv,
)

__version__ = "0.1.0"
