from .waves import (
    ModelParams,
    GroundState,
    default_grid,
    SolitonFamily,
    OperatorMatrix,
    SpectralReport,
    Verdict,
    solve_ground_state,
    petviashvili_step,
    profile_residual,
    scale_to_speed,
    energy,
    energy_gradient,
    momentum,
    d_prime,
    d_second,
    closed_form_d_second,
    classify_stability,
    assemble_linearized,
    family_derivative,
    spectral_report,
    weinstein,
    constrained_rayleigh_min,
    natural_constraints,
)
from .dynamics import (
    EvolutionConfig,
    TrajectorySample,
    StabilityReport,
    Etdrk4Stepper,
    rhs,
    evolve,
    orbital_distance,
    stability_experiment,
    default_time_step,
)
