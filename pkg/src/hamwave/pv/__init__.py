from .vortex import VortexFields, vortex_eval
from .dno import DNOperator
from .waves import (
    PVParams,
    PVWave,
    PVStateOps,
    GradientTriple,
    asymptotic_guess,
    check_admissible,
    eta2_closed_form,
    eta2_spectral,
    residual_F,
    solve_traveling_wave,
    pv_energy,
    pv_energy_parts,
    pv_momentum,
    pv_gradients,
    pv_d_second,
    wave_c_derivative,
    assemble_pv_Hc,
    hc_blocks,
    pv_gram,
    pv_restriction,
    translation_generator,
    pv_spectral_report,
    pv_natural_constraints,
    pv_constrained_rayleigh,
)
from .dynamics import (
    PVState,
    PVTrajectorySample,
    pv_rhs,
    apply_poisson,
    pv_evolve,
    pv_evolve_iter,
    pv_orbital_distance,
    default_pv_time_step,
)
