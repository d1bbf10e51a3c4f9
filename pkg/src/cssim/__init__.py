"""cssim: radial-grid simulator and verification toolkit for the
m-equivariant self-dual Chern-Simons-Schrodinger equation."""

__version__ = "0.1.0"

from .grid import (
    RadialField,
    RadialGrid,
    differentiate,
    inner_real,
    integrate,
    norm,
)
from .gauge import GaugePotentials, a_t, a_theta, a_theta_pol, gauge_potentials
from .soliton import (
    EnergyPair,
    SolitonParams,
    covariant_cr,
    demodulate,
    energy,
    lambda_q,
    mass,
    modulate,
    modulated_soliton,
    q_profile,
    s_solution,
    scaling_generator,
)
from .nonlinearity import (
    NonlinearityParts,
    cubic,
    duality_residuals,
    energy_form,
    nonlinear_potential,
    nonlinearity_parts,
    quintic,
)
from .linearization import (
    CoercivityResult,
    LinearOperatorMatrix,
    cal_l_q,
    coercivity_constant,
    l_q,
    l_q_star,
    nonlinear_coercivity_ratio,
    nonlinear_hardy_ratio,
    operator_matrix,
    rho_profile,
)
from .dynamics import (
    EvolutionConfig,
    Trajectory,
    evolve,
    pseudoconformal,
    rhs,
    strang_step,
    virial_residuals,
)
from .modulation import (
    Decomposition,
    ModulationSeries,
    TestProfiles,
    blowup_rate_fit,
    decompose,
    default_test_profiles,
    estimate_blowup_time,
    log_projection_constants,
    log_projection_diagnostic,
    radiation_profile,
    track,
)
