from .exceptions import (
    KinquantError,
    ConfigurationError,
    UsageError,
    DomainError,
    RangeError,
    DecompositionError,
    IntegrationError,
    ScenarioValidationError,
    AcceptanceError,
    ConvergenceError,
)
from .entropy_catalog import (
    EntropyModel,
    bg,
    two_param,
    tsallis,
    kaniadakis,
    eip,
    make_model,
    ln_kappa,
    d_ln_kappa,
    gamma_drift,
    d_gamma,
    f_diffusion,
    f_tilde,
    f1,
    f2,
    f1_tilde,
    f2_tilde,
    f_antiderivative,
    phi_antiderivative,
    kappa_inverse,
    monotonic_interval,
    derived_functionals,
    entropy_density,
    catalog_table,
)
from .grid_fields import (
    Grid1D,
    Grid2D,
    ComplexWavefunction,
    HydroPair,
    spatial_derivative,
    laplacian,
    integrate,
    polar_decompose,
    polar_compose,
    quantum_potential,
    gaussian_packet,
    plane_wave,
    harmonic_potential,
    snapshot_table,
)
from .nfpe_solver import (
    NfpeScenario,
    NfpeTrajectory,
    nfpe_rhs,
    free_energy,
    equilibrium_density,
    evolve_nfpe,
    drift_shift_current,
)
from .nse_solver import (
    VariableDiffusion,
    NseScenario,
    NseTrajectory,
    nonlinearity_W,
    nonlinearity_Wcal,
    nse_rhs_psi,
    hydro_rhs,
    hamiltonian_energy,
    evolve_nse,
    free_gaussian_packet,
    coherent_state,
)
from .gauge import (
    gauge_forward,
    gauge_inverse,
    transformed_nonlinearities,
    transformed_rhs,
    transformed_energy,
    transformed_potentials,
    paired_evolution,
    dg_kbar,
    dg_linearize,
    dg_delinearize,
    dg_chain,
)
from .diagnostics import (
    ehrenfest_residuals,
    variable_D_residuals,
    vorticity_2d,
    eip_vorticity_2d,
    angular_momentum_2d,
    gauge_condition_2d,
    dispersion_check,
    dispersion_table,
    stationary_residual,
)
from .scenario_config import Scenario, parse_scenario, serialize_scenario, load_scenario
from .field_plots import density_snapshots, conservation_plot, free_energy_plot, catalog_plot
from .catalog_interact import catalog_interact
from .acceptance import CheckResult, run_suite
