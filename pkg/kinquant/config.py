import numpy as np

# Numerical floors
RHO_FLOOR = 1e-12
NFPE_RHO_FLOOR = 1e-300
BG_LIMIT_THRESHOLD = 1e-6

# Integrator controls
STABILITY_FACTOR = 0.2
NORM_DRIFT_LIMIT = 1e-4
NEGATIVE_DENSITY_LIMIT = -1e-8
FREE_ENERGY_INCREASE_LIMIT = 1e-10
BOUNDARY_DENSITY_LIMIT = 1e-10
DIAGNOSTICS_CADENCE = 10
MIN_GRID_POINTS = 16

# Root finding
BISECTION_ITERATIONS = 200
KAPPA_INVERSE_RTOL = 1e-13
NORMALIZATION_XTOL = 1e-14

# Physical defaults (natural units, k_B = 1)
HBAR = 1.0
MASS = 1.0
DIFFUSION = 0.1
BETA = 1.0

TWO_PI = 2.0 * np.pi

# Vocabularies
MODEL_VARIANTS = ["bg", "two_param", "tsallis", "kaniadakis", "eip"]
DRIFT_CHOICES = ["linear_drift", "nonlinear_drift"]
SCENARIO_KINDS = ["nfpe", "nse", "gauge_check", "dispersion", "catalog_dump"]
POTENTIAL_KINDS = ["none", "harmonic", "polynomial"]
INITIAL_KINDS = ["gaussian", "plane_wave", "equilibrium"]
REPRESENTATIONS = ["psi", "hydro"]
DIFFUSION_PROFILES = ["constant", "time_sine", "space_tanh"]
FREE_ENERGY_METHODS = ["closed_form", "quadrature"]

# Scenario file schema: section -> key -> default (None means required)
SCENARIO_SCHEMA = {
    "model": {
        "variant": None,
        "deformation": 0.0,
        "r": 0.0,
        "q": 1.0,
        "kappa_e": 0.0,
        "drift": "linear_drift",
        "rho_floor": RHO_FLOOR,
    },
    "grid": {
        "n_points": 256,
        "length": 20.0,
    },
    "physics": {
        "hbar": HBAR,
        "mass": MASS,
        "diffusion": DIFFUSION,
        "beta": BETA,
        "g_coeffs": (),
        "diffusion_profile": "constant",
        "diffusion_epsilon": 0.1,
    },
    "potential": {
        "kind": "none",
        "omega0": 1.0,
        "coeffs": (),
    },
    "initial": {
        "kind": "gaussian",
        "center": 0.0,
        "width": 1.0,
        "boost": 0.0,
        "amplitude": 1.0,
        "wavenumber": 0.0,
        "wavenumbers": (),
    },
    "integrator": {
        "kind": None,
        "dt": 1e-3,
        "t_end": 1.0,
        "cadence": DIAGNOSTICS_CADENCE,
        "representation": "psi",
        "drop_potential_difference": False,
        "free_energy_method": "closed_form",
        "stability_factor": STABILITY_FACTOR,
        "norm_drift_limit": NORM_DRIFT_LIMIT,
    },
    "output": {
        "directory": "output",
        "prefix": "run",
        "snapshot_times": (),
    },
}

# Catalog dump defaults
CATALOG_RHO_MIN = 1e-3
CATALOG_RHO_MAX = 1e3
CATALOG_POINTS = 61

# Widget control values for the catalog explorer
WIDGET_PARAMS = {
    "variant": dict(
        description=(
            "Entropy Model: Entry of the entropy catalog to explore.\n"
            "  - 'bg': Boltzmann-Gibbs, kappa(rho) = e rho\n"
            "  - 'two_param': bi-parametric deformed logarithm (deformation, r)\n"
            "  - 'tsallis': Tsallis entropy with index q\n"
            "  - 'kaniadakis': Kaniadakis entropy with deformation kappa\n"
            "  - 'eip': exclusion-inclusion principle with kappa_e\n"
        ),
        options=MODEL_VARIANTS,
        value="bg",
        style={"description_width": "30%"},
    ),
    "deformation": dict(
        description="Deformation: kappa for two_param and kaniadakis",
        min=-0.95,
        max=0.95,
        step=0.01,
        value=0.5,
        style={"description_width": "30%"},
    ),
    "r": dict(
        description="r: second parameter of the two_param logarithm",
        min=-0.9,
        max=0.9,
        step=0.01,
        value=0.25,
        style={"description_width": "30%"},
    ),
    "q": dict(
        description="q: Tsallis index",
        min=0.1,
        max=3.0,
        step=0.05,
        value=2.0,
        style={"description_width": "20%"},
    ),
    "kappa_e": dict(
        description="kappa_e: EIP enhancement (+) or blocking (-) strength",
        min=-1.0,
        max=1.0,
        step=0.05,
        value=0.5,
        style={"description_width": "30%"},
    ),
    "drift": dict(
        description="Drift: EIP drift choice",
        options=DRIFT_CHOICES,
        value="linear_drift",
        style={"description_width": "20%"},
    ),
    "columns": dict(
        description="Columns: functionals to plot",
        options=["ln_kappa", "gamma", "f", "f_tilde", "f1", "f2", "f1_tilde", "f2_tilde", "F"],
        value=("ln_kappa", "f"),
        style={"description_width": "20%"},
    ),
    "rho_max": dict(
        description="Max Density: upper end of the density grid",
        min=0.01,
        max=100.0,
        step=0.01,
        value=10.0,
        style={"description_width": "30%"},
    ),
    "log_axis": dict(description="Log density axis", value=True),
    "fig_width": dict(
        description="Figure Width: Width of figure in inches",
        min=1,
        max=50,
        step=1,
        value=12,
        style={"description_width": "31%"},
    ),
    "fig_height": dict(
        description="Figure Height: Height of figure in inches",
        min=1,
        max=50,
        step=1,
        value=6,
        style={"description_width": "33%"},
    ),
    "fontsize": dict(
        description="Font Size: fontsize for axis and tick labels",
        min=1,
        max=40,
        step=0.5,
        value=12,
        style={"description_width": "25%"},
    ),
}
