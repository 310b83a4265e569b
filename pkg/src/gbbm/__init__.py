"""Pseudospectral laboratory for the generalized BBM equation."""

from .errors import (
    AliasError,
    BlowupError,
    ContractionError,
    ConvergenceError,
    DomainError,
    FitError,
    GbbmError,
    GronwallViolation,
    RangeError,
    SymmetryError,
    UnsupportedError,
)
from .spectral_core import (
    DomainSpec,
    SpectralField,
    field_from_json,
    field_to_json,
    from_values,
    make_field,
    mean_integral,
    power,
    product,
    product_many,
    project_split,
    sobolev_norm,
    to_values,
    zero_field,
)
from .bbm_ops import (
    apply_phi,
    linear_vector_field,
    resonance,
    semigroup,
    theta,
    vector_field,
)
from .solver import (
    HighLowState,
    SolverConfig,
    Trajectory,
    calibrate_contraction_constant,
    energy,
    gronwall_L,
    hamiltonian,
    highlow_global_solve,
    local_time,
    lp_power_integral,
    picard_solve,
    rk4_solve,
    rough_field,
)
from .estimates import (
    ObstructionRecord,
    SweepRecord,
    build_probe,
    critical_index,
    exact_mode_count,
    fit_exponent,
    growth_exponent,
    illposed_sweep,
    line_family,
    multilinear_ratio,
    multilinear_sweep,
    psi_value,
    pth_term,
    spectral_mode_one_mass,
    torus_family,
)

__version__ = "0.1.0"
