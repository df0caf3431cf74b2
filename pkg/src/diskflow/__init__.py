"""Spectral flow solver and boundary-layer diagnostics on the unit disk."""

__version__ = "0.1.0"

from .bessel import (
    BesselDomainError,
    ZeroConvergenceError,
    bessel_j,
    bessel_j_prime,
    bessel_zero,
    compound_decay,
    zero_table,
)
from .basis import (
    EigenPair,
    StokesBasis,
    stokes_basis,
    velocity_eval,
    velocity_gradient_eval,
    vorticity_eval,
)
from .field import (
    FieldSample,
    PolarGrid,
    SpectralCoeffs,
    build_grid,
    inner_product,
    mode_inner_product,
    norm_l2,
    project,
    synthesize,
)
from .solver import (
    ForcingSeries,
    SimConfig,
    SimTrace,
    SolverInstability,
    exact_linear_solution,
    linear_trace,
    make_initial,
    nonlinear_coeffs,
    simulate,
    step,
)
from .diagnostics import (
    CONDITION_KINDS,
    LEMMA_IDS,
    LemmaReport,
    ScheduleSpec,
    TruncationSpec,
    condition_functional,
    residual_trace,
    truncate,
    truncate_trace,
    verify_lemma,
    vv_gap,
)
