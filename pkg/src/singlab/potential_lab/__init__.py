"""Discretized elliptic operators on model domains.

Grids and operators (:mod:`.grids`, :mod:`.operators`), Dirichlet and
Green's-function solvers (:mod:`.solvers`), boundary theory experiments
(:mod:`.boundary`), weighted spectra and criticality (:mod:`.spectrum`)
and ready-made model problems (:mod:`.models`).
"""

from .boundary import (
    DiscreteMeasure,
    FatouResult,
    MartinSequence,
    OscillationResult,
    RotationalKernels,
    bhp_ratio,
    fatou_experiment,
    martin_integral,
    martin_sequence,
    minimal_growth_check,
    oscillation_decay,
    predicted_rate,
)
from .grids import (
    DomainKind,
    GridDomain,
    Role,
    annulus_grid,
    disk_grid,
    half_disk_grid,
    imported_grid,
    radial_grid,
)
from .models import (
    disk_fatou,
    disk_martin,
    half_disk_bhp,
    half_disk_minimal_growth,
    hardy_model,
    hardy_trichotomy,
    poisson_kernel,
)
from .operators import BaseOperator, EllipticityError, GridFunction, GridOperator, OperatorSpec, discretize
from .solvers import (
    MaximumPrincipleError,
    NotSubcriticalError,
    certify_subcritical,
    green_function,
    green_matrix_columns,
    solve_dirichlet,
    solve_radial_problem,
)
from .spectrum import (
    Criticality,
    CriticalityResult,
    NotMonotoneError,
    WeightedEigenResult,
    criticality_classify,
    log_slope,
    weighted_principal_eigenvalue,
)

__all__ = [name for name in dir() if not name.startswith("_")]
