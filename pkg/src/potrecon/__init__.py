"""Reconstruction of Schrodinger potentials from boundary data at high frequency.

The package recovers a compactly supported potential c(x) on an embedded
disk from (simulated) Dirichlet-to-Neumann boundary measurements, one
Fourier mode per probe pair, and exposes the a-priori stability bounds that
explain when the recovery is stable.

Typical use::

    from potrecon import (
        build_grid, boundary_nodes, build_sampling, two_bumps, run_algorithm1,
    )

    grid = build_grid(100, 1.0, 0.7)
    plan = build_sampling(n_lines=9, kappa_min=1.0, kappa_max=50.0, kappa_step=0.2)
    result = run_algorithm1(grid, two_bumps(grid), plan, k=15.2, m=2)
    print(result.rel_l2)
"""

from .errors import (
    AttenuationModeError,
    ConfigurationError,
    CoverageError,
    DegenerateDirectionError,
    DomainGeometryError,
    NearEigenvalueWarning,
    SolverFailure,
    TheoremHypothesisError,
)
from .geometry import BoundaryDiscretization, Grid, boundary_nodes, build_grid
from .waves import (
    WaveVectorPair,
    attenuated_Y,
    eval_probe,
    make_wave_pair,
    neumann_of_probe,
)
from .potentials import (
    FOUR_BUMPS,
    TWO_BUMPS,
    GaussianBump,
    constant_potential,
    four_bumps,
    gaussian_mixture,
    mixture_fourier_transform,
    sample_mixture,
    single_bump,
    two_bumps,
)
from .solver import (
    AssembledSystem,
    ComplexField,
    PotentialField,
    assemble,
    neumann_trace,
    solve_dirichlet,
    solve_linearized,
)
from .measurement import (
    BoundaryTrace,
    MeasurementRecord,
    dtn_norm_estimate,
    synthesize_measurement,
    volume_fourier_oracle,
)
from .sampling import (
    SamplingPlan,
    build_sampling,
    hermitian_complete,
    restrict_lines,
)
from .reconstruction import (
    CoefficientTable,
    ReconstructionResult,
    band_relative_error,
    error_metrics,
    fourier_coefficient,
    run_algorithm1,
    synthesize,
)
from .bounds import (
    StabilityParams,
    omega,
    omega_and_kstar,
    theorem1_bound,
    theorem2_bound,
)
from .config import ExperimentConfig, config_hash, load_config
from .outputs import RunManifest, write_csv, write_heatmap, write_manifest

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
