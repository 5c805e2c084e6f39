"""Numerical toolkit for Hamiltonian stationary discs with prescribed S^1 singularities.

Green's functions and S^1 maps with point singularities, the one-point
spectral solver, grid and log-radial solvers for the ``t``-family of
functionals, immersion assembly, Wente-type audits and a command line.
"""
from .errors import (
    ContourCrossesZeroSet,
    DegenerateMetric,
    EvaluationAtSingularity,
    HamstatError,
    IncompatibleBoundaryData,
    LoopTooCloseToSingularity,
    NoConvergence,
    PathDependence,
    ResolutionTooCoarse,
    SingularityOnNode,
    TooCoarse,
    UniquenessViolation,
)
from .greens import (
    SingularityConfig,
    admissibility_check,
    circle_loop,
    green_eval,
    green_gradient,
    green_perp_gradient,
    maslov_winding,
    nonzero_components,
    sone_eval,
    sone_gradient,
)
from .grid import DiscGrid, ScalarField
from .spectral import (
    BoundaryTrace,
    ModeSolution,
    compatibility_integral,
    mobius_conjugate_solution,
    regularity_profile,
    solve_one_singularity,
)
from .variational import (
    EnergyTrace,
    assemble_el_system,
    boundary_coefficient,
    compatible_basis,
    discrete_energies,
    extract_coefficients,
    l2inf_quasinorm,
    rank_experiment,
    solve_el,
    solve_grid,
    solve_polar,
    t_sweep,
)
from .immersion import (
    ConeDescriptor,
    ImmersionField,
    assemble_immersion,
    harmonic_conjugate,
    mean_curvature,
    sw_cone,
    verify_hamiltonian_stationary,
)
from .wente import (
    WenteAuditor,
    WentePair,
    check_linf_wente,
    check_optimal_wente,
    poisson_zero_bc,
    uniqueness_probe,
)

__version__ = "0.1.0"
