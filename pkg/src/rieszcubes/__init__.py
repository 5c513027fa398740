"""Riesz bases of exponentials for finite unions of equal cubes.

Typical use::

    from rieszcubes import validate_union, build_partition, choose_shifts, make_kernel_set

    E = validate_union(1, 1.0, [[0.0], [2.5]])
    P = build_partition(E)
    K = choose_shifts(P, E.beta, seed=0)
    ks = make_kernel_set(E, P, K)
"""
from .basisfile import FormatError, load_basis, load_boxes, load_geometry, save_basis, save_geometry
from .demos import DEMO_CONFIGS, demo_union
from .geometry import (
    CubeUnion,
    DimensionError,
    OverlapError,
    Partition,
    Rect,
    TilingError,
    build_partition,
    cell_of,
    locate_cells,
    locate_wrap,
    validate_union,
)
from .kernels import (
    CoefficientTable,
    KernelSet,
    SingularSystem,
    eval_kernel,
    eval_kernels,
    eval_spectral,
    make_kernel_set,
    rect_kernel,
    solve_coefficients,
    system_residual,
)
from .reconstruct import (
    BumpSignal,
    Lattice,
    SampleError,
    SampleSet,
    bump_oracle,
    lattice_points,
    reconstruct_at,
    sample,
    synth_from_coeffs,
)
from .shifts import ShiftSearchExhausted, ShiftVector, choose_shifts, min_normalized_det, normalized_dets
from .verify import (
    ConvergenceError,
    Cover,
    DensityReport,
    EmptyInner,
    GramReport,
    WindowTooLarge,
    approximate_cover,
    beurling_density,
    check_interpolation,
    check_poisson_residual,
    extreme_eigenvalues,
    frame_bounds,
    gram_matrix,
    perturb_coefficients,
    verification_report,
)

__version__ = "0.1.0"


def build(E: CubeUnion, seed: int = 0, tau: float = 1e-3) -> KernelSet:
    """Partition, shift search and coefficient solve in one call."""
    P = build_partition(E)
    K = choose_shifts(P, E.beta, seed=seed, tau=tau)
    return make_kernel_set(E, P, K)
