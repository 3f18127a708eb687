"""Tilings of cyclic groups: exact verification, cyclotomic divisibility,
structure detection, fiber-shift reductions, and classification."""

__version__ = "0.1.0"

from .zm import Modulus, euler_phi, factorize
from .multiset import Multiset
from .cyclo import (
    CycloPoly,
    CycloSpectrum,
    cyclotomic,
    decompose_two_prime,
    phi_divides,
    s_a,
    spectrum,
    standard_complement,
    standard_complement_of,
    t1_check,
    t2_check,
)
from .tiling import (
    BoxView,
    DivSet,
    Inapplicable,
    TilingInstance,
    bispan,
    box,
    box_product,
    check_bispan_bound,
    div_set,
    div_set_local,
    enhanced_divisor_exclusion,
    saturating_set,
    span,
    verify_direct,
    verify_poly,
    verify_sands,
)
from .cuboid import (
    Cuboid,
    CuboidType,
    enumerate_cuboids,
    eval_cuboid,
    is_t_null,
    multi_phi_test,
    n_cuboid_type,
    phi_divides_via_cuboids,
    phi_prime_power_uniform,
)
from .structure import (
    GridFiberReport,
    IJKPartition,
    StructureFinding,
    classify_unfibered_grid,
    detect_corner,
    detect_diagonal_boxes,
    detect_extended_corner,
    grid_fiber_report,
    ijk_partition,
    is_m_fibered_on_grid,
    missing_top_difference_fibering,
    plane_bound_check,
    remove_fibers,
)
from .reduce import (
    ClassificationReport,
    ReductionTrace,
    ShiftMove,
    classify,
    detect_cofibered,
    fiber_shift,
    reduce_to_grid,
    slab_extract,
    subgroup_reduction_applies,
    subtile_condition,
)
from .search import EnumerationTask, enumerate_tilings, find_complements

__all__ = [name for name in dir() if not name.startswith("_")]
