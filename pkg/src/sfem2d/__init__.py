"""sfem2d: 2D plane-stress smoothed finite elements on quadrilateral
meshes, with Wachspress rational, averaged (nine-site), and non-mapped
Lagrange shape functions evaluated in physical coordinates."""

from .benchmarks import (
    ConvergenceRecord,
    RateFit,
    TimoshenkoBeam,
    energy_norm_error,
    exact_displacement,
    exact_strain_energy,
    exact_stress,
    fit_rate,
    run_convergence_study,
    run_patch_test,
    solve_beam,
    write_records_csv,
)
from .errors import (
    AdjointZero,
    AllDofsFixed,
    CoincidentPoints,
    DegenerateElement,
    InvalidElement,
    NonExistent,
    OffSkeleton,
    SfemError,
    SingularSystem,
    UnknownTag,
    UnsupportedSubdivision,
    WedgeDegenerate,
    ZeroArea,
)
from .mesh import (
    BoundaryEdge,
    DistortionSpec,
    Mesh,
    Node,
    Quad4Element,
    SmoothingCell,
    distort_mesh,
    element_geometry,
    generate_structured_mesh,
    mesh_from_text,
    mesh_to_text,
    read_mesh_text,
    subdivide,
    subdivide_adaptive,
    write_mesh_text,
)
from .shapefn import (
    LagrangeBasis,
    LineEquation,
    WachspressBasis,
    build_lagrange,
    build_wachspress,
    eval_averaged,
    eval_lagrange,
    eval_wachspress,
    eval_wachspress_gradient,
    line_through,
    shape_evaluator,
    table_sites,
)
from .smoothing import (
    ElementStiffness,
    MaterialModel,
    SmoothedBMatrix,
    elasticity_matrix,
    element_stiffness,
    smoothed_b,
)
from .solver import (
    DofMap,
    GlobalSystem,
    Solution,
    apply_dirichlet,
    apply_tractions,
    assemble,
    cell_strains,
    fix_dof,
    solve,
)

__version__ = "0.1.0"
