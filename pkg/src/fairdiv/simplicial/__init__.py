from .complexes import (
    Classification,
    ClosedInput,
    Complex,
    NotStackingVertex,
    boundary,
    cone,
    cyclic_polytope_boundary,
    icosahedron_boundary,
    lower_bound,
    octahedron_boundary,
    simplex_boundary,
    simplex_complex,
    stack,
    unstack,
    validate,
)
from .subdivision import (
    CarrierMap,
    EpsNonpositive,
    SpernerColoring,
    barycentric,
    check_sperner,
    face_diameter,
    identity_carrier,
    rainbow_facets,
    random_sperner_coloring,
    refine_to_mesh,
)
from .affine import (
    AffineTestMap,
    DegenerateMap,
    NotFound,
    ParityReport,
    exhaustive_zero_count,
    parity_counts,
    rainbow_for_face,
)
from .polytopal import RecursionFailed, simplex_carrier_for_facet
