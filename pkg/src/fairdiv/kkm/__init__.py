from .covers import (
    Cell,
    Cover,
    CoverCheck,
    CoverViolation,
    argmax_cover,
    argmin_cover,
    check_cover,
    partition_by_functions,
    point_in_simplex,
    split_by_values,
)
from .points import ColorfulPoint, KkmPoint, colorful_kkm, kkm_point
from .birkhoff import MatchingFailed, NotDoublyStochastic, birkhoff, reconstruct
from .strong import RootNotFound, StrongResult, strong_colorful_kkm
from .pseudo import PseudoKkmResult, kkm_pseudomanifold, star_membership
from .grid import EngineBudget, LabelOutsideCarrier, fully_labeled_facet
