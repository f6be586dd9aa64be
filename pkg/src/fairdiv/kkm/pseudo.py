"""Colorful KKM intersections on pseudomanifolds with boundary.

For d+1 covers indexed by boundary vertices, a barycentric subdivision
colored dimension-by-dimension turns rainbow facets into distinct index
subsets with bijections, and the quantitative Sperner bound on the boundary
complex lower-bounds their number.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence

from ..simplicial import (
    CarrierMap,
    Complex,
    SpernerColoring,
    barycentric,
    boundary,
    face_diameter,
    identity_carrier,
    lower_bound,
    rainbow_facets,
)
from .covers import CoverViolation

Membership = Callable[[int, object], bool]
# membership(i, vertex_payload): payload is the coordinate tuple when the
# complex is realized, otherwise the vertex id of the refined complex.


@dataclass(frozen=True)
class PseudoIntersection:
    subset: tuple
    bijection: dict  # cover j -> boundary-vertex index
    witness_face: tuple
    witness_point: Optional[tuple]


@dataclass(frozen=True)
class PseudoKkmResult:
    intersections: list
    bound: Fraction
    eps: Optional[Fraction]


def star_membership(complex: Complex) -> Membership:
    """Closed vertex stars as a combinatorial cover: C_i contains every face
    of every facet that includes vertex i."""
    import itertools

    closed: dict[int, set] = {i: set() for i in complex.vertices}
    for facet in complex.facets:
        subs = {s for k in range(1, len(facet) + 1)
                for s in itertools.combinations(facet, k)}
        for i in facet:
            closed[i] |= subs

    def membership(i, payload):
        return payload in closed.get(i, ())

    return membership


def kkm_pseudomanifold(K: Complex, covers: Sequence[Membership], eps=None,
                       rounds: int = 1) -> PseudoKkmResult:
    """Distinct (d+1)-subsets of boundary vertices with bijections whose
    covers intersect within eps, at least (f_{d-1}(dK) - 2)/(d - 1) of them.

    `covers[j](i, payload)` answers whether index i's set contains the
    vertex described by payload: its exact coordinates when K is realized
    (refined until the mesh is below eps), else its carrier face in the
    unrefined K (combinatorial covers, e.g. vertex stars).
    """
    B = boundary(K)
    refined = K
    chain = identity_carrier(K)
    geometric = K.coords is not None and eps is not None
    if geometric:
        eps = Fraction(eps)
        while face_diameter(refined) > eps:
            refined, step = barycentric(refined)
            chain = chain.compose(step)
    else:
        for _ in range(rounds):
            refined, step = barycentric(refined)
            chain = chain.compose(step)

    boundary_faces = B.all_faces()
    indices = list(B.vertices)

    def payload(v):
        if geometric:
            return refined.coords[v]
        return chain.carrier[v]

    colorings = []
    for j in range(K.dim + 1):
        colors = {}
        for v in refined.vertices:
            carrier = chain.carrier[v]
            allowed = [i for i in carrier if carrier in boundary_faces] or indices
            pay = payload(v)
            color = next((i for i in sorted(allowed) if covers[j](i, pay)), None)
            if color is None:
                raise CoverViolation(tuple(sorted(allowed)), pay)
            colors[v] = color
        colorings.append(colors)

    sub, subchain = barycentric(refined)
    combined = {}
    origin = {}
    for v in sub.vertices:
        face = subchain.carrier[v]  # face of `refined`
        dim = len(face) - 1
        combined[v] = colorings[dim][min(face)]
        origin[v] = (dim, min(face))
    rainbows, _ = rainbow_facets(sub, SpernerColoring(combined))

    seen = {}
    for facet in rainbows:
        subset = tuple(sorted(combined[v] for v in facet))
        if subset in seen:
            continue
        bijection = {}
        for v in facet:
            dim, _ = origin[v]
            bijection[dim] = combined[v]
        point = None
        if sub.coords is not None:
            point = sub.barycenter_coords(facet)
        seen[subset] = PseudoIntersection(subset, bijection, facet, point)
    return PseudoKkmResult(list(seen.values()), lower_bound(B),
                           Fraction(eps) if eps is not None else None)
