"""Intersection points for KKM covers via Sperner machinery."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from ..simplicial import (
    barycentric,
    rainbow_facets,
    refine_to_mesh,
    simplex_complex,
    SpernerColoring,
)
from .covers import Cover, CoverViolation, Point, barycenter
from .grid import fully_labeled_facet


@dataclass(frozen=True)
class KkmPoint:
    x: Point
    witnesses: dict  # index -> witness point known to lie in C_i
    eps: Fraction


@dataclass(frozen=True)
class ColorfulPoint:
    x: Point
    permutation: dict  # cover j -> index pi(j)
    witnesses: dict  # cover j -> witness point in C^j_{pi(j)}
    eps: Fraction


def _mesh_threshold(d: int) -> Fraction:
    # Materialized barycentric meshes get unwieldy quickly; finer targets
    # use the lazy Kuhn grid.
    return Fraction(1, 6) if d <= 2 else Fraction(1, 4)


def _grid_resolution(d: int, eps: Fraction) -> int:
    m = Fraction(d) / eps
    return max(1, int(m) + (0 if m.denominator == 1 else 1))


def kkm_point(cover: Cover, eps, method: str = "auto") -> KkmPoint:
    """Point within eps (sup over indices) of every set of a KKM cover.

    Sperner-labels an eps-mesh of the simplex by cover membership restricted
    to each vertex's carrier face and reads a fully labeled facet: each
    facet vertex is a membership witness at distance at most the mesh size.
    """
    eps = Fraction(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    d = cover.d

    def color_at(x: Point, support: Sequence[int]) -> int:
        for i in sorted(support):
            if cover.membership(i, x):
                return i
        raise CoverViolation(tuple(sorted(support)), x)

    if method == "mesh" or (method == "auto" and eps >= _mesh_threshold(d)):
        mesh, chain = refine_to_mesh(simplex_complex(d), eps)
        colors = {}
        for v in mesh.vertices:
            x = mesh.coords[v]
            colors[v] = color_at(x, chain.carrier[v])
        rainbows, _ = rainbow_facets(mesh, SpernerColoring(colors))
        facet = rainbows[0]
        witnesses = {colors[v]: mesh.coords[v] for v in facet}
        x = barycenter([mesh.coords[v] for v in facet])
        return KkmPoint(x, witnesses, eps)

    m = _grid_resolution(d, eps)
    verts = fully_labeled_facet(d, m, lambda a: color_at(
        tuple(Fraction(c, m) for c in a), [i for i, c in enumerate(a) if c > 0]))
    points = [tuple(Fraction(c, m) for c in a) for a in verts]
    labels = [color_at(p, [i for i, c in enumerate(a) if c > 0])
              for p, a in zip(points, verts)]
    witnesses = {lab: p for lab, p in zip(labels, points)}
    return KkmPoint(barycenter(points), witnesses, eps)


def colorful_kkm(covers: Sequence[Cover], eps, method: str = "auto") -> ColorfulPoint:
    """Point x and permutation pi with x within eps of C^j_{pi(j)} for all j.

    The Kuhn route interleaves the d+1 covers chromatically over the grid
    (every facet sees every cover once); the barycentric route implements
    the subdivision coloring in which the vertex subdividing a j-dimensional
    face answers with cover j.
    """
    eps = Fraction(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    d = covers[0].d
    if len(covers) != d + 1:
        raise ValueError(f"need {d + 1} covers, got {len(covers)}")

    def color_for(j: int, x: Point, support) -> int:
        for i in sorted(support):
            if covers[j].membership(i, x):
                return i
        raise CoverViolation(tuple(sorted(support)), x)

    if method == "barycentric" or (method == "auto" and eps >= _mesh_threshold(d)):
        mesh, chain = refine_to_mesh(simplex_complex(d), eps)
        sub, subchain = barycentric(mesh)
        colors = {}
        dims = {}
        for v in sub.vertices:
            face = subchain.carrier[v]  # face of the mesh
            dims[v] = len(face) - 1
            x = sub.coords[v]
            support = chain.carrier_of_face(face)
            colors[v] = color_for(dims[v], x, support)
        rainbows, _ = rainbow_facets(sub, SpernerColoring(colors))
        facet = rainbows[0]
        permutation = {dims[v]: colors[v] for v in facet}
        witnesses = {dims[v]: sub.coords[v] for v in facet}
        return ColorfulPoint(barycenter([sub.coords[v] for v in facet]),
                             permutation, witnesses, eps)

    m = _grid_resolution(d, eps)

    def owner(a) -> int:
        return sum(i * c for i, c in enumerate(a)) % (d + 1)

    def label(a) -> int:
        x = tuple(Fraction(c, m) for c in a)
        support = [i for i, c in enumerate(a) if c > 0]
        return color_for(owner(a), x, support)

    verts = fully_labeled_facet(d, m, label)
    permutation = {}
    witnesses = {}
    for a in verts:
        x = tuple(Fraction(c, m) for c in a)
        j = owner(a)
        permutation[j] = label(a)
        witnesses[j] = x
    x = barycenter([tuple(Fraction(c, m) for c in a) for a in verts])
    return ColorfulPoint(x, permutation, witnesses, eps)
