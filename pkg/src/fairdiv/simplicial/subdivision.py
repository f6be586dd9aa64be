"""Subdivisions, carrier maps, Sperner colorings and rainbow-facet counting."""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional

from .complexes import Complex, Face, as_face


class EpsNonpositive(Exception):
    pass


@dataclass(frozen=True)
class CarrierMap:
    """Subdivision relation: each source vertex is carried by the minimal
    face of the target complex containing it."""

    source: Complex
    target: Complex
    carrier: dict[int, Face]

    def carrier_of_face(self, face: Iterable[int]) -> Face:
        out: set[int] = set()
        for v in face:
            out.update(self.carrier[v])
        return tuple(sorted(out))

    def compose(self, finer: "CarrierMap") -> "CarrierMap":
        """Compose with a subdivision of this map's source (finer.target == source)."""
        if finer.target is not self.source and finer.target.facets != self.source.facets:
            raise ValueError("carrier maps do not chain")
        carrier = {v: self.carrier_of_face(face) for v, face in finer.carrier.items()}
        return CarrierMap(finer.source, self.target, carrier)

    def validate(self) -> list[str]:
        """Check the carrier axioms; returns human-readable violations.

        Carried faces must be faces of the target, source facets must carry
        onto full-dimensional target faces, every target facet must be
        subdivided, and ridges interior to one target facet must be shared by
        exactly two carried facets (ridges on a shared target ridge by one
        from each side).
        """
        problems = []
        target_faces = self.target.all_faces()
        groups: dict[Face, list[Face]] = {g: [] for g in self.target.facets}
        for f in self.source.facets:
            c = self.carrier_of_face(f)
            if c not in target_faces:
                problems.append(f"facet {f} carried to non-face {c}")
                continue
            if len(c) != len(f):
                problems.append(f"facet {f} carried to lower-dimensional face {c}")
                continue
            groups[c].append(f)
        for v, c in self.carrier.items():
            if c not in target_faces:
                problems.append(f"vertex {v} carried to non-face {c}")
        if problems:
            return problems
        for g, members in groups.items():
            if not members:
                problems.append(f"target facet {g} has no carried facets")
        ridge_count: dict[Face, list[Face]] = {}
        for f in self.source.facets:
            for ridge in itertools.combinations(f, len(f) - 1):
                ridge_count.setdefault(ridge, []).append(f)
        for ridge, fs in ridge_count.items():
            carried = self.carrier_of_face(ridge)
            owners = {self.carrier_of_face(f) for f in fs}
            if len(fs) == 2 and len(owners) == 2:
                a, b = owners
                if not set(carried) <= set(a) & set(b):
                    problems.append(f"ridge {ridge} crosses target facets {a}, {b}")
            if len(fs) == 1:
                # Boundary ridge of the source: must lie in the target boundary.
                if len(carried) == len(ridge) + 1:
                    problems.append(f"boundary ridge {ridge} carried into facet interior {carried}")
        return problems


def identity_carrier(complex: Complex) -> CarrierMap:
    return CarrierMap(complex, complex, {v: (v,) for v in complex.vertices})


@dataclass(frozen=True)
class SpernerColoring:
    """Vertex labeling of a subdivision by vertices of the target complex."""

    colors: dict[int, int]

    def __getitem__(self, v: int) -> int:
        return self.colors[v]


def check_sperner(coloring: SpernerColoring, carrier: CarrierMap):
    """First vertex whose color lies outside its carrier face, or None."""
    for v in sorted(carrier.carrier):
        if coloring.colors[v] not in carrier.carrier[v]:
            return v
    return None


def barycentric(complex: Complex) -> tuple[Complex, CarrierMap]:
    """Barycentric subdivision; new vertices are barycenters of faces.

    Facets of the subdivision are flags of faces of the input; the facet
    count multiplies by (d+1)!.
    """
    faces = sorted(complex.all_faces(), key=lambda f: (len(f), f))
    index = {f: i for i, f in enumerate(faces)}
    new_facets = []

    def flags(face: Face):
        if len(face) == 1:
            yield [face]
            return
        for sub in itertools.combinations(face, len(face) - 1):
            for chain in flags(sub):
                yield chain + [face]

    for facet in complex.facets:
        for chain in flags(facet):
            new_facets.append(tuple(sorted(index[f] for f in chain)))
    coords = None
    if complex.coords is not None:
        coords = {index[f]: complex.barycenter_coords(f) for f in faces}
    subdivided = Complex.from_facets(new_facets, coords)
    carrier = {index[f]: f for f in faces}
    return subdivided, CarrierMap(subdivided, complex, carrier)


def face_diameter(complex: Complex) -> Fraction:
    """Max l_inf coordinate diameter over faces (edges suffice)."""
    if complex.coords is None:
        raise ValueError("complex carries no geometric realization")
    diam = Fraction(0)
    for a, b in complex.faces(1) if complex.dim >= 1 else []:
        pa, pb = complex.coords[a], complex.coords[b]
        diam = max(diam, max(abs(x - y) for x, y in zip(pa, pb)))
    return diam


def refine_to_mesh(complex: Complex, eps) -> tuple[Complex, CarrierMap]:
    """Iterate barycentric subdivision until face diameter <= eps.

    Returns the refined complex and the composed carrier map onto the input.
    """
    eps = Fraction(eps)
    if eps <= 0:
        raise EpsNonpositive(f"eps must be positive, got {eps}")
    current = complex
    chain = identity_carrier(complex)
    while face_diameter(current) > eps:
        current, step = barycentric(current)
        chain = chain.compose(step)
    return current, chain


def rainbow_facets(complex: Complex, coloring: SpernerColoring) -> tuple[list[Face], int]:
    """Facets on which the coloring is injective, plus the number of
    pairwise distinct color sets among them."""
    rainbows = []
    color_sets = set()
    for f in complex.facets:
        cs = {coloring.colors[v] for v in f}
        if len(cs) == len(f):
            rainbows.append(f)
            color_sets.add(frozenset(cs))
    return rainbows, len(color_sets)


def random_sperner_coloring(carrier: CarrierMap, rng: random.Random,
                            free_vertices: Optional[Iterable[int]] = None,
                            palette: Optional[list[int]] = None) -> SpernerColoring:
    """Color each carried vertex by a random vertex of its carrier face.

    `free_vertices` (e.g. interior vertices of a ball colored with respect to
    its boundary) draw from the whole palette.
    """
    colors = {v: rng.choice(face) for v, face in sorted(carrier.carrier.items())}
    if free_vertices is not None:
        pal = palette if palette is not None else list(carrier.target.vertices)
        for v in free_vertices:
            colors[v] = rng.choice(pal)
    return SpernerColoring(colors)
