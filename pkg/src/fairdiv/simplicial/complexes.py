"""Abstract simplicial complexes and pseudomanifold validation.

A complex is stored by its facets (maximal faces); faces are sorted vertex
tuples.  Validation classifies a pure complex as a closed pseudomanifold, a
pseudomanifold with boundary, or invalid with the first violated condition.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional

Face = tuple[int, ...]


class ClosedInput(Exception):
    """boundary() was asked for on a complex without boundary faces."""


class NotStackingVertex(Exception):
    """unstack() target does not admit a well-defined inverse stacking."""


def as_face(vertices: Iterable[int]) -> Face:
    face = tuple(sorted(vertices))
    if len(set(face)) != len(face):
        raise ValueError(f"face with repeated vertices: {face}")
    return face


@dataclass(frozen=True)
class Complex:
    """Pure simplicial complex given by facets; immutable after construction.

    `coords`, when present, maps vertex ids to exact barycentric coordinates
    of a geometric realization (used by the mesh-refinement machinery).
    """

    facets: tuple[Face, ...]
    coords: Optional[dict[int, tuple[Fraction, ...]]] = None
    _cache: dict = field(default_factory=dict, compare=False, repr=False)

    @staticmethod
    def from_facets(facets: Iterable[Iterable[int]], coords=None) -> "Complex":
        normalized = tuple(sorted({as_face(f) for f in facets}))
        if not normalized:
            raise ValueError("complex needs at least one facet")
        sizes = {len(f) for f in normalized}
        if len(sizes) != 1:
            raise ValueError(f"facet cardinalities differ: {sorted(sizes)}")
        return Complex(normalized, dict(coords) if coords else None)

    @property
    def dim(self) -> int:
        return len(self.facets[0]) - 1

    @property
    def vertices(self) -> tuple[int, ...]:
        if "vertices" not in self._cache:
            self._cache["vertices"] = tuple(sorted({v for f in self.facets for v in f}))
        return self._cache["vertices"]

    def faces(self, k: int) -> set[Face]:
        key = ("faces", k)
        if key not in self._cache:
            out: set[Face] = set()
            for f in self.facets:
                out.update(itertools.combinations(f, k + 1))
            self._cache[key] = out
        return self._cache[key]

    def all_faces(self) -> set[Face]:
        out: set[Face] = set()
        for k in range(self.dim + 1):
            out |= self.faces(k)
        return out

    def has_face(self, face: Iterable[int]) -> bool:
        face = as_face(face)
        return len(face) - 1 <= self.dim and face in self.faces(len(face) - 1)

    def ridge_incidence(self) -> dict[Face, list[Face]]:
        """Map each (d-1)-face to the facets containing it."""
        if "ridges" not in self._cache:
            inc: dict[Face, list[Face]] = {}
            for f in self.facets:
                for ridge in itertools.combinations(f, len(f) - 1):
                    inc.setdefault(ridge, []).append(f)
            self._cache["ridges"] = inc
        return self._cache["ridges"]

    def boundary_ridges(self) -> list[Face]:
        return [r for r, fs in self.ridge_incidence().items() if len(fs) == 1]

    def link(self, face: Iterable[int]) -> list[Face]:
        """Facets of lk(face): co-faces of the facets containing `face`."""
        face = as_face(face)
        fs = set(face)
        return [tuple(v for v in f if v not in fs) for f in self.facets if fs <= set(f)]

    def degree(self, vertex: int) -> int:
        return sum(1 for f in self.facets if vertex in f)

    def dual_graph_connected(self) -> bool:
        inc = self.ridge_incidence()
        adj: dict[Face, set[Face]] = {f: set() for f in self.facets}
        for fs in inc.values():
            for a, b in itertools.combinations(fs, 2):
                adj[a].add(b)
                adj[b].add(a)
        return _connected(self.facets, adj)

    def barycenter_coords(self, face: Iterable[int]) -> tuple[Fraction, ...]:
        if self.coords is None:
            raise ValueError("complex carries no geometric realization")
        pts = [self.coords[v] for v in face]
        n = len(pts)
        return tuple(sum(c, Fraction(0)) / n for c in zip(*pts))


def _connected(nodes, adj) -> bool:
    nodes = list(nodes)
    if not nodes:
        return True
    seen = {nodes[0]}
    stack = [nodes[0]]
    while stack:
        for nxt in adj[stack.pop()]:
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    return len(seen) == len(nodes)


@dataclass(frozen=True)
class Classification:
    kind: str  # "closed" | "with-boundary" | "invalid"
    reason: str = ""

    @property
    def valid(self) -> bool:
        return self.kind != "invalid"


def validate(complex: Complex) -> Classification:
    """Classify a pure complex as closed / with-boundary pseudomanifold.

    Checks, in order: face multiplicity (every ridge in one or two facets),
    strong connectivity of the dual graph, and connectivity of all links in
    codimension at least two.  Purity of the stored facets is enforced by the
    constructor.
    """
    inc = complex.ridge_incidence()
    boundary = 0
    for ridge, fs in inc.items():
        if len(fs) > 2:
            return Classification("invalid", f"face multiplicity: ridge {ridge} in {len(fs)} facets")
        if len(fs) == 1:
            boundary += 1
    if not complex.dual_graph_connected():
        return Classification("invalid", "strong connectivity: dual graph disconnected")
    reason = _link_connectivity_violation(complex)
    if reason:
        return Classification("invalid", reason)
    return Classification("with-boundary" if boundary else "closed")


def _link_connectivity_violation(complex: Complex) -> str:
    d = complex.dim
    for k in range(d - 1):  # faces of dimension k <= d-2
        for face in complex.faces(k):
            link_facets = complex.link(face)
            verts = sorted({v for lf in link_facets for v in lf})
            if len(verts) <= 1:
                continue
            adj = {v: set() for v in verts}
            for lf in link_facets:
                for a, b in itertools.combinations(lf, 2):
                    adj[a].add(b)
                    adj[b].add(a)
            if not _connected(verts, adj):
                return f"link connectivity: lk{face} disconnected"
    return ""


def boundary(complex: Complex) -> Complex:
    """Subcomplex of ridges lying in exactly one facet, as a (d-1)-complex."""
    rs = complex.boundary_ridges()
    if not rs:
        raise ClosedInput("complex has no boundary faces")
    coords = None
    if complex.coords is not None:
        keep = {v for r in rs for v in r}
        coords = {v: complex.coords[v] for v in keep}
    return Complex.from_facets(rs, coords)


def simplex_complex(d: int) -> Complex:
    """The d-simplex with its standard barycentric realization."""
    face = tuple(range(d + 1))
    coords = {i: tuple(Fraction(1 if j == i else 0) for j in range(d + 1)) for i in face}
    return Complex.from_facets([face], coords)


def simplex_boundary(d: int) -> Complex:
    """∂Δ_d: all d-subsets of {0..d}."""
    verts = range(d + 1)
    return Complex.from_facets(itertools.combinations(verts, d))


def octahedron_boundary() -> Complex:
    """Boundary of the octahedron: vertex pairs (0,5), (1,4), (2,3) antipodal."""
    pairs = [(0, 5), (1, 4), (2, 3)]
    facets = [tuple(sorted(choice)) for choice in itertools.product(*pairs)]
    return Complex.from_facets(facets)


def icosahedron_boundary() -> Complex:
    faces = [
        (0, 1, 2), (0, 2, 3), (0, 3, 4), (0, 4, 5), (0, 5, 1),
        (1, 2, 7), (2, 3, 8), (3, 4, 9), (4, 5, 10), (5, 1, 6),
        (1, 6, 7), (2, 7, 8), (3, 8, 9), (4, 9, 10), (5, 10, 6),
        (6, 7, 11), (7, 8, 11), (8, 9, 11), (9, 10, 11), (10, 6, 11),
    ]
    return Complex.from_facets(faces)


def cone(base: Complex, apex: Optional[int] = None) -> Complex:
    """Cone over a complex: a ball whose boundary is the (closed) base."""
    if apex is None:
        apex = max(base.vertices) + 1
    return Complex.from_facets([f + (apex,) for f in base.facets])


def cyclic_polytope_boundary(n: int, d: int) -> Complex:
    """Boundary complex of the cyclic polytope C(n, d) via Gale's evenness."""
    facets = []
    universe = list(range(n))
    for s in itertools.combinations(universe, d):
        ss = set(s)
        ok = True
        for i, j in itertools.combinations([u for u in universe if u not in ss], 2):
            if sum(1 for k in s if i < k < j) % 2:
                ok = False
                break
        if ok:
            facets.append(s)
    return Complex.from_facets(facets)


def stack(complex: Complex, facet: Iterable[int], new_vertex: Optional[int] = None) -> Complex:
    """Replace `facet` by the join of a new vertex with its boundary."""
    facet = as_face(facet)
    if facet not in complex.facets:
        raise ValueError(f"{facet} is not a facet")
    if new_vertex is None:
        new_vertex = max(complex.vertices) + 1
    rest = [f for f in complex.facets if f != facet]
    added = [as_face(set(facet) - {v} | {new_vertex}) for v in facet]
    return Complex.from_facets(rest + added)


def unstack(complex: Complex, vertex: int) -> Complex:
    """Inverse of stack at a stacking vertex.

    The vertex must have degree d+1 with link the boundary of a simplex, and
    removing it must leave a valid pseudomanifold (on ∂Δ_d this fails: the
    replaced facet would already be present).
    """
    star = [f for f in complex.facets if vertex in f]
    d = complex.dim
    if len(star) != d + 1:
        raise NotStackingVertex(f"vertex {vertex} has degree {len(star)}, want {d + 1}")
    neighbors = sorted({v for f in star for v in f if v != vertex})
    if len(neighbors) != d + 1:
        raise NotStackingVertex(f"link of {vertex} is not a simplex boundary")
    link_facets = {tuple(v for v in f if v != vertex) for f in star}
    expected = set(itertools.combinations(neighbors, d))
    if link_facets != expected:
        raise NotStackingVertex(f"link of {vertex} is not a simplex boundary")
    filled = tuple(neighbors)
    rest = [f for f in complex.facets if vertex not in f]
    if filled in rest:
        raise NotStackingVertex("unstacking would duplicate an existing facet")
    result = Complex.from_facets(rest + [filled])
    if not validate(result).valid:
        raise NotStackingVertex("unstacking does not yield a pseudomanifold")
    return result


def lower_bound(b: Complex) -> Fraction:
    """Rainbow-facet lower bound (f_top(B) - 2) / dim(B) for closed B."""
    if b.dim < 1:
        raise ValueError("bound needs dim(B) >= 1")
    return Fraction(len(b.facets) - 2, b.dim)
