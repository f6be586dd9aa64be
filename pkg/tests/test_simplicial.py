from __future__ import annotations

import random
from fractions import Fraction

import pytest

from fairdiv.simplicial import (
    AffineTestMap,
    CarrierMap,
    ClosedInput,
    Complex,
    NotStackingVertex,
    RecursionFailed,
    SpernerColoring,
    barycentric,
    boundary,
    check_sperner,
    cone,
    cyclic_polytope_boundary,
    exhaustive_zero_count,
    face_diameter,
    icosahedron_boundary,
    identity_carrier,
    lower_bound,
    octahedron_boundary,
    parity_counts,
    rainbow_facets,
    rainbow_for_face,
    random_sperner_coloring,
    refine_to_mesh,
    simplex_boundary,
    simplex_carrier_for_facet,
    simplex_complex,
    stack,
    unstack,
    validate,
)


class TestValidate:
    def test_simplex_boundary_closed(self):
        assert validate(simplex_boundary(3)).kind == "closed"

    def test_octahedron_closed(self):
        assert validate(octahedron_boundary()).kind == "closed"

    def test_single_simplex_with_boundary(self):
        assert validate(simplex_complex(3)).kind == "with-boundary"

    def test_two_tetrahedra_sharing_vertex_invalid(self):
        bad = Complex.from_facets([(0, 1, 2, 3), (0, 4, 5, 6)])
        result = validate(bad)
        assert result.kind == "invalid"
        assert "connectivity" in result.reason

    def test_triple_ridge_invalid(self):
        bad = Complex.from_facets([(0, 1, 2), (0, 1, 3), (0, 1, 4)])
        result = validate(bad)
        assert result.kind == "invalid"
        assert "multiplicity" in result.reason

    def test_pinched_link_invalid(self):
        # two triangle fans glued at a single vertex of a 2-complex
        bad = Complex.from_facets([(0, 1, 2), (0, 2, 3), (0, 3, 1),
                                   (0, 4, 5), (0, 5, 6), (0, 6, 4)])
        result = validate(bad)
        assert result.kind == "invalid"
        assert "link" in result.reason or "connectivity" in result.reason


class TestBoundary:
    def test_simplex(self):
        bd = boundary(simplex_complex(3))
        assert bd.facets == simplex_boundary(3).facets

    def test_cone_over_octahedron(self):
        ball = cone(octahedron_boundary())
        assert boundary(ball).facets == octahedron_boundary().facets

    def test_barycentric_triangle_boundary_is_hexagon(self):
        sub, _ = barycentric(simplex_complex(2))
        bd = boundary(sub)
        assert len(bd.facets) == 6
        assert validate(bd).kind == "closed"

    def test_closed_input_raises(self):
        with pytest.raises(ClosedInput):
            boundary(simplex_boundary(2))


class TestBarycentric:
    def test_segment(self):
        sub, _ = barycentric(simplex_complex(1))
        assert len(sub.facets) == 2
        assert len(sub.vertices) == 3

    def test_triangle(self):
        sub, carrier = barycentric(simplex_complex(2))
        assert len(sub.facets) == 6
        assert carrier.validate() == []

    def test_octahedron_flag_count(self):
        sub, _ = barycentric(octahedron_boundary())
        assert len(sub.facets) == 48

    def test_carrier_sends_barycenter_to_face(self):
        base = simplex_complex(2)
        sub, carrier = barycentric(base)
        for v, face in carrier.carrier.items():
            assert sub.coords[v] == base.barycenter_coords(face)


class TestRefineToMesh:
    def test_identity_when_coarse(self):
        base = simplex_complex(2)
        mesh, chain = refine_to_mesh(base, 2)
        assert mesh.facets == base.facets

    def test_segment_one_round(self):
        mesh, _ = refine_to_mesh(simplex_complex(1), Fraction(1, 2))
        assert len(mesh.facets) == 2
        assert face_diameter(mesh) <= Fraction(1, 2)

    def test_triangle_three_rounds(self):
        mesh, chain = refine_to_mesh(simplex_complex(2), Fraction(1, 3))
        assert face_diameter(mesh) <= Fraction(1, 3)
        assert len(mesh.facets) <= 6 ** 3
        assert check_sperner(
            SpernerColoring({v: chain.carrier[v][0] for v in mesh.vertices}), chain) is None


class TestSperner:
    def test_identity_coloring_ok(self):
        base = simplex_complex(3)
        carrier = identity_carrier(base)
        assert check_sperner(SpernerColoring({v: v for v in base.vertices}), carrier) is None

    def test_barycenter_colored_outside_carrier(self):
        sub, carrier = barycentric(simplex_complex(2))
        colors = {v: face[0] for v, face in carrier.carrier.items()}
        edge_vertex = next(v for v, f in carrier.carrier.items() if len(f) == 2)
        outside = next(i for i in range(3) if i not in carrier.carrier[edge_vertex])
        colors[edge_vertex] = outside
        assert check_sperner(SpernerColoring(colors), carrier) == edge_vertex

    def test_unsubdivided_rainbow(self):
        base = simplex_complex(3)
        facets, distinct = rainbow_facets(base, SpernerColoring({v: v for v in base.vertices}))
        assert len(facets) == 1 and distinct == 1

    @pytest.mark.parametrize("d", [1, 2, 3])
    def test_odd_fully_labeled_count(self, d):
        rng = random.Random(100 + d)
        mesh, chain = barycentric(simplex_complex(d))
        mesh, step = barycentric(mesh)
        chain = chain.compose(step)
        for _ in range(20):
            coloring = random_sperner_coloring(chain, rng)
            facets, _ = rainbow_facets(mesh, coloring)
            assert len(facets) % 2 == 1


class TestLowerBound:
    def test_simplex_boundary_is_one(self):
        for d in (2, 3, 4):
            assert lower_bound(simplex_boundary(d)) == 1

    def test_octahedron(self):
        assert lower_bound(octahedron_boundary()) == 3

    def test_icosahedron(self):
        assert lower_bound(icosahedron_boundary()) == 9


class TestStackUnstack:
    def test_stack_simplex_boundary(self):
        stacked = stack(simplex_boundary(3), (0, 1, 2))
        assert len(stacked.facets) == 6
        assert validate(stacked).kind == "closed"

    def test_roundtrip(self):
        base = octahedron_boundary()
        stacked = stack(base, base.facets[0], new_vertex=77)
        assert unstack(stacked, 77).facets == base.facets

    def test_simplex_boundary_has_no_stacking_vertices(self):
        with pytest.raises(NotStackingVertex):
            unstack(simplex_boundary(3), 0)

    def test_facet_count_grows_by_dim(self):
        base = octahedron_boundary()
        stacked = stack(base, base.facets[0])
        assert len(stacked.facets) - len(base.facets) == base.dim


class TestDegreeLemma:
    """d+1 distinct facets on d+2 vertices force a degree-(d+1) vertex."""

    @pytest.mark.parametrize("complex", [
        simplex_boundary(2), simplex_boundary(3),
        octahedron_boundary(), icosahedron_boundary(),
        stack(octahedron_boundary(), (0, 1, 2)),
    ])
    def test_exhaustive_scan(self, complex):
        import itertools

        d = complex.dim
        degrees = {v: complex.degree(v) for v in complex.vertices}
        for facets in itertools.combinations(complex.facets, d + 1):
            spanned = {v for f in facets for v in f}
            if len(spanned) <= d + 2:
                assert any(degrees[v] == d + 1 for v in complex.vertices)
                break


class TestGrunbaum:
    def test_simplex_identity(self):
        cm = simplex_carrier_for_facet(simplex_boundary(3), (0, 1, 2))
        assert cm.carrier[0] == (0,) and cm.carrier[1] == (1,) and cm.carrier[2] == (2,)
        assert cm.validate() == []

    def test_octahedron_merges_opposite_facet(self):
        base = octahedron_boundary()
        cm = simplex_carrier_for_facet(base, (0, 1, 2))
        assert cm.validate() == []
        apex = max(cm.target.vertices)
        # the opposite facet's vertices land in the cone vertex class
        for v in (3, 4, 5):
            assert apex in cm.carrier[v]

    def test_cyclic_polytope_all_facets(self):
        base = cyclic_polytope_boundary(6, 3)
        assert len(base.facets) == 8
        for facet in base.facets:
            assert simplex_carrier_for_facet(base, facet).validate() == []

    def test_non_pseudomanifold_fails(self):
        bad = Complex.from_facets([(0, 1, 2)])
        with pytest.raises(RecursionFailed):
            simplex_carrier_for_facet(bad, (0, 1, 2))


def _random_test_map(complex, rng, span=6):
    images = {v: tuple(Fraction(rng.randint(-span, span)) for _ in range(complex.dim))
              for v in complex.vertices}
    return AffineTestMap(complex, images)


class TestParity:
    def test_no_boundary_crossings_means_even(self):
        K, _ = barycentric(simplex_complex(2))
        # map far from zero on the first coordinate: no doors anywhere
        images = {v: (Fraction(5), Fraction(1)) for v in K.vertices}
        report = parity_counts(AffineTestMap(K, images))
        assert report.r_plus == 0 and report.r % 2 == 0

    @pytest.mark.parametrize("seed", range(12))
    def test_parity_and_exhaustive_dim2(self, seed):
        rng = random.Random(seed)
        K, _ = barycentric(simplex_complex(2))
        if seed % 2:
            K, _ = barycentric(K)
        tm = _random_test_map(K, rng)
        report = parity_counts(tm)
        assert report.r == exhaustive_zero_count(tm)
        assert report.r % 2 == report.r_plus % 2

    @pytest.mark.parametrize("seed", range(6))
    def test_parity_and_exhaustive_dim3(self, seed):
        rng = random.Random(1000 + seed)
        base = cone(octahedron_boundary()) if seed % 2 else simplex_complex(3)
        K, _ = barycentric(base)
        tm = _random_test_map(K, rng)
        report = parity_counts(tm)
        assert report.r == exhaustive_zero_count(tm)
        assert report.r % 2 == report.r_plus % 2


class TestRainbowForFace:
    def test_triangle_identity(self):
        K = simplex_complex(2)
        B = simplex_boundary(2)
        bd = boundary(K)
        carrier = CarrierMap(bd, B, {v: (v,) for v in bd.vertices})
        coloring = SpernerColoring({v: v for v in K.vertices})
        assert rainbow_for_face(K, carrier, coloring, (0, 1)) == (0, 1, 2)

    def test_subdivided_simplex_boundary(self):
        base = simplex_complex(3)
        K, chain = barycentric(base)
        B = simplex_boundary(3)
        bd = boundary(K)
        carrier = CarrierMap(bd, B, {v: chain.carrier[v] for v in bd.vertices})
        rng = random.Random(4)
        colors = {v: rng.choice(chain.carrier[v]) for v in K.vertices}
        coloring = SpernerColoring(colors)
        for sigma in B.facets:
            facet = rainbow_for_face(K, carrier, coloring, sigma)
            shown = {colors[v] for v in facet}
            assert set(sigma) <= shown and len(shown) == 4

    def test_octahedron_cone_all_faces(self):
        B = octahedron_boundary()
        K = cone(B)
        bd = boundary(K)
        carrier = CarrierMap(bd, B, {v: (v,) for v in bd.vertices})
        rng = random.Random(9)
        colors = {v: v for v in B.vertices}
        colors[max(K.vertices)] = rng.choice(B.vertices)
        coloring = SpernerColoring(colors)
        for sigma in B.facets:
            facet = rainbow_for_face(K, carrier, coloring, sigma)
            shown = {coloring.colors[v] for v in facet}
            assert set(sigma) <= shown and len(shown) == 4


class TestQuantitativeSperner:
    @pytest.mark.parametrize("base,seed", [("oct", 0), ("oct", 1), ("ico", 2)])
    def test_ball_bound(self, base, seed):
        B = octahedron_boundary() if base == "oct" else icosahedron_boundary()
        K, chain = barycentric(cone(B))
        rng = random.Random(seed)
        bound = lower_bound(B)
        boundary_faces = B.all_faces()
        colors = {}
        for v in K.vertices:
            face = chain.carrier[v]
            if face in boundary_faces:
                colors[v] = rng.choice(face)
            else:
                colors[v] = rng.choice(B.vertices)
        _, distinct = rainbow_facets(K, SpernerColoring(colors))
        assert distinct >= bound

    def test_stacking_monotonicity(self):
        """Minimum observed distinct rainbow count never drops by stacking."""
        rng = random.Random(3)
        B1 = octahedron_boundary()
        B2 = stack(B1, B1.facets[0])

        def min_distinct(B, trials):
            boundary_faces = B.all_faces()
            K, chain = barycentric(cone(B))
            lo = None
            for _ in range(trials):
                colors = {}
                for v in K.vertices:
                    face = chain.carrier[v]
                    colors[v] = rng.choice(face if face in boundary_faces else B.vertices)
                _, distinct = rainbow_facets(K, SpernerColoring(colors))
                lo = distinct if lo is None else min(lo, distinct)
            return lo

        assert min_distinct(B2, 12) >= min_distinct(B1, 12)

    def test_recoloring_composes_with_grunbaum_carrier(self):
        """Vertices colored outside sigma recolor to the cone class and stay
        Sperner with respect to the composed carrier onto the simplex."""
        B = octahedron_boundary()
        sigma = B.facets[0]
        gm = simplex_carrier_for_facet(B, sigma)
        apex = max(gm.target.vertices)
        K, chain = barycentric(cone(B))
        boundary_faces = B.all_faces()
        rng = random.Random(11)
        colors = {}
        composed = {}
        for v in K.vertices:
            face = chain.carrier[v]
            if face in boundary_faces:
                colors[v] = rng.choice(face)
                composed[v] = gm.carrier_of_face(face)
        recolored = SpernerColoring(
            {v: (c if c in sigma else apex) for v, c in colors.items()})
        boundary_part = Complex.from_facets(
            [f for f in boundary(K).facets])
        cm = CarrierMap(boundary_part, gm.target, composed)
        assert check_sperner(recolored, cm) is None
