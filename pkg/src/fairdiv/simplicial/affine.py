"""Facewise affine test maps, symbolic perturbation, and zero-parity counts.

A test map sends vertices of a d-pseudomanifold into R^d.  The level set of
its first d-1 coordinates is traced facet to facet through (d-1)-face doors;
`parity_counts` returns (r, r_plus) with r = zeros of the full map and
r_plus = boundary zeros of the truncated map with positive last coordinate.

Degeneracy is removed deterministically: the j-th coordinate of the image of
vertex v is perturbed by eps**(2**(v*d + j - 1)) for an infinitesimal eps.
Every decision reduces to the sign of a determinant that is a polynomial in
eps, and distinct powers of two make the highest-order perturbation terms
cancellation-free, so no sign is ever zero.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Iterable, Optional

from .complexes import Complex, Face
from .subdivision import CarrierMap, SpernerColoring

Poly = dict[int, int]  # eps-exponent -> integer coefficient


class DegenerateMap(Exception):
    pass


class NotFound(Exception):
    pass


def _poly_add(a: Poly, b: Poly) -> Poly:
    out = dict(a)
    for e, c in b.items():
        nc = out.get(e, 0) + c
        if nc:
            out[e] = nc
        else:
            out.pop(e, None)
    return out


def _poly_mul(a: Poly, b: Poly) -> Poly:
    out: Poly = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = ea + eb
            nc = out.get(e, 0) + ca * cb
            if nc:
                out[e] = nc
            else:
                out.pop(e, None)
    return out


def _poly_neg(a: Poly) -> Poly:
    return {e: -c for e, c in a.items()}


def _poly_sign(a: Poly) -> int:
    """Sign as eps -> 0+: the coefficient of the lowest-order term."""
    if not a:
        return 0
    e = min(a)
    return 1 if a[e] > 0 else -1


def _det(rows: list[list[Poly]]) -> Poly:
    """Determinant by subset DP over columns (n <= 6 in practice).

    minors[S] after processing rows k..n-1 is the determinant of the
    submatrix on those rows and the column set S; expanding row k-1 adds one
    column with the cofactor sign given by its rank within the new set.
    """
    n = len(rows)
    full = (1 << n) - 1
    minors: dict[int, Poly] = {0: {0: 1}}
    for k in range(n - 1, -1, -1):
        row = rows[k]
        nxt: dict[int, Poly] = {}
        for subset, value in minors.items():
            if not value:
                continue
            for col in range(n):
                bit = 1 << col
                if subset & bit or not row[col]:
                    continue
                term = _poly_mul(row[col], value)
                if (subset & (bit - 1)).bit_count() % 2:
                    term = _poly_neg(term)
                key = subset | bit
                nxt[key] = _poly_add(nxt.get(key, {}), term)
        minors = nxt
    return minors.get(full, {})


@dataclass(frozen=True)
class AffineTestMap:
    """Map given by rational vertex images; perturbation is implicit."""

    complex: Complex
    images: dict[int, tuple[Fraction, ...]]

    @property
    def dim(self) -> int:
        return self.complex.dim

    def _scaled(self) -> dict[int, tuple[int, ...]]:
        denoms = [c.denominator for img in self.images.values() for c in img]
        scale = lcm(*denoms) if denoms else 1
        return {v: tuple(int(c * scale) for c in img) for v, img in self.images.items()}


class _Engine:
    """Shared exact machinery for wall crossings and facet zeros."""

    def __init__(self, test_map: AffineTestMap):
        self.K = test_map.complex
        self.d = test_map.dim
        self.ints = test_map._scaled()
        self._wall_cache: dict[Face, Optional[int]] = {}

    def _entry(self, v: int, j: int) -> Poly:
        # Perturbed j-th coordinate (1-based) of vertex v's image.
        exp = 1 << (v * self.d + (j - 1))
        c = self.ints[v][j - 1]
        return {0: c, exp: 1} if c else {exp: 1}

    def _system_rows(self, verts: Face, coords: int) -> list[list[Poly]]:
        rows: list[list[Poly]] = [[{0: 1} for _ in verts]]
        for j in range(1, coords + 1):
            rows.append([self._entry(v, j) for v in verts])
        return rows

    def _solve_signs(self, verts: Face, coords: int):
        """Cramer signs for: sum lambda = 1, f_1..f_coords = 0 on `verts`.

        Returns (sign of D, list of signs of numerators D_u) or None when the
        solution has a non-positive coordinate.
        """
        rows = self._system_rows(verts, coords)
        d_sign = _poly_sign(_det(rows))
        if d_sign == 0:
            raise DegenerateMap(f"singular system on {verts}")
        num_signs = []
        for i in range(len(verts)):
            replaced = [row[:i] + [rhs] + row[i + 1:]
                        for row, rhs in zip(rows, [{0: 1}] + [{}] * coords)]
            s = _poly_sign(_det(replaced))
            if s == 0:
                raise DegenerateMap(f"zero barycentric coordinate on {verts}")
            num_signs.append(s)
        return d_sign, num_signs

    def wall_crossing(self, wall: Face) -> Optional[int]:
        """Sign of f_d at the level-set crossing of `wall`, or None if the
        level set of (f_1..f_{d-1}) misses the wall's relative interior."""
        if wall in self._wall_cache:
            return self._wall_cache[wall]
        result: Optional[int] = None
        try:
            d_sign, num_signs = self._solve_signs(wall, self.d - 1)
            if all(s == d_sign for s in num_signs):
                rows = self._system_rows(wall, self.d - 1)
                numerators = [_det([row[:i] + [rhs] + row[i + 1:]
                                    for row, rhs in zip(rows, [{0: 1}] + [{}] * (self.d - 1))])
                              for i in range(len(wall))]
                value: Poly = {}
                for i, v in enumerate(wall):
                    value = _poly_add(value, _poly_mul(numerators[i], self._entry(v, self.d)))
                s = _poly_sign(value)
                if s == 0:
                    raise DegenerateMap(f"f_d vanishes on door {wall}")
                result = s * d_sign
        except DegenerateMap:
            raise
        self._wall_cache[wall] = result
        return result

    def facet_has_zero(self, facet: Face) -> bool:
        """Exhaustive check: does the full map vanish inside `facet`?"""
        d_sign, num_signs = self._solve_signs(facet, self.d)
        return all(s == d_sign for s in num_signs)


@dataclass
class ParityReport:
    r: int
    r_plus: int
    zero_facets: list[Face]
    crossed_boundary_walls: dict[Face, int]  # wall -> sign of f_d there


def parity_counts(test_map: AffineTestMap) -> ParityReport:
    """Count zeros of the map and positive boundary crossings.

    Each facet meets the level set of the first d-1 coordinates in zero or
    two walls; a facet contains a zero of the map exactly when the last
    coordinate changes sign between its two doors.
    """
    eng = _Engine(test_map)
    K = test_map.complex
    incidence = K.ridge_incidence()
    zero_facets = []
    for facet in K.facets:
        doors = []
        for wall in itertools.combinations(facet, len(facet) - 1):
            s = eng.wall_crossing(wall)
            if s is not None:
                doors.append(s)
        if len(doors) not in (0, 2):
            raise DegenerateMap(f"facet {facet} has {len(doors)} doors")
        if len(doors) == 2 and doors[0] != doors[1]:
            zero_facets.append(facet)
    boundary_crossings = {}
    for wall, fs in incidence.items():
        if len(fs) == 1:
            s = eng.wall_crossing(wall)
            if s is not None:
                boundary_crossings[wall] = s
    r_plus = sum(1 for s in boundary_crossings.values() if s > 0)
    return ParityReport(len(zero_facets), r_plus, zero_facets, boundary_crossings)


def exhaustive_zero_count(test_map: AffineTestMap) -> int:
    """Independent per-facet linear solve; oracle for parity_counts."""
    eng = _Engine(test_map)
    return sum(1 for f in test_map.complex.facets if eng.facet_has_zero(f))


def _realize_target(d: int) -> list[tuple[Fraction, ...]]:
    """Vertices v_0..v_d of a d-simplex with the origin interior and the
    positive last-coordinate ray leaving through relint conv{v_1..v_d}."""
    zero = Fraction(0)
    one = Fraction(1)
    verts = [tuple([zero] * (d - 1) + [Fraction(-1)])]
    for i in range(1, d):
        verts.append(tuple(one if j == i - 1 else zero for j in range(d - 1)) + (one,))
    verts.append(tuple([Fraction(-1)] * (d - 1)) + (one,))
    return verts


def rainbow_map(K: Complex, coloring: SpernerColoring, sigma_colors: Iterable[int]) -> AffineTestMap:
    """Affine map whose zeros are rainbow facets showing sigma's colors."""
    colors = sorted(sigma_colors)
    d = K.dim
    if len(colors) != d:
        raise ValueError(f"need {d} colors, got {colors}")
    verts = _realize_target(d)
    place = {c: verts[i + 1] for i, c in enumerate(colors)}
    images = {v: place.get(coloring.colors[v], verts[0]) for v in K.vertices}
    return AffineTestMap(K, images)


def rainbow_for_face(K: Complex, carrier: CarrierMap, coloring: SpernerColoring,
                     sigma: Face) -> Face:
    """A facet of K exhibiting the d colors of boundary face sigma plus one
    more, located by tracing level-set paths from boundary doors.

    `carrier` fixes how the boundary of K subdivides the closed
    pseudomanifold B; sigma is a facet of B.
    """
    sigma = tuple(sorted(sigma))
    if sigma not in carrier.target.facets:
        raise NotFound(f"{sigma} is not a facet of the target complex")
    test_map = rainbow_map(K, coloring, sigma)
    eng = _Engine(test_map)
    incidence = K.ridge_incidence()

    crossed: dict[Face, int] = {}
    for wall in {w for f in K.facets for w in itertools.combinations(f, len(f) - 1)}:
        s = eng.wall_crossing(wall)
        if s is not None:
            crossed[wall] = s
    facet_doors: dict[Face, list[Face]] = {}
    for facet in K.facets:
        doors = [w for w in itertools.combinations(facet, len(facet) - 1) if w in crossed]
        if len(doors) not in (0, 2):
            raise DegenerateMap(f"facet {facet} has {len(doors)} doors")
        if doors:
            facet_doors[facet] = doors

    start_doors = sorted(w for w, fs in incidence.items()
                         if len(fs) == 1 and w in crossed and crossed[w] > 0)
    visited: set[Face] = set()
    for door in start_doors:
        if door in visited:
            continue
        visited.add(door)
        facet = incidence[door][0]
        prev = door
        while True:
            doors = facet_doors[facet]
            if crossed[doors[0]] != crossed[doors[1]]:
                return facet
            nxt = doors[0] if doors[1] == prev else doors[1]
            owners = incidence[nxt]
            if len(owners) == 1:
                visited.add(nxt)
                break
            facet = owners[0] if owners[1] == facet else owners[1]
            prev = nxt
    raise NotFound("no rainbow facet reachable; inputs violate the Sperner preconditions")
