"""KKM and dual-KKM covers of the simplex.

The cover of record is a labeled simplicial partition of the simplex: each
cell is a full-dimensional simplex with exact rational vertices carrying the
set of cover indices whose sets contain it.  An exact membership evaluator
may accompany the partition (scripted preference covers do this); black-box
predicates are supported with all exactness claims downgraded to sampled.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

Point = tuple[Fraction, ...]


class CoverViolation(Exception):
    def __init__(self, face, witness):
        self.face = tuple(face)
        self.witness = witness
        super().__init__(f"face {self.face} uncovered near {witness}")


def barycenter(points: Sequence[Point]) -> Point:
    n = len(points)
    return tuple(sum(c, Fraction(0)) / n for c in zip(*points))


def point_in_simplex(x: Point, verts: Sequence[Point]) -> bool:
    """Exact containment of x in the (possibly lower-dimensional) simplex."""
    coords = _barycentric_in(x, verts)
    return coords is not None and all(c >= 0 for c in coords)


def _barycentric_in(x: Point, verts: Sequence[Point]) -> Optional[list[Fraction]]:
    """Solve x = sum(l_i * v_i), sum(l_i) = 1 exactly; None if inconsistent."""
    m = len(verts)
    dim = len(x)
    rows = [[verts[j][c] for j in range(m)] + [x[c]] for c in range(dim)]
    rows.append([Fraction(1)] * m + [Fraction(1)])
    pivots = []
    r = 0
    for col in range(m):
        pivot = next((i for i in range(r, len(rows)) if rows[i][col] != 0), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        pv = rows[r][col]
        rows[r] = [v / pv for v in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][col] != 0:
                f = rows[i][col]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(col)
        r += 1
    for i in range(r, len(rows)):
        if rows[i][-1] != 0:
            return None
    sol = [Fraction(0)] * m
    for i, col in enumerate(pivots):
        sol[col] = rows[i][-1]
    return sol


@dataclass(frozen=True)
class Cell:
    verts: tuple[Point, ...]
    labels: frozenset


@dataclass
class Cover:
    """Indexed family of closed regions of the d-simplex.

    `membership(i, x)` is exact for partition- or evaluator-backed covers;
    predicate-only covers answer whatever the black box says and are flagged
    `sampled` so downstream checks report their verdicts accordingly.
    """

    d: int
    index_set: tuple
    dual: bool = False
    cells: Optional[list[Cell]] = None
    evaluator: Optional[Callable[[int, Point], bool]] = None
    _arrays: dict = field(default_factory=dict, repr=False)

    @property
    def sampled(self) -> bool:
        return self.cells is None and self.evaluator is not None and not getattr(
            self.evaluator, "exact", False)

    @property
    def exact(self) -> bool:
        return self.cells is not None or getattr(self.evaluator, "exact", False)

    def membership(self, i, x: Point) -> bool:
        if self.evaluator is not None:
            return bool(self.evaluator(i, x))
        return any(i in cell.labels and point_in_simplex(x, cell.verts)
                   for cell in self.cells)

    def labels_at(self, x: Point) -> frozenset:
        return frozenset(i for i in self.index_set if self.membership(i, x))

    # -- float distance machinery (Euclidean, vectorized over cells) --------

    def _projectors(self, key):
        """Stacked projection structures, grouped by face size, for the
        union of cells labeled i (('in', i)) or not labeled i (('out', i))."""
        if key not in self._arrays:
            side, i = key
            by_size: dict[int, list] = {}
            for cell in self.cells:
                if (i in cell.labels) != (side == "in"):
                    continue
                verts = np.array([[float(v) for v in p] for p in cell.verts])
                m = len(verts)
                for r in range(1, m + 1):
                    for subset in itertools.combinations(range(m), r):
                        v0 = verts[subset[0]]
                        if r == 1:
                            by_size.setdefault(1, []).append((v0, None, None))
                            continue
                        a = verts[list(subset[1:])] - v0
                        g = a @ a.T
                        try:
                            m_proj = np.linalg.solve(g, a).T  # (D, r-1)
                        except np.linalg.LinAlgError:
                            continue
                        by_size.setdefault(r, []).append((v0, a, m_proj))
            stacked = {}
            for r, items in by_size.items():
                v0s = np.array([it[0] for it in items])
                if r == 1:
                    stacked[1] = (v0s, None, None)
                else:
                    stacked[r] = (v0s,
                                  np.array([it[1] for it in items]),
                                  np.array([it[2] for it in items]))
            self._arrays[key] = stacked
        return self._arrays[key]

    def distance_batch(self, i, points: np.ndarray, complement: bool = False) -> np.ndarray:
        """Euclidean distances from each row of `points` to C_i, or, with
        `complement`, to the closure of its complement (the union of cells
        not labeled i: a lower face misses label i only if some incident
        cell does, so unlabeled cells are the maximal complement faces)."""
        if self.cells is None:
            raise ValueError("distance needs a partition-backed cover")
        best = np.full(len(points), np.inf)
        chunk = max(1, 4_000_000 // max(1, len(points)))
        for r, (v0s, a, m_proj) in self._projectors(
                ("out" if complement else "in", i)).items():
            for lo in range(0, len(v0s), chunk):
                v0 = v0s[lo:lo + chunk]
                diff = points[None, :, :] - v0[:, None, :]          # (S, P, D)
                if a is None:
                    d2 = (diff ** 2).sum(axis=2)
                else:
                    t = np.einsum("spd,sdr->spr", diff, m_proj[lo:lo + chunk])
                    lam0 = 1.0 - t.sum(axis=2)
                    valid = (lam0 >= -1e-12) & (t >= -1e-12).all(axis=2)
                    proj = v0[:, None, :] + np.einsum(
                        "spr,srd->spd", t, a[lo:lo + chunk])
                    d2 = ((points[None, :, :] - proj) ** 2).sum(axis=2)
                    d2[~valid] = np.inf
                np.minimum(best, np.sqrt(d2.min(axis=0)), out=best)
        return best

    def distance(self, i, x, complement: bool = False) -> float:
        pt = np.array([[float(v) for v in x]])
        return float(self.distance_batch(i, pt, complement)[0])


def simplex_vertices(d: int) -> list[Point]:
    return [tuple(Fraction(1 if j == i else 0) for j in range(d + 1)) for i in range(d + 1)]


def argmax_cover(d: int) -> Cover:
    """Canonical KKM cover: x in C_i iff x_i is maximal."""

    def evaluator(i, x):
        return x[i] == max(x)

    evaluator.exact = True
    cells = partition_by_functions(d, lambda x: list(x))
    return Cover(d, tuple(range(d + 1)), dual=False, cells=cells, evaluator=evaluator)


def argmin_cover(d: int) -> Cover:
    """Canonical dual cover: x in C_i iff x_i is minimal."""

    def evaluator(i, x):
        return x[i] == min(x)

    evaluator.exact = True
    cells = partition_by_functions(d, lambda x: [-c for c in x])
    return Cover(d, tuple(range(d + 1)), dual=True, cells=cells, evaluator=evaluator)


# ---------------------------------------------------------------------------
# Exact simplicial partitions from piecewise-affine score functions
# ---------------------------------------------------------------------------

def split_by_values(verts: Sequence[Point], values: Sequence[Fraction]):
    """Split a simplex by the zero set of the affine function interpolating
    `values` at its vertices; returns (nonpositive side, nonnegative side).

    Strictly crossed edges are cut at the exact interpolated zero; recursing
    on both halves terminates because each cut removes a crossed edge.
    """
    neg = [i for i, v in enumerate(values) if v < 0]
    pos = [i for i, v in enumerate(values) if v > 0]
    if not neg and not pos:
        cell = [(tuple(verts), tuple(values))]
        return cell, cell
    if not neg:
        return [], [(tuple(verts), tuple(values))]
    if not pos:
        return [(tuple(verts), tuple(values))], []
    i, j = neg[0], pos[0]
    t = values[i] / (values[i] - values[j])  # in (0,1)
    cut = tuple(a + t * (b - a) for a, b in zip(verts[i], verts[j]))
    lo_verts = list(verts)
    lo_verts[j] = cut
    lo_vals = list(values)
    lo_vals[j] = Fraction(0)
    hi_verts = list(verts)
    hi_verts[i] = cut
    hi_vals = list(values)
    hi_vals[i] = Fraction(0)
    lneg, lpos = split_by_values(lo_verts, lo_vals)
    rneg, rpos = split_by_values(hi_verts, hi_vals)
    return lneg + rneg, lpos + rpos


def partition_by_functions(d: int, scores: Callable[[Point], Sequence[Fraction]],
                           breakfns: Iterable[Callable[[Point], Fraction]] = ()) -> list[Cell]:
    """Triangulate the simplex into cells on which the labeling pattern of
    `scores` (argmax set) is constant on every face's relative interior.

    `breakfns` are affine functions whose zero hyperplanes are cut first so
    that each score is affine within every cell (evaluated at vertices and
    split by sign); score ties are then cut pairwise inside each cell.
    """
    cells = [tuple(simplex_vertices(d))]
    for fn in breakfns:
        nxt = []
        for verts in cells:
            lo, hi = split_by_values(verts, [fn(p) for p in verts])
            nxt.extend(v for v, _ in lo)
            nxt.extend(v for v, _ in hi)
        cells = _dedupe(nxt)
    count = len(scores(simplex_vertices(d)[0]))
    for a, b in itertools.combinations(range(count), 2):
        nxt = []
        for verts in cells:
            vals = [scores(p)[a] - scores(p)[b] for p in verts]
            lo, hi = split_by_values(verts, vals)
            nxt.extend(v for v, _ in lo)
            nxt.extend(v for v, _ in hi)
        cells = _dedupe(nxt)
    out = []
    for verts in cells:
        center = barycenter(verts)
        s = scores(center)
        top = max(s)
        out.append(Cell(tuple(verts), frozenset(i for i, v in enumerate(s) if v == top)))
    return out


def _dedupe(cells):
    seen = set()
    out = []
    for verts in cells:
        key = tuple(sorted(verts))
        if key not in seen and _nondegenerate(verts):
            seen.add(key)
            out.append(tuple(verts))
    return out


def _nondegenerate(verts) -> bool:
    base = verts[0]
    rows = [[v[c] - base[c] for c in range(len(base))] for v in verts[1:]]
    # rank check over the rationals
    m = [row[:] for row in rows]
    rank = 0
    cols = len(base)
    for col in range(cols):
        pivot = next((r for r in range(rank, len(m)) if m[r][col] != 0), None)
        if pivot is None:
            continue
        m[rank], m[pivot] = m[pivot], m[rank]
        pv = m[rank][col]
        m[rank] = [v / pv for v in m[rank]]
        for r in range(len(m)):
            if r != rank and m[r][col] != 0:
                f = m[r][col]
                m[r] = [a - f * b for a, b in zip(m[r], m[rank])]
        rank += 1
    return rank == len(rows)


# ---------------------------------------------------------------------------
# Exact cover checking
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CoverCheck:
    ok: bool
    exact: bool
    face: Optional[tuple] = None
    witness: Optional[Point] = None


def _support(x: Point) -> frozenset:
    return frozenset(i for i, c in enumerate(x) if c != 0)


def check_cover(cover: Cover, resolution: int = 8) -> CoverCheck:
    """KKM / dual-KKM condition check.

    Partition-backed covers are checked exactly: the membership pattern is
    constant on the relative interior of every face of every cell, so the
    barycenters of those faces witness coverage of every simplex face.
    Covers backed only by a predicate are checked on a grid and the verdict
    is marked sampled.
    """
    d = cover.d
    indices = list(cover.index_set)
    if cover.cells is not None:
        points = set()
        for cell in cover.cells:
            for r in range(1, len(cell.verts) + 1):
                for subset in itertools.combinations(cell.verts, r):
                    points.add(barycenter(subset))
        exact = True
    else:
        if resolution <= 0:
            raise ValueError("resolution must be positive for sampled covers")
        points = {tuple(Fraction(a, resolution) for a in comp)
                  for comp in _compositions(resolution, d + 1)}
        exact = False
    for x in sorted(points):
        supp = _support(x)
        if cover.dual:
            if len(supp) <= d:  # proper face: covered by complementary indices
                allowed = [i for i in indices if i not in supp]
            else:
                allowed = indices
        else:
            allowed = [i for i in indices if i in supp]
        if not any(cover.membership(i, x) for i in allowed):
            return CoverCheck(False, exact, tuple(sorted(supp)), x)
    return CoverCheck(True, exact)


def _compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for rest in _compositions(total - head, parts - 1):
            yield (head,) + rest
