"""Lazy Sperner path-following on the Kuhn triangulation of the simplex.

Grid points are integer vectors a >= 0 with sum(a) = m, standing for the
barycentric point a/m.  A facet is a chain: a base point plus a permutation
of step directions, where direction j moves one grid unit from coordinate
j-1 to coordinate j.  Neighbor facets come from O(1) pivot rules, so the
triangulation is never materialized: walks touch only the facets they visit.

The search is the classical multi-level traversal: the path starts at the
corner (m, 0, ..., 0), and whenever the level-r walk meets a fully labeled
facet it ascends one level, while a level-r exit through the face x_r = 0
descends and continues the lower path.  The combined path is simple and must
end at a fully labeled top-level facet whenever the labeling is Sperner.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence


class LabelOutsideCarrier(Exception):
    """A label fell outside the support of its grid point."""


class EngineBudget(Exception):
    pass


Vertex = tuple[int, ...]
Facet = tuple[Vertex, tuple[int, ...]]  # (base point, direction permutation)


def _step(a: Vertex, j: int, sign: int = 1) -> Vertex:
    out = list(a)
    out[j - 1] -= sign
    out[j] += sign
    return tuple(out)


def facet_vertices(facet: Facet) -> list[Vertex]:
    base, perm = facet
    chain = [base]
    for j in perm:
        chain.append(_step(chain[-1], j))
    return chain


def _valid_vertex(a: Vertex) -> bool:
    return min(a) >= 0


def _facet_from_vertices(verts: Sequence[Vertex]) -> Facet:
    """Reconstruct (base, perm): the chain is ordered by sum(i * a_i)."""
    chain = sorted(verts, key=lambda a: sum(i * c for i, c in enumerate(a)))
    perm = []
    for prev, cur in zip(chain, chain[1:]):
        j = next(i for i in range(len(cur)) if cur[i] == prev[i] + 1)
        perm.append(j)
    return chain[0], tuple(perm)


def _pivot(facet: Facet, drop: int) -> Facet:
    """Replace the drop-th chain vertex; validity is checked by the caller
    on the single new vertex."""
    base, perm = facet
    r = len(perm)
    if drop == 0:
        return _step(base, perm[0]), perm[1:] + (perm[0],)
    if drop == r:
        return _step(base, perm[-1], -1), (perm[-1],) + perm[:-1]
    p = list(perm)
    p[drop - 1], p[drop] = p[drop], p[drop - 1]
    return base, tuple(p)


@dataclass
class KuhnWalk:
    """Stateful traversal producing one fully labeled top-level facet."""

    d: int
    m: int
    label: Callable[[Vertex], int]
    budget: int = 5_000_000

    def __post_init__(self):
        self._labels: dict[Vertex, int] = {}
        self._steps = 0

    def label_of(self, a: Vertex) -> int:
        if a not in self._labels:
            value = self.label(a)
            if a[value] <= 0:
                raise LabelOutsideCarrier(f"label {value} at grid point {a}")
            self._labels[a] = value
        return self._labels[a]

    def _tick(self):
        self._steps += 1
        if self._steps > self.budget:
            raise EngineBudget(f"path exceeded {self.budget} pivots")

    def run(self) -> list[Vertex]:
        corner = tuple([self.m] + [0] * self.d)
        if self.d == 0:
            self.label_of(corner)
            return [corner]
        if self.label_of(corner) != 0:
            raise LabelOutsideCarrier(f"corner labeled {self.label_of(corner)}")
        state = ("up", (corner, ()), 0)  # ascend from a fully labeled facet
        while True:
            self._tick()
            kind = state[0]
            if kind == "up":
                _, facet, level = state
                if level == self.d:
                    return facet_vertices(facet)
                entered = (facet[0], facet[1] + (level + 1,))
                door = frozenset(facet_vertices(facet))
                state = ("walk", entered, level + 1, door)
            elif kind == "down":
                _, facet, level = state
                if level == 0:
                    raise LabelOutsideCarrier("path returned to the corner; labeling is not Sperner")
                # continue the level path through the unique door of a fully
                # labeled facet: drop its level-labeled vertex
                verts = facet_vertices(facet)
                labeled = {self.label_of(v): i for i, v in enumerate(verts)}
                drop = labeled[level]
                nxt = _pivot(facet, drop)
                new_vertex = self._new_vertex(nxt, facet, drop)
                door = frozenset(v for i, v in enumerate(verts) if i != drop)
                if new_vertex is None:
                    state = ("down", _facet_from_vertices(sorted(door)), level - 1)
                else:
                    state = ("walk", nxt, level, door)
            else:
                _, facet, level, door = state
                outcome = self._segment(facet, level, door)
                if outcome[0] == "complete":
                    state = ("up", outcome[1], level)
                else:
                    state = ("down", outcome[1], level - 1)

    def _new_vertex(self, pivoted: Facet, old: Facet, dropped: int):
        """The vertex of `pivoted` not shared with `old`, or None when the
        pivot left the grid (boundary wall)."""
        old_set = set(facet_vertices(old))
        for v in facet_vertices(pivoted):
            if v not in old_set:
                return v if _valid_vertex(v) else None
        return None

    def _segment(self, facet: Facet, level: int, door: frozenset):
        """Walk almost-fully-labeled facets at one level until the labels
        complete or the path exits through the x_level = 0 face."""
        while True:
            self._tick()
            verts = facet_vertices(facet)
            labels = [self.label_of(v) for v in verts]
            if len(set(labels)) == level + 1:
                return "complete", facet
            new_vertex = next(v for v in verts if v not in door)
            dup_label = self.label_of(new_vertex)
            drop = next(i for i, v in enumerate(verts)
                        if v != new_vertex and labels[i] == dup_label)
            nxt = _pivot(facet, drop)
            moved = self._new_vertex(nxt, facet, drop)
            exit_door = frozenset(v for i, v in enumerate(verts) if i != drop)
            if moved is None:
                return "exit", _facet_from_vertices(sorted(exit_door))
            facet, door = nxt, exit_door


def fully_labeled_facet(d: int, m: int, label: Callable[[Vertex], int],
                        budget: int = 5_000_000) -> list[Vertex]:
    """Vertices of a fully labeled facet of the Kuhn grid at resolution m."""
    return KuhnWalk(d, m, label, budget).run()
