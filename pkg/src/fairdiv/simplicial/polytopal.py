"""Realizing polytope boundaries as subdivisions of the simplex boundary.

The construction is the classical induction: fix a vertex v of the chosen
facet, express the link of v as a subdivision of a one-lower simplex
boundary (with the rest of the facet a face of it), cone with v, and send
the antistar interior to the facet opposite v.  The inductive choices (which
vertex of the facet, where the base-case cycle folds) are backtracked until
the carrier axioms hold; when every choice fails the input is reported as
not expressible.
"""
from __future__ import annotations

import itertools
from typing import Iterator

from .complexes import Complex, Face, as_face, validate
from .subdivision import CarrierMap


class RecursionFailed(Exception):
    """No inductive choice realizes the input as a simplex-boundary subdivision."""


_ATTEMPT_CAP = 5000


def _cycle_candidates(cycle: Complex, sigma: Face, apex: int) -> Iterator[dict[int, Face]]:
    """Base case: closed 1-pseudomanifolds subdividing a triangle boundary.

    The path from a to b (avoiding the edge sigma) folds at one interior
    vertex, which becomes the apex; every fold point is a candidate.
    """
    a, b = sigma
    adj: dict[int, list[int]] = {}
    for u, w in cycle.facets:
        adj.setdefault(u, []).append(w)
        adj.setdefault(w, []).append(u)
    if any(len(ns) != 2 for ns in adj.values()):
        return
    path = [a]
    prev, cur = a, [n for n in sorted(adj[a]) if n != b][0]
    while cur != b:
        path.append(cur)
        nxt = adj[cur][0] if adj[cur][1] == prev else adj[cur][1]
        prev, cur = cur, nxt
    path.append(b)
    interior = path[1:-1]
    if len(path) != len(cycle.vertices):
        return
    for j, fold in enumerate(interior):
        carrier = {a: (a,), b: (b,), fold: (apex,)}
        for u in interior[:j]:
            carrier[u] = as_face((a, apex))
        for u in interior[j + 1:]:
            carrier[u] = as_face((b, apex))
        yield carrier


def _candidates(complex: Complex, sigma: Face, apex: int) -> Iterator[dict[int, Face]]:
    if complex.dim == 1:
        yield from _cycle_candidates(complex, sigma, apex)
        return
    for v in sigma:
        tau = tuple(u for u in sigma if u != v)
        link_facets = complex.link((v,))
        if not link_facets:
            continue
        link = Complex.from_facets(link_facets)
        if link.dim != complex.dim - 1 or validate(link).kind != "closed":
            continue
        if tau not in link.facets:
            continue
        opposite = as_face(tau + (apex,))
        for link_carrier in _candidates(link, tau, apex):
            carrier: dict[int, Face] = {v: (v,)}
            for u in complex.vertices:
                if u == v:
                    continue
                carrier[u] = link_carrier[u] if u in link_carrier else opposite
            yield carrier


def simplex_carrier_for_facet(boundary_complex: Complex, sigma) -> CarrierMap:
    """Carrier map exhibiting `boundary_complex` as a subdivision of the
    boundary of a simplex in which `sigma` is a facet.

    The input must be the boundary complex of a simplicial polytope (caller
    asserted).  Inductive choices are searched until the carrier axioms
    check out; exhaustion raises RecursionFailed rather than guessing.
    """
    sigma = as_face(sigma)
    if sigma not in boundary_complex.facets:
        raise ValueError(f"{sigma} is not a facet")
    if validate(boundary_complex).kind != "closed":
        raise RecursionFailed("input does not validate as a closed pseudomanifold")
    apex = max(boundary_complex.vertices) + 1
    d = boundary_complex.dim + 1
    target = Complex.from_facets(itertools.combinations(sorted(sigma + (apex,)), d))
    last_problems: list[str] = []
    for attempt, carrier in enumerate(_candidates(boundary_complex, sigma, apex)):
        if attempt >= _ATTEMPT_CAP:
            break
        cmap = CarrierMap(boundary_complex, target, carrier)
        last_problems = cmap.validate()
        if not last_problems:
            return cmap
    detail = "; ".join(last_problems[:3]) if last_problems else "no inductive choices"
    raise RecursionFailed(f"carrier axioms violated for every choice: {detail}")
