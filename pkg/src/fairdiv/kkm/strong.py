"""Strong colorful KKM solver: one division point, d+1 pick tables.

Given d covers, build the averaged membership map f whose value at the
barycenter of the target simplex certifies a doubly stochastic matrix, and
extract, for every index i, a bijection of the covers onto the remaining
indices supported on positive entries.  The underlying degree argument
guarantees a root of f(x) = (1/(d+1), ..., 1/(d+1)); the solver runs a
budgeted multiresolution minimization of the sup-residual and returns the
best candidate, failing loudly with the residual when no doubly stochastic
certificate emerges.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .covers import Cover, Point
from .birkhoff import _perfect_matching


class RootNotFound(Exception):
    def __init__(self, residual: float, message: str = ""):
        self.residual = residual
        super().__init__(message or f"best residual {residual:.3g} exceeded tolerance")


@dataclass(frozen=True)
class StrongResult:
    x: Point
    pick_tables: dict  # excluded index i -> {cover j (1-based) -> assigned index}
    residual: float
    matrix: np.ndarray


def _column_stack(covers: Sequence[Cover], points: np.ndarray, eps: float,
                  dual: bool) -> np.ndarray:
    """Membership weights, shape (P, d+1, len(covers)).

    Entry (p, k, j) follows the distance-to-complement map: it grades over
    the interior of C^j_k, is patched by the eps-fattening term so that tie
    boundaries keep positive column sums (the closed-to-open passage), and
    is positive only when p lies in the eps-fattening of C^j_k.
    """
    P, dim = points.shape
    out = np.zeros((P, dim, len(covers)))
    for j, cover in enumerate(covers):
        for k in range(dim):
            depth = np.minimum(cover.distance_batch(k, points, complement=True), 1.0)
            band = eps - cover.distance_batch(k, points)
            np.maximum(band, 0.0, out=band)
            out[:, k, j] = np.maximum(depth, band)
    return out


def _residuals(covers, points, eps, dual):
    d1 = points.shape[1]
    weights = _column_stack(covers, points, eps, dual)
    sums = weights.sum(axis=1, keepdims=True)
    bad = (sums <= 0).any(axis=(1, 2))
    sums[sums <= 0] = 1.0
    f_cols = weights / sums
    f_avg = f_cols.mean(axis=2)
    residuals = np.abs(f_avg - 1.0 / d1).max(axis=1)
    residuals[bad] = np.inf
    return residuals, f_cols


def _simplex_grid(d: int, resolution: int) -> np.ndarray:
    return np.array([np.array(c, dtype=float) / resolution
                     for c in _compositions(resolution, d + 1)])


def _compositions(total, parts):
    if parts == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for rest in _compositions(total - head, parts - 1):
            yield (head,) + rest


def strong_colorful_kkm(covers: Sequence[Cover], eps, dual: Optional[bool] = None,
                        coarse: int = 14, beam: int = 5) -> StrongResult:
    """Division point plus d+1 bijections pi_i: {1..d} -> {0..d} minus {i}.

    The root sits within eps of the covers' tie skeleton, where the
    normalized map is locally informative but globally flat.  The search
    anneals the fattening radius: at a coarse radius the residual landscape
    is smooth everywhere, and each halving re-centers a small beam of
    incumbents, tracking the root down to the caller's eps.  Pick tables are
    certified by positive matrix entries, i.e. membership of x within the
    eps-fattening of each assigned set.
    """
    d = covers[0].d
    if len(covers) != d:
        raise ValueError(f"need d={d} covers, got {len(covers)}")
    if dual is None:
        dual = covers[0].dual
    eps_f = float(eps)

    def beam_score(points: np.ndarray, level_eps: float):
        residuals, _ = _residuals(covers, points, level_eps, dual)
        order = np.argsort(residuals)[:beam]
        return [(float(residuals[i]), points[i]) for i in order
                if np.isfinite(residuals[i])]

    level = max(0.25, eps_f)
    incumbents = beam_score(_simplex_grid(d, coarse), level)
    if not incumbents:
        raise RootNotFound(np.inf, "cover sums vanish everywhere sampled")
    shift = _simplex_grid(d, 6 if d <= 2 else 4)
    shift = shift - shift.mean(axis=0)
    while True:
        radius = 5.0 * level
        candidates = [p + radius * (d + 1) * shift for _, p in incumbents]
        pool = np.clip(np.vstack(candidates), 0.0, None)
        pool = pool / pool.sum(axis=1, keepdims=True)
        for _ in range(3):
            ranked = beam_score(pool, level)
            if ranked:
                incumbents = ranked
            radius *= 0.35
            candidates = [p + radius * (d + 1) * shift for _, p in incumbents]
            pool = np.clip(np.vstack(candidates), 0.0, None)
            pool = pool / pool.sum(axis=1, keepdims=True)
        if level <= eps_f:
            break
        level = max(eps_f, level / 2.0)

    best_res, best_x = incumbents[0]
    best_res, best_x = _polish(covers, best_x, eps_f, dual, best_res)
    _, f_cols = _residuals(covers, best_x[None, :], eps_f, dual)
    best_m = np.column_stack([np.full(d + 1, 1.0 / (d + 1)), f_cols[0]])
    if not np.isfinite(best_res) or best_res > eps_f:
        raise RootNotFound(best_res)
    tables = _extract_pick_tables(best_m, d)
    if tables is None:
        raise RootNotFound(best_res, "no positive-entry matching for some first pick")
    return StrongResult(_rationalize(best_x), tables, best_res, best_m)


def _polish(covers, x: np.ndarray, eps: float, dual: bool, res0: float):
    """Newton steps on the piecewise-linear balance map near the incumbent.

    The averaged map is affine within each arrangement piece, so a finite
    difference Jacobian converges in a handful of steps once the incumbent
    sits in the root's piece; steps that leave the simplex or worsen the
    residual are damped.
    """
    d1 = x.shape[0]
    basis = np.eye(d1)[:-1] - np.eye(d1)[1:]  # tangent directions of the simplex

    def g(p):
        _, f_cols = _residuals(covers, p[None, :], eps, dual)
        return f_cols[0].mean(axis=1) - 1.0 / d1

    best_x, best_res = x.copy(), res0
    cur = x.copy()
    for _ in range(16):
        h = max(1e-9, 1e-4 * eps)
        g0 = g(cur)
        jac = np.zeros((d1, len(basis)))
        for c, direction in enumerate(basis):
            shifted = cur + h * direction
            if (shifted < 0).any():
                shifted = np.clip(shifted, 0, None)
                shifted /= shifted.sum()
            jac[:, c] = (g(shifted) - g0) / h
        try:
            delta, *_ = np.linalg.lstsq(jac, -g0, rcond=None)
        except np.linalg.LinAlgError:
            break
        step = delta @ basis
        scale = 1.0
        improved = False
        for _ in range(8):
            cand = cur + scale * step
            if (cand >= 0).all():
                cand = cand / cand.sum()
                res = float(np.abs(g(cand)).max())
                if res < best_res:
                    best_x, best_res = cand, res
                    cur = cand
                    improved = True
                    break
            scale *= 0.5
        if not improved:
            break
        if best_res < 1e-14:
            break
    return best_res, best_x


def _extract_pick_tables(matrix: np.ndarray, d: int, thresh: float = 1e-12):
    """For each i, a bijection {1..d} -> {0..d} minus {i} on positive entries.

    The first column of the doubly stochastic matrix is constantly
    1/(d+1) > 0, so a permutation through (i, 0) always exists; a direct
    matching on the remaining rows and columns finds it.
    """
    tables = {}
    for i in range(d + 1):
        rows = [r for r in range(d + 1) if r != i]
        positive = np.zeros((d, d), dtype=bool)
        for a, r in enumerate(rows):
            for b in range(d):
                positive[a, b] = matrix[r, b + 1] > thresh
        perm = _perfect_matching(positive)
        if perm is None:
            return None
        table = {}
        for a, r in enumerate(rows):
            table[perm[a] + 1] = r  # cover j = perm[a]+1 receives index r
        tables[i] = table
    return tables


def _rationalize(x: np.ndarray, limit: int = 10**9) -> Point:
    """Exact simplex point near the float candidate."""
    anchor = int(np.argmax(x))
    out = [Fraction(v).limit_denominator(limit) for v in x]
    out[anchor] = Fraction(0)
    out[anchor] = 1 - sum(out)
    return tuple(out)
