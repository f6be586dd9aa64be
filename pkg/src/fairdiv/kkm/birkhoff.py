"""Birkhoff decomposition of doubly stochastic matrices."""
from __future__ import annotations

from typing import Sequence

import numpy as np


class NotDoublyStochastic(Exception):
    pass


class MatchingFailed(Exception):
    """No perfect matching on the positive entries; on genuinely doubly
    stochastic input this cannot happen, so it signals tolerance misuse."""


def _perfect_matching(positive: np.ndarray) -> list[int] | None:
    """Row -> column matching covering all rows, by augmenting paths."""
    n = positive.shape[0]
    match_col = [-1] * n  # column -> row

    def augment(row: int, seen: list[bool]) -> bool:
        for col in range(n):
            if positive[row, col] and not seen[col]:
                seen[col] = True
                if match_col[col] < 0 or augment(match_col[col], seen):
                    match_col[col] = row
                    return True
        return False

    for row in range(n):
        if not augment(row, [False] * n):
            return None
    perm = [0] * n
    for col, row in enumerate(match_col):
        perm[row] = col
    return perm


def birkhoff(matrix: Sequence[Sequence[float]], tol: float = 1e-9) -> list[tuple[float, tuple[int, ...]]]:
    """Decompose a doubly stochastic matrix into weighted permutations.

    Entries below tol are treated as absent edges.  Weights are positive and
    sum to one within tol; at most (n-1)^2 + 1 terms are produced because
    every extraction zeroes at least one surviving entry.
    """
    m = np.array(matrix, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise NotDoublyStochastic(f"matrix shape {m.shape} is not square")
    n = m.shape[0]
    if (m < -tol).any():
        raise NotDoublyStochastic("negative entries")
    if np.abs(m.sum(axis=0) - 1).max() > n * tol or np.abs(m.sum(axis=1) - 1).max() > n * tol:
        raise NotDoublyStochastic("row or column sums differ from one")

    residual = m.copy()
    terms: list[tuple[float, tuple[int, ...]]] = []
    max_terms = (n - 1) ** 2 + 1
    while residual.max() > tol:
        if len(terms) >= max_terms:
            raise MatchingFailed("term budget exhausted; entries resist zeroing at this tol")
        perm = _perfect_matching(residual > tol)
        if perm is None:
            raise MatchingFailed("no perfect matching on entries above tol")
        weight = float(min(residual[i, perm[i]] for i in range(n)))
        terms.append((weight, tuple(perm)))
        for i in range(n):
            residual[i, perm[i]] -= weight
    return terms


def reconstruct(terms: Sequence[tuple[float, Sequence[int]]], n: int) -> np.ndarray:
    out = np.zeros((n, n))
    for weight, perm in terms:
        for i, j in enumerate(perm):
            out[i, j] += weight
    return out
