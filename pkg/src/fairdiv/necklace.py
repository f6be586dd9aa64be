"""Necklace splitting with adjacency constraints.

A necklace is a bead sequence with types 1..q; bead m occupies the interval
[(m-1)/N, m/N] of [0,1].  A splitting is a sorted list of rational cuts plus
one owner per resulting piece; repeated cuts produce empty pieces, and two
pieces separated by an empty piece are not adjacent.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil, log2
from typing import Iterable, Optional, Sequence


class MalformedSplitting(Exception):
    pass


class NotTwoColor(Exception):
    pass


class NotDivisible(Exception):
    pass


class NotFair(Exception):
    pass


class BudgetExceeded(Exception):
    pass


class BeadOnHyperplane(Exception):
    pass


@dataclass(frozen=True)
class Necklace:
    beads: tuple[int, ...]

    @staticmethod
    def from_beads(beads: Iterable[int]) -> "Necklace":
        beads = tuple(int(b) for b in beads)
        if not beads or min(beads) < 1:
            raise ValueError("bead types must be positive integers")
        return Necklace(beads)

    @staticmethod
    def from_text(text: str) -> "Necklace":
        """Symbols map to type ids in order of first appearance."""
        mapping: dict[str, int] = {}
        beads = []
        for ch in text.strip():
            if ch.isspace():
                continue
            if ch not in mapping:
                mapping[ch] = len(mapping) + 1
            beads.append(mapping[ch])
        return Necklace.from_beads(beads)

    @property
    def n(self) -> int:
        return len(self.beads)

    @property
    def q(self) -> int:
        return max(self.beads)

    def counts(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for b in self.beads:
            out[b] = out.get(b, 0) + 1
        return out

    def divisible_by(self, k: int) -> bool:
        return all(c % k == 0 for c in self.counts().values())


@dataclass(frozen=True)
class Splitting:
    cuts: tuple[Fraction, ...]
    owners: tuple[int, ...]
    strings: Optional[dict[int, str]] = None

    def __post_init__(self):
        if list(self.cuts) != sorted(self.cuts):
            raise MalformedSplitting("cuts must be sorted")
        if any(c < 0 or c > 1 for c in self.cuts):
            raise MalformedSplitting("cuts must lie in [0, 1]")
        if len(self.owners) != len(self.cuts) + 1:
            raise MalformedSplitting(
                f"{len(self.cuts)} cuts need {len(self.cuts) + 1} owners, got {len(self.owners)}")

    @property
    def size(self) -> int:
        return len(self.cuts)

    def pieces(self) -> list[tuple[Fraction, Fraction, int]]:
        bounds = [Fraction(0), *self.cuts, Fraction(1)]
        return [(bounds[i], bounds[i + 1], self.owners[i]) for i in range(len(self.owners))]

    def adjacency_pairs(self) -> set[tuple[int, int]]:
        """Unordered owner pairs of consecutive nonempty pieces; an empty
        piece in between makes its neighbours nonadjacent."""
        pairs = set()
        prev_owner = None
        for a, b, o in self.pieces():
            if a == b:
                prev_owner = None
                continue
            if prev_owner is not None and prev_owner != o:
                pairs.add((min(prev_owner, o), max(prev_owner, o)))
            prev_owner = o
        return pairs


@dataclass(frozen=True)
class ConstraintGraph:
    """Adjacency constraint on thieves: free, the 4-cycle, a hypercube
    (binary strings differing in one bit), or an explicit edge set."""

    kind: str  # "free" | "cycle4" | "binary" | "explicit"
    t: int = 0
    edges: frozenset = frozenset()
    _memo: dict = field(default_factory=dict, compare=False, repr=False)

    @staticmethod
    def free() -> "ConstraintGraph":
        return ConstraintGraph("free")

    @staticmethod
    def cycle4() -> "ConstraintGraph":
        return ConstraintGraph("cycle4")

    @staticmethod
    def binary(t: int) -> "ConstraintGraph":
        return ConstraintGraph("binary", t=t)

    @staticmethod
    def explicit(edges: Iterable[tuple[int, int]]) -> "ConstraintGraph":
        return ConstraintGraph("explicit", edges=frozenset(
            (min(a, b), max(a, b)) for a, b in edges))

    @staticmethod
    def parse(text: str, k: int = 0) -> "ConstraintGraph":
        if text == "free":
            return ConstraintGraph.free()
        if text in ("cycle4", "cyclic"):
            return ConstraintGraph.cycle4()
        if text == "binary":
            return ConstraintGraph.binary(max(1, ceil(log2(max(k, 2)))))
        if text.startswith("binary:"):
            return ConstraintGraph.binary(int(text.split(":")[1]))
        raise ValueError(f"unknown constraint {text!r}")

    def pair_allowed(self, a: int, b: int) -> bool:
        if a == b or self.kind in ("free", "binary"):
            return True
        if self.kind == "cycle4":
            return abs(a - b) in (1, 3)
        return (min(a, b), max(a, b)) in self.edges

    def accepts(self, pairs: set[tuple[int, int]]) -> bool:
        if self.kind == "binary":
            return self._embeddable(frozenset(pairs))
        return all(self.pair_allowed(a, b) for a, b in pairs)

    def _embeddable(self, pairs: frozenset) -> bool:
        """Can the thieves seen in `pairs` be injectively placed on distinct
        length-t bit strings with every pair at Hamming distance one?"""
        if pairs in self._memo:
            return self._memo[pairs]
        thieves = sorted({v for p in pairs for v in p})
        codes = list(range(1 << self.t))
        adj = {v: {w for p in pairs for w in p if v in p and w != v} for v in thieves}
        order = sorted(thieves, key=lambda v: -len(adj[v]))

        def place(i: int, assigned: dict[int, int]) -> bool:
            if i == len(order):
                return True
            v = order[i]
            for code in codes:
                if code in assigned.values():
                    continue
                ok = all(bin(code ^ assigned[w]).count("1") == 1
                         for w in adj[v] if w in assigned)
                if ok:
                    assigned[v] = code
                    if place(i + 1, assigned):
                        return True
                    del assigned[v]
            return False

        result = len(thieves) <= len(codes) and place(0, {})
        self._memo[pairs] = result
        return result


@dataclass(frozen=True)
class VerifyReport:
    fair: bool
    size: int
    constraint_ok: bool
    tallies: dict[int, dict[int, Fraction]]  # thief -> type -> beads' worth of measure

    @property
    def ok(self) -> bool:
        return self.fair and self.constraint_ok


def _piece_measure(necklace: Necklace, a: Fraction, b: Fraction) -> dict[int, Fraction]:
    """Measure of each type inside [a, b], in units of whole beads."""
    n = necklace.n
    out = {t: Fraction(0) for t in range(1, necklace.q + 1)}
    lo = max(0, int(a * n) - 1)
    for m in range(lo, n):
        left = Fraction(m, n)
        right = Fraction(m + 1, n)
        if left >= b:
            break
        overlap = min(b, right) - max(a, left)
        if overlap > 0:
            out[necklace.beads[m]] += overlap * n
    return out


def tallies(necklace: Necklace, splitting: Splitting, k: int) -> dict[int, dict[int, Fraction]]:
    out = {thief: {t: Fraction(0) for t in range(1, necklace.q + 1)} for thief in range(1, k + 1)}
    for a, b, owner in splitting.pieces():
        if owner not in out:
            raise MalformedSplitting(f"owner {owner} outside 1..{k}")
        if a == b:
            continue
        for t, amount in _piece_measure(necklace, a, b).items():
            out[owner][t] += amount
    return out


def verify(necklace: Necklace, k: int, splitting: Splitting,
           graph: ConstraintGraph = ConstraintGraph.free()) -> VerifyReport:
    """Exact rational per-thief tally plus adjacency-constraint evaluation."""
    tally = tallies(necklace, splitting, k)
    counts = necklace.counts()
    fair = all(tally[thief][t] == Fraction(counts.get(t, 0), k)
               for thief in tally for t in tally[thief])
    constraint_ok = graph.accepts(splitting.adjacency_pairs())
    return VerifyReport(fair, splitting.size, constraint_ok, tally)


# ---------------------------------------------------------------------------
# Balanced subnecklaces (sliding window over the rescaled necklace)
# ---------------------------------------------------------------------------

Segment = tuple[int, Fraction]  # (type, length)


def _segments(necklace: Necklace, total: Fraction) -> list[Segment]:
    unit = total / necklace.n
    segs: list[Segment] = []
    for b in necklace.beads:
        if segs and segs[-1][0] == b:
            segs[-1] = (b, segs[-1][1] + unit)
        else:
            segs.append((b, unit))
    return segs


def _slice(segments: Sequence[Segment], a: Fraction, b: Fraction) -> list[Segment]:
    out: list[Segment] = []
    pos = Fraction(0)
    for t, length in segments:
        lo, hi = pos, pos + length
        pos = hi
        ov = min(b, hi) - max(a, lo)
        if ov > 0:
            if out and out[-1][0] == t:
                out[-1] = (t, out[-1][1] + ov)
            else:
                out.append((t, ov))
    return out


def _measure_of(segments: Sequence[Segment], typ: int, a: Fraction, b: Fraction) -> Fraction:
    total = Fraction(0)
    pos = Fraction(0)
    for t, length in segments:
        lo, hi = pos, pos + length
        pos = hi
        if t == typ:
            ov = min(b, hi) - max(a, lo)
            if ov > 0:
                total += ov
    return total


def _balanced_window(segments: Sequence[Segment], k: int, b: int) -> tuple[Fraction, int]:
    """Start and length of a balanced window of length b or k-b.

    Uses the b-fold concatenation trick: tile the concatenation with k
    windows of length b; a sign change of the white surplus between adjacent
    windows pins an exact rational root of the piecewise-linear surplus.
    """
    types = sorted({t for t, _ in segments})
    if len(types) == 1:
        return Fraction(0), b
    if len(types) != 2:
        raise NotTwoColor(f"balanced-window search needs at most 2 types, got {types}")
    white = types[0]
    concat = list(segments) * b
    total_white = _measure_of(segments, white, Fraction(0), Fraction(k))
    target = Fraction(b, k) * total_white

    def surplus(t: Fraction) -> Fraction:
        return _measure_of(concat, white, t, t + b) - target

    anchors = [Fraction(j * b) for j in range(k + 1)]
    values = [surplus(t) for t in anchors]
    root: Optional[Fraction] = None
    for j in range(k):
        if values[j] == 0:
            root = anchors[j]
            break
        if j + 1 <= k and values[j] * values[j + 1] < 0:
            root = _pl_root(concat, white, target, anchors[j], anchors[j + 1], b)
            break
    if root is None and values[k] == 0:
        root = anchors[k]
    if root is None:
        raise NotFair("no balanced window; type counts are not divisible")
    m = int(root // k)
    s = root - m * k
    if s + b <= k:
        return s, b
    return s + b - k, k - b


def _pl_root(concat, white, target, lo: Fraction, hi: Fraction, b: int) -> Fraction:
    """Exact root of the piecewise-linear window surplus on [lo, hi]."""
    breaks = {lo, hi}
    pos = Fraction(0)
    for _, length in concat:
        for anchor in (pos, pos - b):
            if lo < anchor < hi:
                breaks.add(anchor)
        pos += length
        for anchor in (pos, pos - b):
            if lo < anchor < hi:
                breaks.add(anchor)
    xs = sorted(breaks)
    vals = [_measure_of(concat, white, x, x + b) - target for x in xs]
    for i in range(len(xs) - 1):
        v0, v1 = vals[i], vals[i + 1]
        if v0 == 0:
            return xs[i]
        if v0 * v1 < 0:
            return xs[i] + (xs[i + 1] - xs[i]) * (-v0) / (v1 - v0)
    if vals[-1] == 0:
        return xs[-1]
    raise NotFair("sign change lost inside window interval")


def find_balanced_subnecklace(necklace: Necklace, k: int, b: int) -> tuple[Fraction, int]:
    """Balanced subnecklace [t, t+w] of the length-k rescaled necklace with
    w equal to b or k-b; exact rational start position."""
    if not 1 <= b <= k - 1:
        raise ValueError(f"b must be in 1..{k - 1}")
    if not necklace.divisible_by(k):
        raise NotDivisible(f"type counts not divisible by {k}")
    return _balanced_window(_segments(necklace, Fraction(k)), k, b)


# ---------------------------------------------------------------------------
# Constructive binary splitting for two colors
# ---------------------------------------------------------------------------

@dataclass
class _GroupSplit:
    pieces: list[tuple[int, Fraction]]  # (owner, length), owners local 1..g
    strings: dict[int, str]
    anchor: int  # owner of the first and last piece


def _pad(s: str, width: int) -> str:
    return "0" * (width - len(s)) + s


def _xor(a: str, b: str) -> str:
    return "".join("1" if x != y else "0" for x, y in zip(a, b))


def _split_group(segments: list[Segment], g: int) -> _GroupSplit:
    """Binary splitting of a balanced measure necklace of length g among g
    thieves: at most 2(g-1) cuts, first and last piece to the same thief,
    adjacent pieces at Hamming distance one.

    The recursion cuts out a balanced window for one half of the thieves,
    splits the glued-together remainder for the other half, and relabels the
    second group by a constant XOR so the single crossing adjacency lands on
    strings differing in the leading bit.
    """
    total = sum(length for _, length in segments)
    if g == 1:
        return _GroupSplit([(1, total)], {1: ""}, 1)

    b = g // 2
    s, w = _balanced_window(segments, g, b)
    inside = _slice(segments, s, s + w)
    outside = _slice(segments, Fraction(0), s) + _slice(segments, s + w, total)

    ts = _split_group(inside, w)
    us = _split_group(outside, g - w)

    offset = w  # u-thief j becomes global w + j
    left: list[tuple[int, Fraction]] = []
    right: list[tuple[int, Fraction]] = []
    pos = Fraction(0)
    for owner, length in us.pieces:
        lo, hi = pos, pos + length
        pos = hi
        if hi <= s:
            left.append((owner + offset, length))
        elif lo >= s:
            right.append((owner + offset, length))
        else:
            left.append((owner + offset, s - lo))
            right.append((owner + offset, hi - s))

    pieces = left + list(ts.pieces) + right
    anchor_u = us.anchor + offset

    if not left:
        pieces.insert(0, (anchor_u, Fraction(0)))
        left = [pieces[0]]
    if not right:
        pieces.append((anchor_u, Fraction(0)))
        right = [pieces[-1]]

    # Cross adjacencies between the groups; empty pieces shield their ends.
    cross_u: list[int] = []
    if left[-1][1] > 0 and ts.pieces[0][1] > 0:
        cross_u.append(left[-1][0])
    if right[0][1] > 0 and ts.pieces[-1][1] > 0:
        cross_u.append(right[0][0])
    if len(set(cross_u)) > 1:
        # A spare cut exists exactly in this configuration: spend it on an
        # empty piece at the window's left end, shielding that adjacency.
        pieces = left + [(right[0][0], Fraction(0))] + list(ts.pieces) + right
        cross_u = [right[0][0]]

    assert len(pieces) - 1 <= 2 * (g - 1), "cut budget exceeded"

    width = max(0, (g - 1).bit_length() - 1)
    t_anchor = ts.anchor
    u_cross_local = (cross_u[0] - offset) if cross_u else us.anchor
    key = _xor(_pad(ts.strings[t_anchor], width), _pad(us.strings[u_cross_local], width))
    strings = {i: "0" + _pad(ts.strings[i], width) for i in ts.strings}
    for j, code in us.strings.items():
        strings[j + offset] = "1" + _xor(_pad(code, width), key)

    return _GroupSplit(pieces, strings, anchor_u)


def solve_binary_two_color(necklace: Necklace, k: int) -> Splitting:
    """Fair binary splitting of a two-color necklace with at most 2(k-1)
    cuts; the first and last pieces share an owner and the hypercube strings
    are returned alongside the cuts."""
    if len(set(necklace.beads)) > 2:
        raise NotTwoColor(f"necklace has {len(set(necklace.beads))} bead types")
    if not necklace.divisible_by(k):
        raise NotDivisible(f"type counts not divisible by {k}")
    if k == 1:
        return Splitting((), (1,), {1: ""})
    result = _split_group(_segments(necklace, Fraction(k)), k)
    cuts = []
    pos = Fraction(0)
    for _, length in result.pieces[:-1]:
        pos += length
        cuts.append(pos / k)
    owners = tuple(owner for owner, _ in result.pieces)
    measure_splitting = Splitting(tuple(cuts), owners, dict(result.strings))
    return adjust_cuts(necklace, measure_splitting)


# ---------------------------------------------------------------------------
# Cut adjustment: move measure-fair cuts onto bead boundaries
# ---------------------------------------------------------------------------

def adjust_cuts(necklace: Necklace, splitting: Splitting) -> Splitting:
    """Move cuts off bead interiors while preserving exact fairness, the
    number of cuts, and the owner order.

    Coincident cuts move as one block; every round directs a cycle in the
    multigraph whose edges join the owners on either side of each block
    through a bead of the working color, then slides the cycle's blocks at
    equal speed until a block reaches a bead boundary or two cuts meet.  The
    potential (nonzero pieces) + (cuts inside beads) drops every round.
    """
    n = necklace.n
    if all((c * n) % 1 == 0 for c in splitting.cuts):
        return splitting
    k = max(splitting.owners)
    counts = necklace.counts()
    if any(c % k for c in counts.values()):
        raise NotFair(f"type counts {counts} not divisible by {k} thieves")
    tally = tallies(necklace, splitting, k)
    for thief in range(1, k + 1):
        for t, c in counts.items():
            if tally[thief][t] != Fraction(c, k):
                raise NotFair(f"thief {thief} holds {tally[thief][t]} of type {t}, "
                              f"needs {Fraction(c, k)}")

    cuts = list(splitting.cuts)
    owners = splitting.owners
    max_rounds = 4 * (len(cuts) + 1) * (n + 1) + 16

    for _ in range(max_rounds):
        inside = [j for j, c in enumerate(cuts) if (c * n) % 1 != 0]
        if not inside:
            break
        first = cuts[inside[0]]
        color = necklace.beads[int(first * n)]

        blocks = _blocks_through_color(necklace, cuts, owners, color)
        cycle = _find_cycle(blocks)
        if cycle is None:
            raise NotFair("no adjustment cycle; tallies are not integral")
        _slide_blocks(necklace, cuts, cycle)
    else:
        raise NotFair("cut adjustment failed to terminate")

    return Splitting(tuple(cuts), owners, splitting.strings)


def _blocks_through_color(necklace, cuts, owners, color):
    """Maximal blocks of coincident cuts strictly inside beads of `color`;
    each block records its boundary owners (never empty pieces, by
    maximality of the block)."""
    n = necklace.n
    blocks = []
    j = 0
    while j < len(cuts):
        j2 = j
        while j2 + 1 < len(cuts) and cuts[j2 + 1] == cuts[j]:
            j2 += 1
        p = cuts[j]
        if (p * n) % 1 != 0 and necklace.beads[int(p * n)] == color:
            blocks.append({
                "indices": list(range(j, j2 + 1)),
                "pos": p,
                "left": owners[j],
                "right": owners[j2 + 1],
            })
        j = j2 + 1
    return blocks


def _find_cycle(blocks):
    """A directed cycle of block moves keeping every owner's total constant.

    Self-loops qualify immediately; otherwise walk the multigraph (no vertex
    has degree one on fair input) until a vertex repeats.
    """
    for b in blocks:
        if b["left"] == b["right"]:
            return [(b, +1)]
    adj: dict[int, list[tuple[int, int]]] = {}
    for idx, b in enumerate(blocks):
        adj.setdefault(b["left"], []).append((b["right"], idx))
        adj.setdefault(b["right"], []).append((b["left"], idx))
    for v in adj.values():
        v.sort()
    for start in sorted(adj):
        if not adj[start]:
            continue
        path: list[tuple[int, Optional[int]]] = [(start, None)]
        on_path = {start: 0}
        while True:
            v, via = path[-1]
            nxt = None
            for w, idx in adj[v]:
                if idx != via:
                    nxt = (w, idx)
                    break
            if nxt is None:
                break
            w, idx = nxt
            if w in on_path:
                cycle = []
                tail = path[on_path[w]:]
                verts = [p[0] for p in tail] + [w]
                edge_ids = [p[1] for p in tail[1:]] + [idx]
                for (a, bvert), eid in zip(itertools.pairwise(verts), edge_ids):
                    blk = blocks[eid]
                    # move so that bvert's side grows
                    direction = -1 if blk["right"] == bvert else +1
                    cycle.append((blk, direction))
                return cycle
            on_path[w] = len(path)
            path.append((w, idx))
    return None


def _slide_blocks(necklace, cuts, cycle):
    """Slide the cycle's blocks simultaneously until the first event."""
    n = necklace.n
    moving = {}
    for blk, direction in cycle:
        moving[id(blk)] = (blk, direction)
    positions = sorted(set(cuts))

    delta = None
    for blk, direction in moving.values():
        p = blk["pos"]
        bead = int(p * n)
        boundary = Fraction(bead + 1, n) - p if direction > 0 else p - Fraction(bead, n)
        delta = boundary if delta is None else min(delta, boundary)
        idx = positions.index(p)
        neighbor = idx + direction
        if 0 <= neighbor < len(positions):
            gap = abs(positions[neighbor] - p)
            other = next((m for m in moving.values() if m[0]["pos"] == positions[neighbor]), None)
            if other is None:
                delta = min(delta, gap)
            elif other[1] != direction:
                delta = min(delta, gap / 2)
        else:
            edge = Fraction(1) - p if direction > 0 else p
            delta = min(delta, edge)
    assert delta is not None and delta > 0
    for blk, direction in moving.values():
        new_pos = blk["pos"] + direction * delta
        for j in blk["indices"]:
            cuts[j] = new_pos


# ---------------------------------------------------------------------------
# Exhaustive search over whole-bead splittings
# ---------------------------------------------------------------------------

def solve_exhaustive(necklace: Necklace, k: int, max_cuts: int,
                     graph: ConstraintGraph = ConstraintGraph.free(),
                     owner_order: Optional[Sequence[int]] = None,
                     budget: int = 20_000_000) -> Optional[Splitting]:
    """Fair constraint-satisfying splitting of size <= max_cuts with cuts at
    bead boundaries, or None proved by exhaustion.

    Cut positions may repeat (empty pieces remove adjacencies).  Without a
    pinned owner order, thief labels are canonicalized: first-seen order for
    free and binary constraints, the dihedral fundamental domain for the
    4-cycle.
    """
    n = necklace.n
    counts = necklace.counts()
    if any(c % k for c in counts.values()):
        return None
    caps = {t: c // k for t, c in counts.items()}
    if owner_order is not None and len(owner_order) != max_cuts + 1:
        raise ValueError("pinned owner order must have max_cuts + 1 entries")

    prefix = [{t: 0 for t in caps} for _ in range(n + 1)]
    for m, b in enumerate(necklace.beads):
        prefix[m + 1] = dict(prefix[m])
        prefix[m + 1][b] += 1

    nodes = 0
    found: Optional[tuple[list[int], list[int]]] = None

    # New-owner introduction order under the 4-cycle's dihedral symmetry:
    # vertex 1 is canonical first, the 2<->4 reflection fixes {1,3}.
    cycle4_new = {
        frozenset(): {1},
        frozenset({1}): {2, 3},
        frozenset({1, 2}): {3, 4},
        frozenset({1, 3}): {2},
        frozenset({1, 2, 3}): {4},
        frozenset({1, 2, 4}): {3},
    }

    def owner_candidates(piece_idx, seen):
        if owner_order is not None:
            return [owner_order[piece_idx]]
        if graph.kind == "cycle4":
            return sorted(set(seen) | cycle4_new.get(seen, set()))
        return [o for o in range(1, k + 1) if o in seen or o == len(seen) + 1]

    def rec(pos, piece_idx, cuts_used, tally, last_owner, pairs, seen, pieces):
        nonlocal nodes, found
        if found is not None:
            return
        nodes += 1
        if nodes > budget:
            raise BudgetExceeded(f"search exceeded {budget} nodes")
        remaining_pieces = (max_cuts + 1) - piece_idx
        if k - len(seen) > remaining_pieces:
            return
        for owner in owner_candidates(piece_idx, seen):
            room = {t: caps[t] - tally.get((owner, t), 0) for t in caps}
            max_end = pos
            while max_end < n:
                t = necklace.beads[max_end]
                if room[t] <= 0:
                    break
                room[t] -= 1
                max_end += 1
            is_last_possible = piece_idx == max_cuts
            ends = [n] if is_last_possible else range(pos, max_end + 1)
            if is_last_possible and max_end < n:
                ends = []
            for end in ends:
                new_pairs = pairs
                new_last = last_owner
                if end > pos:
                    if last_owner is not None and last_owner != owner:
                        pair = (min(last_owner, owner), max(last_owner, owner))
                        if graph.kind != "binary" and not graph.pair_allowed(*pair):
                            continue
                        if pair not in pairs:
                            new_pairs = pairs | {pair}
                            if graph.kind == "binary" and not graph.accepts(new_pairs):
                                continue
                    new_last = owner
                new_tally = dict(tally)
                for t in caps:
                    gained = prefix[end][t] - prefix[pos][t]
                    if gained:
                        new_tally[(owner, t)] = new_tally.get((owner, t), 0) + gained
                new_seen = seen | {owner} if owner not in seen else seen
                new_pieces = pieces + [(owner, end)]
                if end == n:
                    closing = list(new_pieces)
                    if owner_order is not None:
                        # pinned orders keep their piece count via empty tails
                        while len(closing) < max_cuts + 1:
                            closing.append((owner_order[len(closing)], n))
                    if all(new_tally.get((o, t), 0) == caps[t]
                           for o in range(1, k + 1) for t in caps) and graph.accepts(new_pairs):
                        found = ([p for _, p in closing[:-1]], [o for o, _ in closing])
                        return
                    continue
                rec(end, piece_idx + 1, cuts_used + 1, new_tally, new_last,
                    new_pairs, new_seen, new_pieces)
                if found is not None:
                    return

    rec(0, 0, 0, {}, None, frozenset(), frozenset(), [])
    if found is None:
        return None
    cut_positions, owners = found
    cuts = tuple(Fraction(p, n) for p in cut_positions)
    return Splitting(cuts, tuple(owners))


def solve_cyclic_k4(necklace: Necklace, budget: int = 50_000_000) -> Splitting:
    """Cyclic 4-splitting of size at most 3q via exhaustive search; existence
    is guaranteed, so exhaustion without a hit signals a bug."""
    k = 4
    if not necklace.divisible_by(k):
        raise NotDivisible("type counts not divisible by 4")
    q = len({b for b in necklace.beads})
    result = solve_exhaustive(necklace, k, 3 * q, ConstraintGraph.cycle4(), budget=budget)
    if result is None:
        raise RuntimeError("no cyclic splitting found; this contradicts the existence theorem")
    return result


# ---------------------------------------------------------------------------
# Moment-curve device: two hyperplanes -> cyclic splitting
# ---------------------------------------------------------------------------

Hyperplane = tuple[Sequence[Fraction], Fraction]  # (coefficients a_1..a_d, offset)

_ORTHANT_OWNER = {(1, 1): 1, (-1, 1): 2, (-1, -1): 3, (1, -1): 4}


def moment_curve_cuts(h1: Hyperplane, h2: Hyperplane, necklace: Necklace, d: int) -> Splitting:
    """Convert two hyperplanes into a splitting of the necklace placed along
    the moment curve (bead n at (n, n^2, ..., n^d)).

    Pieces are maximal runs of beads with a common sign pattern; when both
    signs flip between consecutive beads the two cuts coincide and the
    zero-length middle piece keeps the cyclic order intact.
    """
    n = necklace.n

    def side(h: Hyperplane, m: int) -> int:
        coeffs, offset = h
        if len(coeffs) != d:
            raise ValueError(f"hyperplane needs {d} coefficients")
        value = sum(Fraction(c) * m ** (j + 1) for j, c in enumerate(coeffs)) - Fraction(offset)
        if value == 0:
            raise BeadOnHyperplane(f"bead {m} lies on a hyperplane")
        return 1 if value > 0 else -1

    signs = [(side(h1, m), side(h2, m)) for m in range(1, n + 1)]
    cuts: list[Fraction] = []
    owners: list[int] = [_ORTHANT_OWNER[signs[0]]]
    for m in range(1, n):
        prev, cur = signs[m - 1], signs[m]
        if prev == cur:
            continue
        position = Fraction(m, n)
        if prev[0] != cur[0] and prev[1] != cur[1]:
            cuts.extend([position, position])
            owners.append(_ORTHANT_OWNER[(cur[0], prev[1])])  # flip h1 first
            owners.append(_ORTHANT_OWNER[cur])
        else:
            cuts.append(position)
            owners.append(_ORTHANT_OWNER[cur])
    return Splitting(tuple(cuts), tuple(owners))
