"""File formats: necklaces, splittings, complexes, colorings, covers, agents.

Rationals travel as "p/q" strings; all parsers return exact values.
"""
from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

from .kkm.covers import Cell, Cover
from .necklace import Necklace, Splitting
from .rationals import format_frac, frac
from .simplicial import Complex, SpernerColoring


def load_necklace(path) -> Necklace:
    text = Path(path).read_text().strip()
    if text.startswith("{"):
        data = json.loads(text)
        return Necklace.from_beads(data["beads"])
    return Necklace.from_text(text)


def splitting_to_json(splitting: Splitting) -> dict:
    out = {
        "cuts": [format_frac(c) for c in splitting.cuts],
        "owners": list(splitting.owners),
    }
    if splitting.strings is not None:
        out["strings"] = {str(k): v for k, v in sorted(splitting.strings.items())}
    return out


def splitting_from_json(data: dict) -> Splitting:
    strings = None
    if "strings" in data and data["strings"] is not None:
        strings = {int(k): v for k, v in data["strings"].items()}
    return Splitting(tuple(frac(c) for c in data["cuts"]),
                     tuple(int(o) for o in data["owners"]), strings)


def load_splitting(path) -> Splitting:
    return splitting_from_json(json.loads(Path(path).read_text()))


def complex_to_json(complex: Complex) -> dict:
    out = {"dim": complex.dim, "facets": [list(f) for f in complex.facets]}
    if complex.coords is not None:
        out["coords"] = {str(v): [format_frac(c) for c in p]
                         for v, p in sorted(complex.coords.items())}
    return out


def complex_from_json(data: dict) -> Complex:
    coords = None
    if data.get("coords"):
        coords = {int(v): tuple(frac(c) for c in p) for v, p in data["coords"].items()}
    return Complex.from_facets(data["facets"], coords)


def load_complex(path) -> Complex:
    return complex_from_json(json.loads(Path(path).read_text()))


def coloring_from_json(data: dict) -> SpernerColoring:
    return SpernerColoring({int(v): int(c) for v, c in data["colors"].items()})


def load_coloring(path) -> SpernerColoring:
    return coloring_from_json(json.loads(Path(path).read_text()))


def covers_to_json(covers: dict[int, Cover]) -> dict:
    """Multiple covers sharing one partition: cell members keyed by cover."""
    any_cover = next(iter(covers.values()))
    cells = []
    base = any_cover.cells or []
    for idx, cell in enumerate(base):
        members = {}
        for j, cover in covers.items():
            members[str(j)] = sorted(cover.cells[idx].labels)
        cells.append({
            "simplex": [[format_frac(c) for c in p] for p in cell.verts],
            "members": members,
        })
    return {"d": any_cover.d, "dual": any_cover.dual, "cells": cells}


def covers_from_json(data: dict) -> dict[int, Cover]:
    d = int(data["d"])
    dual = bool(data.get("dual", False))
    per_cover: dict[int, list[Cell]] = {}
    for cell in data["cells"]:
        verts = tuple(tuple(frac(c) for c in p) for p in cell["simplex"])
        for j, labels in cell["members"].items():
            per_cover.setdefault(int(j), []).append(Cell(verts, frozenset(labels)))
    return {j: Cover(d, tuple(range(d + 1)), dual=dual, cells=cells)
            for j, cells in sorted(per_cover.items())}


def load_covers(path) -> dict[int, Cover]:
    return covers_from_json(json.loads(Path(path).read_text()))


def division_to_list(lengths) -> list[str]:
    return [format_frac(c) for c in lengths]


def division_from_list(values) -> tuple[Fraction, ...]:
    return tuple(frac(v) for v in values)
