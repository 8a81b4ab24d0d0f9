"""Malevich-square triads: side lengths, areas and SVG mosaics.

For a probability triple (p1, p2, p3) square s has area

    S(s) = 2 + 2 p_s**2 - 4 p_s - 2 p_{s+1} + 2 p_{s+1}**2 + 2 p_s p_{s+1}

with the cyclic convention p4 = p1, and side l(s) = sqrt(S(s)).  Squares 1, 2
and 3 are drawn red, black and white.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.special import entr

from .qudit_prob import QubitTriple, QuditProbabilityTable, density_to_table
from .statespace import DensityMatrix, StateError

COLORS = ("red", "black", "white")
RADICAND_SLACK = 1e-12


def radicand(a, b):
    """2 + 2a**2 - 4a - 2b + 2b**2 + 2ab; its minimum over [0, 1]**2 is 0 at (1, 0)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return 2 + 2 * a ** 2 - 4 * a - 2 * b + 2 * b ** 2 + 2 * a * b


def triad_areas(t: QubitTriple) -> Tuple[Tuple[float, float, float], float]:
    """((S1, S2, S3), S1 + S2 + S3)."""
    p = t.as_array()
    s = radicand(p, np.roll(p, -1))
    if np.any(s < -RADICAND_SLACK):
        raise StateError(f"negative radicand {s.min():.3e} for {tuple(p)}")
    s = np.maximum(s, 0.0)
    areas = tuple(float(v) for v in s)
    return areas, float(sum(areas))


def triad_sides(t: QubitTriple) -> Tuple[float, float, float]:
    areas, _ = triad_areas(t)
    return tuple(math.sqrt(a) for a in areas)


def triangle_defect(sides: Sequence[float]) -> float:
    """max_s l(s) - (sum of the other two); <= 0 for a (possibly degenerate) triangle."""
    a, b, c = sides
    return max(a - b - c, b - a - c, c - a - b)


def bloch_parameters(t: QubitTriple) -> Tuple[float, float, float]:
    """X(s) = 2 p_s - 1."""
    return tuple(float(2 * p - 1) for p in t)


@dataclass(frozen=True)
class MalevichTriad:
    source: QubitTriple
    label: str = ""
    sides: Tuple[float, float, float] = field(init=False)
    areas: Tuple[float, float, float] = field(init=False)
    roles: Tuple[str, str, str] = COLORS

    def __post_init__(self):
        areas, _ = triad_areas(self.source)
        object.__setattr__(self, "areas", areas)
        object.__setattr__(self, "sides", tuple(math.sqrt(a) for a in areas))

    @property
    def total(self) -> float:
        return float(sum(self.areas))

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "source": list(self.source),
            "sides": list(self.sides),
            "areas": list(self.areas),
            "roles": list(self.roles),
        }


@dataclass(frozen=True)
class TriadMosaic:
    triads: Tuple[MalevichTriad, ...]
    dim: int
    mode: str = "pairwise"

    def __len__(self):
        return len(self.triads)

    @property
    def total_area(self) -> float:
        return float(sum(t.total for t in self.triads))


def _pair_label(j, k):
    return f"({j},{k})"


def disjoint_order(n: int) -> List[Tuple[str, int, int]]:
    """Flat order of the N**2 - 1 probabilities in disjoint mode.

    Entries are (name, j, k) with name in {"p1", "p2", "p3"} (p3 uses k = j).
    First the diagonal-anchored triples (p1(j1), p2(j1), p3(jj)) for j = 2..N,
    then (p1, p2) of the remaining pairs j > k >= 2 in (j, k) order.
    """
    if (n * n - 1) % 3:
        raise StateError(f"N**2 - 1 = {n * n - 1} probabilities do not split into triples")
    order = []
    for j in range(2, n + 1):
        order += [("p1", j, 1), ("p2", j, 1), ("p3", j, j)]
    for j in range(3, n + 1):
        for k in range(2, j):
            order += [("p1", j, k), ("p2", j, k)]
    return order


def _lookup(table: QuditProbabilityTable, name: str, j: int, k: int) -> float:
    if name == "p3":
        return table.diag[j]
    return table.offdiag[(j, k)][0 if name == "p1" else 1]


def triads_from_table(table: QuditProbabilityTable, mode: str = "pairwise") -> TriadMosaic:
    if mode == "pairwise":
        triads = tuple(
            MalevichTriad(QubitTriple(p1, p2, table.diag[j]), _pair_label(j, k))
            for (j, k), (p1, p2) in table.offdiag.items()
        )
    elif mode == "disjoint":
        order = disjoint_order(table.dim)
        triads = []
        for i in range(0, len(order), 3):
            chunk = order[i:i + 3]
            triple = QubitTriple(*(_lookup(table, *c) for c in chunk))
            label = " ".join(f"{name}{_pair_label(j, k)}" for name, j, k in chunk)
            triads.append(MalevichTriad(triple, label))
        triads = tuple(triads)
    else:
        raise StateError(f"unknown mode {mode!r}")
    return TriadMosaic(triads, table.dim, mode)


def triads_from_density(rho: DensityMatrix, mode: str = "pairwise") -> TriadMosaic:
    """One triad per artificial qubit (pairwise) or the N**2 - 1 probabilities
    chunked into triples (disjoint)."""
    return triads_from_table(density_to_table(rho), mode)


def mosaic_to_table(m: TriadMosaic) -> QuditProbabilityTable:
    """Recover the probability table from the triples a mosaic retains."""
    n = m.dim
    off, diag = {}, {}
    if m.mode == "pairwise":
        pairs = [(j, k) for j in range(2, n + 1) for k in range(1, j)]
        if len(pairs) != len(m.triads):
            raise StateError("mosaic does not hold one triad per pair")
        for (j, k), tri in zip(pairs, m.triads):
            p1, p2, p3 = tri.source
            off[(j, k)] = (p1, p2)
            if diag.setdefault(j, p3) != p3:
                raise StateError(f"inconsistent p3 for j = {j}")
    else:
        order = disjoint_order(n)
        flat = [p for tri in m.triads for p in tri.source]
        if len(flat) != len(order):
            raise StateError("mosaic size does not match its dimension")
        parts = {}
        for (name, j, k), p in zip(order, flat):
            parts[(name, j, k)] = p
        for j in range(2, n + 1):
            diag[j] = parts[("p3", j, j)]
            for k in range(1, j):
                off[(j, k)] = (parts[("p1", j, k)], parts[("p2", j, k)])
    return QuditProbabilityTable(n, off, diag)


def area_entropy(m: TriadMosaic) -> float:
    """Shannon entropy of every square's area over the grand total."""
    areas = np.array([a for t in m.triads for a in t.areas])
    total = areas.sum()
    if not total > 0:
        raise StateError("mosaic has zero total area")
    return float(entr(areas / total).sum())


# Rendering.

DEFAULT_STYLE = {"unit_px": 100.0, "gap_px": 10.0, "background": "#ffffff", "outline_width": 1.0}
_FILL = {"red": "#d22b2b", "black": "#000000", "white": "#ffffff"}


def resolve_style(style: Optional[dict] = None) -> dict:
    style = dict(style or {})
    unknown = set(style) - set(DEFAULT_STYLE)
    if unknown:
        raise StateError(f"unknown style keys {sorted(unknown)}")
    out = dict(DEFAULT_STYLE)
    out.update(style)
    for key in ("unit_px", "gap_px", "outline_width"):
        out[key] = float(out[key])
        if out[key] < 0 or (key == "unit_px" and out[key] == 0):
            raise StateError(f"{key} must be positive")
    return out


def _fmt(v: float) -> str:
    return f"{v:.3f}".rstrip("0").rstrip(".")


def render_svg(m: TriadMosaic, style: Optional[dict] = None) -> str:
    """SVG with one row per triad; each row holds the red, black and white
    squares left to right, top-aligned, with side l(s) * unit_px."""
    st = resolve_style(style)
    unit, gap, ow = st["unit_px"], st["gap_px"], st["outline_width"]
    rows, y, width = [], gap, 0.0
    for tri in m.triads:
        x = gap
        for side, role in zip(tri.sides, tri.roles):
            px = side * unit
            attrs = f'x="{_fmt(x)}" y="{_fmt(y)}" width="{_fmt(px)}" height="{_fmt(px)}" fill="{_FILL[role]}"'
            if role == "white":
                attrs += f' stroke="#000000" stroke-width="{_fmt(ow)}"'
            rows.append(f"  <rect {attrs}/>")
            x += px + gap
        width = max(width, x)
        y += max(tri.sides) * unit + gap
    width = max(width, 2 * gap)
    head = (
        '<?xml version="1.0" encoding="UTF-8"?>\n'
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{_fmt(width)}" '
        f'height="{_fmt(y)}" viewBox="0 0 {_fmt(width)} {_fmt(y)}">\n'
        f'  <rect x="0" y="0" width="{_fmt(width)}" height="{_fmt(y)}" fill="{st["background"]}"/>\n'
    )
    return head + "\n".join(rows) + ("\n" if rows else "") + "</svg>\n"


def mosaic_metadata(m: TriadMosaic, style: Optional[dict] = None) -> dict:
    return {
        "dim": m.dim,
        "mode": m.mode,
        "triads": [t.to_json() for t in m.triads],
        "total_area": m.total_area,
        "area_entropy": area_entropy(m),
        "style": resolve_style(style),
    }
