"""Bowtie lattice geometry, register initialization and the offset potential.

Lengths are in units of ``a = lambda / 2``.  The underlying hexagonal
(triangular) site lattice has spacing ``lambda / sqrt(3) = 2 / sqrt(3) a``.

Generator convention for ``build_bowtie``: a cell is two triangles sharing a
centre site ``c``,

    left  = {c, c - e1, c - e1 + e2}
    right = {c, c + e1, c + e1 - e2}

with lattice vectors ``e1 = (d, 0)`` and ``e2 = (d/2, d*sqrt(3)/2)``.  Cell
``(r, q)`` is centred at ``2 q e1 + 2 r (e2 - e1)``, so horizontally adjacent
cells share the outer vertex of their facing triangles and vertically adjacent
cells share the apex vertex.  This is a documented convention, not a
reproduction of any particular drawing; ``custom_graph`` builds arbitrary
interaction graphs.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from bowtie_mbqc.errors import ConfigurationError

SITE_SPACING = 2.0 / math.sqrt(3.0)
BEAM_WAIST = 2.8


@dataclass(frozen=True)
class LatticeGraph:
    """Interaction graph: one CCZ per triangle, one CZ per link."""

    sites: tuple[tuple[int, float, float], ...]
    triangles: tuple[tuple[int, int, int], ...] = ()
    links: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        labels = [s[0] for s in self.sites]
        if len(set(labels)) != len(labels):
            raise ConfigurationError("duplicate site labels")
        known = set(labels)
        tris = []
        for t in self.triangles:
            t = tuple(sorted(int(v) for v in t))
            if len(set(t)) != 3:
                raise ConfigurationError(f"triangle {t} needs three distinct sites")
            if not set(t) <= known:
                raise ConfigurationError(f"triangle {t} references unknown sites {sorted(set(t) - known)}")
            tris.append(t)
        if len(set(tris)) != len(tris):
            raise ConfigurationError("duplicate triangle")
        inside = {p for t in tris for p in ((t[0], t[1]), (t[0], t[2]), (t[1], t[2]))}
        links = []
        for ln in self.links:
            ln = tuple(sorted(int(v) for v in ln))
            if len(set(ln)) != 2:
                raise ConfigurationError(f"link {ln} needs two distinct sites")
            if not set(ln) <= known:
                raise ConfigurationError(f"link {ln} references unknown sites {sorted(set(ln) - known)}")
            if ln in inside:
                raise ConfigurationError(f"link {ln} is already an edge of a triangle")
            links.append(ln)
        if len(set(links)) != len(links):
            raise ConfigurationError("duplicate link")
        object.__setattr__(self, "triangles", tuple(tris))
        object.__setattr__(self, "links", tuple(links))

    @property
    def labels(self) -> list[int]:
        return sorted(s[0] for s in self.sites)

    def qubit_map(self) -> dict[int, int]:
        """Site label -> register qubit (1-based, in sorted label order)."""
        return {label: q for q, label in enumerate(self.labels, start=1)}

    def coords(self) -> dict[int, tuple[float, float]]:
        return {label: (x, y) for label, x, y in self.sites}

    def to_json(self) -> dict:
        return {
            "sites": [[label, x, y] for label, x, y in self.sites],
            "triangles": [list(t) for t in self.triangles],
            "links": [list(ln) for ln in self.links],
        }

    @classmethod
    def from_json(cls, data: dict | str) -> "LatticeGraph":
        if isinstance(data, str):
            data = json.loads(data)
        return custom_graph(
            [(int(s[0]), float(s[1]), float(s[2])) for s in data["sites"]],
            data.get("triangles", []),
            data.get("links", []),
        )


def custom_graph(sites, triangles=(), links=()) -> LatticeGraph:
    """Validated graph from explicit records.

    ``sites`` may be bare labels (placed on a line) or ``(label, x, y)`` triples.
    """
    recs = []
    for pos, s in enumerate(sites):
        if isinstance(s, (int, np.integer)):
            recs.append((int(s), float(pos), 0.0))
        else:
            label, x, y = s
            recs.append((int(label), float(x), float(y)))
    return LatticeGraph(tuple(recs), tuple(tuple(t) for t in triangles), tuple(tuple(ln) for ln in links))


def build_bowtie(rows: int, cols: int) -> LatticeGraph:
    """``rows x cols`` bowtie cells on the hexagonal site lattice (see module docstring)."""
    if rows < 1 or cols < 1:
        raise ConfigurationError(f"bowtie lattice needs rows, cols >= 1, got ({rows}, {cols})")
    d = SITE_SPACING
    e1 = np.array([d, 0.0])
    e2 = np.array([d / 2, d * math.sqrt(3) / 2])
    labels: dict[tuple[float, float], int] = {}
    sites = []

    def site(p: np.ndarray) -> int:
        key = (round(float(p[0]), 9), round(float(p[1]), 9))
        if key not in labels:
            labels[key] = len(labels) + 1
            sites.append((labels[key], key[0], key[1]))
        return labels[key]

    triangles = []
    for r in range(rows):
        for q in range(cols):
            c = 2 * q * e1 + 2 * r * (e2 - e1)
            centre = site(c)
            triangles.append((centre, site(c - e1), site(c - e1 + e2)))
            triangles.append((centre, site(c + e1), site(c + e1 - e2)))
    return LatticeGraph(tuple(sites), tuple(triangles))


def bowtie_cell_sites(g: LatticeGraph, row: int = 0, col: int = 0) -> tuple[int, ...]:
    """Labels ``(centre, left_outer, left_apex, right_outer, right_apex)`` of one generated cell.

    Only meaningful for graphs from ``build_bowtie``.
    """
    d = SITE_SPACING
    e1 = np.array([d, 0.0])
    e2 = np.array([d / 2, d * math.sqrt(3) / 2])
    c = 2 * col * e1 + 2 * row * (e2 - e1)
    lookup = {(round(x, 9), round(y, 9)): label for label, x, y in g.sites}
    pts = [c, c - e1, c - e1 + e2, c + e1, c + e1 - e2]
    return tuple(lookup[(round(float(p[0]), 9), round(float(p[1]), 9))] for p in pts)


def assignment_from_path(g: LatticeGraph, active: Iterable[int], bridge_ones: Iterable[int] = ()) -> dict[int, str]:
    """Initial states encoding a path: active sites in |+>, bridges in |1>, the rest in |0>."""
    active = set(active)
    ones = set(bridge_ones)
    known = set(g.labels)
    if active & ones:
        raise ConfigurationError(f"sites {sorted(active & ones)} are both active and bridging")
    unknown = (active | ones) - known
    if unknown:
        raise ConfigurationError(f"unknown sites {sorted(unknown)}")
    return {s: "plus" if s in active else "one" if s in ones else "zero" for s in g.labels}


def blurred_removal(g: LatticeGraph, center: Sequence[float], w0: float = BEAM_WAIST) -> set[int]:
    """Sites within ``w0`` (units of ``a``) of a beam centred at ``center``."""
    if w0 <= 0:
        raise ConfigurationError("beam radius must be positive")
    cx, cy = center
    return {label for label, x, y in g.sites if math.hypot(x - cx, y - cy) <= w0 + 1e-12}


@dataclass(frozen=True)
class PotentialField:
    x: np.ndarray = field(repr=False)
    y: np.ndarray = field(repr=False)
    V: np.ndarray = field(repr=False)  # shape (len(y), len(x))
    V1: float = 1.0
    V2: float = 1.0
    wavelength: float = 1.0

    @property
    def V0(self) -> float:
        return self.V1 + self.V2

    def to_csv(self) -> str:
        lines = ["x,y,V"]
        for iy, yv in enumerate(self.y):
            for ix, xv in enumerate(self.x):
                lines.append(f"{xv:.12g},{yv:.12g},{self.V[iy, ix]:.12g}")
        return "\n".join(lines) + "\n"

    def to_pgm(self) -> str:
        """Plain (P2) greymap, first row at the largest ``y``; 0 = lowest potential."""
        lo, hi = float(self.V.min()), float(self.V.max())
        scale = 255.0 / (hi - lo) if hi > lo else 0.0
        grey = np.rint((self.V - lo) * scale).astype(int)[::-1]
        rows = [" ".join(str(v) for v in row) for row in grey]
        h, w = grey.shape
        return f"P2\n{w} {h}\n255\n" + "\n".join(rows) + "\n"


def offset_potential(x, y, V1: float, V2: float, wavelength: float):
    """``V0 - V1 cos(k y) + V2 cos(k sqrt(3) x)`` with ``k = 2 pi / wavelength`` and ``V0 = V1 + V2``."""
    k = 2 * math.pi / wavelength
    return (V1 + V2) - V1 * np.cos(k * np.asarray(y)) + V2 * np.cos(k * math.sqrt(3) * np.asarray(x))


def potential_map(
    V1: float = 1.0,
    V2: float = 1.0,
    wavelength: float = 2.0,
    x_range: tuple[float, float] = (0.0, 4.0),
    y_range: tuple[float, float] = (0.0, 4.0),
    resolution: int | tuple[int, int] = 128,
) -> PotentialField:
    """Sample the superlattice offset on a regular grid (endpoints included).

    Defaults put the grid in units of ``a`` (``wavelength = 2``).
    """
    if wavelength <= 0:
        raise ConfigurationError("wavelength must be positive")
    if V1 < 0 or V2 < 0:
        raise ConfigurationError("V1 and V2 must be non-negative")
    nx, ny = (resolution, resolution) if isinstance(resolution, (int, np.integer)) else resolution
    if nx < 2 or ny < 2:
        raise ConfigurationError("resolution must be at least 2 per axis")
    if not (x_range[1] > x_range[0] and y_range[1] > y_range[0]):
        raise ConfigurationError("ranges must be increasing")
    xs = np.linspace(*x_range, int(nx))
    ys = np.linspace(*y_range, int(ny))
    XX, YY = np.meshgrid(xs, ys)
    return PotentialField(xs, ys, offset_potential(XX, YY, V1, V2, wavelength), float(V1), float(V2), float(wavelength))


def toffoli_graph() -> LatticeGraph:
    """The 13-site compact Toffoli network.

    Inputs 1-3, propagation links to 4-6, the enlarged triangle through
    ancillas 7-10 and output links to 11-13.  Coordinates are a schematic
    layout only.
    """
    pos = {
        1: (0, 2), 2: (0, 1), 3: (0, 0),
        4: (1, 2), 5: (1, 1), 6: (1, 0),
        7: (2, 2.5), 8: (2.5, 1.5), 9: (2.5, 0.5), 10: (2, 1.25),
        11: (4, 2), 12: (4, 1), 13: (4, 0),
    }
    links = [(1, 4), (2, 5), (3, 6), (4, 7), (7, 8), (9, 10), (5, 10), (4, 11), (5, 12), (6, 13)]
    return custom_graph([(s, *p) for s, p in pos.items()], [(6, 9, 8)], links)


def enlargement_graph() -> LatticeGraph:
    """Slots 4-6 plus ancillas 7-10 of the enlarged triangle."""
    full = toffoli_graph()
    keep = set(range(4, 11))
    return custom_graph(
        [s for s in full.sites if s[0] in keep],
        full.triangles,
        [ln for ln in full.links if set(ln) <= keep],
    )
