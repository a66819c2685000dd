"""Arenas: finite grids, explicit graphs, and procedurally tiled planes.

An arena is the static board a pursuit game is played on.  Cells are Open,
Wall, or part of a numbered safe zone; agents stand on non-wall cells and
move along the arena's adjacency relation.  Finite grids use four- or
eight-way connectivity; explicit graphs supply their own undirected edges.
A tiled arena describes an unbounded plane as a pure function of the
coordinate and is consumed by extracting finite windows around a point of
interest.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

from .errors import ArenaError

OPEN = 0
WALL = -1
# Safe zones are positive integers: kind z means "cell of safe zone z".

FOUR_WAY = "four"
EIGHT_WAY = "eight"

_STEPS = {
    FOUR_WAY: ((0, -1), (-1, 0), (1, 0), (0, 1)),
    EIGHT_WAY: ((-1, -1), (0, -1), (1, -1), (-1, 0), (1, 0), (-1, 1), (0, 1), (1, 1)),
}


class Coord(NamedTuple):
    x: int
    y: int


def manhattan(a: Sequence[int], b: Sequence[int]) -> int:
    return abs(a[0] - b[0]) + abs(a[1] - b[1])


def kind_name(kind: int) -> str:
    if kind == OPEN:
        return "open"
    if kind == WALL:
        return "wall"
    return f"zone{kind}"


@dataclass(frozen=True)
class TilingSpec:
    """Unbounded plane split into diagonal bands of two textures.

    The band coordinate of a cell is ``(x + y) mod band_period``.  Bands
    below ``low`` or at/above ``high`` are a checkerboard (even parity of
    x + y is Open, odd is Wall); the middle band repeats a 4x4 mask of
    wall offsets, the default being an L-shaped tetromino.
    """

    band_period: int = 100
    low: int = 25
    high: int = 75
    mask: frozenset[tuple[int, int]] = frozenset({(0, 0), (1, 0), (0, 1), (0, 2)})

    def __post_init__(self):
        if not (0 < self.low < self.high < self.band_period):
            raise ArenaError(
                f"tiling bands must satisfy 0 < low < high < period, "
                f"got low={self.low} high={self.high} period={self.band_period}"
            )
        for off in self.mask:
            if not (0 <= off[0] < 4 and 0 <= off[1] < 4):
                raise ArenaError(f"mask offsets must lie in a 4x4 block, got {off}")

    def to_json(self) -> dict:
        return {
            "bandPeriod": self.band_period,
            "low": self.low,
            "high": self.high,
            "mask": sorted(self.mask),
        }

    @classmethod
    def from_json(cls, data: dict) -> "TilingSpec":
        return cls(
            band_period=data.get("bandPeriod", 100),
            low=data.get("low", 25),
            high=data.get("high", 75),
            mask=frozenset(tuple(p) for p in data["mask"]) if "mask" in data else cls.mask,
        )


DEFAULT_TILING = TilingSpec()


def tiling_cell(spec: TilingSpec, coord: Sequence[int]) -> int:
    """Kind of one cell of the unbounded tiled plane (total and pure)."""
    x, y = coord[0], coord[1]
    band = (x + y) % spec.band_period
    if band < spec.low or band >= spec.high:
        return OPEN if (x + y) % 2 == 0 else WALL
    return WALL if (x % 4, y % 4) in spec.mask else OPEN


class Arena:
    """Immutable playing field: a finite grid or an explicit graph.

    Grid cells are addressed by ``Coord(x, y)`` with cell index
    ``y * width + x``; graph vertices are addressed by ``Coord(v, 0)``.
    Neighbor lists exclude walls and are sorted by cell index, which for
    grids is (y, x) order.
    """

    __slots__ = (
        "geometry",
        "width",
        "height",
        "connectivity",
        "kinds",
        "n_cells",
        "edges",
        "origin",
        "_nbrs",
        "_edge_set",
        "zones",
    )

    def __init__(self):
        raise TypeError("use Arena.grid() or Arena.graph()")

    @classmethod
    def _blank(cls) -> "Arena":
        return object.__new__(cls)

    @classmethod
    def grid(
        cls,
        width: int,
        height: int,
        kinds: Sequence[int],
        connectivity: str = EIGHT_WAY,
        origin: Coord | None = None,
    ) -> "Arena":
        if width < 1 or height < 1:
            raise ArenaError(f"grid must be at least 1x1, got {width}x{height}")
        if connectivity not in _STEPS:
            raise ArenaError(f"unknown connectivity {connectivity!r}")
        if len(kinds) != width * height:
            raise ArenaError("kinds length does not match width*height")
        a = cls._blank()
        a.geometry = "grid"
        a.width = width
        a.height = height
        a.connectivity = connectivity
        a.kinds = tuple(int(k) for k in kinds)
        a.n_cells = width * height
        a.edges = None
        a.origin = origin
        a._finish()
        return a

    @classmethod
    def graph(
        cls,
        n_vertices: int,
        edges: Iterable[tuple[int, int]],
        kinds: Sequence[int] | None = None,
    ) -> "Arena":
        if n_vertices < 1:
            raise ArenaError("graph arena needs at least one vertex")
        a = cls._blank()
        a.geometry = "graph"
        a.width = n_vertices
        a.height = 1
        a.connectivity = None
        a.n_cells = n_vertices
        a.origin = None
        norm = set()
        for u, v in edges:
            if not (0 <= u < n_vertices and 0 <= v < n_vertices):
                raise ArenaError(f"edge ({u},{v}) out of range")
            if u == v:
                raise ArenaError(f"self-loop edge ({u},{v}) not allowed")
            norm.add((min(u, v), max(u, v)))
        a.edges = tuple(sorted(norm))
        a.kinds = tuple(int(k) for k in kinds) if kinds is not None else (OPEN,) * n_vertices
        if len(a.kinds) != n_vertices:
            raise ArenaError("kinds length does not match vertex count")
        a._finish()
        return a

    def _finish(self):
        zone_ids = sorted({k for k in self.kinds if k > 0})
        if zone_ids and zone_ids != list(range(1, len(zone_ids) + 1)):
            raise ArenaError(f"zone ids must be contiguous from 1, got {zone_ids}")
        self.zones = {
            z: tuple(i for i, k in enumerate(self.kinds) if k == z) for z in zone_ids
        }
        nbrs = []
        if self.geometry == "grid":
            for cid in range(self.n_cells):
                if self.kinds[cid] == WALL:
                    nbrs.append(())
                    continue
                x, y = cid % self.width, cid // self.width
                out = []
                for dx, dy in _STEPS[self.connectivity]:
                    nx, ny = x + dx, y + dy
                    if 0 <= nx < self.width and 0 <= ny < self.height:
                        nid = ny * self.width + nx
                        if self.kinds[nid] != WALL:
                            out.append(nid)
                nbrs.append(tuple(sorted(out)))
        else:
            adj = [[] for _ in range(self.n_cells)]
            for u, v in self.edges:
                if self.kinds[u] != WALL and self.kinds[v] != WALL:
                    adj[u].append(v)
                    adj[v].append(u)
            nbrs = [tuple(sorted(s)) for s in adj]
        self._nbrs = tuple(nbrs)
        self._edge_set = set(self.edges) if self.edges is not None else None

    # -- addressing ----------------------------------------------------

    def cell_id(self, coord: Sequence[int]) -> int:
        x, y = coord[0], coord[1]
        if not self.in_bounds((x, y)):
            raise ArenaError(f"coordinate ({x},{y}) out of bounds")
        return y * self.width + x

    def coord_of(self, cell: int) -> Coord:
        return Coord(cell % self.width, cell // self.width)

    def in_bounds(self, coord: Sequence[int]) -> bool:
        return 0 <= coord[0] < self.width and 0 <= coord[1] < self.height

    def kind_at(self, coord: Sequence[int]) -> int:
        return self.kinds[self.cell_id(coord)]

    def neighbors(self, coord: Sequence[int]) -> list[Coord]:
        """Adjacent non-wall cells, sorted by cell index; empty for walls."""
        return [self.coord_of(c) for c in self._nbrs[self.cell_id(coord)]]

    def adjacent_shape(self, src: Sequence[int], dst: Sequence[int]) -> bool:
        """One movement step apart, ignoring what the cells hold.

        Walking into a wall is shape-adjacent (a broken controller can
        emit it); teleports and off-lattice steps are not.
        """
        if not self.in_bounds(dst):
            return False
        if self.geometry == "grid":
            step = (dst[0] - src[0], dst[1] - src[1])
            return step in _STEPS[self.connectivity]
        u, v = self.cell_id(src), self.cell_id(dst)
        return (min(u, v), max(u, v)) in self._edge_set

    @property
    def is_graph(self) -> bool:
        return self.geometry == "graph"

    def nbr_cells(self, cell: int) -> tuple[int, ...]:
        return self._nbrs[cell]

    def open_cells(self) -> list[int]:
        return [i for i, k in enumerate(self.kinds) if k != WALL]

    @property
    def zone_count(self) -> int:
        return len(self.zones)

    @property
    def diameter(self) -> int:
        """Largest Manhattan distance between two non-wall cells."""
        cells = [self.coord_of(c) for c in self.open_cells()]
        return max((manhattan(a, b) for a, b in itertools.combinations(cells, 2)), default=0)

    def __eq__(self, other):
        if not isinstance(other, Arena):
            return NotImplemented
        return (
            self.geometry == other.geometry
            and self.width == other.width
            and self.height == other.height
            and self.connectivity == other.connectivity
            and self.kinds == other.kinds
            and self.edges == other.edges
        )

    def __repr__(self):
        if self.geometry == "grid":
            return f"<Arena grid {self.width}x{self.height} {self.connectivity}>"
        return f"<Arena graph {self.n_cells} vertices {len(self.edges)} edges>"

    # -- serialization -------------------------------------------------

    def to_json(
        self,
        cops: Sequence[Coord] | None = None,
        robbers: Sequence[Coord] | None = None,
        tiling: TilingSpec | None = None,
    ) -> dict:
        if self.geometry == "grid":
            data = {
                "width": self.width,
                "height": self.height,
                "connectivity": self.connectivity,
                "cells": [
                    list(self.kinds[y * self.width : (y + 1) * self.width])
                    for y in range(self.height)
                ],
            }
        else:
            data = {
                "vertices": self.n_cells,
                "edges": [list(e) for e in self.edges],
                "kinds": list(self.kinds),
            }
        def start(c):
            return c.x if self.geometry == "graph" else list(c)

        if cops is not None:
            data["cops"] = [start(Coord(*c)) for c in cops]
        if robbers is not None:
            data["robbers"] = [start(Coord(*r)) for r in robbers]
        if tiling is not None:
            data["tiling"] = tiling.to_json()
        return data


def arena_from_json(data: dict) -> tuple[Arena, tuple[Coord, ...], tuple[Coord, ...]]:
    """Build an arena from its JSON form; returns (arena, cops, robbers).

    Start lists may be absent (empty tuples are returned) so the same
    format serves bare boards and full setups.
    """
    try:
        if "vertices" in data:
            arena = Arena.graph(
                data["vertices"],
                [tuple(e) for e in data.get("edges", [])],
                data.get("kinds"),
            )
        else:
            width, height = data["width"], data["height"]
            cells = data["cells"]
            if len(cells) != height or any(len(row) != width for row in cells):
                raise ArenaError("cells do not form a width x height table")
            kinds = [k for row in cells for k in row]
            arena = Arena.grid(width, height, kinds, data.get("connectivity", EIGHT_WAY))
    except KeyError as exc:
        raise ArenaError(f"arena JSON missing field {exc}") from exc
    def as_coord(p):
        # graph starts are vertex ids, grid starts are [x, y] pairs
        return Coord(p, 0) if isinstance(p, int) else Coord(*p)

    cops = tuple(as_coord(p) for p in data.get("cops", ()))
    robbers = tuple(as_coord(p) for p in data.get("robbers", ()))
    if cops or robbers:
        validate_starts(arena, cops, robbers)
    return arena, cops, robbers


_ASCII_KINDS = {".": OPEN, "#": WALL}


def parse_arena(text: str) -> tuple[Arena, tuple[Coord, ...], tuple[Coord, ...]]:
    """Parse the ASCII map format.

    '.' is Open, '#' Wall, a digit d a cell of safe zone d, 'C'/'R' cop and
    robber starts (on Open cells).  Rows must form a rectangle; at least one
    cop and one robber are required; zone ids must be contiguous from 1.
    """
    rows = text.splitlines()
    while rows and not rows[-1].strip():
        rows.pop()
    if not rows:
        raise ArenaError("empty arena text")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise ArenaError("non-rectangular arena text")
    kinds: list[int] = []
    cops: list[Coord] = []
    robbers: list[Coord] = []
    for y, row in enumerate(rows):
        for x, ch in enumerate(row):
            if ch in _ASCII_KINDS:
                kinds.append(_ASCII_KINDS[ch])
            elif ch.isdigit() and ch != "0":
                kinds.append(int(ch))
            elif ch == "C":
                cops.append(Coord(x, y))
                kinds.append(OPEN)
            elif ch == "R":
                robbers.append(Coord(x, y))
                kinds.append(OPEN)
            else:
                raise ArenaError(f"unknown map character {ch!r} at ({x},{y})")
    arena = Arena.grid(width, len(rows), kinds)
    if not cops or not robbers:
        raise ArenaError("map needs at least one C and one R")
    validate_starts(arena, cops, robbers)
    return arena, tuple(cops), tuple(robbers)


def render_arena(
    arena: Arena, cops: Sequence[Coord] = (), robbers: Sequence[Coord] = ()
) -> str:
    """Inverse of parse_arena for grid arenas."""
    if arena.geometry != "grid":
        raise ArenaError("only grid arenas render to ASCII")
    occupied = {Coord(*c): "C" for c in cops}
    occupied.update({Coord(*r): "R" for r in robbers})
    lines = []
    for y in range(arena.height):
        line = []
        for x in range(arena.width):
            c = Coord(x, y)
            if c in occupied:
                line.append(occupied[c])
                continue
            k = arena.kind_at(c)
            line.append("." if k == OPEN else "#" if k == WALL else str(k))
        lines.append("".join(line))
    return "\n".join(lines)


def validate_starts(
    arena: Arena, cops: Sequence[Coord], robbers: Sequence[Coord]
) -> None:
    """All starts on Open cells (not walls, not safe zones), all distinct."""
    seen: dict[Coord, str] = {}
    for label, team in (("cop", cops), ("robber", robbers)):
        for pos in team:
            pos = Coord(*pos)
            if not arena.in_bounds(pos):
                raise ArenaError(f"{label} start {tuple(pos)} out of bounds")
            k = arena.kind_at(pos)
            if k != OPEN:
                raise ArenaError(
                    f"{label} start {tuple(pos)} is on a {kind_name(k)} cell"
                )
            if pos in seen:
                raise ArenaError(f"duplicate occupancy at {tuple(pos)}")
            seen[pos] = label


def extract_window(
    spec: TilingSpec, center: Sequence[int], size: int, connectivity: str = EIGHT_WAY
) -> Arena:
    """Cut a size x size grid out of the tiled plane around ``center``.

    Interior cells take their kind from tiling_cell; every cell on the
    window boundary is forced to Wall so play cannot leave the window.
    The returned arena's ``origin`` maps window (0,0) back to the plane.
    """
    if size < 3 or size % 2 == 0:
        raise ArenaError(f"window size must be odd and >= 3, got {size}")
    cx, cy = center[0], center[1]
    half = size // 2
    origin = Coord(cx - half, cy - half)
    kinds = []
    for wy in range(size):
        for wx in range(size):
            if wx in (0, size - 1) or wy in (0, size - 1):
                kinds.append(WALL)
            else:
                kinds.append(tiling_cell(spec, (origin.x + wx, origin.y + wy)))
    return Arena.grid(size, size, kinds, connectivity, origin=origin)


def load_arena_file(path: str) -> tuple[Arena, tuple[Coord, ...], tuple[Coord, ...]]:
    """Read an arena from .json or ASCII text by file content sniffing."""
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    stripped = text.lstrip()
    if stripped.startswith("{"):
        return arena_from_json(json.loads(text))
    return parse_arena(text)
