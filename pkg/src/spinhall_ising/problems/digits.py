"""Bitmap instances: spins on a pixel grid whose ground state draws an image.

Ink (pixel 1) is spin ``+1``.  Grid neighbours get ``J = +1`` when their
target pixels match and ``-1`` otherwise, so the target and its global flip
satisfy every coupling.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..ising.core import as_spins
from ..ising.graph import CouplingGraph

_GLYPHS = {
    0: """
        ..........
        ...####...
        ..##..##..
        ..#....#..
        ..#....#..
        ..#....#..
        ..#....#..
        ..##..##..
        ...####...
        ..........
    """,
    1: """
        ..........
        ....##....
        ...###....
        ..#.##....
        ....##....
        ....##....
        ....##....
        ....##....
        ..######..
        ..........
    """,
    2: """
        ..........
        ..#####...
        .##...##..
        ......##..
        .....##...
        ....##....
        ...##.....
        ..##......
        .#######..
        ..........
    """,
    3: """
        ..........
        ..#####...
        .##...##..
        ......##..
        ...####...
        ......##..
        ......##..
        .##...##..
        ..#####...
        ..........
    """,
    4: """
        ..........
        .....##...
        ....###...
        ...#.##...
        ..#..##...
        .#...##...
        .#######..
        .....##...
        .....##...
        ..........
    """,
}


@dataclass(frozen=True, eq=False)
class Bitmap:
    pixels: np.ndarray  # (height, width) of 0/1

    def __post_init__(self):
        p = np.asarray(self.pixels)
        if p.ndim != 2 or p.size == 0:
            raise ValueError("bitmap must be a non-empty 2-D array")
        if not np.all((p == 0) | (p == 1)):
            raise ValueError("pixels must be 0 or 1")
        p = p.astype(np.int64)
        p.setflags(write=False)
        object.__setattr__(self, "pixels", p)

    def __eq__(self, other):
        if not isinstance(other, Bitmap):
            return NotImplemented
        return np.array_equal(self.pixels, other.pixels)

    __hash__ = None

    @property
    def height(self):
        return self.pixels.shape[0]

    @property
    def width(self):
        return self.pixels.shape[1]

    @classmethod
    def from_text(cls, text, ink="#"):
        rows = [line.strip() for line in text.strip().splitlines() if line.strip()]
        if len({len(r) for r in rows}) != 1:
            raise ValueError("ragged bitmap rows")
        return cls(np.array([[1 if ch == ink else 0 for ch in r] for r in rows]))

    @classmethod
    def from_spins(cls, s, height, width):
        return cls(((as_spins(s, height * width) + 1) // 2).reshape(height, width))

    def spins(self):
        return (2 * self.pixels - 1).ravel()

    def to_pgm(self):
        """Plain (P2) graymap; ink is drawn black (0) on white (1)."""
        lines = ["P2", f"{self.width} {self.height}", "1"]
        lines += [" ".join(str(1 - v) for v in row) for row in self.pixels]
        return "\n".join(lines) + "\n"

    def save_pgm(self, path):
        Path(path).write_text(self.to_pgm())

    @classmethod
    def from_pgm(cls, text, path=None):
        """Read a plain PGM; pixels darker than half the max value are ink."""
        tokens = []
        for raw in text.splitlines():
            tokens += raw.split("#", 1)[0].split()
        where = f"{path}: " if path else ""
        if len(tokens) < 4 or tokens[0] != "P2":
            raise ValueError(f"{where}not a plain P2 graymap")
        try:
            width, height, maxval = (int(t) for t in tokens[1:4])
            values = np.array([int(t) for t in tokens[4:]], dtype=np.int64)
        except ValueError:
            raise ValueError(f"{where}non-integer token in graymap") from None
        if width <= 0 or height <= 0 or maxval <= 0:
            raise ValueError(f"{where}bad graymap header")
        if values.size != width * height:
            raise ValueError(f"{where}expected {width * height} pixels, found {values.size}")
        return cls((values.reshape(height, width) * 2 < maxval).astype(np.int64))

    @classmethod
    def load_pgm(cls, path):
        return cls.from_pgm(Path(path).read_text(), path=path)


def glyph(digit) -> Bitmap:
    """Built-in 10x10 glyph for digits 0-4."""
    if digit not in _GLYPHS:
        raise KeyError(f"no built-in glyph for {digit!r}; available: {sorted(_GLYPHS)}")
    return Bitmap.from_text(_GLYPHS[digit])


GLYPH_DIGITS = tuple(sorted(_GLYPHS))


def tile(bitmaps, arrangement=None):
    """Lay bitmaps of equal size on a ``(rows, cols)`` grid (default: one row)."""
    bitmaps = list(bitmaps)
    if not bitmaps:
        raise ValueError("need at least one bitmap")
    shape = bitmaps[0].pixels.shape
    if any(b.pixels.shape != shape for b in bitmaps):
        raise ValueError("bitmaps must share one size")
    rows, cols = arrangement or (1, len(bitmaps))
    if rows * cols != len(bitmaps):
        raise ValueError(f"arrangement {rows}x{cols} does not hold {len(bitmaps)} bitmaps")
    grid = [np.hstack([b.pixels for b in bitmaps[r * cols:(r + 1) * cols]]) for r in range(rows)]
    return Bitmap(np.vstack(grid))


def grid_instance(target: Bitmap):
    """Couplings on the 4-neighbour grid of ``target``; spin index ``r * width + c``."""
    h, w = target.pixels.shape
    p = target.pixels
    edges = []
    for r in range(h):
        for c in range(w):
            i = r * w + c
            if c + 1 < w:
                edges.append((i, i + 1, 1 if p[r, c] == p[r, c + 1] else -1))
            if r + 1 < h:
                edges.append((i, i + w, 1 if p[r, c] == p[r + 1, c] else -1))
    return CouplingGraph.from_edges(h * w, edges), target.spins()


def digit_instance(bitmaps, arrangement=None):
    """``(CouplingGraph, target spins)`` for bitmaps tiled on one grid."""
    return grid_instance(tile(bitmaps, arrangement))


def pixel_agreement(s, target):
    """Fraction of matching pixels, maximized over the global flip."""
    s = as_spins(s)
    target = as_spins(target, s.shape[0])
    same = float(np.mean(s == target))
    return max(same, 1.0 - same)
