"""Max-cut on integer-weighted graphs.

Encoding: ``J_uv = -w_uv``, ``h = 0``, so ``H(s) = sum(w) - 2 cut(s)`` and the
ground states of ``H`` are exactly the maximum cuts.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..ising.core import as_spins
from ..ising.graph import CouplingGraph, GraphFileError


@dataclass(frozen=True)
class WeightedGraph:
    n: int
    edges: tuple  # (u, v, w) with u < v

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("need at least one vertex")
        canon = []
        seen = set()
        for u, v, w in self.edges:
            u, v, w = int(u), int(v), int(w)
            if u == v:
                raise ValueError(f"self-loop on vertex {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError(f"edge ({u}, {v}) out of range for n = {self.n}")
            u, v = min(u, v), max(u, v)
            if (u, v) in seen:
                raise ValueError(f"duplicate edge ({u}, {v})")
            seen.add((u, v))
            canon.append((u, v, w))
        object.__setattr__(self, "edges", tuple(sorted(canon)))

    @property
    def total_weight(self):
        return sum(w for _, _, w in self.edges)

    def to_text(self):
        return f"{self.n}\n" + "".join(f"{u} {v} {w}\n" for u, v, w in self.edges)

    def save(self, path):
        Path(path).write_text(self.to_text())

    @classmethod
    def parse(cls, text, path=None):
        """Lines ``u v w``; an optional first line holding only ``n`` fixes the vertex count."""
        n = None
        edges = []
        first = True
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            try:
                nums = [int(tok) for tok in line.split()]
            except ValueError:
                raise GraphFileError(f"expected integers, got {raw.strip()!r}", lineno, path) from None
            if first and len(nums) == 1:
                n = nums[0]
                first = False
                continue
            first = False
            if len(nums) != 3:
                raise GraphFileError("expected 'u v w'", lineno, path)
            if nums[0] == nums[1] or min(nums[:2]) < 0:
                raise GraphFileError(f"bad edge ({nums[0]}, {nums[1]})", lineno, path)
            edges.append(tuple(nums))
        if n is None:
            if not edges:
                raise GraphFileError("no edges and no vertex count", None, path)
            n = max(max(u, v) for u, v, _ in edges) + 1
        try:
            return cls(n, tuple(edges))
        except ValueError as exc:
            raise GraphFileError(str(exc), None, path) from None

    @classmethod
    def load(cls, path):
        return cls.parse(Path(path).read_text(), path=path)


def maxcut_encode(wg: WeightedGraph) -> CouplingGraph:
    return CouplingGraph.from_edges(wg.n, [(u, v, -w) for u, v, w in wg.edges])


def cut_value(s, wg: WeightedGraph):
    """Total weight of edges whose endpoints carry opposite spins."""
    s = as_spins(s, wg.n)
    return sum(w for u, v, w in wg.edges if s[u] != s[v])


def random_weighted_graph(n, edge_prob, rng: np.random.Generator, weights=(1,)):
    """Erdos-Renyi graph with weights drawn uniformly from ``weights``; never edgeless."""
    while True:
        edges = [(u, v, int(rng.choice(weights))) for u in range(n) for v in range(u + 1, n)
                 if rng.random() < edge_prob]
        if edges:
            return WeightedGraph(n, tuple(edges))
