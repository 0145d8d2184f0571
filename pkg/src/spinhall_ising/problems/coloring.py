"""Graph k-coloring through a one-hot penalty Hamiltonian.

With ``x = (1 + s) / 2`` and spin index ``v * k + c`` for "vertex v has
color c", the penalty

    P(x) = A sum_v (1 - sum_c x_vc)^2 + A sum_{(u,v) in E} sum_c x_uc x_vc

is multiplied by 4 to clear the fractions and becomes

    4 P = H(s) + offset,
    J(vc, vc') = -2A  (c != c'),   J(uc, vc) = -A  ((u, v) in E),
    h(vc) = -A (2 (k - 2) + deg v),
    offset = A n (4 - 2k + k(k - 1)) + A |E| k.

Repeated colors on an edge and non-one-hot rows both cost energy, so
``P = 0`` exactly for proper colorings.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..ising.core import as_spins, hamiltonian
from ..ising.graph import CouplingGraph

SCALE = 4
DEFAULT_SIZE_LIMIT = 4096


@dataclass(frozen=True)
class ColoringSpec:
    n: int
    k: int
    edges: tuple  # (u, v), u < v
    A: int = 1

    def __post_init__(self):
        if self.n < 1 or self.k < 1:
            raise ValueError("n and k must be >= 1")
        if int(self.A) != self.A or self.A < 1:
            raise ValueError("A must be a positive integer")
        canon = set()
        for u, v in self.edges:
            u, v = int(u), int(v)
            if u == v or not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError(f"bad edge ({u}, {v})")
            canon.add((min(u, v), max(u, v)))
        object.__setattr__(self, "edges", tuple(sorted(canon)))
        object.__setattr__(self, "A", int(self.A))

    @property
    def n_spins(self):
        return self.n * self.k

    def index(self, v, c):
        return v * self.k + c

    def degree(self):
        deg = np.zeros(self.n, dtype=np.int64)
        for u, v in self.edges:
            deg[u] += 1
            deg[v] += 1
        return deg

    def to_dict(self):
        return {"n": self.n, "k": self.k, "edges": [list(e) for e in self.edges], "A": self.A}

    @classmethod
    def from_dict(cls, d):
        return cls(int(d["n"]), int(d["k"]), tuple(tuple(e) for e in d.get("edges", [])), int(d.get("A", 1)))

    def save(self, path):
        Path(path).write_text(json.dumps(self.to_dict(), indent=2) + "\n")

    @classmethod
    def load(cls, path):
        try:
            data = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}:{exc.lineno}: invalid JSON ({exc.msg})") from None
        return cls.from_dict(data)


def coloring_encode(spec: ColoringSpec, size_limit=DEFAULT_SIZE_LIMIT):
    """Return ``(CouplingGraph, offset)`` with ``penalty = (H + offset) / 4``."""
    if spec.n_spins > size_limit:
        raise ValueError(f"{spec.n_spins} spins exceeds the size limit of {size_limit}")
    A, k = spec.A, spec.k
    edges = []
    for v in range(spec.n):
        for c in range(k):
            for c2 in range(c + 1, k):
                edges.append((spec.index(v, c), spec.index(v, c2), -2 * A))
    for u, v in spec.edges:
        for c in range(k):
            edges.append((spec.index(u, c), spec.index(v, c), -A))
    deg = spec.degree()
    h = np.array([-A * (2 * (k - 2) + deg[v]) for v in range(spec.n) for _ in range(k)], dtype=np.int64)
    offset = A * spec.n * (4 - 2 * k + k * (k - 1)) + A * len(spec.edges) * k
    return CouplingGraph.from_edges(spec.n_spins, edges, h), int(offset)


def penalty_from_energy(H, offset):
    total = H + offset
    if total % SCALE:
        raise ValueError("energy plus offset is not a multiple of the encoding scale")
    return total // SCALE


def coloring_penalty(s, spec: ColoringSpec):
    """Binary penalty evaluated directly from ``x = (1 + s) / 2``."""
    x = ((as_spins(s, spec.n_spins) + 1) // 2).reshape(spec.n, spec.k)
    rows = int(((1 - x.sum(axis=1)) ** 2).sum())
    clashes = sum(int(x[u] @ x[v]) for u, v in spec.edges)
    return spec.A * (rows + clashes)


def energy_penalty(s, spec: ColoringSpec, g: CouplingGraph | None = None, offset=None):
    if g is None or offset is None:
        g, offset = coloring_encode(spec)
    return penalty_from_energy(hamiltonian(s, g), offset)


@dataclass(frozen=True)
class ColoringResult:
    valid: bool  # every vertex has exactly one color
    assignment: tuple | None  # color per vertex when valid
    violations: dict  # vertex -> number of +1 color spins, for invalid vertices
    conflicts: tuple  # edges whose endpoints share a color (only when valid)

    @property
    def proper(self):
        return self.valid and not self.conflicts

    def to_dict(self):
        return {
            "valid": self.valid,
            "proper": self.proper,
            "assignment": list(self.assignment) if self.assignment is not None else None,
            "violations": {str(v): c for v, c in self.violations.items()},
            "conflicts": [list(e) for e in self.conflicts],
        }


def coloring_decode(s, spec: ColoringSpec) -> ColoringResult:
    x = (as_spins(s, spec.n_spins) == 1).reshape(spec.n, spec.k)
    counts = x.sum(axis=1)
    violations = {int(v): int(c) for v, c in enumerate(counts) if c != 1}
    if violations:
        return ColoringResult(False, None, violations, ())
    colors = tuple(int(c) for c in x.argmax(axis=1))
    conflicts = tuple((u, v) for u, v in spec.edges if colors[u] == colors[v])
    return ColoringResult(True, colors, {}, conflicts)


def coloring_state(colors, spec: ColoringSpec):
    """Spin vector of a color assignment."""
    s = -np.ones(spec.n_spins, dtype=np.int64)
    for v, c in enumerate(colors):
        s[spec.index(v, int(c))] = 1
    return s


def _cycle(n):
    return tuple((i, (i + 1) % n) for i in range(n))


DEMO_SPECS = {
    "triangle-k3": ColoringSpec(3, 3, _cycle(3)),
    "square-k2": ColoringSpec(4, 2, _cycle(4)),
    # hub 0 joined to the 4-cycle 1-2-3-4
    "wheel5-k3": ColoringSpec(5, 3, tuple((0, v) for v in range(1, 5)) + tuple((1 + a, 1 + b) for a, b in _cycle(4))),
    # odd cycle with two colors: no proper coloring
    "triangle-k2": ColoringSpec(3, 2, _cycle(3)),
}
