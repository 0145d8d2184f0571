"""Sparse symmetric integer couplings plus external fields."""

from __future__ import annotations

from pathlib import Path

import numpy as np
from scipy import sparse


class GraphFileError(ValueError):
    def __init__(self, message, line=None, path=None):
        self.line = line
        self.path = path
        where = "".join(f"{part}:" for part in (path, line) if part is not None)
        super().__init__(f"{where} {message}".strip())


class CouplingGraph:
    """``n`` spins, couplings ``J`` (CSR, symmetric, zero diagonal) and fields ``h``.

    Weights are integers: a weight ``w`` acts as ``|w|`` parallel vote branches.
    """

    def __init__(self, n, J=None, h=None):
        n = int(n)
        if n < 1:
            raise ValueError("need at least one spin")
        if J is None:
            J = sparse.csr_matrix((n, n), dtype=np.int64)
        J = sparse.csr_matrix(J)
        if J.shape != (n, n):
            raise ValueError(f"J must be {n}x{n}, got {J.shape}")
        dense_vals = J.data
        if dense_vals.size and not np.all(np.equal(np.round(dense_vals), dense_vals)):
            raise ValueError("couplings must be integers")
        J = J.astype(np.int64)
        J.eliminate_zeros()
        if J.diagonal().any():
            raise ValueError("J must have a zero diagonal")
        if (J != J.T).nnz:
            raise ValueError("J must be symmetric")
        J.sort_indices()
        self.n = n
        self.J = J
        h = np.zeros(n, dtype=np.int64) if h is None else np.asarray(h)
        if h.shape != (n,):
            raise ValueError(f"h must have length {n}")
        if h.size and not np.all(np.equal(np.round(h), h)):
            raise ValueError("fields must be integers")
        self.h = h.astype(np.int64)
        self.h.setflags(write=False)

    @classmethod
    def from_edges(cls, n, edges, h=None):
        """Build from ``(i, j, J_ij)`` triples; repeated pairs add up."""
        rows, cols, vals = [], [], []
        for i, j, w in edges:
            i, j = int(i), int(j)
            if i == j:
                raise ValueError(f"self-coupling on spin {i}")
            if not (0 <= i < n and 0 <= j < n):
                raise ValueError(f"edge ({i}, {j}) out of range for n = {n}")
            rows += [i, j]
            cols += [j, i]
            vals += [w, w]
        J = sparse.coo_matrix((np.asarray(vals, dtype=np.int64), (rows, cols)), shape=(n, n))
        return cls(n, J.tocsr(), h)

    @property
    def indptr(self):
        return self.J.indptr.astype(np.int64)

    @property
    def indices(self):
        return self.J.indices.astype(np.int64)

    @property
    def data(self):
        return self.J.data

    def neighbors(self, i):
        lo, hi = self.J.indptr[i], self.J.indptr[i + 1]
        return self.J.indices[lo:hi], self.J.data[lo:hi]

    def edges(self):
        """``(i, j, J_ij)`` with ``i < j``."""
        upper = sparse.triu(self.J, k=1).tocoo()
        order = np.lexsort((upper.col, upper.row))
        return [(int(upper.row[k]), int(upper.col[k]), int(upper.data[k])) for k in order]

    def total_weight(self):
        """Per-spin vote weight ``sum_j |J_ij| + |h_i|``."""
        return np.asarray(abs(self.J).sum(axis=1)).ravel().astype(np.int64) + np.abs(self.h)

    @property
    def nnz(self):
        return self.J.nnz

    def __eq__(self, other):
        if not isinstance(other, CouplingGraph):
            return NotImplemented
        return self.n == other.n and (self.J != other.J).nnz == 0 and np.array_equal(self.h, other.h)

    def __repr__(self):
        return f"CouplingGraph(n={self.n}, edges={self.nnz // 2}, fields={int(np.count_nonzero(self.h))})"

    def to_text(self):
        lines = [str(self.n)]
        lines += [f"{i} {j} {w}" for i, j, w in self.edges()]
        lines += [f"{i} {int(v)}" for i, v in enumerate(self.h) if v]
        return "\n".join(lines) + "\n"

    def save(self, path):
        Path(path).write_text(self.to_text())

    @classmethod
    def parse(cls, text, path=None):
        """Text format: first line ``n``; then ``i j J_ij`` or ``i h_i`` per line; ``#`` comments."""
        n = None
        edges = []
        h = None
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            try:
                nums = [int(tok) for tok in line.split()]
            except ValueError:
                raise GraphFileError(f"expected integers, got {raw.strip()!r}", lineno, path) from None
            if n is None:
                if len(nums) != 1 or nums[0] < 1:
                    raise GraphFileError("first line must be the spin count n >= 1", lineno, path)
                n = nums[0]
                h = np.zeros(n, dtype=np.int64)
                continue
            if len(nums) == 3:
                i, j, w = nums
                if i == j or not (0 <= i < n and 0 <= j < n):
                    raise GraphFileError(f"bad edge ({i}, {j}) for n = {n}", lineno, path)
                edges.append((i, j, w))
            elif len(nums) == 2:
                i, v = nums
                if not 0 <= i < n:
                    raise GraphFileError(f"field index {i} out of range", lineno, path)
                h[i] += v
            else:
                raise GraphFileError("expected 'i j J_ij' or 'i h_i'", lineno, path)
        if n is None:
            raise GraphFileError("empty graph file", None, path)
        return cls.from_edges(n, edges, h)

    @classmethod
    def load(cls, path):
        return cls.parse(Path(path).read_text(), path=path)
