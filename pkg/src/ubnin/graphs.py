"""Network containers and binarization operators.

Networks are labeled, symmetric, and loop-free. ``WeightedNetwork`` holds
real-valued association or similarity weights, ``BinaryNetwork`` a boolean
adjacency matrix. Both are immutable after construction so instances can be
shared freely between threads.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import ValidationError

SYMMETRY_ATOL = 1e-12  # tolerance applied when loading weighted matrices from CSV


def default_labels(n: int) -> tuple[str, ...]:
    """Generate placeholder node labels v1..vn."""
    return tuple(f"v{i}" for i in range(1, n + 1))


def _check_labels(labels, n) -> tuple[str, ...]:
    labels = tuple(str(x) for x in labels)
    if len(labels) != n:
        raise ValidationError(f"expected {n} node labels, got {len(labels)}")
    if len(set(labels)) != n:
        raise ValidationError("node labels must be unique")
    if any(not lab for lab in labels):
        raise ValidationError("node labels must be non-empty")
    return labels


@dataclass(frozen=True, eq=False)
class WeightedNetwork:
    """Symmetric real-valued network over labeled nodes, zero diagonal."""

    weights: np.ndarray
    labels: tuple[str, ...] = ()

    def __post_init__(self):
        w = np.array(self.weights, dtype=np.float64, copy=True)
        if w.ndim != 2 or w.shape[0] != w.shape[1]:
            raise ValidationError(f"weight matrix must be square, got shape {w.shape}")
        n = w.shape[0]
        if n < 2:
            raise ValidationError("a network needs at least 2 nodes")
        if not np.all(np.isfinite(w)):
            i, j = np.argwhere(~np.isfinite(w))[0]
            raise ValidationError(f"non-finite weight at ({i + 1},{j + 1}): {w[i, j]}")
        if not np.array_equal(w, w.T):
            i, j = _first_asymmetric_cell(w)
            raise ValidationError(
                f"weight matrix is not symmetric at ({i + 1},{j + 1}): "
                f"{w[i, j]!r} vs {w[j, i]!r}"
            )
        if np.any(np.diagonal(w) != 0):
            i = int(np.flatnonzero(np.diagonal(w) != 0)[0])
            raise ValidationError(f"diagonal must be zero, found {w[i, i]!r} at node {i + 1}")
        labels = _check_labels(self.labels or default_labels(n), n)
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "labels", labels)

    @property
    def n(self) -> int:
        return self.weights.shape[0]

    def __eq__(self, other):
        if not isinstance(other, WeightedNetwork):
            return NotImplemented
        return self.labels == other.labels and np.array_equal(self.weights, other.weights)

    def __repr__(self):
        return f"WeightedNetwork(n={self.n})"


@dataclass(frozen=True, eq=False)
class BinaryNetwork:
    """Symmetric boolean adjacency matrix over labeled nodes, zero diagonal."""

    edges: np.ndarray
    labels: tuple[str, ...] = ()

    def __post_init__(self):
        e = np.array(self.edges, copy=True)
        if e.dtype != np.bool_:
            vals = np.unique(e)
            if not np.all(np.isin(vals, (0, 1))):
                raise ValidationError("adjacency entries must be 0 or 1")
            e = e.astype(bool)
        if e.ndim != 2 or e.shape[0] != e.shape[1]:
            raise ValidationError(f"adjacency matrix must be square, got shape {e.shape}")
        n = e.shape[0]
        if n < 2:
            raise ValidationError("a network needs at least 2 nodes")
        if not np.array_equal(e, e.T):
            i, j = _first_asymmetric_cell(e)
            raise ValidationError(
                f"adjacency matrix is not symmetric at ({i + 1},{j + 1}): "
                f"{int(e[i, j])} vs {int(e[j, i])}"
            )
        if np.any(np.diagonal(e)):
            i = int(np.flatnonzero(np.diagonal(e))[0])
            raise ValidationError(f"self-loop at node {i + 1}; diagonal must be zero")
        labels = _check_labels(self.labels or default_labels(n), n)
        e.setflags(write=False)
        object.__setattr__(self, "edges", e)
        object.__setattr__(self, "labels", labels)

    @property
    def n(self) -> int:
        return self.edges.shape[0]

    def __eq__(self, other):
        if not isinstance(other, BinaryNetwork):
            return NotImplemented
        return self.labels == other.labels and np.array_equal(self.edges, other.edges)

    def __repr__(self):
        return f"BinaryNetwork(n={self.n}, edges={edge_count(self)})"


def _first_asymmetric_cell(m: np.ndarray) -> tuple[int, int]:
    n = m.shape[0]
    for i in range(n):
        for j in range(i + 1, n):
            if m[i, j] != m[j, i]:
                return i, j
    raise AssertionError("matrix is symmetric")


def degree(b: BinaryNetwork, i: int) -> int:
    """Number of neighbors of node ``i`` (0-based index)."""
    if not 0 <= int(i) < b.n:
        raise IndexError(f"node index {i} out of range for {b.n} nodes")
    return int(b.edges[int(i)].sum())


def degree_sequence(b: BinaryNetwork) -> np.ndarray:
    """Degrees of all nodes, in node order."""
    return b.edges.sum(axis=1).astype(np.int64)


def edge_count(b: BinaryNetwork) -> int:
    """Number of undirected edges."""
    return int(b.edges.sum()) // 2


def target_edge_count(keep: float, total_edges: int) -> int:
    """Edges retained when keeping a fraction of ``total_edges``.

    Rounds half away from zero, so ``keep * total_edges = 2.5`` keeps 3 edges.
    The product is evaluated in exact rational arithmetic; a float product
    can cross the half boundary and misround (e.g. keep 0.06 of 325 edges).
    """
    if not 0 < keep <= 1:
        raise ValueError(f"keep fraction must be in (0, 1], got {keep}")
    return int(math.floor(Fraction(keep) * total_edges + Fraction(1, 2)))


def _ranked_upper_triangle(values: np.ndarray, rows: np.ndarray, cols: np.ndarray,
                           secondary: np.ndarray | None = None) -> np.ndarray:
    """Indices sorting edge values descending, ties by (row, col) ascending."""
    keys = [cols, rows]
    if secondary is not None:
        keys.append(-secondary)
    keys.append(-values)
    return np.lexsort(tuple(keys))


def sparsity_threshold(w: WeightedNetwork, keep: float) -> BinaryNetwork:
    """Binarize a weighted network by retaining the strongest edges.

    Keeps exactly ``round(keep * n(n-1)/2)`` upper-triangle edges with the
    largest weights. Equal weights are resolved deterministically in ascending
    (row, col) order, so the result is reproducible for any weight multiset.
    """
    rows, cols = np.triu_indices(w.n, 1)
    vals = w.weights[rows, cols]
    k = target_edge_count(keep, vals.size)
    order = _ranked_upper_triangle(vals, rows, cols)
    sel = order[:k]
    e = np.zeros((w.n, w.n), dtype=bool)
    e[rows[sel], cols[sel]] = True
    e |= e.T
    return BinaryNetwork(e, w.labels)


def consistency_threshold(stack: Sequence[WeightedNetwork], keep: float,
                          strategy: str = "per-subject") -> list[BinaryNetwork]:
    """Binarize a stack of same-shaped weighted networks.

    ``per-subject`` thresholds each network independently at the given keep
    fraction (the default, preserving between-subject differences).
    ``group-mask`` scores every edge by mean/stddev of its weight across the
    stack (stddev 0 scores +inf; ties resolved by mean descending, then by
    (row, col) ascending), keeps the top fraction as a single mask, and applies
    that mask to every network.
    """
    if len(stack) < 2:
        raise ValidationError("consistency thresholding needs at least 2 networks")
    first = stack[0]
    for idx, w in enumerate(stack[1:], start=2):
        if w.n != first.n or w.labels != first.labels:
            raise ValidationError(
                f"network {idx} does not match network 1 (labels or dimensions differ)"
            )
    if strategy == "per-subject":
        return [sparsity_threshold(w, keep) for w in stack]
    if strategy != "group-mask":
        raise ValueError(f"unknown strategy {strategy!r}; use 'per-subject' or 'group-mask'")

    n = first.n
    rows, cols = np.triu_indices(n, 1)
    vals = np.stack([w.weights[rows, cols] for w in stack])
    mean = vals.mean(axis=0)
    std = vals.std(axis=0)
    score = np.where(std == 0, np.inf, mean / np.where(std == 0, 1.0, std))
    k = target_edge_count(keep, mean.size)
    order = _ranked_upper_triangle(score, rows, cols, secondary=mean)
    sel = order[:k]
    e = np.zeros((n, n), dtype=bool)
    e[rows[sel], cols[sel]] = True
    e |= e.T
    return [BinaryNetwork(e, first.labels) for _ in stack]


# ---------------------------------------------------------------------------
# Matrix CSV format: first row is the node labels, then n rows of n values.
# Binary matrices use 0/1 entries. Weighted input is validated for symmetry
# at absolute tolerance SYMMETRY_ATOL, then symmetrized exactly.
# ---------------------------------------------------------------------------

def _read_matrix_rows(path) -> tuple[tuple[str, ...], list[list[str]]]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        rows = [row for row in reader if row]
    if not rows:
        raise ValidationError(f"{path}: empty matrix file")
    labels = tuple(cell.strip() for cell in rows[0])
    n = len(labels)
    body = rows[1:]
    if len(body) != n:
        raise ValidationError(f"{path}: expected {n} data rows for {n} labels, got {len(body)}")
    for r, row in enumerate(body, start=1):
        if len(row) != n:
            raise ValidationError(f"{path}: row {r} has {len(row)} values, expected {n}")
    return labels, body


def load_weighted_matrix(path) -> WeightedNetwork:
    """Load a weighted network from matrix CSV."""
    labels, body = _read_matrix_rows(path)
    n = len(labels)
    w = np.empty((n, n), dtype=np.float64)
    for i, row in enumerate(body):
        for j, cell in enumerate(row):
            try:
                v = float(cell)
            except ValueError:
                raise ValidationError(f"{path}: invalid number {cell!r} at ({i + 1},{j + 1})")
            if not math.isfinite(v):
                raise ValidationError(f"{path}: non-finite weight at ({i + 1},{j + 1})")
            w[i, j] = v
    diff = np.abs(w - w.T)
    if np.any(diff > SYMMETRY_ATOL):
        i, j = np.argwhere(diff > SYMMETRY_ATOL)[0]
        raise ValidationError(
            f"{path}: matrix is not symmetric at ({labels[i]},{labels[j]}): "
            f"{w[i, j]!r} vs {w[j, i]!r}"
        )
    w = (w + w.T) / 2.0
    np.fill_diagonal(w, 0.0)
    return WeightedNetwork(w, labels)


def load_binary_matrix(path) -> BinaryNetwork:
    """Load a binary network from matrix CSV with strict 0/1 entries."""
    labels, body = _read_matrix_rows(path)
    n = len(labels)
    e = np.empty((n, n), dtype=bool)
    for i, row in enumerate(body):
        for j, cell in enumerate(row):
            tok = cell.strip()
            if tok not in ("0", "1"):
                raise ValidationError(
                    f"{path}: invalid binary value {cell!r} at ({i + 1},{j + 1}); expected 0 or 1"
                )
            e[i, j] = tok == "1"
    for i in range(n):
        for j in range(i + 1, n):
            if e[i, j] != e[j, i]:
                raise ValidationError(
                    f"{path}: matrix is not symmetric at ({labels[i]},{labels[j]}): "
                    f"{int(e[i, j])} vs {int(e[j, i])}"
                )
    if np.any(np.diagonal(e)):
        i = int(np.flatnonzero(np.diagonal(e))[0])
        raise ValidationError(f"{path}: self-loop at {labels[i]}; diagonal must be zero")
    return BinaryNetwork(e, labels)


def _format_matrix(labels, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(labels)
    for row in rows:
        writer.writerow(row)
    return buf.getvalue()


def format_binary_matrix(b: BinaryNetwork) -> str:
    """Render a binary network in matrix CSV form."""
    return _format_matrix(b.labels, b.edges.astype(int).tolist())


def format_weighted_matrix(w: WeightedNetwork) -> str:
    """Render a weighted network in matrix CSV form (full float repr)."""
    return _format_matrix(w.labels, [[repr(v) for v in row] for row in w.weights.tolist()])


def save_binary_matrix(b: BinaryNetwork, path) -> None:
    Path(path).write_text(format_binary_matrix(b))


def save_weighted_matrix(w: WeightedNetwork, path) -> None:
    Path(path).write_text(format_weighted_matrix(w))
