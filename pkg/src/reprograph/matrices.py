"""Pairwise reproducibility matrices over models or views.

The building block is the overlap ratio |A ∩ B| / k between two top-k sets.
Cross-model matrices compare models on one view; cross-view matrices compare
views for one model. Averages over thresholds, runs, views and modes are
plain elementwise means, so they preserve symmetry and value range.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from reprograph.ranking import BiomarkerRanking, TopKSet, top_k

# matrix kinds with unit diagonal and entries in [0, 1]
OVERLAP_KINDS = frozenset({"cross_model", "cross_view", "view_average"})


@dataclass(frozen=True, eq=False)
class ReproMatrix:
    """Square matrix of pairwise reproducibility values with labeled axes."""

    axis_ids: tuple[str, ...]
    values: np.ndarray
    kind: str

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.float64)
        n = len(self.axis_ids)
        if vals.shape != (n, n):
            raise ValueError(f"matrix shape {vals.shape} does not match {n} axis ids")
        object.__setattr__(self, "values", vals)

    @property
    def n(self) -> int:
        return len(self.axis_ids)

    def entry(self, a: str, b: str) -> float:
        i, j = self.axis_ids.index(a), self.axis_ids.index(b)
        return float(self.values[i, j])


def overlap_ratio(a: TopKSet, b: TopKSet) -> float:
    """|A ∩ B| / k for two top-k sets with the same k. Symmetric."""
    if a.k != b.k:
        raise ValueError(f"mismatched k: {a.k} != {b.k}")
    return len(a.members & b.members) / a.k


def _overlap_matrix(
    rankings: Sequence[BiomarkerRanking], axis_ids: Sequence[str], k: int, kind: str
) -> ReproMatrix:
    if len(rankings) != len(axis_ids):
        raise ValueError(f"got {len(rankings)} rankings for {len(axis_ids)} axis ids")
    sets = [top_k(r, k) for r in rankings]
    n = len(sets)
    values = np.empty((n, n), dtype=np.float64)
    # diagonal computed, not special-cased: self-overlap must come out as 1
    for i in range(n):
        for j in range(i, n):
            values[i, j] = values[j, i] = overlap_ratio(sets[i], sets[j])
    return ReproMatrix(axis_ids=tuple(axis_ids), values=values, kind=kind)


def cross_model_matrix(
    rankings: Sequence[BiomarkerRanking], model_ids: Sequence[str], k: int
) -> ReproMatrix:
    """Model-by-model top-k overlap for one (view, mode, run) slice."""
    return _overlap_matrix(rankings, model_ids, k, kind="cross_model")


def cross_view_matrix(
    rankings: Sequence[BiomarkerRanking], view_ids: Sequence[str], k: int
) -> ReproMatrix:
    """View-by-view top-k overlap for one (model, mode, run) slice."""
    return _overlap_matrix(rankings, view_ids, k, kind="cross_view")


def average_matrices(matrices: Sequence[ReproMatrix], kind: str | None = None) -> ReproMatrix:
    """Elementwise arithmetic mean of same-axis matrices.

    Used for every aggregation stage (thresholds, runs, views, modes);
    means commute so the documented order only matters for which
    intermediates exist.
    """
    if not matrices:
        raise ValueError("cannot average an empty list of matrices")
    first = matrices[0]
    for m in matrices[1:]:
        if m.axis_ids != first.axis_ids:
            raise ValueError(f"axis mismatch: {m.axis_ids} != {first.axis_ids}")
    stacked = np.stack([m.values for m in matrices])
    return ReproMatrix(
        axis_ids=first.axis_ids,
        values=stacked.mean(axis=0),
        kind=kind if kind is not None else first.kind,
    )


def node_strength(matrix: ReproMatrix) -> np.ndarray:
    """Off-diagonal row sums: the magnitude of each node's connections.

    The diagonal is zeroed before summing rather than subtracted afterwards:
    subtraction reintroduces rounding that can break exact ties in strength,
    and rank vectors downstream are sensitive to those ties.
    """
    vals = matrix.values.copy()
    np.fill_diagonal(vals, 0.0)
    return vals.sum(axis=1)


def format_float(x: float) -> str:
    """Full-precision text form (17 significant digits) used in every export."""
    return format(float(x), ".17g")


def matrix_to_csv(matrix: ReproMatrix) -> str:
    """CSV with a header row and leading label column, full precision."""
    lines = ["," + ",".join(matrix.axis_ids)]
    for i, row_id in enumerate(matrix.axis_ids):
        cells = ",".join(format_float(v) for v in matrix.values[i])
        lines.append(f"{row_id},{cells}")
    return "\n".join(lines) + "\n"


def matrix_from_csv(text: str, kind: str = "imported") -> ReproMatrix:
    """Parse a matrix previously written by :func:`matrix_to_csv`."""
    rows = [line.split(",") for line in text.strip().splitlines()]
    if len(rows) < 2:
        raise ValueError("matrix CSV must have a header and at least one row")
    axis_ids = tuple(rows[0][1:])
    n = len(axis_ids)
    values = np.empty((n, n), dtype=np.float64)
    if len(rows) != n + 1:
        raise ValueError(f"matrix CSV has {len(rows) - 1} rows for {n} axis ids")
    for i, row in enumerate(rows[1:]):
        if row[0] != axis_ids[i]:
            raise ValueError(f"row label {row[0]!r} does not match header {axis_ids[i]!r}")
        if len(row) != n + 1:
            raise ValueError(f"row {row[0]!r} has {len(row) - 1} cells, expected {n}")
        values[i] = [float(c) for c in row[1:]]
    return ReproMatrix(axis_ids=axis_ids, values=values, kind=kind)
