"""Overall reproducibility matrix, node-strength ranking and model selection."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from reprograph.matrices import ReproMatrix, node_strength
from reprograph.store import WeightStore


@dataclass(frozen=True)
class SelectionOutcome:
    """Winner of one overall matrix plus the strengths that decided it."""

    winner: str
    strengths: dict[str, float]
    tie: bool


def _minmax_offdiag(matrix: ReproMatrix) -> ReproMatrix:
    """Min-max rescale off-diagonal entries to [0, 1]; diagonal pinned to 1.

    A constant off-diagonal maps to zeros (documented degenerate rule).
    """
    n = matrix.n
    vals = matrix.values.copy()
    mask = ~np.eye(n, dtype=bool)
    off = vals[mask]
    lo, hi = float(off.min()), float(off.max())
    if hi == lo:
        vals[mask] = 0.0
    else:
        vals[mask] = (off - lo) / (hi - lo)
    np.fill_diagonal(vals, 1.0)
    return ReproMatrix(axis_ids=matrix.axis_ids, values=vals, kind=matrix.kind)


def build_overall(
    view_average: ReproMatrix,
    rank_correlation: ReproMatrix,
    normalize: bool = False,
) -> ReproMatrix:
    """Elementwise sum of the view-average and rank-correlation matrices.

    With ``normalize=True`` each matrix is min-max rescaled over its
    off-diagonal entries before summing (off by default: the literal sum is
    the canonical behavior).
    """
    if view_average.axis_ids != rank_correlation.axis_ids:
        raise ValueError(
            f"axis mismatch: {view_average.axis_ids} != {rank_correlation.axis_ids}"
        )
    a, b = view_average, rank_correlation
    if normalize:
        a, b = _minmax_offdiag(a), _minmax_offdiag(b)
    return ReproMatrix(axis_ids=a.axis_ids, values=a.values + b.values, kind="overall")


def select_model(overall: ReproMatrix) -> SelectionOutcome:
    """Pick the node with the highest strength in the reproducibility graph.

    The diagonal is excluded from strength so the unit/2.0 self-entries never
    bias selection. Exact strength ties go to the earliest model in axis
    order and are flagged.
    """
    strengths = node_strength(overall)
    best = int(np.argmax(strengths))
    tie = bool(np.sum(strengths == strengths[best]) > 1)
    return SelectionOutcome(
        winner=overall.axis_ids[best],
        strengths={m: float(s) for m, s in zip(overall.axis_ids, strengths)},
        tie=tie,
    )


def winner_weights(store: WeightStore, winner: str) -> np.ndarray:
    """Mean absolute weight per biomarker over every record of the winner.

    Absolute value is applied before averaging so sign flips between runs
    cannot cancel.
    """
    vectors = [
        np.abs(np.asarray(rec.weights, dtype=np.float64))
        for rec in store
        if rec.model_id == winner
    ]
    if not vectors:
        raise ValueError(f"no records for model {winner!r}")
    return np.stack(vectors).mean(axis=0)
