"""The eight per-model reproducibility scores.

Every score reduces an n_m x n_m pairwise matrix to one scalar per model by
taking the mean of the model's off-diagonal row, so each table cell stays
traceable to the matrix behind it. KL and L2 measure dissimilarity (lower is
better); all other scores measure similarity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from reprograph.matrices import ReproMatrix, average_matrices

SCORE_IDS = ("v.a", "r.c", "a.w.i", "a.w.c", "s.c", "a.r.i", "KL", "L2")
LOWER_BETTER = frozenset({"KL", "L2"})

KL_EPS = 1e-12


@dataclass(frozen=True)
class StrengthProfile:
    """Node-strength summaries of one model's cross-view matrices.

    ``per_threshold_strengths`` has one row per threshold (run-averaged
    matrices), one column per view. The accumulated vector is the
    threshold-major concatenation of those rows; the mean vector averages
    over thresholds. ``view_ranks`` ranks the views by mean strength,
    1 = strongest, ties broken by config view order.
    """

    model_id: str
    view_ids: tuple[str, ...]
    per_threshold_strengths: np.ndarray
    mean_strengths: np.ndarray
    accumulated_strengths: np.ndarray
    view_ranks: tuple[int, ...]


def build_strength_profile(
    model_id: str, per_threshold_matrices: Sequence[ReproMatrix]
) -> StrengthProfile:
    """Derive a profile from one run-averaged cross-view matrix per threshold."""
    from reprograph.matrices import node_strength

    if not per_threshold_matrices:
        raise ValueError("need at least one per-threshold matrix")
    view_ids = per_threshold_matrices[0].axis_ids
    rows = []
    for m in per_threshold_matrices:
        if m.axis_ids != view_ids:
            raise ValueError(f"axis mismatch across thresholds: {m.axis_ids} != {view_ids}")
        rows.append(node_strength(m))
    per_threshold = np.stack(rows)
    mean_strengths = per_threshold.mean(axis=0)
    accumulated = per_threshold.reshape(-1)
    n_v = len(view_ids)
    order = sorted(range(n_v), key=lambda v: (-mean_strengths[v], v))
    ranks = [0] * n_v
    for position, view_idx in enumerate(order, start=1):
        ranks[view_idx] = position
    return StrengthProfile(
        model_id=model_id,
        view_ids=view_ids,
        per_threshold_strengths=per_threshold,
        mean_strengths=mean_strengths,
        accumulated_strengths=accumulated,
        view_ranks=tuple(ranks),
    )


@dataclass(frozen=True)
class ScoreResult:
    """One score over the model pool: the pairwise matrix and its row means."""

    score_id: str
    polarity: str  # "higher_better" | "lower_better"
    pairwise: ReproMatrix
    scalars: dict[str, float]


def _mean_offdiag_rows(values: np.ndarray) -> np.ndarray:
    n = values.shape[0]
    if n < 2:
        raise ValueError("pairwise scores need at least 2 models")
    offdiag = values.copy()
    np.fill_diagonal(offdiag, 0.0)
    return offdiag.sum(axis=1) / (n - 1)


def _finish(score_id: str, model_ids: Sequence[str], values: np.ndarray) -> ScoreResult:
    matrix = ReproMatrix(axis_ids=tuple(model_ids), values=values, kind=f"score:{score_id}")
    scalars = {
        m: float(s) for m, s in zip(model_ids, _mean_offdiag_rows(matrix.values))
    }
    polarity = "lower_better" if score_id in LOWER_BETTER else "higher_better"
    return ScoreResult(score_id=score_id, polarity=polarity, pairwise=matrix, scalars=scalars)


def spearman_from_ranks(a: Sequence[int], b: Sequence[int]) -> float:
    """Spearman coefficient of two tie-free rank vectors (closed formula)."""
    n = len(a)
    if n < 2 or len(b) != n:
        raise ValueError("rank vectors must share a length >= 2")
    d2 = sum((x - y) ** 2 for x, y in zip(a, b))
    return 1.0 - 6.0 * d2 / (n * (n * n - 1))


def pearson(x: np.ndarray, y: np.ndarray) -> float | None:
    """Pearson coefficient; None when either side has zero variance."""
    a = np.asarray(x, dtype=np.float64) - np.mean(x)
    b = np.asarray(y, dtype=np.float64) - np.mean(y)
    denom_a = float(np.sum(a * a))
    denom_b = float(np.sum(b * b))
    if denom_a == 0.0 or denom_b == 0.0:
        return None
    return float(np.sum(a * b) / math.sqrt(denom_a * denom_b))


def score_views_average(view_matrices: Sequence[ReproMatrix]) -> ScoreResult:
    """v.a: elementwise mean of the per-view cross-model matrices."""
    merged = average_matrices(list(view_matrices), kind="view_average")
    return _finish("v.a", merged.axis_ids, merged.values)


def _profile_pairwise(
    profiles: Sequence[StrengthProfile],
    fill,
    diag: float,
) -> np.ndarray:
    n = len(profiles)
    values = np.empty((n, n), dtype=np.float64)
    for i in range(n):
        values[i, i] = diag
        for j in range(i + 1, n):
            values[i, j] = values[j, i] = fill(profiles[i], profiles[j])
    return values


def score_rank_correlation(profiles: Sequence[StrengthProfile]) -> ScoreResult:
    """r.c: Spearman correlation of the models' view-rank vectors."""
    if len(profiles[0].view_ids) < 2:
        raise ValueError("rank correlation needs at least 2 views")
    values = _profile_pairwise(
        profiles,
        lambda p, q: spearman_from_ranks(p.view_ranks, q.view_ranks),
        diag=1.0,
    )
    return _finish("r.c", [p.model_id for p in profiles], values)


def _pearson_or_zero(x: np.ndarray, y: np.ndarray) -> float:
    # zero-variance inputs score 0 rather than NaN, keeping matrices finite
    r = pearson(x, y)
    return 0.0 if r is None else r


def score_strength_correlation(profiles: Sequence[StrengthProfile]) -> ScoreResult:
    """s.c: Pearson correlation of threshold-averaged view strengths."""
    values = _profile_pairwise(
        profiles,
        lambda p, q: _pearson_or_zero(p.mean_strengths, q.mean_strengths),
        diag=1.0,
    )
    return _finish("s.c", [p.model_id for p in profiles], values)


def score_accumulated_weights_correlation(profiles: Sequence[StrengthProfile]) -> ScoreResult:
    """a.w.c: Pearson correlation of the accumulated strength vectors."""
    values = _profile_pairwise(
        profiles,
        lambda p, q: _pearson_or_zero(p.accumulated_strengths, q.accumulated_strengths),
        diag=1.0,
    )
    return _finish("a.w.c", [p.model_id for p in profiles], values)


def _minmax_unit(vec: np.ndarray) -> np.ndarray:
    lo, hi = float(vec.min()), float(vec.max())
    if hi == lo:
        return np.zeros_like(vec)
    return (vec - lo) / (hi - lo)


def _weighted_intersection(p: StrengthProfile, q: StrengthProfile) -> float:
    n_v = len(p.view_ids)
    s_p = _minmax_unit(p.accumulated_strengths).reshape(p.per_threshold_strengths.shape)
    s_q = _minmax_unit(q.accumulated_strengths).reshape(q.per_threshold_strengths.shape)
    total = 0.0
    for t in range(s_p.shape[0]):
        for v in range(n_v):
            strength_factor = 1.0 - abs(float(s_p[t, v]) - float(s_q[t, v]))
            rank_factor = 1.0 - abs(p.view_ranks[v] - q.view_ranks[v]) / (n_v - 1)
            total += strength_factor * rank_factor
    return total / s_p.size


def score_accumulated_weighted_intersection(profiles: Sequence[StrengthProfile]) -> ScoreResult:
    """a.w.i: strength similarity gated by view-rank agreement, in [0, 1].

    Per-model accumulated strengths are min-max normalized first; the rank
    factor multiplies the strength factor so close strengths with different
    ranks are penalized.
    """
    if len(profiles[0].view_ids) < 2:
        raise ValueError("weighted intersection needs at least 2 views")
    values = _profile_pairwise(profiles, _weighted_intersection, diag=1.0)
    return _finish("a.w.i", [p.model_id for p in profiles], values)


def jaccard(a: frozenset[int], b: frozenset[int]) -> float:
    union = a | b
    if not union:
        raise ValueError("Jaccard of two empty sets is undefined")
    return len(a & b) / len(union)


def score_accumulated_rank_intersection(
    accumulated_sets_per_run: Sequence[Mapping[str, frozenset[int]]],
    model_ids: Sequence[str],
) -> ScoreResult:
    """a.r.i: Jaccard of the models' threshold/view-accumulated biomarker sets.

    One pairwise matrix per run, then matrices averaged across runs.
    """
    if not accumulated_sets_per_run:
        raise ValueError("need at least one run of accumulated sets")
    per_run = []
    n = len(model_ids)
    for sets in accumulated_sets_per_run:
        values = np.empty((n, n), dtype=np.float64)
        for i, mi in enumerate(model_ids):
            for j in range(i, n):
                values[i, j] = values[j, i] = jaccard(sets[mi], sets[model_ids[j]])
        per_run.append(ReproMatrix(axis_ids=tuple(model_ids), values=values, kind="score:a.r.i"))
    merged = average_matrices(per_run)
    return _finish("a.r.i", model_ids, merged.values)


def strengths_to_distribution(strengths: np.ndarray, eps: float = KL_EPS) -> np.ndarray:
    """Shift-and-normalize strengths into a strictly positive probability vector."""
    shifted = np.asarray(strengths, dtype=np.float64) + eps
    return shifted / shifted.sum()


def symmetrized_kl(p: np.ndarray, q: np.ndarray) -> float:
    """(KL(p||q) + KL(q||p)) / 2 in nats; symmetric and zero iff p == q.

    Clamped at 0: the true value is non-negative, but cancellation between
    the log terms can round a near-zero result slightly negative.
    """
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    forward = float(np.sum(p * np.log(p / q)))
    backward = float(np.sum(q * np.log(q / p)))
    return max(0.0, 0.5 * (forward + backward))


def score_kl(profiles: Sequence[StrengthProfile], eps: float = KL_EPS) -> ScoreResult:
    """KL: symmetrized divergence between strength distributions (lower better)."""
    dists = [strengths_to_distribution(p.mean_strengths, eps) for p in profiles]
    n = len(profiles)
    values = np.zeros((n, n), dtype=np.float64)
    for i in range(n):
        for j in range(i + 1, n):
            values[i, j] = values[j, i] = symmetrized_kl(dists[i], dists[j])
    return _finish("KL", [p.model_id for p in profiles], values)


def score_l2(profiles: Sequence[StrengthProfile]) -> ScoreResult:
    """L2: Euclidean distance between accumulated strength vectors (lower better)."""
    values = _profile_pairwise(
        profiles,
        lambda p, q: float(
            np.linalg.norm(p.accumulated_strengths - q.accumulated_strengths)
        ),
        diag=0.0,
    )
    return _finish("L2", [p.model_id for p in profiles], values)


# ---------------------------------------------------------------------------
# score table container and exports


@dataclass(frozen=True)
class ScoreTable:
    """All eight scores for every model and mode (the published-table layout)."""

    model_ids: tuple[str, ...]
    mode_ids: tuple[str, ...]
    results: dict[str, dict[str, ScoreResult]]  # mode -> score_id -> result

    def scalar(self, mode: str, score_id: str, model: str) -> float:
        return self.results[mode][score_id].scalars[model]


def score_table_to_csv(table: ScoreTable) -> str:
    from reprograph.matrices import format_float

    lines = ["model,mode," + ",".join(SCORE_IDS)]
    for model in table.model_ids:
        for mode in table.mode_ids:
            cells = ",".join(
                format_float(table.scalar(mode, sid, model)) for sid in SCORE_IDS
            )
            lines.append(f"{model},{mode},{cells}")
    return "\n".join(lines) + "\n"


def score_table_to_pairwise_dict(table: ScoreTable) -> dict:
    """JSON-ready dump of every pairwise matrix behind the table."""
    out: dict = {"models": list(table.model_ids), "scores": {}}
    for mode in table.mode_ids:
        for sid in SCORE_IDS:
            result = table.results[mode][sid]
            out["scores"].setdefault(sid, {})[mode] = {
                "polarity": result.polarity,
                "pairwise": [[float(v) for v in row] for row in result.pairwise.values],
                "scalars": {m: result.scalars[m] for m in table.model_ids},
            }
    return out
