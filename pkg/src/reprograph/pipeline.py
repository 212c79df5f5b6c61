"""End-to-end orchestration: store -> matrices -> scores -> selection.

Aggregation order is fixed: per-run threshold matrices, mean over thresholds,
mean over runs, mean over views (cross-model side only), mean over modes.
All stages are arithmetic means, so the order only determines which
intermediate artifacts exist; every stage's output is kept on the result for
export.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from reprograph.matrices import (
    ReproMatrix,
    average_matrices,
    cross_model_matrix,
    cross_view_matrix,
)
from reprograph.ranking import BiomarkerRanking, RankingPolicy, ranking_for_cell, top_k
from reprograph.scores import (
    SCORE_IDS,
    ScoreResult,
    ScoreTable,
    StrengthProfile,
    build_strength_profile,
    score_accumulated_rank_intersection,
    score_accumulated_weights_correlation,
    score_accumulated_weighted_intersection,
    score_kl,
    score_l2,
    score_rank_correlation,
    score_strength_correlation,
    score_views_average,
)
from reprograph.selection import SelectionOutcome, build_overall, select_model, winner_weights
from reprograph.store import ConfigError, StudyConfig, WeightStore


class PipelineError(ValueError):
    """The store cannot be analyzed as configured (too few axes, ragged runs)."""


@dataclass(frozen=True)
class PipelineOptions:
    signed_ranking: bool = False
    normalize_overall: bool = False
    thresholds: tuple[int, ...] | None = None  # overrides the config thresholds


@dataclass(frozen=True)
class ModeResult:
    """Everything computed for one training mode."""

    mode_id: str
    run_ids: tuple[int, ...]
    per_view_matrices: dict[str, ReproMatrix]
    per_model_matrices: dict[str, ReproMatrix]
    profiles: dict[str, StrengthProfile]
    view_average: ReproMatrix
    rank_correlation: ReproMatrix
    overall: ReproMatrix
    selection: SelectionOutcome
    scores: dict[str, ScoreResult]


@dataclass(frozen=True)
class PipelineResult:
    config: StudyConfig
    options: PipelineOptions
    thresholds: tuple[int, ...]
    modes: dict[str, ModeResult]
    grand_view_average: ReproMatrix
    grand_rank_correlation: ReproMatrix
    grand_overall: ReproMatrix
    grand_selection: SelectionOutcome
    winner_weight_profile: np.ndarray
    cross_mode_consistent: bool
    score_table: ScoreTable = field(repr=False)


def _resolve_thresholds(config: StudyConfig, options: PipelineOptions) -> tuple[int, ...]:
    if options.thresholds is None:
        return config.thresholds
    override = tuple(options.thresholds)
    # reuse the config validation rules for overrides
    StudyConfig(
        n_r=config.n_r,
        model_ids=config.model_ids,
        view_ids=config.view_ids,
        mode_ids=config.mode_ids,
        thresholds=override,
    )
    return override


def _mode_run_ids(store: WeightStore, mode: str) -> tuple[int, ...]:
    """Runs must align across every cell of a mode: matrices pair the same
    randomization across models and views."""
    config = store.config
    reference: tuple[int, ...] | None = None
    for model in config.model_ids:
        for view in config.view_ids:
            runs = store.run_ids_for(model, view, mode)
            if reference is None:
                reference = runs
            elif runs != reference:
                raise PipelineError(
                    f"run grid mismatch in mode {mode!r}: cell (model={model!r}, "
                    f"view={view!r}) has runs {list(runs)}, expected {list(reference)}"
                )
    assert reference is not None
    return reference


def _analyze_mode(
    store: WeightStore,
    mode: str,
    thresholds: tuple[int, ...],
    options: PipelineOptions,
) -> ModeResult:
    config = store.config
    run_ids = _mode_run_ids(store, mode)
    n_runs = len(run_ids)
    policy = RankingPolicy(signed=options.signed_ranking)

    rankings: dict[tuple[str, str], list[BiomarkerRanking]] = {
        (m, v): ranking_for_cell(store, m, v, mode, policy)
        for m in config.model_ids
        for v in config.view_ids
    }

    # cross-model side: per (view, run, threshold) -> mean k -> mean runs -> per view
    per_view: dict[str, ReproMatrix] = {}
    for view in config.view_ids:
        per_run = []
        for r in range(n_runs):
            row = [rankings[(m, view)][r] for m in config.model_ids]
            at_k = [cross_model_matrix(row, config.model_ids, k) for k in thresholds]
            per_run.append(average_matrices(at_k))
        per_view[view] = average_matrices(per_run)

    va_result = score_views_average([per_view[v] for v in config.view_ids])
    view_average = ReproMatrix(
        axis_ids=config.model_ids, values=va_result.pairwise.values, kind="view_average"
    )

    # cross-view side: per (model, threshold) run-averaged matrix feeds the profiles
    per_model: dict[str, ReproMatrix] = {}
    profiles: dict[str, StrengthProfile] = {}
    for model in config.model_ids:
        at_k_avg = []
        for k in thresholds:
            per_run = [
                cross_view_matrix(
                    [rankings[(model, v)][r] for v in config.view_ids], config.view_ids, k
                )
                for r in range(n_runs)
            ]
            at_k_avg.append(average_matrices(per_run))
        per_model[model] = average_matrices(at_k_avg)
        profiles[model] = build_strength_profile(model, at_k_avg)

    profile_list = [profiles[m] for m in config.model_ids]
    rc_result = score_rank_correlation(profile_list)
    rank_correlation = ReproMatrix(
        axis_ids=config.model_ids, values=rc_result.pairwise.values, kind="rank_correlation"
    )

    overall = build_overall(view_average, rank_correlation, normalize=options.normalize_overall)
    selection = select_model(overall)

    accumulated_per_run = []
    for r in range(n_runs):
        sets = {
            m: frozenset().union(
                *(
                    top_k(rankings[(m, v)][r], k).members
                    for v in config.view_ids
                    for k in thresholds
                )
            )
            for m in config.model_ids
        }
        accumulated_per_run.append(sets)

    scores = {
        "v.a": va_result,
        "r.c": rc_result,
        "a.w.i": score_accumulated_weighted_intersection(profile_list),
        "a.w.c": score_accumulated_weights_correlation(profile_list),
        "s.c": score_strength_correlation(profile_list),
        "a.r.i": score_accumulated_rank_intersection(accumulated_per_run, config.model_ids),
        "KL": score_kl(profile_list),
        "L2": score_l2(profile_list),
    }

    return ModeResult(
        mode_id=mode,
        run_ids=run_ids,
        per_view_matrices=per_view,
        per_model_matrices=per_model,
        profiles=profiles,
        view_average=view_average,
        rank_correlation=rank_correlation,
        overall=overall,
        selection=selection,
        scores=scores,
    )


def run_pipeline(store: WeightStore, options: PipelineOptions = PipelineOptions()) -> PipelineResult:
    """Full analysis of a validated store."""
    config = store.config
    if len(config.model_ids) < 2:
        raise PipelineError("need at least 2 models to compare reproducibility")
    if len(config.view_ids) < 2:
        raise PipelineError("need at least 2 views (rank-based scores are undefined otherwise)")
    try:
        thresholds = _resolve_thresholds(config, options)
    except ConfigError as exc:
        raise PipelineError(f"invalid threshold override: {exc}") from None

    modes = {
        mode: _analyze_mode(store, mode, thresholds, options) for mode in config.mode_ids
    }

    mode_list = [modes[m] for m in config.mode_ids]
    grand_view_average = average_matrices([m.view_average for m in mode_list])
    grand_rank_correlation = average_matrices([m.rank_correlation for m in mode_list])
    # the grand matrix is the mean of the per-mode overall matrices, which for
    # the literal (non-normalized) sum equals grand VA + grand RC
    grand_overall = average_matrices([m.overall for m in mode_list])
    grand_selection = select_model(grand_overall)

    winners = {m.selection.winner for m in mode_list}
    table = ScoreTable(
        model_ids=config.model_ids,
        mode_ids=config.mode_ids,
        results={m.mode_id: dict(m.scores) for m in mode_list},
    )

    return PipelineResult(
        config=config,
        options=options,
        thresholds=thresholds,
        modes=modes,
        grand_view_average=grand_view_average,
        grand_rank_correlation=grand_rank_correlation,
        grand_overall=grand_overall,
        grand_selection=grand_selection,
        winner_weight_profile=winner_weights(store, grand_selection.winner),
        cross_mode_consistent=len(winners) == 1,
        score_table=table,
    )


def assert_score_table_shape(result: PipelineResult) -> None:
    """Sanity check: exactly 8 x n_m x n_mode scalars in the table."""
    count = sum(
        len(result.score_table.results[mode][sid].scalars)
        for mode in result.config.mode_ids
        for sid in SCORE_IDS
    )
    expected = len(SCORE_IDS) * len(result.config.model_ids) * len(result.config.mode_ids)
    if count != expected:
        raise AssertionError(f"score table has {count} scalars, expected {expected}")
