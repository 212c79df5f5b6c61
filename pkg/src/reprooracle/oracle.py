"""Loop-everything reference pipeline. See the package docstring."""

from __future__ import annotations

import math
from typing import Sequence

from reprograph.store import WeightStore

Matrix = list[list[float]]

KL_EPS = 1e-12


def oracle_rank(weights: Sequence[float], signed: bool = False) -> list[int]:
    """Indices sorted by descending |weight| (or weight), ties by index."""
    key = (lambda i: (-weights[i], i)) if signed else (lambda i: (-abs(weights[i]), i))
    return sorted(range(len(weights)), key=key)


def oracle_top_k(order: Sequence[int], k: int) -> set[int]:
    return set(order[:k])


def oracle_overlap(a: set[int], b: set[int], k: int) -> float:
    count = 0
    for member in a:
        if member in b:
            count += 1
    return count / k


def _mean(values: Sequence[float]) -> float:
    return sum(values) / len(values)


def _mean_matrices(ms: Sequence[Matrix]) -> Matrix:
    n = len(ms[0])
    return [
        [_mean([m[i][j] for m in ms]) for j in range(n)]
        for i in range(n)
    ]


def _strengths(m: Matrix) -> list[float]:
    n = len(m)
    return [sum(m[i][j] for j in range(n) if j != i) for i in range(n)]


def _spearman(a: Sequence[int], b: Sequence[int]) -> float:
    n = len(a)
    d2 = 0
    for x, y in zip(a, b):
        d2 += (x - y) ** 2
    return 1.0 - 6.0 * d2 / (n * (n * n - 1))


def _pearson_or_zero(x: Sequence[float], y: Sequence[float]) -> float:
    n = len(x)
    mx = sum(x) / n
    my = sum(y) / n
    sxx = sum((v - mx) ** 2 for v in x)
    syy = sum((v - my) ** 2 for v in y)
    if sxx == 0.0 or syy == 0.0:
        return 0.0
    sxy = sum((a - mx) * (b - my) for a, b in zip(x, y))
    return sxy / math.sqrt(sxx * syy)


def _minmax(vec: Sequence[float]) -> list[float]:
    lo = min(vec)
    hi = max(vec)
    if hi == lo:
        return [0.0] * len(vec)
    return [(v - lo) / (hi - lo) for v in vec]


def _minmax_offdiag(m: Matrix) -> Matrix:
    n = len(m)
    off = [m[i][j] for i in range(n) for j in range(n) if i != j]
    lo, hi = min(off), max(off)
    out = [[1.0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            if i != j:
                out[i][j] = 0.0 if hi == lo else (m[i][j] - lo) / (hi - lo)
    return out


def oracle_pipeline(
    store: WeightStore,
    signed: bool = False,
    normalize_overall: bool = False,
    thresholds: Sequence[int] | None = None,
) -> dict:
    """Recompute every report field and score the slow way.

    Returns plain lists/dicts keyed like the fast pipeline's result so tests
    can compare entry by entry.
    """
    config = store.config
    models = list(config.model_ids)
    views = list(config.view_ids)
    ks = list(thresholds) if thresholds is not None else list(config.thresholds)
    n_m, n_v, n_k = len(models), len(views), len(ks)

    result: dict = {"modes": {}, "grand": {}}
    mode_overalls: list[Matrix] = []
    mode_vas: list[Matrix] = []
    mode_rcs: list[Matrix] = []
    winners: list[str] = []

    for mode in config.mode_ids:
        runs = [rec.run_id for rec in store.records_for(models[0], views[0], mode)]
        n_runs = len(runs)
        # orders[(model, view)][run index] -> ranking
        orders: dict[tuple[str, str], list[list[int]]] = {}
        for m in models:
            for v in views:
                recs = store.records_for(m, v, mode)
                orders[(m, v)] = [oracle_rank(r.weights, signed) for r in recs]

        # cross-model side
        per_view: list[Matrix] = []
        for v in views:
            run_mats: list[Matrix] = []
            for r in range(n_runs):
                k_mats: list[Matrix] = []
                for k in ks:
                    sets = [oracle_top_k(orders[(m, v)][r], k) for m in models]
                    k_mats.append(
                        [
                            [oracle_overlap(sets[i], sets[j], k) for j in range(n_m)]
                            for i in range(n_m)
                        ]
                    )
                run_mats.append(_mean_matrices(k_mats))
            per_view.append(_mean_matrices(run_mats))
        va = _mean_matrices(per_view)

        # cross-view side: run-averaged matrix per (model, threshold)
        per_threshold_strengths: dict[str, list[list[float]]] = {}
        per_model_matrix: dict[str, Matrix] = {}
        for m in models:
            k_mats_avg: list[Matrix] = []
            for k in ks:
                run_mats = []
                for r in range(n_runs):
                    sets = [oracle_top_k(orders[(m, v)][r], k) for v in views]
                    run_mats.append(
                        [
                            [oracle_overlap(sets[i], sets[j], k) for j in range(n_v)]
                            for i in range(n_v)
                        ]
                    )
                k_mats_avg.append(_mean_matrices(run_mats))
            per_threshold_strengths[m] = [_strengths(km) for km in k_mats_avg]
            per_model_matrix[m] = _mean_matrices(k_mats_avg)

        mean_strengths = {
            m: [_mean([per_threshold_strengths[m][t][v] for t in range(n_k)]) for v in range(n_v)]
            for m in models
        }
        accumulated = {
            m: [per_threshold_strengths[m][t][v] for t in range(n_k) for v in range(n_v)]
            for m in models
        }
        view_ranks: dict[str, list[int]] = {}
        for m in models:
            order = sorted(range(n_v), key=lambda v: (-mean_strengths[m][v], v))
            ranks = [0] * n_v
            for pos, v in enumerate(order, start=1):
                ranks[v] = pos
            view_ranks[m] = ranks

        rc = [
            [
                1.0 if i == j else _spearman(view_ranks[models[i]], view_ranks[models[j]])
                for j in range(n_m)
            ]
            for i in range(n_m)
        ]

        if normalize_overall:
            va_n, rc_n = _minmax_offdiag(va), _minmax_offdiag(rc)
        else:
            va_n, rc_n = va, rc
        overall = [[va_n[i][j] + rc_n[i][j] for j in range(n_m)] for i in range(n_m)]
        strengths = _strengths(overall)
        best = 0
        for i in range(1, n_m):
            if strengths[i] > strengths[best]:
                best = i
        tie = sum(1 for s in strengths if s == strengths[best]) > 1

        # the eight scores
        def profile_pairwise(fn, diag: float) -> Matrix:
            return [
                [
                    diag if i == j else fn(models[i], models[j])
                    for j in range(n_m)
                ]
                for i in range(n_m)
            ]

        sc = profile_pairwise(
            lambda a, b: _pearson_or_zero(mean_strengths[a], mean_strengths[b]), 1.0
        )
        awc = profile_pairwise(
            lambda a, b: _pearson_or_zero(accumulated[a], accumulated[b]), 1.0
        )

        def awi_pair(a: str, b: str) -> float:
            sa = _minmax(accumulated[a])
            sb = _minmax(accumulated[b])
            total = 0.0
            for t in range(n_k):
                for v in range(n_v):
                    strength_factor = 1.0 - abs(sa[t * n_v + v] - sb[t * n_v + v])
                    rank_factor = 1.0 - abs(view_ranks[a][v] - view_ranks[b][v]) / (n_v - 1)
                    total += strength_factor * rank_factor
            return total / (n_k * n_v)

        awi = profile_pairwise(awi_pair, 1.0)

        # a.r.i: per-run Jaccard of accumulated top sets, then run-averaged
        ari_runs: list[Matrix] = []
        for r in range(n_runs):
            acc_sets = {}
            for m in models:
                union: set[int] = set()
                for v in views:
                    for k in ks:
                        union |= oracle_top_k(orders[(m, v)][r], k)
                acc_sets[m] = union
            mat = []
            for i in range(n_m):
                row = []
                for j in range(n_m):
                    a, b = acc_sets[models[i]], acc_sets[models[j]]
                    row.append(len(a & b) / len(a | b))
                mat.append(row)
            ari_runs.append(mat)
        ari = _mean_matrices(ari_runs)

        dists = {}
        for m in models:
            shifted = [s + KL_EPS for s in mean_strengths[m]]
            total = sum(shifted)
            dists[m] = [s / total for s in shifted]

        def kl_pair(a: str, b: str) -> float:
            p, q = dists[a], dists[b]
            forward = sum(pi * math.log(pi / qi) for pi, qi in zip(p, q))
            backward = sum(qi * math.log(qi / pi) for pi, qi in zip(p, q))
            # clamped at 0, matching the definition (true value is non-negative)
            return max(0.0, 0.5 * (forward + backward))

        kl = profile_pairwise(kl_pair, 0.0)

        l2 = profile_pairwise(
            lambda a, b: math.sqrt(
                sum((x - y) ** 2 for x, y in zip(accumulated[a], accumulated[b]))
            ),
            0.0,
        )

        def offdiag_means(m: Matrix) -> dict[str, float]:
            return {
                models[i]: _mean([m[i][j] for j in range(n_m) if j != i])
                for i in range(n_m)
            }

        score_matrices = {
            "v.a": va, "r.c": rc, "a.w.i": awi, "a.w.c": awc,
            "s.c": sc, "a.r.i": ari, "KL": kl, "L2": l2,
        }
        result["modes"][mode] = {
            "view_average": va,
            "rank_correlation": rc,
            "overall": overall,
            "strengths": {m: s for m, s in zip(models, strengths)},
            "winner": models[best],
            "tie": tie,
            "per_view": {v: per_view[i] for i, v in enumerate(views)},
            "per_model": per_model_matrix,
            "scores": {
                sid: {"pairwise": mat, "scalars": offdiag_means(mat)}
                for sid, mat in score_matrices.items()
            },
        }
        mode_overalls.append(overall)
        mode_vas.append(va)
        mode_rcs.append(rc)
        winners.append(models[best])

    grand_overall = _mean_matrices(mode_overalls)
    grand_strengths = _strengths(grand_overall)
    best = 0
    for i in range(1, n_m):
        if grand_strengths[i] > grand_strengths[best]:
            best = i
    grand_winner = models[best]

    profile = None
    weight_rows = [
        [abs(w) for w in rec.weights] for rec in store if rec.model_id == grand_winner
    ]
    profile = [
        _mean([row[i] for row in weight_rows]) for i in range(config.n_r)
    ]

    result["grand"] = {
        "view_average": _mean_matrices(mode_vas),
        "rank_correlation": _mean_matrices(mode_rcs),
        "overall": grand_overall,
        "strengths": {m: s for m, s in zip(models, grand_strengths)},
        "winner": grand_winner,
        "tie": sum(1 for s in grand_strengths if s == grand_strengths[best]) > 1,
    }
    result["cross_mode_consistent"] = len(set(winners)) == 1
    result["winner_weight_profile"] = profile
    return result
