"""Biomarker rankings and top-k sets derived from weight vectors.

Ranking is by descending absolute weight (signed ranking available as a
variant), with ties broken by ascending biomarker index so the order is a
deterministic total order on every platform.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from reprograph.store import WeightStore


@dataclass(frozen=True)
class RankingPolicy:
    """How weight vectors become rankings. ``signed=True`` ranks by the raw
    weight value instead of its magnitude."""

    signed: bool = False


@dataclass(frozen=True)
class BiomarkerRanking:
    """Permutation of biomarker indices, strongest first, with the sort keys."""

    order: tuple[int, ...]
    magnitudes: tuple[float, ...]

    def __len__(self) -> int:
        return len(self.order)


@dataclass(frozen=True)
class TopKSet:
    """The k-prefix of a ranking, as an unordered index set."""

    k: int
    members: frozenset[int]


def rank_biomarkers(weights: Sequence[float], signed: bool = False) -> BiomarkerRanking:
    """Sort biomarker indices by descending |weight| (or raw weight if signed).

    Equal keys keep ascending index order. Output is invariant under
    multiplication of the weights by any positive scalar.
    """
    arr = np.asarray(weights, dtype=np.float64)
    if arr.ndim != 1:
        raise ValueError(f"weights must be a 1-D vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("weights contain a non-finite entry")
    key = arr if signed else np.abs(arr)
    # stable sort on the negated key: descending value, ascending index on ties
    order = np.argsort(-key, kind="stable")
    return BiomarkerRanking(
        order=tuple(int(i) for i in order),
        magnitudes=tuple(float(key[i]) for i in order),
    )


def top_k(ranking: BiomarkerRanking, k: int) -> TopKSet:
    """First k entries of the ranking as a set."""
    if not isinstance(k, int) or isinstance(k, bool) or not 1 <= k <= len(ranking):
        raise ValueError(f"k must satisfy 1 <= k <= {len(ranking)}, got {k!r}")
    return TopKSet(k=k, members=frozenset(ranking.order[:k]))


def ranking_for_cell(
    store: WeightStore,
    model: str,
    view: str,
    mode: str,
    policy: RankingPolicy = RankingPolicy(),
) -> list[BiomarkerRanking]:
    """One ranking per run of the cell, in run order.

    Runs are never averaged at the weight level: averaging signed weights
    across runs can cancel and distort rankings, so aggregation happens on
    the downstream matrices instead.
    """
    return [
        rank_biomarkers(rec.weights, signed=policy.signed)
        for rec in store.records_for(model, view, mode)
    ]
