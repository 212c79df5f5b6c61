"""Shared helpers for building small hand-crafted studies."""

from __future__ import annotations

import pytest

from reprograph.store import StudyConfig, WeightRecord, WeightStore


def make_config(
    n_r: int = 6,
    models: tuple[str, ...] = ("m1", "m2"),
    views: tuple[str, ...] = ("v1", "v2"),
    modes: tuple[str, ...] = ("cv3",),
    thresholds: tuple[int, ...] = (2,),
) -> StudyConfig:
    return StudyConfig(
        n_r=n_r, model_ids=models, view_ids=views, mode_ids=modes, thresholds=thresholds
    )


def store_from_weights(
    config: StudyConfig, weights: dict[tuple[str, str, str, int], list[float]]
) -> WeightStore:
    records = [
        WeightRecord(m, v, d, r, tuple(float(w) for w in vec))
        for (m, v, d, r), vec in weights.items()
    ]
    return WeightStore.from_records(config, records)


def weights_with_top(prefix: list[int], n_r: int) -> list[float]:
    """A weight vector whose ranking starts exactly with ``prefix``.

    Prefix indices get strictly decreasing magnitudes above 1; the rest get
    strictly decreasing magnitudes below 1 in index order, so the full
    ranking is deterministic.
    """
    vec = [0.0] * n_r
    for pos, idx in enumerate(prefix):
        vec[idx] = float(len(prefix) - pos + 1)
    fill = 0.9
    for idx in range(n_r):
        if idx not in prefix:
            vec[idx] = fill
            fill *= 0.9
    return vec


@pytest.fixture
def tiny_config() -> StudyConfig:
    return make_config()
