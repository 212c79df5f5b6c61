"""Seeded synthetic studies for verification and benchmarking.

Real studies come from restricted clinical data, so verification runs on
generated ones. Generation uses numpy's PCG64 generator: the algorithm is
named and documented, so a seed reproduces the same study bytes on every
platform. Draw order is fixed (mode-major, then view, then model, then run)
and must not be reordered.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from reprograph.store import StudyConfig, WeightRecord, WeightStore

SCENARIOS = ("random_independent", "planted_consensus", "identical_models", "scaled_copies")


@dataclass(frozen=True)
class SyntheticStudySpec:
    """Fully determines one synthetic study given a seed."""

    seed: int
    n_r: int
    n_models: int
    n_views: int
    thresholds: tuple[int, ...]
    scenario: str
    runs_per_cell: int = 1
    mode_ids: tuple[str, ...] = ("default",)
    planted_index: int = 0
    planted_frac: float = 0.6

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise ValueError(f"unknown scenario {self.scenario!r}, expected one of {SCENARIOS}")
        if self.n_models < 2:
            raise ValueError("need at least 2 models")
        if self.n_views < 1:
            raise ValueError("need at least 1 view")
        if self.runs_per_cell < 1:
            raise ValueError("runs_per_cell must be positive")
        if not 0 <= self.planted_index < self.n_models:
            raise ValueError(f"planted_index {self.planted_index} outside model range")
        if not 0.0 < self.planted_frac <= 1.0:
            raise ValueError("planted_frac must be in (0, 1]")

    def config(self) -> StudyConfig:
        return StudyConfig(
            n_r=self.n_r,
            model_ids=tuple(f"m{i + 1}" for i in range(self.n_models)),
            view_ids=tuple(f"v{i + 1}" for i in range(self.n_views)),
            mode_ids=self.mode_ids,
            thresholds=self.thresholds,
        )


def planted_design(spec: SyntheticStudySpec) -> dict[str, object]:
    """Deterministic set design behind the planted_consensus scenario.

    The planted model uses one core set of size K = max(thresholds) on every
    view. Each other model shares ``round(planted_frac * K)`` core members
    (rotated slices, spread as evenly as the core allows) and fills the rest
    from a private pool, so non-planted pairs overlap only through the forced
    core sharing.
    """
    k_max = max(spec.thresholds)
    shared = round(spec.planted_frac * k_max)
    if shared < 1:
        raise ValueError("planted_frac too small: no shared members at the largest threshold")
    n_others = spec.n_models - 1
    private = k_max - shared
    needed = k_max + n_others * private
    if spec.n_r < needed:
        raise ValueError(
            f"n_r={spec.n_r} too small for planted design: need >= {needed} "
            f"(core {k_max} + {n_others} private pools of {private})"
        )
    offsets = [(j * k_max) // n_others for j in range(n_others)]
    core_slices = [
        tuple((offset + t) % k_max for t in range(shared)) for offset in offsets
    ]
    cross = 0.0
    for a in range(n_others):
        for b in range(a + 1, n_others):
            inter = len(set(core_slices[a]) & set(core_slices[b]))
            cross = max(cross, inter / k_max)
    return {
        "k_max": k_max,
        "shared": shared,
        "private": private,
        "core_slices": core_slices,
        "planted_overlap": shared / k_max,
        "max_cross_overlap": cross,
    }


def _planted_sets(spec: SyntheticStudySpec, rng: np.random.Generator) -> list[frozenset[int]]:
    design = planted_design(spec)
    k_max: int = design["k_max"]  # type: ignore[assignment]
    private: int = design["private"]  # type: ignore[assignment]
    perm = [int(i) for i in rng.permutation(spec.n_r)]
    core = perm[:k_max]
    pool = perm[k_max:]
    sets: list[frozenset[int]] = [frozenset()] * spec.n_models
    sets[spec.planted_index] = frozenset(core)
    other_positions = [i for i in range(spec.n_models) if i != spec.planted_index]
    for j, model_pos in enumerate(other_positions):
        members = {core[t] for t in design["core_slices"][j]}  # type: ignore[index]
        members.update(pool[j * private : (j + 1) * private])
        sets[model_pos] = frozenset(members)
    return sets


def _weights_for_set(
    members: frozenset[int], n_r: int, rng: np.random.Generator
) -> np.ndarray:
    """Random signed weights whose top-|members| magnitudes are exactly the set."""
    magnitudes = rng.uniform(0.0, 0.9, size=n_r)
    idx = sorted(members)
    magnitudes[idx] = rng.uniform(1.0, 2.0, size=len(idx))
    signs = rng.choice([-1.0, 1.0], size=n_r)
    return magnitudes * signs


def generate_study(spec: SyntheticStudySpec) -> WeightStore:
    """Deterministically generate a validated store for the requested scenario."""
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    config = spec.config()
    records: list[WeightRecord] = []

    planted_sets: list[frozenset[int]] | None = None
    scales: np.ndarray | None = None
    if spec.scenario == "planted_consensus":
        planted_sets = _planted_sets(spec, rng)
    elif spec.scenario == "scaled_copies":
        scales = np.concatenate([[1.0], rng.uniform(0.5, 2.0, size=spec.n_models - 1)])

    for mode in config.mode_ids:
        for view in config.view_ids:
            for run in range(spec.runs_per_cell):
                if spec.scenario == "random_independent":
                    for model in config.model_ids:
                        weights = rng.standard_normal(spec.n_r)
                        records.append(WeightRecord(model, view, mode, run, tuple(map(float, weights))))
                elif spec.scenario == "identical_models":
                    base = rng.standard_normal(spec.n_r)
                    for model in config.model_ids:
                        records.append(WeightRecord(model, view, mode, run, tuple(map(float, base))))
                elif spec.scenario == "scaled_copies":
                    assert scales is not None
                    base = rng.standard_normal(spec.n_r)
                    for i, model in enumerate(config.model_ids):
                        scaled = base * float(scales[i])
                        records.append(WeightRecord(model, view, mode, run, tuple(map(float, scaled))))
                else:  # planted_consensus
                    assert planted_sets is not None
                    for i, model in enumerate(config.model_ids):
                        weights = _weights_for_set(planted_sets[i], spec.n_r, rng)
                        records.append(WeightRecord(model, view, mode, run, tuple(map(float, weights))))

    return WeightStore.from_records(config, records)
