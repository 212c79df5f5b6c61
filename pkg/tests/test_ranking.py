"""Ranking and top-k extraction."""

from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from reprograph.ranking import RankingPolicy, rank_biomarkers, ranking_for_cell, top_k

from conftest import make_config, store_from_weights

finite_weights = st.lists(
    st.floats(min_value=-1e6, max_value=1e6, allow_nan=False), min_size=2, max_size=40
)


def test_rank_by_absolute_value():
    assert rank_biomarkers([0.1, -0.9, 0.5]).order == (1, 2, 0)


def test_ties_break_by_index():
    assert rank_biomarkers([0.5, 0.5, 0.5]).order == (0, 1, 2)


def test_positive_scaling_preserves_order():
    assert rank_biomarkers([3.0, -27.0, 15.0]).order == (1, 2, 0)
    assert rank_biomarkers([3.0, -27.0, 15.0]).order == rank_biomarkers([0.1, -0.9, 0.5]).order


def test_non_finite_rejected():
    with pytest.raises(ValueError):
        rank_biomarkers([1.0, float("nan")])
    with pytest.raises(ValueError):
        rank_biomarkers([1.0, float("inf")])


def test_signed_ranking_variant():
    # signed ranking orders by raw value, so a large negative weight goes last
    assert rank_biomarkers([0.1, -0.9, 0.5], signed=True).order == (2, 0, 1)


def test_magnitudes_non_increasing():
    r = rank_biomarkers([0.3, -1.5, 0.3, 2.0])
    assert list(r.magnitudes) == sorted(r.magnitudes, reverse=True)


@given(finite_weights)
@settings(max_examples=200)
def test_order_is_permutation(weights):
    r = rank_biomarkers(weights)
    assert sorted(r.order) == list(range(len(weights)))


@given(finite_weights, st.sampled_from([2.0, 0.5, 1e-6, 1e6]))
@settings(max_examples=150)
def test_positive_scale_invariance(weights, c):
    # scale by powers-of-two-free constants too; exact for these magnitudes
    assert rank_biomarkers([c * w for w in weights]).order == rank_biomarkers(weights).order


@given(finite_weights)
@settings(max_examples=150)
def test_sign_invariance(weights):
    assert rank_biomarkers([-w for w in weights]).order == rank_biomarkers(weights).order


@given(finite_weights)
@settings(max_examples=100)
def test_nested_prefixes(weights):
    r = rank_biomarkers(weights)
    n = len(weights)
    for a in range(1, n):
        assert top_k(r, a).members < top_k(r, a + 1).members


class TestTopK:
    def test_prefix_set(self):
        r = rank_biomarkers([0.1, -0.9, 0.5])
        assert top_k(r, 2).members == {1, 2}

    def test_full_range(self):
        r = rank_biomarkers([0.1, -0.9, 0.5])
        assert top_k(r, 3).members == {0, 1, 2}

    @pytest.mark.parametrize("k", [0, -1, 4, 2.0, True])
    def test_out_of_range(self, k):
        r = rank_biomarkers([0.1, -0.9, 0.5])
        with pytest.raises(ValueError):
            top_k(r, k)


class TestRankingForCell:
    def make_store(self, runs: int):
        config = make_config(n_r=3, models=("m1",), views=("v1",), thresholds=(2,))
        weights = {("m1", "v1", "cv3", r): [1.0 + r, 0.5, 2.0] for r in range(runs)}
        return store_from_weights(config, weights)

    def test_one_ranking_per_run(self):
        store = self.make_store(3)
        rankings = ranking_for_cell(store, "m1", "v1", "cv3")
        assert len(rankings) == 3

    def test_single_run(self):
        store = self.make_store(1)
        assert len(ranking_for_cell(store, "m1", "v1", "cv3")) == 1

    def test_identical_weights_identical_rankings(self):
        config = make_config(n_r=3, models=("m1",), views=("v1",), thresholds=(2,))
        weights = {("m1", "v1", "cv3", r): [0.3, -0.8, 0.1] for r in range(4)}
        store = store_from_weights(config, weights)
        rankings = ranking_for_cell(store, "m1", "v1", "cv3")
        assert all(r == rankings[0] for r in rankings)

    def test_signed_policy_passthrough(self):
        config = make_config(n_r=3, models=("m1",), views=("v1",), thresholds=(2,))
        store = store_from_weights(config, {("m1", "v1", "cv3", 0): [0.1, -0.9, 0.5]})
        signed = ranking_for_cell(store, "m1", "v1", "cv3", RankingPolicy(signed=True))
        assert signed[0].order == (2, 0, 1)
