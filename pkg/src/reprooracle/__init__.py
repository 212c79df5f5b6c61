"""Naive reference implementation of the whole analysis pipeline.

Everything here is deliberately written the slow, obvious way (plain loops,
plain sets, the ``math`` module) and must never import the main package's
matrix, score, scoring or selection code. Equivalence between this oracle
and the fast path is what the verification suite checks, so sharing the
computation would make those checks meaningless. Only the input data types
(store, config) are shared.

Intended for desk-scale studies (a few models, views and biomarkers).
"""

from reprooracle.oracle import (
    oracle_overlap,
    oracle_pipeline,
    oracle_rank,
    oracle_top_k,
)

__all__ = ["oracle_overlap", "oracle_pipeline", "oracle_rank", "oracle_top_k"]
