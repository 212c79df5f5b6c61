"""Reproducibility matrices, scores and model selection from learned
per-biomarker weight vectors."""

__version__ = "0.1.0"

from reprograph.store import (  # noqa: E402
    ConfigError,
    MissingCellError,
    StoreValidationError,
    StudyConfig,
    UnknownIdError,
    WeightRecord,
    WeightStore,
    load_store,
    load_store_text,
)
from reprograph.ranking import (  # noqa: E402
    BiomarkerRanking,
    RankingPolicy,
    TopKSet,
    rank_biomarkers,
    ranking_for_cell,
    top_k,
)
from reprograph.matrices import (  # noqa: E402
    ReproMatrix,
    average_matrices,
    cross_model_matrix,
    cross_view_matrix,
    node_strength,
    overlap_ratio,
)
from reprograph.pipeline import PipelineError, PipelineOptions, PipelineResult, run_pipeline  # noqa: E402
from reprograph.selection import build_overall, select_model, winner_weights  # noqa: E402
from reprograph.synth import SCENARIOS, SyntheticStudySpec, generate_study  # noqa: E402

__all__ = [
    "__version__",
    "BiomarkerRanking",
    "ConfigError",
    "MissingCellError",
    "PipelineError",
    "PipelineOptions",
    "PipelineResult",
    "RankingPolicy",
    "ReproMatrix",
    "SCENARIOS",
    "StoreValidationError",
    "StudyConfig",
    "SyntheticStudySpec",
    "TopKSet",
    "UnknownIdError",
    "WeightRecord",
    "WeightStore",
    "average_matrices",
    "build_overall",
    "cross_model_matrix",
    "cross_view_matrix",
    "generate_study",
    "load_store",
    "load_store_text",
    "node_strength",
    "overlap_ratio",
    "rank_biomarkers",
    "ranking_for_cell",
    "run_pipeline",
    "select_model",
    "top_k",
    "winner_weights",
]
