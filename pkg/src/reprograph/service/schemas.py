"""Request/response models for the HTTP service."""

from __future__ import annotations

from pydantic import BaseModel, Field

from reprograph.synth import SCENARIOS


class StudyConfigModel(BaseModel):
    n_r: int
    models: list[str]
    views: list[str]
    modes: list[str]
    thresholds: list[int]
    biomarker_labels: list[str] | None = None


class RunOptionsModel(BaseModel):
    signed_ranking: bool = False
    normalize_overall: bool = False
    allow_missing: bool = False
    thresholds: list[int] | None = None  # override of the config thresholds


class ProvenanceModel(BaseModel):
    """Client-side paths recorded verbatim in the manifest."""

    config_path: str = "<inline>"
    input_paths: list[str] = Field(default_factory=lambda: ["<inline>"])
    out_dir: str = "<inline>"


class HealthResponse(BaseModel):
    status: str
    version: str


class ValidateRequest(BaseModel):
    config: StudyConfigModel
    records_jsonl: str
    allow_missing: bool = False


class StudySummary(BaseModel):
    n_r: int
    n_models: int
    n_views: int
    n_modes: int
    n_records: int


class ValidateResponse(BaseModel):
    ok: bool
    summary: StudySummary | None = None
    diagnostics: list[str] = Field(default_factory=list)
    warnings: list[str] = Field(default_factory=list)


class RunRequest(BaseModel):
    config: StudyConfigModel
    records_jsonl: str
    options: RunOptionsModel = RunOptionsModel()
    provenance: ProvenanceModel = ProvenanceModel()


class RunResponse(BaseModel):
    report: dict
    files: dict[str, str]


class ScoresRequest(BaseModel):
    config: StudyConfigModel
    records_jsonl: str
    options: RunOptionsModel = RunOptionsModel()


class ScoresResponse(BaseModel):
    files: dict[str, str]


class GenRequest(BaseModel):
    seed: int = 0
    scenario: str = Field(default="random_independent", pattern="|".join(SCENARIOS))
    n_r: int = 35
    n_models: int = 5
    n_views: int = 4
    thresholds: list[int] = Field(default_factory=lambda: [5, 10, 15, 20])
    modes: list[str] = Field(default_factory=lambda: ["default"])
    runs_per_cell: int = 1
    planted_index: int = 0
    planted_frac: float = 0.6


class GenResponse(BaseModel):
    records_jsonl: str
    config: StudyConfigModel


class SelectRequest(BaseModel):
    """Selection from precomputed per-mode matrices (CSV texts as exported)."""

    matrices: dict[str, dict[str, str]]  # mode -> {"view_average": csv, "rank_correlation": csv}
    normalize_overall: bool = False
    config: StudyConfigModel | None = None
    records_jsonl: str | None = None  # enables the winner weight profile


class SelectResponse(BaseModel):
    report: dict
    files: dict[str, str]


class ErrorResponse(BaseModel):
    detail: str
    diagnostics: list[str] = Field(default_factory=list)
