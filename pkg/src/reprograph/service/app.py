"""HTTP service wrapping the analysis pipeline.

The service is stateless: clients post the study config and JSONL content,
and receive every output file as text, byte-identical to what a local run
would produce. Serve with ``uvicorn reprograph.service.app:app``.
"""

from __future__ import annotations

import json

from fastapi import FastAPI
from fastapi.responses import JSONResponse

from reprograph import __version__
from reprograph.export import build_manifest, render_run_outputs
from reprograph.matrices import average_matrices, format_float, matrix_from_csv, matrix_to_csv
from reprograph.pipeline import PipelineError, PipelineOptions, run_pipeline
from reprograph.selection import build_overall, select_model, winner_weights
from reprograph.service import schemas
from reprograph.store import (
    ConfigError,
    StoreValidationError,
    StudyConfig,
    WeightStore,
    dump_store_jsonl,
    load_store_text,
)
from reprograph.synth import SyntheticStudySpec, generate_study


def _config_from_model(model: schemas.StudyConfigModel) -> StudyConfig:
    return StudyConfig.from_dict(model.model_dump())


def _options_from_model(model: schemas.RunOptionsModel) -> PipelineOptions:
    return PipelineOptions(
        signed_ranking=model.signed_ranking,
        normalize_overall=model.normalize_overall,
        thresholds=tuple(model.thresholds) if model.thresholds is not None else None,
    )


def _flags_dict(options: schemas.RunOptionsModel) -> dict:
    return {
        "signed_ranking": options.signed_ranking,
        "normalize_overall": options.normalize_overall,
        "allow_missing": options.allow_missing,
        "thresholds_override": options.thresholds,
    }


def _error(status: int, detail: str, diagnostics: list[str] | None = None) -> JSONResponse:
    return JSONResponse(
        status_code=status,
        content={"detail": detail, "diagnostics": diagnostics or []},
    )


def _load(request_config: schemas.StudyConfigModel, records_jsonl: str, allow_missing: bool) -> WeightStore:
    config = _config_from_model(request_config)
    return load_store_text(records_jsonl, config, allow_missing=allow_missing)


def create_app() -> FastAPI:
    app = FastAPI(
        title="reprograph",
        version=__version__,
        description="Reproducibility analysis of model pools from learned biomarker weights",
    )

    @app.get("/health", response_model=schemas.HealthResponse)
    def health() -> schemas.HealthResponse:
        return schemas.HealthResponse(status="ok", version=__version__)

    @app.post("/validate", response_model=schemas.ValidateResponse)
    def validate(request: schemas.ValidateRequest):
        try:
            store = _load(request.config, request.records_jsonl, request.allow_missing)
        except ConfigError as exc:
            return schemas.ValidateResponse(ok=False, diagnostics=[str(exc)])
        except StoreValidationError as exc:
            return schemas.ValidateResponse(ok=False, diagnostics=exc.diagnostics)
        config = store.config
        return schemas.ValidateResponse(
            ok=True,
            summary=schemas.StudySummary(
                n_r=config.n_r,
                n_models=len(config.model_ids),
                n_views=len(config.view_ids),
                n_modes=len(config.mode_ids),
                n_records=len(store),
            ),
            warnings=list(store.warnings),
        )

    @app.post("/run", response_model=schemas.RunResponse)
    def run(request: schemas.RunRequest):
        try:
            store = _load(request.config, request.records_jsonl, request.options.allow_missing)
        except ConfigError as exc:
            return _error(422, "invalid study config", [str(exc)])
        except StoreValidationError as exc:
            return _error(422, "input validation failed", exc.diagnostics)
        try:
            result = run_pipeline(store, _options_from_model(request.options))
        except (PipelineError, ValueError) as exc:
            return _error(400, str(exc))
        flags = _flags_dict(request.options)
        files = render_run_outputs(result, flags)
        report = json.loads(files["report.json"])
        files["manifest.json"] = build_manifest(
            command="run",
            files=files,
            flags=flags,
            config_path=request.provenance.config_path,
            input_paths=request.provenance.input_paths,
            out_dir=request.provenance.out_dir,
            config_text=json.dumps(request.config.model_dump(), sort_keys=True),
            input_texts=[request.records_jsonl],
        )
        return schemas.RunResponse(report=report, files=files)

    @app.post("/scores", response_model=schemas.ScoresResponse)
    def scores(request: schemas.ScoresRequest):
        try:
            store = _load(request.config, request.records_jsonl, request.options.allow_missing)
        except ConfigError as exc:
            return _error(422, "invalid study config", [str(exc)])
        except StoreValidationError as exc:
            return _error(422, "input validation failed", exc.diagnostics)
        try:
            result = run_pipeline(store, _options_from_model(request.options))
        except (PipelineError, ValueError) as exc:
            return _error(400, str(exc))
        all_files = render_run_outputs(result, _flags_dict(request.options))
        return schemas.ScoresResponse(
            files={
                "scores/score_table.csv": all_files["scores/score_table.csv"],
                "scores/pairwise.json": all_files["scores/pairwise.json"],
            }
        )

    @app.post("/gen", response_model=schemas.GenResponse)
    def gen(request: schemas.GenRequest):
        try:
            spec = SyntheticStudySpec(
                seed=request.seed,
                n_r=request.n_r,
                n_models=request.n_models,
                n_views=request.n_views,
                thresholds=tuple(request.thresholds),
                scenario=request.scenario,
                runs_per_cell=request.runs_per_cell,
                mode_ids=tuple(request.modes),
                planted_index=request.planted_index,
                planted_frac=request.planted_frac,
            )
            store = generate_study(spec)
        except (ValueError, ConfigError) as exc:
            return _error(400, str(exc))
        return schemas.GenResponse(
            records_jsonl=dump_store_jsonl(store),
            config=schemas.StudyConfigModel(**store.config.to_dict()),
        )

    @app.post("/select", response_model=schemas.SelectResponse)
    def select(request: schemas.SelectRequest):
        try:
            per_mode = {}
            for mode, kinds in request.matrices.items():
                try:
                    va_csv = kinds["view_average"]
                    rc_csv = kinds["rank_correlation"]
                except KeyError as exc:
                    return _error(400, f"mode {mode!r} is missing matrix {exc.args[0]!r}")
                va = matrix_from_csv(va_csv, kind="view_average")
                rc = matrix_from_csv(rc_csv, kind="rank_correlation")
                per_mode[mode] = build_overall(va, rc, normalize=request.normalize_overall)
        except ValueError as exc:
            return _error(400, f"could not parse matrices: {exc}")
        if not per_mode:
            return _error(400, "no matrices supplied")

        files: dict[str, str] = {}
        mode_results = {}
        outcomes = []
        for mode, overall in sorted(per_mode.items()):
            outcome = select_model(overall)
            outcomes.append(outcome)
            mode_results[mode] = {
                "winner": outcome.winner,
                "tie": outcome.tie,
                "node_strengths": outcome.strengths,
            }
            files[f"matrices/{mode}__overall.csv"] = matrix_to_csv(overall)
        try:
            grand_overall = average_matrices(list(per_mode[m] for m in sorted(per_mode)))
        except ValueError as exc:
            return _error(400, str(exc))
        grand_outcome = select_model(grand_overall)
        files["matrices/grand__overall.csv"] = matrix_to_csv(grand_overall)

        report: dict = {
            "tool": "reprograph",
            "version": __version__,
            "source": "precomputed-matrices",
            "mode_results": mode_results,
            "grand": {
                "winner": grand_outcome.winner,
                "tie": grand_outcome.tie,
                "node_strengths": grand_outcome.strengths,
            },
            "cross_mode_consistent": len({o.winner for o in outcomes}) == 1,
        }
        if request.config is not None and request.records_jsonl is not None:
            try:
                store = _load(request.config, request.records_jsonl, allow_missing=False)
            except (ConfigError, StoreValidationError) as exc:
                return _error(422, "invalid weight input for winner profile", [str(exc)])
            profile = winner_weights(store, grand_outcome.winner)
            labels = store.config.biomarker_labels
            lines = ["index,label,mean_abs_weight"]
            for i, w in enumerate(profile):
                label = labels[i] if labels is not None else ""
                lines.append(f"{i},{label},{format_float(w)}")
            files["winner_weights.csv"] = "\n".join(lines) + "\n"
            report["winner_weight_profile_file"] = "winner_weights.csv"

        files["report.json"] = json.dumps(report, sort_keys=True, indent=2) + "\n"
        return schemas.SelectResponse(report=report, files=files)

    return app


app = create_app()
