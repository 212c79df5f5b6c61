"""Render pipeline results into the output file tree.

Everything is produced as text in memory first (relpath -> content), so the
manifest can list every output with its hash before a single byte reaches
disk, and so callers over HTTP receive identical bytes to local runs.
"""

from __future__ import annotations

import hashlib
import json
from datetime import datetime, timezone

from reprograph import __version__
from reprograph.matrices import ReproMatrix, format_float, matrix_to_csv
from reprograph.pipeline import PipelineResult
from reprograph.scores import SCORE_IDS, score_table_to_csv, score_table_to_pairwise_dict
from reprograph.selection import SelectionOutcome
from reprograph.store import WeightStore

AGGREGATION_ORDER = (
    "overlap matrices per (run, threshold)",
    "mean over thresholds",
    "mean over runs",
    "mean over views (cross-model side)",
    "mean over modes (grand)",
)


def sha256_text(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def _json_dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _selection_dict(selection: SelectionOutcome) -> dict:
    return {
        "winner": selection.winner,
        "tie": selection.tie,
        "node_strengths": dict(selection.strengths),
    }


def _matrix_files(prefix: str, matrices: dict[str, ReproMatrix]) -> dict[str, str]:
    return {
        name: f"matrices/{prefix}__{name}.csv" for name in matrices
    }


def winner_weights_csv(result: PipelineResult) -> str:
    labels = result.config.biomarker_labels
    lines = ["index,label,mean_abs_weight"]
    for i, w in enumerate(result.winner_weight_profile):
        label = labels[i] if labels is not None else ""
        lines.append(f"{i},{label},{format_float(w)}")
    return "\n".join(lines) + "\n"


def build_report(result: PipelineResult, flags: dict) -> dict:
    mode_results = {}
    for mode_id, mode in result.modes.items():
        files = {
            "view_average": f"matrices/{mode_id}__view_average.csv",
            "rank_correlation": f"matrices/{mode_id}__rank_correlation.csv",
            "overall": f"matrices/{mode_id}__overall.csv",
        }
        mode_results[mode_id] = {
            **_selection_dict(mode.selection),
            "run_ids": list(mode.run_ids),
            "matrix_files": files,
        }
    return {
        "tool": "reprograph",
        "version": __version__,
        "models": list(result.config.model_ids),
        "views": list(result.config.view_ids),
        "modes": list(result.config.mode_ids),
        "thresholds": list(result.thresholds),
        "flags": flags,
        "mode_results": mode_results,
        "grand": {
            **_selection_dict(result.grand_selection),
            "matrix_files": {
                "view_average": "matrices/grand__view_average.csv",
                "rank_correlation": "matrices/grand__rank_correlation.csv",
                "overall": "matrices/grand__overall.csv",
            },
        },
        "cross_mode_consistent": result.cross_mode_consistent,
        "winner_weight_profile_file": "winner_weights.csv",
        "provenance": {
            "aggregation_order": list(AGGREGATION_ORDER),
            "run_ids": {m: list(result.modes[m].run_ids) for m in result.config.mode_ids},
            "model_pool": list(result.config.model_ids),
            "score_set": list(SCORE_IDS),
            "ranking": "signed" if result.options.signed_ranking else "absolute",
        },
    }


def render_run_outputs(result: PipelineResult, flags: dict) -> dict[str, str]:
    """All run artifacts except the manifest, as relpath -> content."""
    files: dict[str, str] = {}
    for mode_id, mode in result.modes.items():
        files[f"matrices/{mode_id}__view_average.csv"] = matrix_to_csv(mode.view_average)
        files[f"matrices/{mode_id}__rank_correlation.csv"] = matrix_to_csv(mode.rank_correlation)
        files[f"matrices/{mode_id}__overall.csv"] = matrix_to_csv(mode.overall)
        for view, matrix in mode.per_view_matrices.items():
            files[f"matrices/{mode_id}__cross_model__{view}.csv"] = matrix_to_csv(matrix)
        for model, matrix in mode.per_model_matrices.items():
            files[f"matrices/{mode_id}__cross_view__{model}.csv"] = matrix_to_csv(matrix)
    files["matrices/grand__view_average.csv"] = matrix_to_csv(result.grand_view_average)
    files["matrices/grand__rank_correlation.csv"] = matrix_to_csv(result.grand_rank_correlation)
    files["matrices/grand__overall.csv"] = matrix_to_csv(result.grand_overall)
    files["scores/score_table.csv"] = score_table_to_csv(result.score_table)
    files["scores/pairwise.json"] = _json_dumps(score_table_to_pairwise_dict(result.score_table))
    files["winner_weights.csv"] = winner_weights_csv(result)
    files["report.json"] = _json_dumps(build_report(result, flags))
    return files


def build_manifest(
    command: str,
    files: dict[str, str],
    flags: dict,
    config_path: str,
    input_paths: list[str],
    out_dir: str,
    config_text: str,
    input_texts: list[str],
    created_at: str | None = None,
) -> str:
    """Manifest JSON listing inputs (with hashes) and every output file hash.

    ``created_at`` is the single non-deterministic field; reruns on identical
    inputs differ only there.
    """
    if created_at is None:
        created_at = datetime.now(timezone.utc).isoformat()
    manifest = {
        "tool": "reprograph",
        "version": __version__,
        "command": command,
        "created_at": created_at,
        "config_path": config_path,
        "input_paths": list(input_paths),
        "out_dir": out_dir,
        "flags": flags,
        "score_set": list(SCORE_IDS),
        "input_hashes": {
            "config": sha256_text(config_text),
            "records": [sha256_text(t) for t in input_texts],
        },
        "outputs": {path: sha256_text(content) for path, content in sorted(files.items())},
    }
    return _json_dumps(manifest)
