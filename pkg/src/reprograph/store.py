"""Validated storage for learned per-biomarker weight vectors.

The canonical on-disk format is JSON Lines: one record per line, each of the
form ``{"model": str, "view": str, "mode": str, "run": int, "weights": [...]}``.
Records are indexed by the (model, view, mode, run) key and grouped by the
study axes declared in a :class:`StudyConfig`.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Mapping


class ConfigError(ValueError):
    """A study configuration violates one of its invariants."""


class StoreValidationError(ValueError):
    """An input file failed validation. Carries every diagnostic, not just the first."""

    def __init__(self, diagnostics: list[str]):
        self.diagnostics = list(diagnostics)
        if len(self.diagnostics) == 1:
            msg = self.diagnostics[0]
        else:
            msg = f"{len(self.diagnostics)} validation errors (first: {self.diagnostics[0]})"
        super().__init__(msg)


class UnknownIdError(KeyError):
    """A model/view/mode id is not declared in the study configuration."""


class MissingCellError(LookupError):
    """A (model, view, mode) cell has no runs. Only reachable when the store
    was loaded with ``allow_missing=True``."""


Key = tuple[str, str, str, int]


def _check_distinct(name: str, ids: tuple[str, ...]) -> None:
    if not ids:
        raise ConfigError(f"{name} list must be non-empty")
    if len(set(ids)) != len(ids):
        raise ConfigError(f"{name} list contains duplicates: {list(ids)}")
    for i in ids:
        if not isinstance(i, str) or not i:
            raise ConfigError(f"{name} ids must be non-empty strings, got {i!r}")


@dataclass(frozen=True)
class StudyConfig:
    """Declares the axes of a study: biomarker count, model/view/mode ids and
    the top-k thresholds used for biomarker extraction."""

    n_r: int
    model_ids: tuple[str, ...]
    view_ids: tuple[str, ...]
    mode_ids: tuple[str, ...]
    thresholds: tuple[int, ...]
    biomarker_labels: tuple[str, ...] | None = None

    def __post_init__(self):
        if not isinstance(self.n_r, int) or isinstance(self.n_r, bool) or self.n_r < 2:
            raise ConfigError(f"n_r must be an integer >= 2, got {self.n_r!r}")
        _check_distinct("models", self.model_ids)
        _check_distinct("views", self.view_ids)
        _check_distinct("modes", self.mode_ids)
        if "grand" in self.mode_ids:
            raise ConfigError('mode id "grand" is reserved for the cross-mode aggregate')
        if not self.thresholds:
            raise ConfigError("thresholds list must be non-empty")
        for k in self.thresholds:
            if not isinstance(k, int) or isinstance(k, bool) or not 1 <= k <= self.n_r:
                raise ConfigError(f"threshold {k!r} outside [1, n_r={self.n_r}]")
        if any(a >= b for a, b in zip(self.thresholds, self.thresholds[1:])):
            raise ConfigError(f"thresholds must be strictly increasing, got {list(self.thresholds)}")
        if self.biomarker_labels is not None and len(self.biomarker_labels) != self.n_r:
            raise ConfigError(
                f"biomarker_labels length {len(self.biomarker_labels)} != n_r {self.n_r}"
            )

    @classmethod
    def from_dict(cls, raw: Mapping) -> "StudyConfig":
        """Build from the JSON config schema
        ``{"n_r", "models", "views", "modes", "thresholds"[, "biomarker_labels"]}``."""
        try:
            labels = raw.get("biomarker_labels")
            return cls(
                n_r=raw["n_r"],
                model_ids=tuple(raw["models"]),
                view_ids=tuple(raw["views"]),
                mode_ids=tuple(raw["modes"]),
                thresholds=tuple(raw["thresholds"]),
                biomarker_labels=tuple(labels) if labels is not None else None,
            )
        except KeyError as exc:
            raise ConfigError(f"config missing required key {exc.args[0]!r}") from None

    @classmethod
    def from_file(cls, path: str | Path) -> "StudyConfig":
        try:
            raw = json.loads(Path(path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file is not valid JSON: {exc}") from None
        if not isinstance(raw, dict):
            raise ConfigError("config file must contain a JSON object")
        return cls.from_dict(raw)

    def to_dict(self) -> dict:
        out = {
            "n_r": self.n_r,
            "models": list(self.model_ids),
            "views": list(self.view_ids),
            "modes": list(self.mode_ids),
            "thresholds": list(self.thresholds),
        }
        if self.biomarker_labels is not None:
            out["biomarker_labels"] = list(self.biomarker_labels)
        return out


@dataclass(frozen=True)
class WeightRecord:
    """One learned weight vector, tagged by (model, view, mode, run)."""

    model_id: str
    view_id: str
    mode_id: str
    run_id: int
    weights: tuple[float, ...]

    @property
    def key(self) -> Key:
        return (self.model_id, self.view_id, self.mode_id, self.run_id)


@dataclass(frozen=True, eq=False)
class WeightStore:
    """Immutable, fully validated collection of weight records.

    Safe for concurrent reads; construct via :func:`load_store` or
    :meth:`from_records`.
    """

    config: StudyConfig
    _records: dict[Key, WeightRecord]
    warnings: tuple[str, ...] = field(default=())

    def __eq__(self, other) -> bool:
        if not isinstance(other, WeightStore):
            return NotImplemented
        return self.config == other.config and self._records == other._records

    def __len__(self) -> int:
        return len(self._records)

    def __iter__(self) -> Iterator[WeightRecord]:
        """Iterate records in sorted key order (deterministic)."""
        for key in sorted(self._records):
            yield self._records[key]

    def _check_ids(self, model: str, view: str, mode: str) -> None:
        if model not in self.config.model_ids:
            raise UnknownIdError(f"unknown model id {model!r}")
        if view not in self.config.view_ids:
            raise UnknownIdError(f"unknown view id {view!r}")
        if mode not in self.config.mode_ids:
            raise UnknownIdError(f"unknown mode id {mode!r}")

    def records_for(self, model: str, view: str, mode: str) -> list[WeightRecord]:
        """All runs for one (model, view, mode) cell, sorted by run id."""
        self._check_ids(model, view, mode)
        found = [
            rec
            for (m, v, d, _), rec in self._records.items()
            if m == model and v == view and d == mode
        ]
        if not found:
            raise MissingCellError(f"no runs for cell (model={model!r}, view={view!r}, mode={mode!r})")
        return sorted(found, key=lambda r: r.run_id)

    def run_ids_for(self, model: str, view: str, mode: str) -> tuple[int, ...]:
        return tuple(rec.run_id for rec in self.records_for(model, view, mode))

    def has_cell(self, model: str, view: str, mode: str) -> bool:
        self._check_ids(model, view, mode)
        return any(
            m == model and v == view and d == mode for (m, v, d, _) in self._records
        )

    def get(self, model: str, view: str, mode: str, run: int) -> WeightRecord:
        try:
            return self._records[(model, view, mode, run)]
        except KeyError:
            raise MissingCellError(
                f"no record for (model={model!r}, view={view!r}, mode={mode!r}, run={run})"
            ) from None

    @classmethod
    def from_records(
        cls,
        config: StudyConfig,
        records: Iterable[WeightRecord],
        allow_missing: bool = False,
    ) -> "WeightStore":
        """Validate and index records built in memory (same rules as file load)."""
        diagnostics: list[str] = []
        indexed: dict[Key, WeightRecord] = {}
        for rec in records:
            problem = _record_problem(rec, config)
            if problem is not None:
                diagnostics.append(f"record {rec.key}: {problem}")
                continue
            if rec.key in indexed:
                diagnostics.append(f"record {rec.key}: duplicate key")
                continue
            indexed[rec.key] = rec
        missing = _missing_cells(config, indexed)
        warnings: list[str] = []
        if missing:
            msgs = [f"missing runs for cell (model={m!r}, view={v!r}, mode={d!r})" for m, v, d in missing]
            if allow_missing:
                warnings.extend(msgs)
            else:
                diagnostics.extend(msgs)
        if diagnostics:
            raise StoreValidationError(diagnostics)
        return cls(config=config, _records=indexed, warnings=tuple(warnings))


def _record_problem(rec: WeightRecord, config: StudyConfig) -> str | None:
    if rec.model_id not in config.model_ids:
        return f"unknown model id {rec.model_id!r}"
    if rec.view_id not in config.view_ids:
        return f"unknown view id {rec.view_id!r}"
    if rec.mode_id not in config.mode_ids:
        return f"unknown mode id {rec.mode_id!r}"
    if not isinstance(rec.run_id, int) or isinstance(rec.run_id, bool) or rec.run_id < 0:
        return f"run must be a non-negative integer, got {rec.run_id!r}"
    if len(rec.weights) != config.n_r:
        return f"weights length mismatch: got {len(rec.weights)}, expected n_r={config.n_r}"
    if any(not math.isfinite(w) for w in rec.weights):
        return "weights contain a non-finite entry"
    return None


def _missing_cells(
    config: StudyConfig, indexed: Mapping[Key, WeightRecord]
) -> list[tuple[str, str, str]]:
    present = {(m, v, d) for (m, v, d, _) in indexed}
    return [
        (m, v, d)
        for m in config.model_ids
        for v in config.view_ids
        for d in config.mode_ids
        if (m, v, d) not in present
    ]


def _parse_line(line_no: int, line: str, config: StudyConfig) -> tuple[WeightRecord | None, str | None]:
    try:
        raw = json.loads(line)
    except json.JSONDecodeError as exc:
        return None, f"line {line_no}: malformed JSON ({exc.msg})"
    if not isinstance(raw, dict):
        return None, f"line {line_no}: expected a JSON object"
    for key in ("model", "view", "mode", "run", "weights"):
        if key not in raw:
            return None, f"line {line_no}: missing field {key!r}"
    model, view, mode, run, weights = raw["model"], raw["view"], raw["mode"], raw["run"], raw["weights"]
    for name, value in (("model", model), ("view", view), ("mode", mode)):
        if not isinstance(value, str):
            return None, f"line {line_no}: field {name!r} must be a string"
    if not isinstance(run, int) or isinstance(run, bool) or run < 0:
        return None, f"line {line_no}: field 'run' must be a non-negative integer"
    if not isinstance(weights, list):
        return None, f"line {line_no}: field 'weights' must be an array"
    parsed: list[float] = []
    for j, w in enumerate(weights):
        # integers are accepted and widened to float64
        if not isinstance(w, (int, float)) or isinstance(w, bool):
            return None, f"line {line_no}: weights[{j}] is not a number"
        value = float(w)
        if not math.isfinite(value):
            return None, f"line {line_no}: weights[{j}] is non-finite"
        parsed.append(value)
    if len(parsed) != config.n_r:
        return None, (
            f"line {line_no}: weights length mismatch at line {line_no}: "
            f"got {len(parsed)}, expected n_r={config.n_r}"
        )
    if model not in config.model_ids:
        return None, f"line {line_no}: unknown model id {model!r}"
    if view not in config.view_ids:
        return None, f"line {line_no}: unknown view id {view!r}"
    if mode not in config.mode_ids:
        return None, f"line {line_no}: unknown mode id {mode!r}"
    return WeightRecord(model, view, mode, run, tuple(parsed)), None


def load_store_text(text: str, config: StudyConfig, allow_missing: bool = False) -> WeightStore:
    """Parse and validate JSONL content. Collects every diagnostic before failing.

    Line order in the input does not affect the resulting store.
    """
    diagnostics: list[str] = []
    indexed: dict[Key, WeightRecord] = {}
    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        record, problem = _parse_line(line_no, line, config)
        if problem is not None:
            diagnostics.append(problem)
            continue
        assert record is not None
        if record.key in indexed:
            diagnostics.append(f"line {line_no}: duplicate key {record.key}")
            continue
        indexed[record.key] = record
    missing = _missing_cells(config, indexed)
    warnings: list[str] = []
    if missing:
        msgs = [f"missing runs for cell (model={m!r}, view={v!r}, mode={d!r})" for m, v, d in missing]
        if allow_missing:
            warnings.extend(msgs)
        else:
            diagnostics.extend(msgs)
    if diagnostics:
        raise StoreValidationError(diagnostics)
    return WeightStore(config=config, _records=indexed, warnings=tuple(warnings))


def load_store(path: str | Path, config: StudyConfig, allow_missing: bool = False) -> WeightStore:
    """Load the canonical JSONL file into a validated store."""
    text = Path(path).read_text(encoding="utf-8")
    return load_store_text(text, config, allow_missing=allow_missing)


def dump_store_jsonl(store: WeightStore) -> str:
    """Serialize a store back to canonical JSONL (model-major config order)."""
    order = {
        key: (
            store.config.model_ids.index(key[0]),
            store.config.view_ids.index(key[1]),
            store.config.mode_ids.index(key[2]),
            key[3],
        )
        for key in (rec.key for rec in store)
    }
    lines = []
    for key in sorted(order, key=order.get):
        rec = store.get(*key)
        lines.append(
            json.dumps(
                {
                    "model": rec.model_id,
                    "view": rec.view_id,
                    "mode": rec.mode_id,
                    "run": rec.run_id,
                    "weights": list(rec.weights),
                },
                separators=(", ", ": "),
            )
        )
    return "\n".join(lines) + "\n"
