"""Command-line interface.

Every subcommand is a thin client of the analysis service: it reads local
files, posts their content, and writes the returned artifacts. By default
the service runs in-process; pass ``--server URL`` to target a running
instance instead. Diagnostics go to stderr, data goes to files, and the
exit code is 0 only when no errors occurred.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from reprograph import __version__
from reprograph.client import ServiceClient, ServiceError


def _eprint(*parts: object) -> None:
    print(*parts, file=sys.stderr)


def _read_text(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise SystemExit(f"error: cannot read {path}: {exc.strerror}")


def _read_config(path: str) -> dict:
    text = _read_text(path)
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SystemExit(f"error: config {path} is not valid JSON: {exc}")
    if not isinstance(raw, dict):
        raise SystemExit(f"error: config {path} must contain a JSON object")
    return raw


def _parse_thresholds(text: str | None) -> list[int] | None:
    if text is None:
        return None
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise SystemExit(f"error: thresholds must be a comma-separated integer list, got {text!r}")


def _write_outputs(out_dir: str, files: dict[str, str]) -> None:
    """Write artifacts, manifest first so it exists before any other output."""
    root = Path(out_dir)
    ordered = sorted(files, key=lambda p: (p != "manifest.json", p))
    for relpath in ordered:
        target = root / relpath
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(files[relpath], encoding="utf-8", newline="")


def _options_payload(args: argparse.Namespace) -> dict:
    return {
        "signed_ranking": getattr(args, "signed_ranking", False),
        "normalize_overall": getattr(args, "normalize_overall", False),
        "allow_missing": getattr(args, "allow_missing", False),
        "thresholds": _parse_thresholds(getattr(args, "thresholds", None)),
    }


def cmd_validate(client: ServiceClient, args: argparse.Namespace) -> int:
    config = _read_config(args.config)
    records = _read_text(args.input)
    response = client.validate(config, records, allow_missing=args.allow_missing)
    for warning in response.get("warnings", []):
        _eprint(f"warning: {warning}")
    if not response["ok"]:
        for diag in response["diagnostics"]:
            _eprint(f"error: {diag}")
        _eprint(f"validation failed with {len(response['diagnostics'])} error(s)")
        return 1
    summary = response["summary"]
    _eprint(
        f"OK, n_r={summary['n_r']}, n_models={summary['n_models']}, "
        f"n_views={summary['n_views']}, n_modes={summary['n_modes']}, "
        f"records={summary['n_records']}"
    )
    return 0


def cmd_run(client: ServiceClient, args: argparse.Namespace) -> int:
    config = _read_config(args.config)
    records = _read_text(args.input)
    provenance = {
        "config_path": args.config,
        "input_paths": [args.input],
        "out_dir": args.out,
    }
    response = client.run(config, records, _options_payload(args), provenance)
    _write_outputs(args.out, response["files"])
    report = response["report"]
    for mode, res in report["mode_results"].items():
        tie = " (tie)" if res["tie"] else ""
        _eprint(f"mode {mode}: winner {res['winner']}{tie}")
    grand = report["grand"]
    tie = " (tie)" if grand["tie"] else ""
    _eprint(f"grand winner: {grand['winner']}{tie}")
    _eprint(f"wrote {len(response['files'])} files to {args.out}")
    return 0


def cmd_scores(client: ServiceClient, args: argparse.Namespace) -> int:
    config = _read_config(args.config)
    records = _read_text(args.input)
    response = client.scores(config, records, _options_payload(args))
    _write_outputs(args.out, response["files"])
    _eprint(f"wrote {len(response['files'])} files to {args.out}")
    return 0


def cmd_gen(client: ServiceClient, args: argparse.Namespace) -> int:
    spec = {
        "seed": args.seed,
        "scenario": args.scenario,
        "n_r": args.n_r,
        "n_models": args.n_models,
        "n_views": args.n_views,
        "thresholds": _parse_thresholds(args.thresholds) or [5, 10, 15, 20],
        "modes": [m for m in args.modes.split(",") if m.strip()],
        "runs_per_cell": args.runs_per_cell,
        "planted_index": args.planted_index,
        "planted_frac": args.planted_frac,
    }
    response = client.gen(spec)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(response["records_jsonl"], encoding="utf-8", newline="")
    config_out = Path(args.config_out) if args.config_out else out.with_suffix(".config.json")
    config = {k: v for k, v in response["config"].items() if v is not None}
    config_out.write_text(json.dumps(config, indent=2) + "\n", encoding="utf-8", newline="")
    _eprint(f"wrote study to {out} and config to {config_out}")
    return 0


def _load_run_matrices(run_dir: str) -> dict[str, dict[str, str]]:
    root = Path(run_dir)
    matrices_dir = root / "matrices"
    if not matrices_dir.is_dir():
        raise SystemExit(f"error: {run_dir} does not look like a run output (no matrices/)")
    per_mode: dict[str, dict[str, str]] = {}
    for kind in ("view_average", "rank_correlation"):
        for path in sorted(matrices_dir.glob(f"*__{kind}.csv")):
            mode = path.name[: -len(f"__{kind}.csv")]
            if mode == "grand":
                continue
            per_mode.setdefault(mode, {})[kind] = path.read_text(encoding="utf-8")
    incomplete = [m for m, kinds in per_mode.items() if len(kinds) != 2]
    if incomplete:
        raise SystemExit(f"error: modes {incomplete} are missing one of the two matrix kinds")
    if not per_mode:
        raise SystemExit(f"error: no per-mode matrices found under {matrices_dir}")
    return per_mode


def cmd_select(client: ServiceClient, args: argparse.Namespace) -> int:
    matrices = _load_run_matrices(args.from_run)
    config = _read_config(args.config) if args.config else None
    records = _read_text(args.input) if args.input else None
    response = client.select(
        matrices,
        normalize_overall=args.normalize_overall,
        config=config,
        records_jsonl=records,
    )
    _write_outputs(args.out, response["files"])
    report = response["report"]
    grand = report["grand"]
    tie = " (tie)" if grand["tie"] else ""
    _eprint(f"grand winner: {grand['winner']}{tie}")
    _eprint(f"wrote {len(response['files'])} files to {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="reprograph",
        description="Quantify model reproducibility from learned biomarker weights",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument(
        "--server",
        default=None,
        help="URL of a running service; default runs the service in-process",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_validate = sub.add_parser("validate", help="validate a study without analyzing it")
    p_validate.add_argument("--config", required=True, help="study config JSON")
    p_validate.add_argument("--input", required=True, help="weights JSONL")
    p_validate.add_argument("--allow-missing", action="store_true")
    p_validate.set_defaults(func=cmd_validate)

    p_run = sub.add_parser("run", help="full pipeline: matrices, scores, selection, report")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--input", required=True)
    p_run.add_argument("--out", required=True, help="output directory")
    p_run.add_argument("--allow-missing", action="store_true")
    p_run.add_argument("--normalize-overall", action="store_true")
    p_run.add_argument("--signed-ranking", action="store_true")
    p_run.add_argument("--thresholds", default=None, help="override, e.g. 5,10,15,20")
    p_run.set_defaults(func=cmd_run)

    p_scores = sub.add_parser("scores", help="score table and pairwise matrices only")
    p_scores.add_argument("--config", required=True)
    p_scores.add_argument("--input", required=True)
    p_scores.add_argument("--out", required=True)
    p_scores.add_argument("--allow-missing", action="store_true")
    p_scores.add_argument("--normalize-overall", action="store_true")
    p_scores.add_argument("--signed-ranking", action="store_true")
    p_scores.add_argument("--thresholds", default=None)
    p_scores.set_defaults(func=cmd_scores)

    p_gen = sub.add_parser("gen", help="generate a synthetic study")
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument("--scenario", default="random_independent")
    p_gen.add_argument("--n-r", type=int, default=35)
    p_gen.add_argument("--n-models", type=int, default=5)
    p_gen.add_argument("--n-views", type=int, default=4)
    p_gen.add_argument("--thresholds", default="5,10,15,20")
    p_gen.add_argument("--modes", default="default")
    p_gen.add_argument("--runs-per-cell", type=int, default=1)
    p_gen.add_argument("--planted-index", type=int, default=0)
    p_gen.add_argument("--planted-frac", type=float, default=0.6)
    p_gen.add_argument("--out", required=True, help="output JSONL path")
    p_gen.add_argument("--config-out", default=None, help="default: <out>.config.json")
    p_gen.set_defaults(func=cmd_gen)

    p_select = sub.add_parser("select", help="selection from precomputed matrices")
    p_select.add_argument("--from-run", required=True, help="directory written by `run`")
    p_select.add_argument("--out", required=True)
    p_select.add_argument("--normalize-overall", action="store_true")
    p_select.add_argument("--config", default=None, help="enables the winner weight profile")
    p_select.add_argument("--input", default=None)
    p_select.set_defaults(func=cmd_select)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    client = ServiceClient(server=args.server)
    try:
        return args.func(client, args)
    except ServiceError as exc:
        _eprint(f"error: {exc.detail}")
        for diag in exc.diagnostics:
            _eprint(f"error: {diag}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
