"""Command-line entry points.

``regionlogic refine`` writes the final-state JSON and a focus overlay for
one image; ``regionlogic analyze`` runs the full pipeline (refine, logic
translation, metrics, behavior) over one image or a corpus manifest and
writes per-image reports plus a corpus aggregate. Outputs are deterministic:
identical inputs and flags produce byte-identical files.

Exit codes: 0 success, 2 configuration error, 3 predictor transport failure,
4 query budget exhausted, 1 anything else. Errors are mirrored as one JSON
object on stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from PIL import Image

from .analysis import BehaviorThresholds, aggregate_reports, build_report
from .composer import FillPolicy, load_image
from .errors import (
    ConfigError,
    PredictorError,
    QueryBudgetExceededError,
    RegionLogicError,
)
from .logic import expr_to_json, render, translate
from .overlay import render_overlay
from .predictor import open_predictor
from .refine import RefinementConfig, refine
from .regions import ground_truth_state, load_ground_truth_masks, load_label_map, merge_small_regions

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_CONFIG = 2
EXIT_TRANSPORT = 3
EXIT_BUDGET = 4


@dataclass(frozen=True)
class WorkItem:
    image: str
    labels: str
    gt: tuple[str, ...]
    name: str


def _parse_beam(text: str) -> int | None:
    if text == "none":
        return None
    try:
        value = int(text)
    except ValueError:
        raise ConfigError(f"--beam expects a positive integer or 'none', got {text!r}") from None
    if value < 1:
        raise ConfigError(f"--beam must be >= 1, got {value}")
    return value


def _parse_thresholds(text: str) -> BehaviorThresholds:
    parts = text.split(",")
    if len(parts) != 3:
        raise ConfigError(f"--thresholds expects 'p,r,d', got {text!r}")
    try:
        p, r, d = (float(x) for x in parts)
        return BehaviorThresholds(precision_high=p, recall_high=r, divergence_high=d)
    except ValueError as exc:
        raise ConfigError(f"invalid --thresholds {text!r}: {exc}") from exc


def _parse_fill(text: str) -> FillPolicy:
    try:
        return FillPolicy.from_spec(text)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _require_file(path: str, what: str) -> str:
    if not Path(path).is_file():
        raise ConfigError(f"{what} not found: {path}")
    return path


def _work_items(args) -> list[WorkItem]:
    gt_args = tuple(getattr(args, "gt", ()) or ())
    if args.corpus:
        manifest_path = _require_file(args.corpus, "corpus manifest")
        if args.image or args.labels or gt_args:
            raise ConfigError("--corpus excludes --image/--labels/--gt")
        try:
            entries = json.loads(Path(manifest_path).read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"corpus manifest is not valid JSON: {exc}") from exc
        if not isinstance(entries, list) or not entries:
            raise ConfigError("corpus manifest must be a non-empty JSON array")
        items = []
        for idx, entry in enumerate(entries):
            if not isinstance(entry, dict) or "image" not in entry or "labels" not in entry:
                raise ConfigError(f"manifest entry {idx} needs 'image' and 'labels'")
            gt = tuple(entry.get("gt", ()))
            stem = Path(entry["image"]).stem
            items.append(
                WorkItem(
                    image=entry["image"],
                    labels=entry["labels"],
                    gt=gt,
                    name=f"{idx:03d}_{stem}",
                )
            )
        return items
    if not args.image or not args.labels:
        raise ConfigError("either --corpus or both --image and --labels are required")
    return [
        WorkItem(
            image=args.image,
            labels=args.labels,
            gt=gt_args,
            name=Path(args.image).stem,
        )
    ]


def _load_inputs(item: WorkItem, merge_threshold: float):
    image = load_image(_require_file(item.image, "image"))
    partition = load_label_map(_require_file(item.labels, "label map"))
    if image.shape[:2] != partition.labels.shape:
        raise ConfigError(
            f"{item.image} is {image.shape[:2]} but {item.labels} is {partition.labels.shape}"
        )
    return image, merge_small_regions(partition, merge_threshold)


def _write_json(path: Path, data) -> None:
    path.write_text(json.dumps(data, sort_keys=True, indent=2) + "\n")


def _write_png(path: Path, array) -> None:
    Image.fromarray(array, mode="RGB").save(path, format="PNG")


def _classify_error(exc: Exception) -> tuple[str, int]:
    if isinstance(exc, ConfigError):
        return "config", EXIT_CONFIG
    if isinstance(exc, QueryBudgetExceededError):
        return "budget", EXIT_BUDGET
    if isinstance(exc, PredictorError):
        return "transport", EXIT_TRANSPORT
    return "internal", EXIT_INTERNAL


def _report_failures(items, outcomes) -> tuple[list[dict], int]:
    """Stderr JSON per failed image; returns the records and first exit code."""
    failures = []
    first_code = EXIT_OK
    for item, (_, exc) in zip(items, outcomes):
        if exc is None:
            continue
        kind, code = _classify_error(exc)
        record = {"image": item.image, "kind": kind, "error": str(exc)}
        failures.append(record)
        sys.stderr.write(json.dumps(record) + "\n")
        if first_code == EXIT_OK:
            first_code = code
    return failures, first_code


def _refine_one(item: WorkItem, args, model, fill, cfg, out_dir: Path) -> dict:
    image, partition = _load_inputs(item, args.merge_threshold)
    result = refine(image, partition, model, fill, cfg)
    _write_json(out_dir / f"{item.name}.states.json", result.to_json_dict())
    _write_png(out_dir / f"{item.name}.overlay.png", render_overlay(image, partition, result))
    return result.to_json_dict()


def cmd_refine(args) -> int:
    fill = _parse_fill(args.fill)
    cfg = RefinementConfig(beam_size=_parse_beam(args.beam), max_queries=args.max_queries)
    items = _work_items(args)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    model = open_predictor(args.model, timeout=args.timeout)
    try:
        outcomes = _run_pool(
            items,
            args.jobs,
            lambda item: _refine_one(item, args, model, fill, cfg, out_dir),
            capture=bool(args.corpus),
        )
    finally:
        model.close()
    _, first_code = _report_failures(items, outcomes)
    return first_code


def _analyze_one(item: WorkItem, args, model, fill, cfg, thresholds, out_dir: Path):
    if not item.gt:
        raise ConfigError(f"{item.image}: analyze requires at least one --gt mask")
    image, partition = _load_inputs(item, args.merge_threshold)
    masks = load_ground_truth_masks([_require_file(p, "ground-truth mask") for p in item.gt])
    gt_state = ground_truth_state(partition, masks, args.iou)
    result = refine(image, partition, model, fill, cfg)
    expr = translate(result)
    report = build_report(
        result,
        gt_state,
        partition,
        thresholds,
        fill_mode=fill.spec_string(),
        iou_threshold=args.iou,
    )
    doc = report.to_json_dict()
    doc.update(
        {
            "image": item.image,
            "labels": item.labels,
            "gt": list(item.gt),
            "logic": render(expr),
            "logic_json": expr_to_json(expr),
            "reference_label": result.reference_label,
            "states": [list(s.regions) for s in result.sorted_states()],
            "merge_threshold": args.merge_threshold,
        }
    )
    _write_json(out_dir / f"{item.name}.report.json", doc)
    return report, doc


def cmd_analyze(args) -> int:
    fill = _parse_fill(args.fill)
    cfg = RefinementConfig(beam_size=_parse_beam(args.beam), max_queries=args.max_queries)
    thresholds = _parse_thresholds(args.thresholds)
    items = _work_items(args)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    model = open_predictor(args.model, timeout=args.timeout)
    try:
        outcomes = _run_pool(
            items,
            args.jobs,
            lambda item: _analyze_one(item, args, model, fill, cfg, thresholds, out_dir),
            capture=bool(args.corpus),
        )
    finally:
        model.close()
    reports = [res[0] for res, exc in outcomes if exc is None]
    docs = [res[1] for res, exc in outcomes if exc is None]
    failures, first_code = _report_failures(items, outcomes)
    _write_json(
        out_dir / "corpus.json",
        {
            "reports": docs,
            "failures": failures,
            "aggregate": aggregate_reports(reports, thresholds) if reports else None,
        },
    )
    return first_code


def _run_pool(items, jobs, fn, capture=False):
    """Run fn over items, preserving order; returns (result, exception) pairs.

    With ``capture`` (corpus mode) per-item failures are recorded so the
    remaining images still run; otherwise the first failure propagates.
    """

    def guarded(item):
        if not capture:
            return fn(item), None
        try:
            return fn(item), None
        except (RegionLogicError, OSError, ValueError) as exc:
            return None, exc

    if jobs <= 1 or len(items) == 1:
        return [guarded(item) for item in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        futures = [pool.submit(guarded, item) for item in items]
        return [f.result() for f in futures]


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--image", help="input image (PNG/JPEG, read as RGB)")
    parser.add_argument("--labels", help="single-channel 16-bit PNG label map")
    parser.add_argument("--corpus", help="JSON manifest: array of {image, labels, gt[]}")
    parser.add_argument("--model", required=True, help="exec:<command> or http:<url>")
    parser.add_argument("--fill", default="gray", help="gray | mean | #RRGGBB (default gray)")
    parser.add_argument("--beam", default="none", help="beam size k, or 'none' for unlimited")
    parser.add_argument(
        "--merge-threshold",
        type=float,
        default=1e-3,
        dest="merge_threshold",
        help="minimum region area fraction before merging (default 1e-3)",
    )
    parser.add_argument("--max-queries", type=int, default=50_000, dest="max_queries")
    parser.add_argument("--timeout", type=float, default=60.0, help="per-response model timeout (s)")
    parser.add_argument("--jobs", type=int, default=1, help="parallel images in corpus mode")
    parser.add_argument("--out", default="out", help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="regionlogic",
        description="Minimal prediction-preserving region subsets for black-box image models",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_refine = sub.add_parser("refine", help="write final states + focus overlay")
    _add_common(p_refine)
    p_refine.set_defaults(func=cmd_refine)

    p_analyze = sub.add_parser("analyze", help="full pipeline: states, logic, metrics, behavior")
    _add_common(p_analyze)
    p_analyze.add_argument(
        "--gt", action="append", default=[], help="ground-truth mask PNG (repeatable)"
    )
    p_analyze.add_argument("--iou", type=float, default=0.7, help="IoU match threshold (default 0.7)")
    p_analyze.add_argument(
        "--thresholds",
        default="0.5,0.5,0.05",
        help="behavior cutoffs 'p,r,d' (default 0.5,0.5,0.05)",
    )
    p_analyze.set_defaults(func=cmd_analyze)
    return parser


def _fail(kind: str, exc: Exception, code: int) -> int:
    sys.stderr.write(json.dumps({"kind": kind, "error": str(exc)}) + "\n")
    return code


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "iou", None) is not None and not 0 < args.iou <= 1:
        return _fail("config", ConfigError(f"--iou must be in (0, 1], got {args.iou}"), EXIT_CONFIG)
    if not 0 <= args.merge_threshold < 1:
        return _fail(
            "config",
            ConfigError(f"--merge-threshold must be in [0, 1), got {args.merge_threshold}"),
            EXIT_CONFIG,
        )
    try:
        return args.func(args)
    except ConfigError as exc:
        return _fail("config", exc, EXIT_CONFIG)
    except QueryBudgetExceededError as exc:
        return _fail("budget", exc, EXIT_BUDGET)
    except PredictorError as exc:
        return _fail("transport", exc, EXIT_TRANSPORT)
    except (RegionLogicError, ValueError, OSError) as exc:
        return _fail("internal", exc, EXIT_INTERNAL)


if __name__ == "__main__":
    sys.exit(main())
