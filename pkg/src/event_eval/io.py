"""File formats, the evaluation orchestrator, and report emission.

Formats are line-oriented and hand-editable: a key/value manifest, two-column
headered CSVs for scores and masks, a record-per-window text file for branch
errors, and JSON for events, configs, and reports. Frame indices in CSVs must
run consecutively from 0; gaps are hard errors, never imputed, because silent
imputation corrupts event boundaries.
"""

from __future__ import annotations

import csv
import io as _io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from . import __version__
from .core import (
    EvalConfig,
    EventMetrics,
    EventPrf,
    EventSet,
    FrameMask,
    FrameMetrics,
    ScoreSequence,
    TemporalEvent,
    validate_pair,
)
from .errors import (
    BadLength,
    DuplicateVideoId,
    EventEvalError,
    MissingFile,
    NonBinaryLabel,
    NonFiniteScore,
    ParseError,
    ValidationError,
)
from .events import (
    AuditReport,
    audit_dataset,
    binarize,
    mask_to_events,
    refine_pipeline,
)
from .fusion import BranchErrors
from .matching import multi_threshold_eval
from .thresholds import (
    auc_pr,
    auc_roc,
    eer_threshold,
    f1_at_threshold,
    hprs_threshold,
    roc_curve,
)

REFINED = "refined"
BASELINE = "baseline"


@dataclass(frozen=True)
class ManifestEntry:
    video_id: str
    scores_path: Path
    mask_path: Path
    branch_errors_path: Path | None = None


@dataclass(frozen=True)
class Manifest:
    dataset_name: str
    videos: tuple[ManifestEntry, ...]


@dataclass(frozen=True)
class Report:
    """Everything one evaluation run produced, self-describing."""

    frame_metrics: FrameMetrics
    event_metrics_eer: EventMetrics
    event_metrics_hprs: EventMetrics
    audit: AuditReport
    config_echo: EvalConfig
    tool_version: str
    mode: str


# ---------------------------------------------------------------------------
# loaders


def load_manifest(path: str | Path) -> Manifest:
    """Parse and validate a manifest file.

    Records look like::

        dataset: my-dataset
        video: v001
        scores: scores/v001.csv
        mask: masks/v001.csv
        branch_errors: branch/v001.txt   (optional)

    Paths are resolved relative to the manifest's directory; every
    referenced file must exist at load time.
    """
    path = Path(path)
    if not path.is_file():
        raise MissingFile(str(path))
    base = path.parent
    dataset_name: str | None = None
    entries: list[ManifestEntry] = []
    current: dict[str, str] | None = None
    current_line = 0

    def flush() -> None:
        nonlocal current
        if current is None:
            return
        for required in ("scores", "mask"):
            if required not in current:
                raise ParseError(str(path), current_line,
                                 f"video {current['video']!r} is missing "
                                 f"the {required!r} key")
        entries.append(ManifestEntry(
            video_id=current["video"],
            scores_path=base / current["scores"],
            mask_path=base / current["mask"],
            branch_errors_path=(base / current["branch_errors"]
                                if "branch_errors" in current else None),
        ))
        current = None

    with path.open("r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition(":")
            key, value = key.strip(), value.strip()
            if not sep or not value:
                raise ParseError(str(path), lineno,
                                 f"expected 'key: value', got {line!r}")
            if key == "dataset":
                if dataset_name is not None:
                    raise ParseError(str(path), lineno,
                                     "duplicate 'dataset' key")
                dataset_name = value
            elif key == "video":
                flush()
                current = {"video": value}
                current_line = lineno
            elif key in ("scores", "mask", "branch_errors"):
                if current is None:
                    raise ParseError(str(path), lineno,
                                     f"{key!r} before any 'video' record")
                if key in current:
                    raise ParseError(str(path), lineno,
                                     f"duplicate {key!r} in record "
                                     f"{current['video']!r}")
                current[key] = value
            else:
                raise ParseError(str(path), lineno, f"unknown key {key!r}")
    flush()
    if dataset_name is None:
        raise ParseError(str(path), None, "missing 'dataset' key")
    if not entries:
        raise ParseError(str(path), None, "manifest lists no videos")
    seen: set[str] = set()
    for entry in entries:
        if entry.video_id in seen:
            raise DuplicateVideoId(entry.video_id, path=str(path))
        seen.add(entry.video_id)
        for p in (entry.scores_path, entry.mask_path,
                  entry.branch_errors_path):
            if p is not None and not p.is_file():
                raise MissingFile(str(p))
    return Manifest(dataset_name=dataset_name, videos=tuple(entries))


def _read_csv_column(path: str | Path, value_header: str) -> list[str]:
    """Read a headered two-column CSV, enforcing consecutive frame indices."""
    path = Path(path)
    if not path.is_file():
        raise MissingFile(str(path))
    values: list[str] = []
    with path.open("r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["frame",
                                                             value_header]:
            raise ParseError(str(path), 1,
                             f"expected header 'frame,{value_header}'")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 2:
                raise ParseError(str(path), lineno,
                                 f"expected 2 columns, got {len(row)}")
            try:
                frame = int(row[0])
            except ValueError:
                raise ParseError(str(path), lineno,
                                 f"frame index {row[0]!r} is not an integer")
            if frame != len(values):
                raise ParseError(str(path), lineno,
                                 f"frame indices must be consecutive from 0; "
                                 f"expected {len(values)}, got {frame}")
            values.append(row[1])
    if not values:
        raise ParseError(str(path), None, "file contains no frames")
    return values


def load_scores(path: str | Path, video_id: str | None = None,
                fps: float | None = None) -> ScoreSequence:
    """Load a 'frame,score' CSV into a ScoreSequence."""
    path = Path(path)
    video_id = video_id if video_id is not None else path.stem
    raw = _read_csv_column(path, "score")
    scores: list[float] = []
    for i, text in enumerate(raw):
        try:
            value = float(text)
        except ValueError:
            raise ParseError(str(path), i + 2,
                             f"score {text!r} is not a number")
        if not math.isfinite(value):
            raise NonFiniteScore(i, video_id=video_id, path=str(path))
        scores.append(value)
    return ScoreSequence(video_id=video_id, scores=tuple(scores), fps=fps)


def load_mask(path: str | Path, video_id: str | None = None) -> FrameMask:
    """Load a 'frame,label' CSV into a FrameMask."""
    path = Path(path)
    video_id = video_id if video_id is not None else path.stem
    raw = _read_csv_column(path, "label")
    labels: list[int] = []
    for i, text in enumerate(raw):
        if text.strip() not in ("0", "1"):
            raise NonBinaryLabel(i, video_id=video_id, path=str(path))
        labels.append(int(text))
    return FrameMask(video_id=video_id, labels=tuple(labels))


def load_branch_errors(path: str | Path) -> list[BranchErrors]:
    """Load a record-per-window branch error file.

    Each non-comment line is whitespace-separated numbers: target_start,
    window_len i, then 4i error values (the i short-branch values followed
    by the 3i long-branch values).
    """
    path = Path(path)
    if not path.is_file():
        raise MissingFile(str(path))
    windows: list[BranchErrors] = []
    with path.open("r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            fields = line.split()
            if len(fields) < 2:
                raise ParseError(str(path), lineno,
                                 "expected 'target_start window_len "
                                 "values...'")
            try:
                start, i = int(fields[0]), int(fields[1])
                values = [float(v) for v in fields[2:]]
            except ValueError as exc:
                raise ParseError(str(path), lineno, str(exc))
            if len(values) != 4 * i:
                raise BadLength(
                    f"window of length {i} needs {4 * i} values (short then "
                    f"long), got {len(values)} | path={path}:{lineno}")
            try:
                windows.append(BranchErrors(short=tuple(values[:i]),
                                            long=tuple(values[i:]),
                                            window_len=i,
                                            target_start=start))
            except EventEvalError as exc:
                exc.args = (f"{exc} | path={path}:{lineno}",)
                raise
    if not windows:
        raise ParseError(str(path), None, "file contains no windows")
    return windows


def load_events_json(path: str | Path) -> dict[str, EventSet]:
    """Load predicted events: a JSON object video_id -> [[start, end], ...]."""
    path = Path(path)
    if not path.is_file():
        raise MissingFile(str(path))
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(str(path), exc.lineno, exc.msg)
    if not isinstance(data, dict):
        raise ParseError(str(path), None, "expected a JSON object")
    out: dict[str, EventSet] = {}
    for video_id, spans in data.items():
        try:
            events = tuple(TemporalEvent(int(s), int(e)) for s, e in spans)
            out[video_id] = EventSet(video_id=video_id, events=events)
        except (EventEvalError, TypeError, ValueError) as exc:
            raise ParseError(str(path), None,
                             f"bad events for {video_id!r}: {exc}")
    return out


def events_to_json_obj(events_by_id: dict[str, EventSet]) -> dict:
    return {vid: [[e.start, e.end] for e in events_by_id[vid]]
            for vid in sorted(events_by_id)}


# ---------------------------------------------------------------------------
# config serialization


def config_to_dict(cfg: EvalConfig) -> dict:
    return {
        "sigma_max": cfg.sigma_max,
        "vote_window": cfg.vote_window,
        "vote_stride": cfg.vote_stride,
        "min_event_len": cfg.min_event_len,
        "tiou_thresholds": list(cfg.tiou_thresholds),
        "threshold_strategy": cfg.threshold_strategy.value,
        "hprs_beta": cfg.hprs_beta,
        "fixed_tau": cfg.fixed_tau,
    }


def config_from_dict(data: dict) -> EvalConfig:
    known = {f: data[f] for f in (
        "sigma_max", "vote_window", "vote_stride", "min_event_len",
        "tiou_thresholds", "threshold_strategy", "hprs_beta", "fixed_tau")
        if f in data}
    unknown = sorted(set(data) - set(known))
    if unknown:
        raise ValidationError(f"unknown config keys: {unknown}")
    if "tiou_thresholds" in known:
        known["tiou_thresholds"] = tuple(known["tiou_thresholds"])
    return EvalConfig(**known)


def load_config(path: str | Path) -> EvalConfig:
    path = Path(path)
    if not path.is_file():
        raise MissingFile(str(path))
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(str(path), exc.lineno, exc.msg)
    if not isinstance(data, dict):
        raise ParseError(str(path), None, "expected a JSON object")
    return config_from_dict(data)


# ---------------------------------------------------------------------------
# evaluation orchestration


def _reraise_with_video(exc: EventEvalError, video_id: str) -> None:
    marker = f"video_id={video_id!r}"
    if marker not in str(exc):
        exc.args = (f"{exc} | {marker}",)
    raise exc


def _map_videos(fn, items: Sequence, jobs: int) -> list:
    """Apply fn over items, optionally on a thread pool; order preserved."""
    if jobs <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


def load_videos(manifest: Manifest,
                jobs: int = 1) -> list[tuple[ScoreSequence, FrameMask]]:
    """Load and cross-validate every (scores, mask) pair, sorted by video_id."""
    entries = sorted(manifest.videos, key=lambda e: e.video_id)

    def load_one(entry: ManifestEntry) -> tuple[ScoreSequence, FrameMask]:
        scores = load_scores(entry.scores_path, entry.video_id)
        mask = load_mask(entry.mask_path, entry.video_id)
        try:
            validate_pair(scores, mask)
        except EventEvalError as exc:
            _reraise_with_video(exc, entry.video_id)
        return scores, mask

    return _map_videos(load_one, entries, jobs)


def predict_events(scores: ScoreSequence, tau: float, cfg: EvalConfig,
                   mode: str) -> EventSet:
    """Per-video predictions: full refinement, or raw binarize for baseline."""
    if mode == BASELINE:
        return mask_to_events(binarize(scores, tau))
    if mode == REFINED:
        return refine_pipeline(scores, tau, cfg)
    raise ValidationError(f"unknown mode {mode!r}")


def compute_frame_metrics(videos: Sequence[tuple[ScoreSequence, FrameMask]],
                          cfg: EvalConfig) -> FrameMetrics:
    """Frame-level metrics over the concatenated scores of all videos."""
    concat_scores: list[float] = []
    concat_labels: list[int] = []
    for scores, mask in videos:
        concat_scores.extend(scores.scores)
        concat_labels.extend(mask.labels)
    curve = roc_curve(concat_scores, concat_labels)
    tau_eer, eer = eer_threshold(curve)
    tau_hprs = hprs_threshold(concat_scores, concat_labels, cfg.hprs_beta)
    return FrameMetrics(
        auc_roc=auc_roc(curve),
        auc_pr=auc_pr(concat_scores, concat_labels),
        eer=eer,
        tau_eer=tau_eer,
        tau_hprs=tau_hprs,
        f1_at_tau_eer=f1_at_threshold(concat_scores, concat_labels,
                                      tau_eer).f1,
        f1_at_tau_hprs=f1_at_threshold(concat_scores, concat_labels,
                                       tau_hprs).f1,
    )


def event_metrics_at(videos: Sequence[tuple[ScoreSequence, FrameMask]],
                     tau: float, cfg: EvalConfig, mode: str,
                     jobs: int = 1) -> EventMetrics:
    """Refine every video at tau and evaluate against its mask's events."""

    def one(pair: tuple[ScoreSequence, FrameMask]):
        scores, mask = pair
        try:
            pred = predict_events(scores, tau, cfg, mode)
        except EventEvalError as exc:
            _reraise_with_video(exc, scores.video_id)
        return mask_to_events(mask), pred

    results = _map_videos(one, list(videos), jobs)
    gt_all = [gt for gt, _ in results]
    pred_all = [pred for _, pred in results]
    return multi_threshold_eval(gt_all, pred_all, cfg.tiou_thresholds)


def run_evaluation(manifest: Manifest, cfg: EvalConfig,
                   mode: str = REFINED, jobs: int = 1) -> Report:
    """Full protocol: frame metrics, both operating points, event metrics.

    Thresholds are derived once from the concatenated scores, then applied
    per video. Results are keyed and sorted by video_id, so the report is
    byte-identical regardless of worker count.
    """
    videos = load_videos(manifest, jobs)
    frame = compute_frame_metrics(videos, cfg)
    metrics_eer = event_metrics_at(videos, frame.tau_eer, cfg, mode, jobs)
    metrics_hprs = event_metrics_at(videos, frame.tau_hprs, cfg, mode, jobs)
    audit = audit_dataset([mask for _, mask in videos],
                          micro_threshold=cfg.min_event_len)
    return Report(
        frame_metrics=frame,
        event_metrics_eer=metrics_eer,
        event_metrics_hprs=metrics_hprs,
        audit=audit,
        config_echo=cfg,
        tool_version=__version__,
        mode=mode,
    )


# ---------------------------------------------------------------------------
# report emission


def frame_metrics_to_dict(m: FrameMetrics) -> dict:
    return {
        "auc_roc": m.auc_roc,
        "auc_pr": m.auc_pr,
        "eer": m.eer,
        "tau_eer": m.tau_eer,
        "tau_hprs": m.tau_hprs,
        "f1_at_tau_eer": m.f1_at_tau_eer,
        "f1_at_tau_hprs": m.f1_at_tau_hprs,
    }


def event_metrics_to_dict(m: EventMetrics) -> dict:
    return {
        "per_tiou": [
            {"tiou": t, "precision": e.precision, "recall": e.recall,
             "f1": e.f1, "tp": e.tp, "fp": e.fp, "fn": e.fn}
            for t, e in m.per_tiou.items()
        ],
        "average_f1": m.average_f1,
    }


def audit_to_dict(a: AuditReport) -> dict:
    return {
        "normal_frames": a.normal_frames,
        "anomalous_frames": a.anomalous_frames,
        "event_count": a.event_count,
        "avg_duration_frames": a.avg_duration_frames,
        "min_duration": a.min_duration,
        "max_duration": a.max_duration,
        "micro_event_count": a.micro_event_count,
    }


def report_to_dict(report: Report) -> dict:
    return {
        "tool_version": report.tool_version,
        "mode": report.mode,
        "config": config_to_dict(report.config_echo),
        "frame_metrics": frame_metrics_to_dict(report.frame_metrics),
        "event_metrics": {
            "tau_eer": event_metrics_to_dict(report.event_metrics_eer),
            "tau_hprs": event_metrics_to_dict(report.event_metrics_hprs),
        },
        "audit": audit_to_dict(report.audit),
    }


def report_from_json(blob: bytes | str) -> Report:
    """Inverse of emit_report(..., 'json'), for round-tripping reports."""
    data = json.loads(blob)

    def event_metrics(d: dict) -> EventMetrics:
        per = {row["tiou"]: EventPrf(row["precision"], row["recall"],
                                     row["f1"], tp=row["tp"], fp=row["fp"],
                                     fn=row["fn"])
               for row in d["per_tiou"]}
        return EventMetrics(per_tiou=per, average_f1=d["average_f1"])

    return Report(
        frame_metrics=FrameMetrics(**data["frame_metrics"]),
        event_metrics_eer=event_metrics(data["event_metrics"]["tau_eer"]),
        event_metrics_hprs=event_metrics(data["event_metrics"]["tau_hprs"]),
        audit=AuditReport(**data["audit"]),
        config_echo=config_from_dict(data["config"]),
        tool_version=data["tool_version"],
        mode=data["mode"],
    )


def _fmt(v) -> str:
    if isinstance(v, float):
        return format(v, ".6g")
    return str(v)


def _flat_md_table(values: dict) -> list[str]:
    return [
        "| " + " | ".join(values) + " |",
        "|" + "---|" * len(values),
        "| " + " | ".join(_fmt(v) for v in values.values()) + " |",
    ]


def _event_metrics_md(title: str, metrics: EventMetrics) -> list[str]:
    lines = [f"## {title}", "",
             "| tIoU | precision | recall | f1 | tp | fp | fn |",
             "|---|---|---|---|---|---|---|"]
    for t, e in metrics.per_tiou.items():
        lines.append(f"| {_fmt(t)} | {_fmt(e.precision)} | {_fmt(e.recall)} "
                     f"| {_fmt(e.f1)} | {e.tp} | {e.fp} | {e.fn} |")
    lines += ["", f"Average F1: {_fmt(metrics.average_f1)}"]
    return lines


def _markdown_report(report: Report) -> str:
    lines = ["# event-eval report", "",
             f"tool_version: {report.tool_version} | mode: {report.mode}",
             "", "## Frame-level metrics", ""]
    lines += _flat_md_table(frame_metrics_to_dict(report.frame_metrics))
    lines.append("")
    lines += _event_metrics_md("Event-level metrics @ tau_EER",
                               report.event_metrics_eer)
    lines.append("")
    lines += _event_metrics_md("Event-level metrics @ tau_HPRS",
                               report.event_metrics_hprs)
    lines += ["", "## Dataset audit", ""]
    lines += _flat_md_table(audit_to_dict(report.audit))
    lines += ["", "## Configuration", "", "| key | value |", "|---|---|"]
    for k, v in config_to_dict(report.config_echo).items():
        lines.append(f"| {k} | {v} |")
    lines.append("")
    return "\n".join(lines)


def _csv_report(report: Report) -> str:
    buf = _io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["section", "tiou", "metric", "value"])
    writer.writerow(["meta", "", "tool_version", report.tool_version])
    writer.writerow(["meta", "", "mode", report.mode])
    for k, v in frame_metrics_to_dict(report.frame_metrics).items():
        writer.writerow(["frame", "", k, repr(v) if isinstance(v, float)
                         else v])
    for section, metrics in (("event_eer", report.event_metrics_eer),
                             ("event_hprs", report.event_metrics_hprs)):
        for t, e in metrics.per_tiou.items():
            for k, v in (("precision", e.precision), ("recall", e.recall),
                         ("f1", e.f1), ("tp", e.tp), ("fp", e.fp),
                         ("fn", e.fn)):
                writer.writerow([section, repr(t), k,
                                 repr(v) if isinstance(v, float) else v])
        writer.writerow([section, "", "average_f1", repr(metrics.average_f1)])
    for k, v in audit_to_dict(report.audit).items():
        writer.writerow(["audit", "", k, repr(v) if isinstance(v, float)
                         else v])
    for k, v in config_to_dict(report.config_echo).items():
        writer.writerow(["config", "", k, v])
    return buf.getvalue()


def emit_report(report: Report, format: str = "json") -> bytes:
    """Serialize a report deterministically; json is the canonical format."""
    if format == "json":
        return (json.dumps(report_to_dict(report), indent=2) + "\n").encode()
    if format == "markdown":
        return (_markdown_report(report) + "\n").encode()
    if format == "csv":
        return _csv_report(report).encode()
    raise ValidationError(f"unknown report format {format!r}")


def _emit_flat(section: str, values: dict, format: str,
               title: str) -> bytes:
    if format == "json":
        return (json.dumps(values, indent=2) + "\n").encode()
    if format == "markdown":
        lines = [f"# {title}", ""] + _flat_md_table(values) + [""]
        return "\n".join(lines).encode()
    if format == "csv":
        buf = _io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["section", "metric", "value"])
        for k, v in values.items():
            writer.writerow([section, k, repr(v) if isinstance(v, float)
                             else v])
        return buf.getvalue().encode()
    raise ValidationError(f"unknown report format {format!r}")


def emit_audit(audit: AuditReport, format: str = "json") -> bytes:
    return _emit_flat("audit", audit_to_dict(audit), format, "Dataset audit")


def emit_frame_metrics(metrics: FrameMetrics, format: str = "json") -> bytes:
    return _emit_flat("frame", frame_metrics_to_dict(metrics), format,
                      "Frame-level metrics")


def emit_event_metrics(metrics: EventMetrics, format: str = "json") -> bytes:
    if format == "json":
        return (json.dumps(event_metrics_to_dict(metrics), indent=2)
                + "\n").encode()
    if format == "markdown":
        lines = _event_metrics_md("Event-level metrics", metrics) + [""]
        return "\n".join(lines).encode()
    if format == "csv":
        buf = _io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["tiou", "metric", "value"])
        for t, e in metrics.per_tiou.items():
            for k, v in (("precision", e.precision), ("recall", e.recall),
                         ("f1", e.f1), ("tp", e.tp), ("fp", e.fp),
                         ("fn", e.fn)):
                writer.writerow([repr(t), k, repr(v) if isinstance(v, float)
                                 else v])
        writer.writerow(["", "average_f1", repr(metrics.average_f1)])
        return buf.getvalue().encode()
    raise ValidationError(f"unknown report format {format!r}")
