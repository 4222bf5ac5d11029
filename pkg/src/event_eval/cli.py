"""Subcommand CLI tying the pipeline together.

Exit codes: 0 success, 1 validation error (bad data or configuration),
2 I/O error (missing or malformed files, bad usage).
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .core import EvalConfig, ThresholdStrategy
from .errors import EventEvalError, InputError, ValidationError
from .events import audit_dataset, mask_to_events
from .fusion import run_dual_pipeline
from .io import (
    BASELINE,
    REFINED,
    compute_frame_metrics,
    emit_audit,
    emit_event_metrics,
    emit_frame_metrics,
    emit_report,
    events_to_json_obj,
    load_branch_errors,
    load_config,
    load_events_json,
    load_manifest,
    load_videos,
    predict_events,
    run_evaluation,
)
from .matching import multi_threshold_eval

_DEFAULTS = EvalConfig()


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="event-eval",
        description="Refine per-frame anomaly scores into temporal events "
                    "and evaluate them at frame and event level.")
    parser.add_argument("--config",
                        help="JSON config file; keys mirror EvalConfig "
                             f"(defaults: sigma_max={_DEFAULTS.sigma_max}, "
                             f"vote_window={_DEFAULTS.vote_window}, "
                             f"vote_stride={_DEFAULTS.vote_stride}, "
                             f"min_event_len={_DEFAULTS.min_event_len}, "
                             "tiou_thresholds="
                             f"{list(_DEFAULTS.tiou_thresholds)}, "
                             "threshold_strategy="
                             f"{_DEFAULTS.threshold_strategy.value}, "
                             f"hprs_beta={_DEFAULTS.hprs_beta}).")
    parser.add_argument("--format", choices=["json", "csv", "markdown"],
                        default="json", help="Report output format.")
    parser.add_argument("--jobs", type=int, default=None,
                        help="Worker threads for per-video work "
                             "(default: $EVENT_EVAL_JOBS or 1).")
    parser.add_argument("--seed", type=int, default=7,
                        help="Seed for synthetic fixture generation only "
                             "(see python -m event_eval.synthetic); "
                             "evaluation itself is deterministic.")
    parser.add_argument("--out", help="Write output bytes to this file "
                                      "instead of stdout.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("manifest", help="Path to the dataset manifest.")
        return p

    p = add("audit", "Frame/event statistics of the ground-truth masks.")
    p.add_argument("--micro-threshold", type=int, default=None,
                   help="Events shorter than this count as micro events "
                        "(default: min_event_len).")

    add("frame-metrics", "AUC-ROC, AUC-PR, EER and operating points over "
                         "the concatenated scores.")

    p = add("refine", "Apply the refinement pipeline; writes events JSON.")
    p.add_argument("--tau", type=float, default=None,
                   help="Binarization threshold; otherwise derived per the "
                        "configured strategy.")
    p.add_argument("--mode", choices=[REFINED, BASELINE], default=REFINED)

    p = add("event-metrics", "Match predicted events against ground truth.")
    p.add_argument("--pred", required=True,
                   help="Events JSON produced by 'refine' or 'fuse'.")

    p = add("fuse", "Dual-branch window scoring; writes events JSON.")
    p.add_argument("--tau", type=float, default=None,
                   help="Event-score threshold (required unless the config "
                        "sets fixed_tau).")

    p = add("evaluate", "Full pipeline: frame metrics, refinement at both "
                        "operating points, event metrics, audit.")
    p.add_argument("--mode", choices=[REFINED, BASELINE], default=REFINED)

    return parser


def _resolve_jobs(args: argparse.Namespace) -> int:
    if args.jobs is not None:
        jobs = args.jobs
    else:
        jobs = int(os.environ.get("EVENT_EVAL_JOBS", "1"))
    if jobs < 1:
        raise ValidationError(f"jobs must be >= 1, got {jobs}")
    return jobs


def _derive_tau(videos, cfg: EvalConfig, explicit: float | None) -> float:
    if explicit is not None:
        return explicit
    if cfg.threshold_strategy is ThresholdStrategy.FIXED:
        return float(cfg.fixed_tau)
    frame = compute_frame_metrics(videos, cfg)
    if cfg.threshold_strategy is ThresholdStrategy.EER:
        return frame.tau_eer
    return frame.tau_hprs


def _emit(data: bytes, out: str | None) -> None:
    if out:
        with open(out, "wb") as fh:
            fh.write(data)
    else:
        sys.stdout.buffer.write(data)


def _json_bytes(obj) -> bytes:
    return (json.dumps(obj, indent=2) + "\n").encode()


def _run(args: argparse.Namespace) -> int:
    cfg = load_config(args.config) if args.config else EvalConfig()
    jobs = _resolve_jobs(args)
    manifest = load_manifest(args.manifest)

    if args.command == "audit":
        videos = load_videos(manifest, jobs)
        threshold = (args.micro_threshold if args.micro_threshold is not None
                     else cfg.min_event_len)
        audit = audit_dataset([m for _, m in videos], threshold)
        _emit(emit_audit(audit, args.format), args.out)
    elif args.command == "frame-metrics":
        videos = load_videos(manifest, jobs)
        metrics = compute_frame_metrics(videos, cfg)
        _emit(emit_frame_metrics(metrics, args.format), args.out)
    elif args.command == "refine":
        videos = load_videos(manifest, jobs)
        tau = _derive_tau(videos, cfg, args.tau)
        events = {s.video_id: predict_events(s, tau, cfg, args.mode)
                  for s, _ in videos}
        _emit(_json_bytes(events_to_json_obj(events)), args.out)
    elif args.command == "event-metrics":
        videos = load_videos(manifest, jobs)
        pred = load_events_json(args.pred)
        gt = [mask_to_events(m) for _, m in videos]
        metrics = multi_threshold_eval(gt, list(pred.values()),
                                       cfg.tiou_thresholds)
        _emit(emit_event_metrics(metrics, args.format), args.out)
    elif args.command == "fuse":
        tau = args.tau if args.tau is not None else cfg.fixed_tau
        if tau is None:
            raise ValidationError(
                "fuse needs --tau or a config with fixed_tau")
        videos = load_videos(manifest, jobs)
        lens = {s.video_id: len(s) for s, _ in videos}
        batches = {}
        for entry in manifest.videos:
            if entry.branch_errors_path is None:
                raise ValidationError(
                    f"video {entry.video_id!r} has no branch_errors file "
                    "in the manifest")
            batches[entry.video_id] = load_branch_errors(
                entry.branch_errors_path)
        events = run_dual_pipeline(batches, float(tau), lens)
        _emit(_json_bytes(events_to_json_obj(events)), args.out)
    elif args.command == "evaluate":
        report = run_evaluation(manifest, cfg, mode=args.mode, jobs=jobs)
        _emit(emit_report(report, args.format), args.out)
    else:  # pragma: no cover - argparse enforces the choices
        raise ValidationError(f"unknown command {args.command!r}")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _run(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (EventEvalError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
