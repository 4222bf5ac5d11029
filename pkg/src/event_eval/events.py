"""Event extraction from binary masks and the frame-to-event pipeline.

An event is a maximal run of consecutive anomalous frames; a run touching
the end of the video closes at the final frame. The refinement pipeline is
smoothing -> binarize -> windowed majority vote -> run extraction -> short
event filter, in that order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    EvalConfig,
    EventSet,
    FrameMask,
    ScoreSequence,
    TemporalEvent,
    events_within,
)
from .errors import InvalidWindow, ValidationError
from .smoothing import hierarchical_smooth


@dataclass(frozen=True)
class AuditReport:
    """Dataset-wide frame and event statistics."""

    normal_frames: int
    anomalous_frames: int
    event_count: int
    avg_duration_frames: float
    min_duration: int
    max_duration: int
    micro_event_count: int

    def __post_init__(self) -> None:
        if self.event_count > 0:
            expect = self.anomalous_frames / self.event_count
            if abs(self.avg_duration_frames - expect) > 1e-9:
                raise ValidationError(
                    "avg_duration_frames inconsistent with anomalous_frames "
                    "/ event_count")
        elif self.anomalous_frames != 0:
            raise ValidationError("anomalous frames present but no events")


def mask_to_events(mask: FrameMask) -> EventSet:
    """Decompose a mask into maximal runs of 1s."""
    labels = mask.as_array()
    padded = np.concatenate([[0], labels, [0]])
    delta = np.diff(padded)
    starts = np.flatnonzero(delta == 1)
    ends = np.flatnonzero(delta == -1) - 1
    events = tuple(TemporalEvent(int(s), int(e))
                   for s, e in zip(starts, ends))
    return EventSet(video_id=mask.video_id, events=events)


def events_to_mask(events: EventSet, n: int) -> FrameMask:
    """Render events back to a length-n binary mask."""
    if n < 1:
        raise ValidationError(f"mask length must be >= 1, got {n}")
    events_within(events, n)
    labels = np.zeros(n, dtype=int)
    for e in events:
        labels[e.start:e.end + 1] = 1
    return FrameMask(video_id=events.video_id, labels=labels)


def binarize(scores: ScoreSequence, tau: float) -> FrameMask:
    """Frames with score >= tau become anomalous."""
    labels = (scores.as_array() >= tau).astype(int)
    return FrameMask(video_id=scores.video_id, labels=labels)


def majority_vote_refine(mask: FrameMask, window: int,
                         stride: int) -> FrameMask:
    """Stabilize a mask by windowed majority voting.

    Windows start at 0, stride, 2*stride, ...; the final window is clamped
    at the last frame. Each window's majority label fills the stride-length
    output segment at the window start (clamped too), so overlapping windows
    never fight over frames. Ties go to 1: recall is preserved here and the
    short-event filter guards precision afterwards.
    """
    n = len(mask)
    if not 1 <= stride <= window <= n:
        raise InvalidWindow(
            f"need 1 <= stride <= window <= mask length, got stride={stride}"
            f" window={window} length={n}")
    labels = mask.as_array()
    out = np.empty(n, dtype=int)
    for t in range(0, n, stride):
        win = labels[t:min(t + window, n)]
        decision = 1 if 2 * int(win.sum()) >= win.size else 0
        out[t:min(t + stride, n)] = decision
    return FrameMask(video_id=mask.video_id, labels=out)


def filter_short_events(events: EventSet, d_min: int) -> EventSet:
    """Drop events whose duration is strictly shorter than d_min frames."""
    if d_min < 1:
        raise ValidationError(f"d_min must be >= 1, got {d_min}")
    kept = tuple(e for e in events if e.duration >= d_min)
    return EventSet(video_id=events.video_id, events=kept)


def refine_pipeline(scores: ScoreSequence, tau: float,
                    cfg: EvalConfig) -> EventSet:
    """Run the full refinement for one video.

    hierarchical_smooth -> binarize at tau -> majority_vote_refine ->
    mask_to_events -> filter_short_events.
    """
    smoothed = hierarchical_smooth(scores, cfg.sigma_max)
    mask = binarize(smoothed, tau)
    voted = majority_vote_refine(mask, cfg.vote_window, cfg.vote_stride)
    return filter_short_events(mask_to_events(voted), cfg.min_event_len)


def audit_dataset(masks: list[FrameMask],
                  micro_threshold: int) -> AuditReport:
    """Aggregate frame and event statistics across ground-truth masks.

    micro_event_count tallies events shorter than micro_threshold frames,
    the candidates for annotation-noise cleaning.
    """
    if not masks:
        raise ValidationError("audit requires at least one mask")
    if micro_threshold < 1:
        raise ValidationError(
            f"micro_threshold must be >= 1, got {micro_threshold}")
    total = 0
    durations: list[int] = []
    for mask in masks:
        total += len(mask)
        durations.extend(e.duration for e in mask_to_events(mask))
    anomalous = sum(durations)
    count = len(durations)
    return AuditReport(
        normal_frames=total - anomalous,
        anomalous_frames=anomalous,
        event_count=count,
        avg_duration_frames=anomalous / count if count else 0.0,
        min_duration=min(durations) if durations else 0,
        max_duration=max(durations) if durations else 0,
        micro_event_count=sum(1 for d in durations if d < micro_threshold),
    )


def clean_micro_events(masks: list[FrameMask],
                       micro_threshold: int) -> list[FrameMask]:
    """Flip ground-truth events shorter than micro_threshold back to 0."""
    if micro_threshold < 1:
        raise ValidationError(
            f"micro_threshold must be >= 1, got {micro_threshold}")
    cleaned = []
    for mask in masks:
        kept = filter_short_events(mask_to_events(mask), micro_threshold)
        cleaned.append(events_to_mask(kept, len(mask)))
    return cleaned
