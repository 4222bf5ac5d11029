"""Frame-level curves and operating-point selection.

All searches run over the finest lossless candidate grid: the distinct
observed scores plus -inf/+inf sentinels. Binarization is score >= tau
everywhere; thresholds are meant to be derived once per model-dataset pair
from the concatenated test-set scores.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .errors import DegenerateLabels, LengthMismatch, NonBinaryLabel, NonFiniteScore


class PrecisionRecallF1(NamedTuple):
    precision: float
    recall: float
    f1: float


@dataclass(frozen=True)
class RocPoint:
    threshold: float
    far: float
    frr: float
    tpr: float
    fpr: float


@dataclass(frozen=True)
class RocCurve:
    """Operating points sorted ascending by threshold.

    far == fpr and frr == 1 - tpr by construction; tpr and fpr are monotone
    non-increasing in the threshold.
    """

    points: tuple[RocPoint, ...]


@dataclass(frozen=True)
class PrPoint:
    threshold: float
    precision: float
    recall: float


@dataclass(frozen=True)
class PrCurve:
    points: tuple[PrPoint, ...]


def _as_arrays(scores: Sequence[float],
               labels: Sequence[int]) -> tuple[np.ndarray, np.ndarray]:
    s = np.asarray(scores, dtype=float)
    y = np.asarray(labels)
    if s.ndim != 1 or y.ndim != 1:
        raise ValueError("scores and labels must be 1-dimensional")
    if s.size != y.size:
        raise LengthMismatch(s.size, y.size)
    bad = np.flatnonzero(~np.isfinite(s))
    if bad.size:
        raise NonFiniteScore(int(bad[0]))
    yf = y.astype(float)
    bad = np.flatnonzero((yf != 0.0) & (yf != 1.0))
    if bad.size:
        raise NonBinaryLabel(int(bad[0]))
    return s, y.astype(int)


def _candidate_counts(s: np.ndarray, y: np.ndarray,
                      sentinels: bool = True) -> tuple[np.ndarray, np.ndarray,
                                                       np.ndarray, int, int]:
    """TP/FP counts of the >=-threshold classifier at every candidate.

    Returns (candidates ascending, tp, fp, n_pos, n_neg). One pass over the
    sorted scores; counts are exact integers.
    """
    order = np.argsort(s, kind="mergesort")
    s_sorted = s[order]
    cum_pos = np.concatenate([[0], np.cumsum(y[order])])
    n_pos = int(cum_pos[-1])
    n_neg = s.size - n_pos
    cand = np.unique(s)
    if sentinels:
        cand = np.concatenate([[-np.inf], cand, [np.inf]])
    idx = np.searchsorted(s_sorted, cand, side="left")
    tp = n_pos - cum_pos[idx]
    fp = (s.size - idx) - tp
    return cand, tp, fp, n_pos, n_neg


def roc_curve(scores: Sequence[float], labels: Sequence[int]) -> RocCurve:
    """ROC operating points at every distinct score plus +-inf sentinels."""
    s, y = _as_arrays(scores, labels)
    cand, tp, fp, n_pos, n_neg = _candidate_counts(s, y)
    if n_pos == 0 or n_neg == 0:
        raise DegenerateLabels(
            f"need both classes, got {n_pos} positive / {n_neg} negative "
            "frames")
    points = tuple(
        RocPoint(threshold=float(t),
                 far=fpk / n_neg,
                 frr=(n_pos - tpk) / n_pos,
                 tpr=tpk / n_pos,
                 fpr=fpk / n_neg)
        for t, tpk, fpk in zip(cand, tp, fp))
    return RocCurve(points=points)


def auc_roc(curve: RocCurve) -> float:
    """Trapezoidal area under (fpr, tpr).

    Equals the Mann-Whitney pair-counting statistic with ties worth 0.5.
    """
    pts = curve.points[::-1]  # ascending fpr
    area = 0.0
    for a, b in zip(pts, pts[1:]):
        area += (b.fpr - a.fpr) * (b.tpr + a.tpr) / 2.0
    return float(min(1.0, max(0.0, area)))  # guard ulp-level overshoot


def pr_curve(scores: Sequence[float], labels: Sequence[int]) -> PrCurve:
    """Precision/recall at every distinct score plus +-inf sentinels.

    Precision of the empty prediction set (tau = +inf) is 0 by convention.
    """
    s, y = _as_arrays(scores, labels)
    cand, tp, fp, n_pos, _ = _candidate_counts(s, y)
    if n_pos == 0:
        raise DegenerateLabels("need at least one positive frame")
    points = tuple(
        PrPoint(threshold=float(t),
                precision=tpk / (tpk + fpk) if tpk + fpk > 0 else 0.0,
                recall=tpk / n_pos)
        for t, tpk, fpk in zip(cand, tp, fp))
    return PrCurve(points=points)


def auc_pr(scores: Sequence[float], labels: Sequence[int]) -> float:
    """Step-wise (right-continuous) area under the precision-recall curve.

    Walking thresholds from high to low, each distinct score contributes
    (recall_k - recall_{k-1}) * precision_k.
    """
    s, y = _as_arrays(scores, labels)
    cand, tp, fp, n_pos, _ = _candidate_counts(s, y, sentinels=False)
    if n_pos == 0:
        raise DegenerateLabels("need at least one positive frame")
    area = 0.0
    prev_recall = 0.0
    for tpk, fpk in zip(tp[::-1], fp[::-1]):
        recall = tpk / n_pos
        precision = tpk / (tpk + fpk)  # >= 1 frame predicted at any observed score
        area += (recall - prev_recall) * precision
        prev_recall = recall
    return float(min(1.0, max(0.0, area)))  # guard ulp-level overshoot


def eer_threshold(curve: RocCurve) -> tuple[float, float]:
    """Threshold minimizing |FAR - FRR|; ties broken by the lower threshold.

    The reported EER is the midpoint (FAR + FRR) / 2 at that point, the
    standard convention since finite grids rarely yield exact equality.
    """
    best = None
    best_gap = math.inf
    for p in curve.points:
        gap = abs(p.far - p.frr)
        if gap < best_gap:
            best_gap = gap
            best = p
    assert best is not None
    return float(best.threshold), float((best.far + best.frr) / 2.0)


def hprs_threshold(scores: Sequence[float], labels: Sequence[int],
                   beta: float = 0.5) -> float:
    """Precision-prioritizing operating point: the F_beta-maximizing
    threshold, ties broken by the HIGHER (stricter) threshold.

    beta < 1 weights precision over recall; beta = 1 reduces to the
    F1-maximizing threshold.
    """
    if not beta > 0:
        raise ValueError(f"beta must be positive, got {beta}")
    s, y = _as_arrays(scores, labels)
    cand, tp, fp, n_pos, n_neg = _candidate_counts(s, y)
    if n_pos == 0 or n_neg == 0:
        raise DegenerateLabels(
            f"need both classes, got {n_pos} positive / {n_neg} negative "
            "frames")
    b2 = beta * beta
    best_tau = float(cand[0])
    best_fb = -1.0
    for t, tpk, fpk in zip(cand, tp, fp):
        prec = tpk / (tpk + fpk) if tpk + fpk > 0 else 0.0
        rec = tpk / n_pos
        denom = b2 * prec + rec
        fb = (1.0 + b2) * prec * rec / denom if denom > 0 else 0.0
        if fb >= best_fb:
            best_fb = fb
            best_tau = float(t)
    return best_tau


def f1_at_threshold(scores: Sequence[float], labels: Sequence[int],
                    tau: float) -> PrecisionRecallF1:
    """Frame-level precision/recall/F1 of the >=-tau binarization.

    Empty predictions or no positives yield 0 for the undefined ratio, and
    F1 = 0 whenever precision + recall = 0.
    """
    s, y = _as_arrays(scores, labels)
    pred = s >= tau
    tp = int(np.count_nonzero(pred & (y == 1)))
    fp = int(np.count_nonzero(pred & (y == 0)))
    fn = int(np.count_nonzero(~pred & (y == 1)))
    precision = tp / (tp + fp) if tp + fp > 0 else 0.0
    recall = tp / (tp + fn) if tp + fn > 0 else 0.0
    pr = precision + recall
    f1 = 2.0 * precision * recall / pr if pr > 0 else 0.0
    return PrecisionRecallF1(precision, recall, f1)
