from __future__ import annotations

import math

import numpy as np
import pytest

from event_eval import (
    DegenerateLabels,
    LengthMismatch,
    auc_pr,
    auc_roc,
    eer_threshold,
    f1_at_threshold,
    hprs_threshold,
    pr_curve,
    roc_curve,
)

from oracles import pair_count_auc, sweep_auc_pr, sweep_eer, sweep_fbeta

FIX_SCORES = (0.1, 0.4, 0.35, 0.8)
FIX_LABELS = (0, 0, 1, 1)


def random_fixture(rng, n_max=300):
    n = int(rng.integers(10, n_max))
    labels = rng.integers(0, 2, size=n)
    if labels.sum() == 0:
        labels[0] = 1
    if labels.sum() == n:
        labels[0] = 0
    # mixture with partial separation plus exact ties now and then
    scores = rng.normal(labels * rng.uniform(0.0, 2.0), 1.0)
    scores = np.round(scores, 2)  # force duplicate score values
    return scores, labels


def test_roc_curve_structure_and_invariants():
    curve = roc_curve(FIX_SCORES, FIX_LABELS)
    thresholds = [p.threshold for p in curve.points]
    assert thresholds == [-math.inf, 0.1, 0.35, 0.4, 0.8, math.inf]
    assert curve.points[0].tpr == 1.0 and curve.points[0].fpr == 1.0
    assert curve.points[-1].tpr == 0.0 and curve.points[-1].fpr == 0.0
    for p in curve.points:
        assert p.far == p.fpr
        assert p.tpr == pytest.approx(1.0 - p.frr, abs=1e-12)
    for a, b in zip(curve.points, curve.points[1:]):
        assert b.tpr <= a.tpr and b.fpr <= a.fpr


def test_roc_requires_both_classes():
    with pytest.raises(DegenerateLabels):
        roc_curve((0.1, 0.2), (0, 0))
    with pytest.raises(DegenerateLabels):
        roc_curve((0.1, 0.2), (1, 1))


def test_length_mismatch_rejected():
    with pytest.raises(LengthMismatch):
        roc_curve((0.1, 0.2, 0.3), (0, 1))


def test_auc_roc_fixture_is_three_quarters():
    # brute force over the 4 positive-negative pairs: 3 concordant of 4
    curve = roc_curve(FIX_SCORES, FIX_LABELS)
    assert auc_roc(curve) == pytest.approx(0.75, abs=1e-12)
    assert pair_count_auc(FIX_SCORES, FIX_LABELS) == pytest.approx(0.75)


def test_auc_roc_perfect_and_inverted():
    labels = (0, 0, 0, 1, 1, 1)
    assert auc_roc(roc_curve((1, 2, 3, 4, 5, 6), labels)) == pytest.approx(1.0)
    assert auc_roc(roc_curve((6, 5, 4, 1e-3, 1e-4, 1e-5), labels)) \
        == pytest.approx(0.0)


def test_auc_roc_chance_level_for_independent_scores():
    rng = np.random.default_rng(101)
    n = 20_000
    labels = rng.integers(0, 2, size=n)
    scores = rng.normal(size=n)
    value = auc_roc(roc_curve(scores, labels))
    assert value == pytest.approx(0.5, abs=0.05)


def test_auc_roc_equals_pair_counting_on_random_fixtures():
    rng = np.random.default_rng(7)
    for _ in range(100):
        scores, labels = random_fixture(rng)
        got = auc_roc(roc_curve(scores, labels))
        want = pair_count_auc(scores, labels)
        assert got == pytest.approx(want, abs=1e-9)


def test_auc_pr_perfect_and_degenerate_positive():
    labels = (0, 0, 1, 1)
    assert auc_pr((1, 2, 3, 4), labels) == pytest.approx(1.0)
    assert auc_pr((0.5, 0.1, 0.9), (1, 1, 1)) == pytest.approx(1.0)
    with pytest.raises(DegenerateLabels):
        auc_pr((0.5, 0.1), (0, 0))


def test_auc_pr_fixture_matches_sweep_oracle():
    got = auc_pr(FIX_SCORES, FIX_LABELS)
    want = sweep_auc_pr(FIX_SCORES, FIX_LABELS)
    assert got == pytest.approx(want, abs=1e-12)
    assert got == pytest.approx(5.0 / 6.0, abs=1e-12)  # 0.5*1 + 0.5*(2/3)


def test_auc_pr_matches_sweep_on_random_fixtures():
    rng = np.random.default_rng(17)
    for _ in range(100):
        scores, labels = random_fixture(rng)
        assert auc_pr(scores, labels) == pytest.approx(
            sweep_auc_pr(scores, labels), abs=1e-9)


def test_eer_fixture():
    tau, eer = eer_threshold(roc_curve(FIX_SCORES, FIX_LABELS))
    assert tau == 0.4
    assert eer == pytest.approx(0.5)
    assert (tau, eer) == sweep_eer(FIX_SCORES, FIX_LABELS)


def test_eer_perfect_separation_is_zero():
    tau, eer = eer_threshold(roc_curve((1, 2, 3, 10, 11, 12),
                                       (0, 0, 0, 1, 1, 1)))
    assert eer == 0.0
    assert tau == 10  # lowest candidate hitting FAR = FRR = 0


def test_eer_symmetric_distributions_centered():
    rng = np.random.default_rng(3)
    offsets = rng.uniform(0.1, 2.0, size=400)
    mid = 5.0
    scores = np.concatenate([mid - offsets, mid + offsets])
    labels = np.concatenate([np.zeros(400, int), np.ones(400, int)])
    tau, eer = eer_threshold(roc_curve(scores, labels))
    assert abs(tau - mid) < 2.0  # crossing stays near the mirror point
    assert eer == pytest.approx(0.0, abs=0.05)


def test_eer_far_frr_within_one_grid_step():
    rng = np.random.default_rng(23)
    for _ in range(50):
        n = int(rng.integers(20, 200))
        labels = rng.integers(0, 2, size=n)
        if labels.sum() in (0, n):
            labels[0] = 1 - labels[0]
        scores = rng.normal(size=n)  # continuous: all scores distinct
        curve = roc_curve(scores, labels)
        n_pos = int(labels.sum())
        n_neg = n - n_pos
        tau, _ = eer_threshold(curve)
        point = next(p for p in curve.points if p.threshold == tau)
        assert abs(point.far - point.frr) <= 1.0 / n_pos + 1.0 / n_neg


def test_eer_and_hprs_match_exhaustive_sweep():
    rng = np.random.default_rng(41)
    for _ in range(100):
        scores, labels = random_fixture(rng)
        curve = roc_curve(scores, labels)
        assert eer_threshold(curve) == sweep_eer(scores, labels)
        beta = float(rng.choice([0.25, 0.5, 1.0, 2.0]))
        assert hprs_threshold(scores, labels, beta) == \
            sweep_fbeta(scores, labels, beta)


def test_hprs_beta_one_is_f1_argmax():
    rng = np.random.default_rng(59)
    scores, labels = random_fixture(rng, n_max=200)
    tau = hprs_threshold(scores, labels, beta=1.0)
    best_f1, best_tau = -1.0, None
    for cand in [-math.inf] + sorted(set(scores.tolist())) + [math.inf]:
        f1 = f1_at_threshold(scores, labels, cand).f1
        if f1 >= best_f1:
            best_f1, best_tau = f1, cand
    assert tau == best_tau


def test_hprs_perfect_separation_picks_highest_gap_candidate():
    scores = (1.0, 2.0, 3.0, 10.0, 11.0, 12.0)
    labels = (0, 0, 0, 1, 1, 1)
    # F_beta = 1 only at tau = 10, the one candidate inside the gap
    assert hprs_threshold(scores, labels) == 10.0


def test_hprs_default_seeded_fixture_matches_sweep():
    rng = np.random.default_rng(2024)
    labels = rng.integers(0, 2, size=200)
    scores = np.round(rng.normal(labels * 1.2, 1.0), 2)
    assert hprs_threshold(scores, labels, 0.5) == \
        sweep_fbeta(scores, labels, 0.5)


def test_f1_at_threshold_extremes_and_fixture():
    below = f1_at_threshold(FIX_SCORES, FIX_LABELS, 0.0)
    assert below.recall == 1.0
    assert below.precision == pytest.approx(0.5)  # positive rate
    above = f1_at_threshold(FIX_SCORES, FIX_LABELS, 1.0)
    assert above == (0.0, 0.0, 0.0)
    mid = f1_at_threshold(FIX_SCORES, FIX_LABELS, 0.375)
    assert mid == pytest.approx((0.5, 0.5, 0.5))


def test_monotone_transform_invariance():
    rng = np.random.default_rng(71)
    scores, labels = random_fixture(rng, n_max=200)
    a, b = 2.5, -1.25
    transformed = a * scores + b
    curve = roc_curve(scores, labels)
    curve_t = roc_curve(transformed, labels)
    assert auc_roc(curve_t) == pytest.approx(auc_roc(curve), abs=1e-12)
    assert auc_pr(transformed, labels) == pytest.approx(
        auc_pr(scores, labels), abs=1e-12)
    tau, eer = eer_threshold(curve)
    tau_t, eer_t = eer_threshold(curve_t)
    assert eer_t == pytest.approx(eer, abs=1e-12)
    assert tau_t == a * tau + b
    hp = hprs_threshold(scores, labels)
    hp_t = hprs_threshold(transformed, labels)
    assert hp_t == a * hp + b


def test_hprs_precision_no_lower_than_eer_on_monotone_fixture():
    # overlapping gaussians: raising the threshold trades recall for
    # precision monotonically, the regime the ordering claim refers to
    rng = np.random.default_rng(97)
    n = 4000
    labels = rng.integers(0, 2, size=n)
    scores = rng.normal(labels * 1.5, 1.0)
    curve = roc_curve(scores, labels)
    tau_eer, _ = eer_threshold(curve)
    tau_hprs = hprs_threshold(scores, labels, beta=0.5)
    assert tau_hprs > tau_eer
    p_eer = f1_at_threshold(scores, labels, tau_eer).precision
    p_hprs = f1_at_threshold(scores, labels, tau_hprs).precision
    assert p_hprs >= p_eer


def test_pr_curve_recall_monotone():
    curve = pr_curve(FIX_SCORES, FIX_LABELS)
    recalls = [p.recall for p in curve.points]
    assert recalls == sorted(recalls, reverse=True)
    assert curve.points[0].recall == 1.0
    assert curve.points[-1].recall == 0.0
