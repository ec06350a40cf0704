import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from src.errors import DegenerateError, InputError
from src.models.evaluation import CurveMode, LossKind
from src.services.metrics import (
    auc, average_precision, classification_report, confusion_matrix, confusion_matrix_from_counts,
    dice, iou, loss, mean_loss, per_label_report, regression_report, roc_curve, top_k_accuracy
)


def _pairwise_auc(actual, scores):
    positives = [s for a, s in zip(actual, scores) if a == 1]
    negatives = [s for a, s in zip(actual, scores) if a == 0]
    total = 0.0
    for p in positives:
        for n in negatives:
            total += 1.0 if p > n else 0.5 if p == n else 0.0
    return total / (len(positives) * len(negatives))


# confusion matrix

def test_confusion_all_negative():
    cm = confusion_matrix([0] * 6, [0] * 6, 2)
    assert cm.cells.tolist() == [[6, 0], [0, 0]]


def test_confusion_always_negative_predictor():
    actual = [1] * 100 + [0] * 9900
    view = confusion_matrix(actual, [0] * 10000, 2).binary_view()
    assert (view['TP'], view['FN'], view['TN'], view['FP']) == (0, 100, 9900, 0)


def test_confusion_three_classes():
    cm = confusion_matrix([0, 1, 2, 1], [0, 2, 2, 1], 3)
    assert cm.cells.tolist() == [[1, 0, 0], [0, 1, 1], [0, 0, 1]]
    assert cm.actual_counts() == [1, 2, 1]


@pytest.mark.parametrize('actual, predicted, k', [
    ([0, 1], [0], 2),
    ([], [], 2),
    ([0, 2], [0, 1], 2),
    ([0, -1], [0, 1], 2),
    ([0.5, 1], [0, 1], 2),
])
def test_confusion_rejects_bad_input(actual, predicted, k):
    with pytest.raises(InputError):
        confusion_matrix(actual, predicted, k)


def test_confusion_out_of_range_row():
    with pytest.raises(InputError) as info:
        confusion_matrix([0, 1, 1], [0, 1, 5], 2)
    assert info.value.row == 2


# classification report

def test_report_imbalanced_always_negative():
    report = classification_report(confusion_matrix_from_counts(tp=0, fn=100, fp=0, tn=9900))
    assert report.accuracy == 0.99
    assert report.sensitivity == 0
    assert report.miss_rate == 1
    assert report.balanced_accuracy == 0.5
    assert report.cohens_kappa == 0
    assert report.precision is None
    assert 'precision_no_predicted_positives' in report.flags


def test_report_perfect_binary():
    report = classification_report(confusion_matrix_from_counts(tp=4, fn=0, fp=0, tn=6))
    assert report.accuracy == 1
    assert report.f1 == 1
    assert report.cohens_kappa == 1
    assert report.error_rate == 0


def test_report_three_one_one_five():
    report = classification_report(confusion_matrix_from_counts(tp=3, fn=1, fp=1, tn=5))
    assert report.precision == pytest.approx(0.75)
    assert report.recall == pytest.approx(0.75)
    assert report.f1 == pytest.approx(0.75)


def test_report_kappa_undefined_when_chance_agreement_one():
    report = classification_report(confusion_matrix([0, 0, 0], [0, 0, 0], 2))
    assert report.cohens_kappa is None
    assert 'kappa_chance_agreement_one' in report.flags
    assert report.sensitivity is None
    assert report.balanced_accuracy is None
    assert report.accuracy == 1


def test_report_multiclass_needs_positive_class():
    cm = confusion_matrix([0, 1, 2, 1], [0, 2, 2, 1], 3)
    report = classification_report(cm)
    assert report.sensitivity is None
    assert 'no_positive_class' in report.flags
    assert report.balanced_accuracy == pytest.approx((1 + 0.5 + 1) / 3)

    focused = classification_report(cm, positive_class=1)
    assert focused.sensitivity == pytest.approx(0.5)
    assert focused.precision == pytest.approx(1.0)


def test_report_rejects_positive_class_out_of_range():
    with pytest.raises(InputError):
        classification_report(confusion_matrix([0, 1], [0, 1], 2), positive_class=2)


confusion_cells = st.lists(st.integers(0, 60), min_size=4, max_size=4)


@settings(max_examples=1000)
@given(confusion_cells)
def test_report_invariants(cells):
    tn, fp, fn, tp = cells
    assume(sum(cells) > 0)
    report = classification_report(confusion_matrix_from_counts(tp=tp, fn=fn, fp=fp, tn=tn))
    assert report.accuracy + report.error_rate == pytest.approx(1.0, abs=1e-12)
    for name in ('accuracy', 'sensitivity', 'specificity', 'precision', 'f1', 'balanced_accuracy', 'miss_rate'):
        value = getattr(report, name)
        assert value is None or 0 <= value <= 1
    if report.cohens_kappa is not None:
        assert -1 <= report.cohens_kappa <= report.accuracy + 1e-12
        assert (report.cohens_kappa == 1) == (fp == 0 and fn == 0)
    if report.precision and report.recall:
        harmonic = 2 * report.precision * report.recall / (report.precision + report.recall)
        assert report.f1 == pytest.approx(harmonic, rel=1e-12)


@settings(max_examples=200)
@given(st.lists(st.integers(0, 1), min_size=2, max_size=40), st.integers(0, 1))
def test_constant_predictor_balanced_accuracy(actual, constant):
    assume(0 < sum(actual) < len(actual))
    report = classification_report(confusion_matrix(actual, [constant] * len(actual), 2))
    assert report.balanced_accuracy == pytest.approx(0.5)


# per label

def test_per_label_macro_f1():
    actual = np.array([[1, 1], [0, 1], [0, 0]])
    predicted = np.array([[1, 0], [0, 1], [0, 1]])
    report = per_label_report(actual, predicted, 2)
    assert [r.f1 for r in report.labels] == [1.0, 0.5]
    assert report.macro['f1'] == pytest.approx(0.75)


def test_per_label_all_perfect():
    labels = [0, 1, 2, 2, 1]
    report = per_label_report(labels, labels, 3)
    for name in ('accuracy', 'f1', 'precision', 'sensitivity', 'specificity'):
        assert report.macro[name] == 1


def test_per_label_skips_undefined_recall():
    report = per_label_report([0, 1, 0, 1], [0, 1, 1, 1], 3)
    assert report.labels[2].sensitivity is None
    assert report.skipped['recall'] == 1
    assert report.macro['recall'] == pytest.approx(0.75)


def test_per_label_rejects_single_class():
    with pytest.raises(InputError):
        per_label_report([0], [0], 1)


# ROC and AUC

def test_roc_hand_sweep():
    curve = roc_curve([1, 0, 1, 0], [0.9, 0.8, 0.7, 0.1])
    assert curve.points == [(0.0, 0.0), (0.0, 0.5), (0.5, 0.5), (0.5, 1.0), (1.0, 1.0)]
    assert math.isinf(curve.thresholds[0])
    assert auc(curve) == pytest.approx(0.75)


def test_roc_perfect_separation():
    curve = roc_curve([0, 0, 1, 1], [0.1, 0.2, 0.8, 0.9])
    assert (0.0, 1.0) in curve.points
    assert auc(curve) == 1.0


def test_roc_all_scores_tied():
    curve = roc_curve([0, 1, 0, 1], [0.5] * 4)
    assert curve.points == [(0.0, 0.0), (1.0, 1.0)]
    assert auc(curve) == 0.5


def test_roc_single_class():
    with pytest.raises(DegenerateError):
        roc_curve([1, 1, 1], [0.1, 0.2, 0.3])


def test_roc_serializes_infinite_threshold_as_null():
    document = roc_curve([1, 0], [0.7, 0.2]).to_dict()
    assert document['thresholds'][0] is None
    assert document['points'][0] == [0.0, 0.0]


def test_precision_recall_curve_and_average_precision():
    curve = roc_curve([1, 0, 1, 0], [0.9, 0.8, 0.7, 0.1], CurveMode.PRECISION_RECALL)
    assert curve.points == [(0.5, 1.0), (0.5, 0.5), (1.0, 2 / 3), (1.0, 0.5)]
    assert average_precision(curve) == pytest.approx(0.5 * 1.0 + 0.5 * 2 / 3)
    with pytest.raises(InputError):
        auc(curve)


scored_instance = st.integers(2, 50).flatmap(lambda n: st.tuples(
    st.lists(st.integers(0, 1), min_size=n, max_size=n),
    st.lists(st.integers(0, 8).map(lambda v: v / 8), min_size=n, max_size=n),
))


@settings(max_examples=1000, deadline=None)
@given(scored_instance)
def test_auc_matches_pairwise_oracle(instance):
    actual, scores = instance
    assume(0 < sum(actual) < len(actual))
    assert abs(auc(roc_curve(actual, scores)) - _pairwise_auc(actual, scores)) <= 1e-12


@settings(max_examples=1000, deadline=None)
@given(scored_instance)
def test_auc_of_negated_scores(instance):
    actual, scores = instance
    assume(0 < sum(actual) < len(actual))
    flipped = [-s for s in scores]
    assert auc(roc_curve(actual, scores)) + auc(roc_curve(actual, flipped)) == pytest.approx(1.0, abs=1e-12)


@settings(max_examples=200, deadline=None)
@given(scored_instance, st.randoms(use_true_random=False))
def test_auc_permutation_invariant(instance, rng):
    actual, scores = instance
    assume(0 < sum(actual) < len(actual))
    order = list(range(len(actual)))
    rng.shuffle(order)
    shuffled = auc(roc_curve([actual[i] for i in order], [scores[i] for i in order]))
    assert shuffled == pytest.approx(auc(roc_curve(actual, scores)), abs=1e-12)


@settings(max_examples=200, deadline=None)
@given(scored_instance)
def test_roc_points_monotone(instance):
    actual, scores = instance
    assume(0 < sum(actual) < len(actual))
    points = roc_curve(actual, scores).points
    assert points[0] == (0.0, 0.0)
    assert points[-1] == (1.0, 1.0)
    assert all(a[0] <= b[0] and a[1] <= b[1] for a, b in zip(points, points[1:]))


# top-k

def test_top_k_equal_to_k_is_one():
    scores = [[0.1, 0.5, 0.4], [0.3, 0.3, 0.4]]
    assert top_k_accuracy([0, 1], scores, 3) == 1.0


def test_top_1_is_argmax_accuracy():
    scores = np.array([[0.1, 0.5, 0.4], [0.7, 0.2, 0.1], [0.2, 0.2, 0.6]])
    actual = [1, 1, 2]
    assert top_k_accuracy(actual, scores, 1) == pytest.approx(np.mean(np.argmax(scores, axis=1) == actual))


def test_third_ranked_counts_in_top_5():
    scores = [[0.9, 0.8, 0.7, 0.1, 0.05, 0.02]]
    assert top_k_accuracy([2], scores, 5) == 1.0
    assert top_k_accuracy([2], scores, 2) == 0.0


def test_top_k_tie_goes_to_lower_class():
    assert top_k_accuracy([0], [[0.5, 0.5]], 1) == 1.0
    assert top_k_accuracy([1], [[0.5, 0.5]], 1) == 0.0


def test_top_k_shape_mismatch():
    with pytest.raises(InputError):
        top_k_accuracy([0, 1, 2], [[0.5, 0.5]], 1)


# overlap

@pytest.mark.parametrize('a, b, expected_iou, expected_dice', [
    ({1, 2}, {1, 2}, 1.0, 1.0),
    ({1}, {2}, 0.0, 0.0),
    ({1, 2}, {2, 3}, 1 / 3, 0.5),
    (set(), set(), None, None),
])
def test_overlap_scores(a, b, expected_iou, expected_dice):
    assert iou(a, b) == expected_iou
    assert dice(a, b) == expected_dice


# regression

def test_regression_exact():
    report = regression_report([1.0, 2.0, 3.0], [1.0, 2.0, 3.0])
    assert report.mae == report.mse == 0
    assert report.r2 == 1


def test_regression_mean_predictor():
    actual = [1.0, 2.0, 6.0]
    report = regression_report(actual, [3.0] * 3)
    assert report.r2 == pytest.approx(0.0)


def test_regression_constant_actual():
    report = regression_report([0, 0, 0, 0], [0, 0, 0, 2])
    assert (report.mae, report.mse, report.rmse, report.max_error) == (0.5, 1.0, 1.0, 2.0)
    assert report.r2 is None and report.explained_variance is None
    assert 'constant_actual' in report.flags


@pytest.mark.parametrize('actual, predicted', [([1.0], [1.0, 2.0]), ([], []), ([1.0, math.inf], [1.0, 2.0])])
def test_regression_rejects_bad_input(actual, predicted):
    with pytest.raises(InputError):
        regression_report(actual, predicted)


real_pairs = st.integers(2, 30).flatmap(lambda n: st.tuples(
    st.lists(st.integers(-1000, 1000).map(lambda v: v / 10), min_size=n, max_size=n),
    st.lists(st.integers(-1000, 1000).map(lambda v: v / 10), min_size=n, max_size=n),
))


@settings(max_examples=1000, deadline=None)
@given(real_pairs)
def test_regression_invariants(pair):
    actual, predicted = pair
    report = regression_report(actual, predicted)
    n = len(actual)
    tolerance = 1e-9 * (1 + report.rmse)
    assert report.rmse == pytest.approx(math.sqrt(report.mse), rel=1e-12)
    assert report.mae <= report.rmse + tolerance
    assert report.rmse <= math.sqrt(n) * report.mae + tolerance
    if report.r2 is not None:
        assert report.explained_variance >= report.r2 - 1e-9 * (1 + abs(report.r2))


# losses

def test_squared_loss_zero_at_target():
    assert loss(LossKind.SQUARED, 2.5, 2.5) == 0


def test_absolute_and_squared_loss():
    assert loss('absolute', [1.0, 3.0], [2.0, 1.0]) == 3.0
    assert loss('squared', [1.0, 3.0], [2.0, 1.0]) == 5.0


def test_cross_entropy_one_hot_correct():
    assert loss(LossKind.CROSS_ENTROPY, [0.0, 1.0, 0.0], 1) == 0
    assert loss(LossKind.CROSS_ENTROPY, [0.0, 1.0, 0.0], [0.0, 1.0, 0.0]) == 0


def test_cross_entropy_uniform_over_four():
    assert loss(LossKind.CROSS_ENTROPY, [0.25] * 4, 3) == pytest.approx(1.386294, abs=1e-6)


def test_cross_entropy_is_floored():
    assert loss(LossKind.CROSS_ENTROPY, [1.0, 0.0], 1) == pytest.approx(-math.log(1e-12))


@pytest.mark.parametrize('prediction', [[0.5, 0.6], [1.2, -0.2], [0.5]])
def test_cross_entropy_rejects_non_probability(prediction):
    with pytest.raises(InputError):
        loss(LossKind.CROSS_ENTROPY, prediction, 0)


def test_binary_cross_entropy():
    assert loss(LossKind.BINARY_CROSS_ENTROPY, 0.5, 1) == pytest.approx(math.log(2))
    with pytest.raises(InputError):
        loss(LossKind.BINARY_CROSS_ENTROPY, 1.5, 1)


def test_mean_loss():
    assert mean_loss('squared', [1.0, 3.0], [1.0, 1.0]) == 2.0
    with pytest.raises(InputError):
        mean_loss('squared', [1.0], [1.0, 2.0])
