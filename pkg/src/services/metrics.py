"""
Evaluation Metrics
Confusion-matrix statistics, ROC/AUC, top-k, overlap scores, regression errors and training losses
"""

import logging
import math
from typing import Dict, List, Optional, Sequence, Set, Union

import numpy as np

from src.config import DEFAULT_SETTINGS
from src.errors import DegenerateError, InputError
from src.models.evaluation import (
    ClassificationReport, ConfusionMatrix, CurveMode, LossKind, Metric, PerLabelReport,
    RegressionReport, RocCurve
)
from src.services.diagnostics import validate_probability_outputs

logger = logging.getLogger(__name__)


def _as_labels(values, name: str) -> np.ndarray:
    array = np.asarray(values)
    if array.ndim != 1:
        raise InputError(f"{name} must be a flat sequence of class labels")
    if array.size and not np.issubdtype(array.dtype, np.integer):
        try:
            as_float = array.astype(float)
        except (TypeError, ValueError):
            raise InputError(f"{name} contains non-numeric labels")
        if not np.all(np.isfinite(as_float)) or not np.all(as_float == np.round(as_float)):
            raise InputError(f"{name} contains non-integer labels")
        array = as_float.astype(np.int64)
    return array.astype(np.int64)


def _as_reals(values, name: str) -> np.ndarray:
    try:
        array = np.asarray(values, dtype=float)
    except (TypeError, ValueError):
        raise InputError(f"{name} contains non-numeric values")
    if not np.all(np.isfinite(array)):
        raise InputError(f"{name} contains non-finite values")
    return array


def confusion_matrix(actual: Sequence[int], predicted: Sequence[int], k: int) -> ConfusionMatrix:
    """Tally cells[actual][predicted] over all rows"""
    if k < 1:
        raise InputError(f"class count must be positive, got {k}")
    a = _as_labels(actual, 'actual')
    p = _as_labels(predicted, 'predicted')
    if a.size != p.size:
        raise InputError(f"actual has {a.size} labels, predicted has {p.size}")
    if a.size == 0:
        raise InputError("at least one row is required")
    for name, labels in (('actual', a), ('predicted', p)):
        bad = np.nonzero((labels < 0) | (labels >= k))[0]
        if bad.size:
            raise InputError(f"{name} label {int(labels[bad[0]])} outside 0..{k - 1}", row=int(bad[0]))

    cells = np.bincount(a * k + p, minlength=k * k).reshape(k, k)
    return ConfusionMatrix(cells=cells)


def confusion_matrix_from_counts(tp: int, fn: int, fp: int, tn: int) -> ConfusionMatrix:
    """Binary matrix with class 1 as the positive class"""
    return ConfusionMatrix(cells=np.array([[tn, fp], [fn, tp]], dtype=np.int64))


def _ratio(numerator: int, denominator: int, flag: str, flags: List[str]) -> Metric:
    if denominator == 0:
        flags.append(flag)
        return None
    return numerator / denominator


def classification_report(cm: ConfusionMatrix, positive_class: Optional[int] = None) -> ClassificationReport:
    """Derive every scalar classification metric from a confusion matrix.

    Zero denominators never raise: the metric is None and a flag names it.
    For k = 2 the positive class defaults to 1. For k > 2 the one-vs-rest
    metrics need an explicit positive_class.
    """
    total = cm.total
    if total < 1:
        raise InputError("confusion matrix is empty")
    if positive_class is None and cm.k == 2:
        positive_class = 1
    if positive_class is not None and not 0 <= positive_class < cm.k:
        raise InputError(f"positive class {positive_class} outside 0..{cm.k - 1}")

    flags: List[str] = []
    diagonal = int(np.trace(cm.cells))
    accuracy = diagonal / total
    error_rate = 1 - accuracy

    # Chance agreement from marginal products, kept in integers until the final division
    actual_counts = cm.actual_counts()
    predicted_counts = cm.predicted_counts()
    chance = sum(r * c for r, c in zip(actual_counts, predicted_counts))
    kappa = _ratio(total * diagonal - chance, total * total - chance, 'kappa_chance_agreement_one', flags)

    if positive_class is None:
        flags.append('no_positive_class')
        sensitivity = specificity = precision = f1 = miss_rate = None
    else:
        view = cm.binary_view(positive_class)
        sensitivity = _ratio(view['TP'], view['P'], 'sensitivity_no_positives', flags)
        miss_rate = _ratio(view['FN'], view['P'], 'miss_rate_no_positives', flags)
        specificity = _ratio(view['TN'], view['N'], 'specificity_no_negatives', flags)
        precision = _ratio(view['TP'], view['TP'] + view['FP'], 'precision_no_predicted_positives', flags)
        f1 = _ratio(2 * view['TP'], 2 * view['TP'] + view['FP'] + view['FN'], 'f1_no_positives', flags)

    if cm.k == 2:
        if sensitivity is None or specificity is None:
            flags.append('balanced_accuracy_undefined')
            balanced_accuracy = None
        else:
            balanced_accuracy = (sensitivity + specificity) / 2
    else:
        recalls = [cm.cells[c, c] / count for c, count in enumerate(actual_counts) if count > 0]
        balanced_accuracy = float(np.mean(recalls)) if recalls else None

    report = ClassificationReport(
        accuracy=accuracy,
        error_rate=error_rate,
        sensitivity=sensitivity,
        specificity=specificity,
        precision=precision,
        f1=f1,
        balanced_accuracy=balanced_accuracy,
        cohens_kappa=kappa,
        miss_rate=miss_rate,
        positive_class=positive_class,
        flags=tuple(flags)
    )
    if flags:
        logger.warning(f"Classification report has undefined values: {', '.join(flags)}")
    return report


def per_label_report(actual, predicted, k: int) -> PerLabelReport:
    """Score each label one-vs-rest and macro-average the defined values.

    actual/predicted are flat class labels (multiclass) or n x k 0/1
    indicator matrices (multilabel).
    """
    if k < 2:
        raise InputError(f"per-label reports need k >= 2, got {k}")

    a = np.asarray(actual)
    p = np.asarray(predicted)
    if a.shape != p.shape:
        raise InputError(f"actual shape {a.shape} does not match predicted shape {p.shape}")

    if a.ndim == 1:
        a = _as_labels(a, 'actual')
        p = _as_labels(p, 'predicted')
        confusion_matrix(a, p, k)  # range validation
        columns = [((a == label).astype(int), (p == label).astype(int)) for label in range(k)]
    elif a.ndim == 2:
        if a.shape[1] != k:
            raise InputError(f"indicator matrix has {a.shape[1]} columns, expected {k}")
        for name, matrix in (('actual', a), ('predicted', p)):
            if not np.isin(matrix, (0, 1)).all():
                raise InputError(f"{name} indicator matrix must contain only 0 and 1")
        columns = [(a[:, label].astype(int), p[:, label].astype(int)) for label in range(k)]
    else:
        raise InputError("labels must be a flat sequence or an indicator matrix")

    reports = [classification_report(confusion_matrix(col_a, col_p, 2), positive_class=1)
               for col_a, col_p in columns]

    macro: Dict[str, Metric] = {}
    skipped: Dict[str, int] = {}
    for name in ClassificationReport.METRIC_NAMES:
        values = [getattr(report, name) for report in reports]
        defined = [value for value in values if value is not None]
        macro[name] = float(np.mean(defined)) if defined else None
        skipped[name] = len(values) - len(defined)
    macro['recall'] = macro['sensitivity']
    skipped['recall'] = skipped['sensitivity']

    return PerLabelReport(labels=reports, macro=macro, skipped=skipped)


def roc_curve(actual: Sequence[int], scores: Sequence[float], mode: CurveMode = CurveMode.ROC) -> RocCurve:
    """Sweep thresholds from +inf down over distinct scores; ties form one point"""
    y = _as_labels(actual, 'actual')
    s = _as_reals(scores, 'scores')
    if y.size != s.size:
        raise InputError(f"actual has {y.size} labels, scores has {s.size}")
    if not np.isin(y, (0, 1)).all():
        raise InputError("ROC curves need binary labels 0/1")

    positives = int(y.sum())
    negatives = int(y.size - positives)
    if positives == 0 or negatives == 0:
        raise DegenerateError("ROC curve needs at least one positive and one negative row")

    order = np.argsort(-s, kind='mergesort')
    sorted_scores = s[order]
    sorted_labels = y[order]
    group_ends = np.append(np.nonzero(np.diff(sorted_scores))[0], y.size - 1)

    tps = np.cumsum(sorted_labels)[group_ends]
    fps = (group_ends + 1) - tps
    thresholds = sorted_scores[group_ends].tolist()

    if CurveMode(mode) == CurveMode.PRECISION_RECALL:
        recall = tps / positives
        precision = tps / (tps + fps)
        points = list(zip(recall.tolist(), precision.tolist()))
        return RocCurve(points=points, thresholds=thresholds, mode=CurveMode.PRECISION_RECALL)

    points = [(0.0, 0.0)] + list(zip((fps / negatives).tolist(), (tps / positives).tolist()))
    return RocCurve(points=points, thresholds=[math.inf] + thresholds, mode=CurveMode.ROC)


def auc(curve: RocCurve) -> float:
    """Trapezoidal area under a ROC curve (equals the Mann-Whitney statistic)"""
    if curve.mode != CurveMode.ROC:
        raise InputError("AUC is defined on ROC-mode curves; use average_precision for precision-recall")
    x = np.array([point[0] for point in curve.points])
    y = np.array([point[1] for point in curve.points])
    area = float(np.sum(np.diff(x) * (y[1:] + y[:-1]) / 2))
    return min(max(area, 0.0), 1.0)


def average_precision(curve: RocCurve) -> float:
    """Step-wise area under a precision-recall curve"""
    if curve.mode != CurveMode.PRECISION_RECALL:
        raise InputError("average precision needs a precision-recall curve")
    previous_recall = 0.0
    total = 0.0
    for recall, precision in curve.points:
        total += (recall - previous_recall) * precision
        previous_recall = recall
    return min(max(total, 0.0), 1.0)


def top_k_accuracy(actual: Sequence[int], score_matrix, k_top: int) -> float:
    """Share of rows whose actual class ranks among the k_top highest scores.

    Equal scores rank the lower class index first.
    """
    scores = _as_reals(score_matrix, 'score matrix')
    labels = _as_labels(actual, 'actual')
    if scores.ndim != 2:
        raise InputError("score matrix must be two-dimensional (n x k)")
    n, k = scores.shape
    if labels.size != n:
        raise InputError(f"score matrix has {n} rows, actual has {labels.size} labels")
    if n == 0:
        raise InputError("at least one row is required")
    if not 1 <= k_top <= k:
        raise InputError(f"k_top must be in 1..{k}, got {k_top}")
    if np.any((labels < 0) | (labels >= k)):
        raise InputError(f"actual labels must be in 0..{k - 1}")

    true_scores = scores[np.arange(n), labels][:, None]
    class_index = np.arange(k)[None, :]
    higher = (scores > true_scores).sum(axis=1)
    tied_before = ((scores == true_scores) & (class_index < labels[:, None])).sum(axis=1)
    return float(np.mean((higher + tied_before) < k_top))


def iou(mask_a: Set, mask_b: Set) -> Metric:
    """Intersection over union (Jaccard index); None when both masks are empty"""
    a, b = set(mask_a), set(mask_b)
    union = len(a | b)
    if union == 0:
        return None
    return len(a & b) / union


def dice(mask_a: Set, mask_b: Set) -> Metric:
    a, b = set(mask_a), set(mask_b)
    size = len(a) + len(b)
    if size == 0:
        return None
    return 2 * len(a & b) / size


def regression_report(actual: Sequence[float], predicted: Sequence[float]) -> RegressionReport:
    a = _as_reals(actual, 'actual')
    p = _as_reals(predicted, 'predicted')
    if a.ndim != 1 or p.ndim != 1:
        raise InputError("regression targets and predictions must be flat sequences")
    if a.size != p.size:
        raise InputError(f"actual has {a.size} values, predicted has {p.size}")
    if a.size == 0:
        raise InputError("at least one row is required")

    errors = p - a
    absolute = np.abs(errors)
    mae = float(np.mean(absolute))
    mse = float(np.mean(errors ** 2))

    flags = []
    ss_tot = float(np.sum((a - np.mean(a)) ** 2))
    if np.ptp(a) == 0 or ss_tot == 0 or float(np.var(a)) == 0:
        flags.append('constant_actual')
        r2 = explained_variance = None
        logger.warning("Actual values are constant; r2 and explained variance are undefined")
    else:
        ss_res = float(np.sum(errors ** 2))
        r2 = 1 - ss_res / ss_tot
        explained_variance = 1 - float(np.var(errors)) / float(np.var(a))

    return RegressionReport(
        mae=mae,
        mse=mse,
        rmse=math.sqrt(mse),
        max_error=float(np.max(absolute)),
        explained_variance=explained_variance,
        r2=r2,
        flags=tuple(flags)
    )


def loss(kind: Union[LossKind, str], prediction, target, floor: float = DEFAULT_SETTINGS.cross_entropy_floor) -> float:
    """Per-example training loss between a model output and its target"""
    kind = LossKind(kind)

    if kind in (LossKind.SQUARED, LossKind.ABSOLUTE):
        y = _as_reals(prediction, 'prediction')
        z = _as_reals(target, 'target')
        if y.shape != z.shape:
            raise InputError(f"prediction shape {y.shape} does not match target shape {z.shape}")
        difference = y - z
        value = np.sum(difference ** 2) if kind == LossKind.SQUARED else np.sum(np.abs(difference))
        return float(value) + 0.0

    if kind == LossKind.CROSS_ENTROPY:
        p = _as_reals(prediction, 'prediction')
        if p.ndim != 1:
            raise InputError("cross-entropy needs a single probability vector")
        check = validate_probability_outputs(p[None, :])
        if not check.passed:
            raise InputError("cross-entropy prediction is not a probability vector")
        clamped = np.clip(p, floor, 1.0)
        t = np.asarray(target)
        if t.ndim == 0:
            index = int(t)
            if index != t or not 0 <= index < p.size:
                raise InputError(f"class index {target} outside 0..{p.size - 1}")
            return float(-math.log(clamped[index])) + 0.0
        t = _as_reals(t, 'target')
        if t.shape != p.shape:
            raise InputError(f"target vector length {t.size} does not match prediction length {p.size}")
        if not validate_probability_outputs(t[None, :]).passed:
            raise InputError("cross-entropy target vector is not a probability distribution")
        return float(-np.sum(t * np.log(clamped))) + 0.0

    # binary cross-entropy, scalar or per label
    p = _as_reals(prediction, 'prediction')
    t = _as_reals(target, 'target')
    if p.shape != t.shape:
        raise InputError(f"prediction shape {p.shape} does not match target shape {t.shape}")
    if np.any((p < 0) | (p > 1)):
        raise InputError("binary cross-entropy needs probabilities in [0, 1]")
    if np.any((t < 0) | (t > 1)):
        raise InputError("binary cross-entropy needs targets in [0, 1]")
    value = -(t * np.log(np.clip(p, floor, 1.0)) + (1 - t) * np.log(np.clip(1 - p, floor, 1.0)))
    return float(np.sum(value)) + 0.0


def mean_loss(kind: Union[LossKind, str], predictions: Sequence, targets: Sequence,
              floor: float = DEFAULT_SETTINGS.cross_entropy_floor) -> float:
    """Average loss over a dataset: the training objective divided by N"""
    if len(predictions) != len(targets):
        raise InputError(f"{len(predictions)} predictions for {len(targets)} targets")
    if len(predictions) == 0:
        raise InputError("at least one row is required")
    return float(np.mean([loss(kind, y, z, floor) for y, z in zip(predictions, targets)]))
