"""
Evaluation Models
Confusion matrices, metric reports, ROC curves and loss kinds
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Tuple

import numpy as np

# Metrics with a zero denominator are reported as None (serialized as null)
Metric = Optional[float]


class LossKind(str, Enum):
    SQUARED = 'squared'
    CROSS_ENTROPY = 'cross_entropy'
    BINARY_CROSS_ENTROPY = 'binary_cross_entropy'
    ABSOLUTE = 'absolute'


class CurveMode(str, Enum):
    ROC = 'roc'
    PRECISION_RECALL = 'precision_recall'


@dataclass(frozen=True)
class ConfusionMatrix:
    """k x k counts indexed cells[actual][predicted]"""
    cells: np.ndarray

    @property
    def k(self) -> int:
        return int(self.cells.shape[0])

    @property
    def total(self) -> int:
        return int(self.cells.sum())

    def actual_counts(self) -> List[int]:
        return [int(count) for count in self.cells.sum(axis=1)]

    def predicted_counts(self) -> List[int]:
        return [int(count) for count in self.cells.sum(axis=0)]

    def binary_view(self, positive_class: int = 1) -> Dict[str, int]:
        """TP, FN, FP, TN, P, N for one class against the rest"""
        tp = int(self.cells[positive_class, positive_class])
        p = int(self.cells[positive_class, :].sum())
        predicted_positive = int(self.cells[:, positive_class].sum())
        fn = p - tp
        fp = predicted_positive - tp
        tn = self.total - tp - fn - fp
        return {'TP': tp, 'FN': fn, 'FP': fp, 'TN': tn, 'P': p, 'N': self.total - p}

    def to_dict(self):
        return {'k': self.k, 'cells': self.cells.astype(int).tolist()}


@dataclass(frozen=True)
class ClassificationReport:
    """Scalar classification metrics; None marks an undefined value"""
    accuracy: Metric
    error_rate: Metric
    sensitivity: Metric
    specificity: Metric
    precision: Metric
    f1: Metric
    balanced_accuracy: Metric
    cohens_kappa: Metric
    miss_rate: Metric
    positive_class: Optional[int] = None
    flags: Tuple[str, ...] = ()

    METRIC_NAMES = ('accuracy', 'error_rate', 'sensitivity', 'specificity', 'precision', 'f1',
                    'balanced_accuracy', 'cohens_kappa', 'miss_rate')

    @property
    def recall(self) -> Metric:
        return self.sensitivity

    def metrics(self) -> Dict[str, Metric]:
        values = {name: getattr(self, name) for name in self.METRIC_NAMES}
        values['recall'] = self.sensitivity
        return values

    @property
    def has_undefined(self) -> bool:
        return any(getattr(self, name) is None for name in self.METRIC_NAMES)

    def to_dict(self):
        result = {name: getattr(self, name) for name in self.METRIC_NAMES}
        result['recall'] = self.sensitivity
        result['positive_class'] = self.positive_class
        result['flags'] = list(self.flags)
        return result


@dataclass(frozen=True)
class PerLabelReport:
    """One-vs-rest reports per label plus their macro average"""
    labels: List[ClassificationReport]
    macro: Dict[str, Metric]
    skipped: Dict[str, int]

    def to_dict(self):
        return {
            'labels': [report.to_dict() for report in self.labels],
            'macro': dict(self.macro),
            'skipped': dict(self.skipped)
        }


@dataclass(frozen=True)
class RocCurve:
    """Operating points swept over distinct score thresholds.

    ROC mode: points are (false_positive_rate, true_positive_rate), starting at
    (0, 0) for the +inf threshold and ending at (1, 1).
    Precision-recall mode: points are (recall, precision), one per distinct score.
    """
    points: List[Tuple[float, float]]
    thresholds: List[float]
    mode: CurveMode = CurveMode.ROC

    def to_dict(self):
        return {
            'mode': self.mode.value,
            'points': [[x, y] for x, y in self.points],
            'thresholds': [None if math.isinf(t) else t for t in self.thresholds]
        }


@dataclass(frozen=True)
class RegressionReport:
    mae: float
    mse: float
    rmse: float
    max_error: float
    explained_variance: Metric
    r2: Metric
    flags: Tuple[str, ...] = field(default=())

    def metrics(self) -> Dict[str, Metric]:
        return {
            'mae': self.mae,
            'mse': self.mse,
            'rmse': self.rmse,
            'max_error': self.max_error,
            'explained_variance': self.explained_variance,
            'r2': self.r2
        }

    def to_dict(self):
        result = self.metrics()
        result['flags'] = list(self.flags)
        return result


# Names check_min_performance accepts
METRIC_NAMES = frozenset(
    ClassificationReport.METRIC_NAMES
    + ('recall', 'auc', 'average_precision', 'top_k_accuracy', 'iou', 'dice',
       'mae', 'mse', 'rmse', 'max_error', 'explained_variance', 'r2', 'loss')
)
