"""
Metrics Commands
Classification, regression and overlap metrics from prediction files
"""

import logging
from typing import List, Optional, Tuple

import click
import numpy as np

from src.commands.common import (
    EXISTING_FILE, emit, output_options, read_json, read_matrix, read_values
)
from src.errors import ConfigError, InputError, TaskError
from src.models.dataset import Dataset, TaskType
from src.models.evaluation import CurveMode, LossKind
from src.models.report import Verdict
from src.services.data_core import load_dataset_files
from src.services.metrics import (
    auc, average_precision, classification_report, confusion_matrix, dice, iou, mean_loss,
    per_label_report, regression_report, roc_curve, top_k_accuracy
)
from src.services.reporting import add_section, new_report

logger = logging.getLogger(__name__)


@click.group('metrics')
def metrics_group():
    """Compute evaluation metrics from predictions"""


def _actual_source(command):
    command = click.option('--actual', 'actual_path', type=EXISTING_FILE, default=None,
                           help='Actual targets (JSON array or one-column CSV)')(command)
    command = click.option('--schema', 'schema_path', type=EXISTING_FILE, default=None)(command)
    command = click.option('--data', 'data_path', type=EXISTING_FILE, default=None,
                           help='Dataset CSV whose target column holds the actual values')(command)
    return command


def _load_actual(data_path, schema_path, actual_path) -> Tuple[list, Optional[Dataset]]:
    if data_path is not None:
        if schema_path is None:
            raise click.UsageError("--data needs --schema")
        dataset = load_dataset_files(data_path, schema_path)
        return dataset.targets(), dataset
    if actual_path is not None:
        return read_values(actual_path), None
    raise click.UsageError("give --data/--schema or --actual")


def _label_set(value) -> List[int]:
    """A multilabel cell: JSON list of indices or a ';'-separated string"""
    if isinstance(value, (list, tuple)):
        return [int(item) for item in value]
    text = str(value).strip()
    try:
        return [int(float(token)) for token in text.split(';') if token.strip()]
    except ValueError:
        raise InputError(f"cannot read label set '{value}'")


def _indicator(rows, k: int) -> np.ndarray:
    matrix = np.zeros((len(rows), k), dtype=int)
    for index, labels in enumerate(rows):
        for label in _label_set(labels):
            if not 0 <= label < k:
                raise InputError(f"label {label} outside 0..{k - 1}", row=index)
            matrix[index, label] = 1
    return matrix


@metrics_group.command('classify')
@_actual_source
@click.option('--predictions', 'predictions_path', type=EXISTING_FILE, required=True,
              help='Predicted class labels (JSON array or one-column CSV)')
@click.option('--k', type=int, default=None, help='Class count when it cannot come from a schema')
@click.option('--positive-class', type=int, default=None)
@click.option('--scores', 'scores_path', type=EXISTING_FILE, default=None,
              help='Positive-class scores for ROC/AUC (binary only)')
@click.option('--score-matrix', 'matrix_path', type=EXISTING_FILE, default=None,
              help='n x k class scores for top-k accuracy')
@click.option('--top-k', type=int, default=1, show_default=True)
@click.option('--loss', type=click.Choice(['cross_entropy', 'binary_cross_entropy']), default=None,
              help='Mean loss of the score matrix (cross_entropy) or scores (binary_cross_entropy)')
@output_options
@click.pass_context
def classify_command(ctx, data_path, schema_path, actual_path, predictions_path, k, positive_class,
                     scores_path, matrix_path, top_k, loss, fmt, out):
    """Confusion matrix, classification report, ROC/AUC and top-k accuracy"""
    if loss == 'cross_entropy' and matrix_path is None:
        raise ConfigError("--loss cross_entropy needs --score-matrix")
    if loss == 'binary_cross_entropy' and scores_path is None:
        raise ConfigError("--loss binary_cross_entropy needs --scores")
    actual, dataset = _load_actual(data_path, schema_path, actual_path)
    predicted = read_values(predictions_path)
    if len(actual) != len(predicted):
        raise InputError(f"{len(actual)} actual values but {len(predicted)} predictions")

    multilabel = False
    if dataset is not None:
        if not dataset.task.is_classification:
            raise TaskError("metrics classify needs a classification task; use metrics regress")
        k = dataset.task.k
        multilabel = dataset.task.kind == TaskType.MULTILABEL
    elif k is None:
        try:
            k = max(2, int(max(max(actual), max(predicted))) + 1)
        except (TypeError, ValueError):
            raise InputError("labels must be class indices")

    report = new_report('metrics classify', {
        'data': str(data_path) if data_path else None,
        'actual': str(actual_path) if actual_path else None,
        'predictions': str(predictions_path),
        'k': k
    })

    if multilabel:
        labels = per_label_report(_indicator(actual, k), _indicator(predicted, k), k)
        add_section(report, 'per_label_report', Verdict.PASS, labels.to_dict())
    else:
        cm = confusion_matrix(actual, predicted, k)
        add_section(report, 'confusion_matrix', Verdict.PASS, cm.to_dict())
        scores = classification_report(cm, positive_class)
        add_section(report, 'classification_report',
                    Verdict.UNDEFINED if scores.has_undefined else Verdict.PASS, scores.to_dict())
        if k > 2:
            labels = per_label_report(actual, predicted, k)
            add_section(report, 'per_label_report', Verdict.PASS, labels.to_dict())

    if scores_path is not None:
        if k != 2 or multilabel:
            raise TaskError("--scores needs binary labels")
        values = read_values(scores_path)
        roc = roc_curve(actual, values, CurveMode.ROC)
        pr = roc_curve(actual, values, CurveMode.PRECISION_RECALL)
        add_section(report, 'roc_auc', Verdict.PASS, {
            'auc': auc(roc),
            'average_precision': average_precision(pr),
            'roc': roc.to_dict(),
            'precision_recall': pr.to_dict()
        })
        if loss == 'binary_cross_entropy':
            value = mean_loss(LossKind.BINARY_CROSS_ENTROPY, values, actual)
            add_section(report, 'mean_loss', Verdict.PASS, {'loss': loss, 'value': value})

    if matrix_path is not None:
        if multilabel:
            raise TaskError("--score-matrix needs single-label targets")
        matrix = read_matrix(matrix_path)
        add_section(report, 'top_k_accuracy', Verdict.PASS,
                    {'k_top': top_k, 'value': top_k_accuracy(actual, matrix, top_k)})
        if loss == 'cross_entropy':
            value = mean_loss(LossKind.CROSS_ENTROPY, list(matrix), actual)
            add_section(report, 'mean_loss', Verdict.PASS, {'loss': loss, 'value': value})

    emit(ctx, report, fmt, out)


@metrics_group.command('regress')
@_actual_source
@click.option('--predictions', 'predictions_path', type=EXISTING_FILE, required=True,
              help='Predicted values (JSON array or one-column CSV)')
@click.option('--loss', type=click.Choice(['squared', 'absolute']), default=None)
@output_options
@click.pass_context
def regress_command(ctx, data_path, schema_path, actual_path, predictions_path, loss, fmt, out):
    """Regression error report"""
    actual, dataset = _load_actual(data_path, schema_path, actual_path)
    if dataset is not None and dataset.task.is_classification:
        raise TaskError("metrics regress needs a regression task; use metrics classify")
    predicted = read_values(predictions_path)

    report = new_report('metrics regress', {
        'data': str(data_path) if data_path else None,
        'actual': str(actual_path) if actual_path else None,
        'predictions': str(predictions_path)
    })
    errors = regression_report(actual, predicted)
    add_section(report, 'regression_report', Verdict.UNDEFINED if errors.flags else Verdict.PASS,
                errors.to_dict())
    if loss is not None:
        add_section(report, 'mean_loss', Verdict.PASS,
                    {'loss': loss, 'value': mean_loss(LossKind(loss), predicted, actual)})
    emit(ctx, report, fmt, out)


@metrics_group.command('overlap')
@click.option('--masks', 'masks_path', type=EXISTING_FILE, required=True,
              help='JSON object {"a": [ids], "b": [ids]}')
@output_options
@click.pass_context
def overlap_command(ctx, masks_path, fmt, out):
    """IoU (Jaccard) and Dice between two element-id masks"""
    masks = read_json(masks_path)
    if not isinstance(masks, dict) or not isinstance(masks.get('a'), list) or not isinstance(masks.get('b'), list):
        raise InputError('masks file must be {"a": [...], "b": [...]}')
    a, b = set(map(str, masks['a'])), set(map(str, masks['b']))

    report = new_report('metrics overlap', {'masks': str(masks_path)})
    iou_value = iou(a, b)
    add_section(report, 'mask_overlap', Verdict.UNDEFINED if iou_value is None else Verdict.PASS,
                {'iou': iou_value, 'dice': dice(a, b), 'size_a': len(a), 'size_b': len(b)})
    emit(ctx, report, fmt, out)
