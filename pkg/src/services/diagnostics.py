"""
Model Diagnostics
Overfitting gap, capacity sweeps, loss/task consistency, probability outputs and minimum performance
"""

import logging
import math
from typing import List, Literal, Mapping, Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from src.config import DEFAULT_SETTINGS
from src.errors import InputError, SchemaError, first_validation_message
from src.models.dataset import ClassDistribution, TaskKind, TaskType
from src.models.diagnostics import (
    BaselinePerformance, CapacitySweep, Comparator, ConsistencyVerdict, ModelDescriptor,
    OutputKind, OutputSpec, OverfitVerdict, PerformanceRequirement, PerformanceVerdict,
    ProbabilityCheck, Regime, RequirementOutcome, SweepAnalysis, SweepPoint
)
from src.models.evaluation import ConfusionMatrix, LossKind, Metric

logger = logging.getLogger(__name__)


class OutputDocument(BaseModel):
    model_config = ConfigDict(extra='forbid')

    kind: Literal['probability_vector', 'scalar_probability', 'real_value', 'real_vector']
    k: Optional[int] = Field(default=None, ge=1)


class ModelDescriptorDocument(BaseModel):
    model_config = ConfigDict(extra='forbid')

    family_name: str
    capacity_proxy: Optional[float] = Field(default=None, gt=0)
    declared_loss: Literal['squared', 'cross_entropy', 'binary_cross_entropy', 'absolute']
    output: OutputDocument
    task: Literal['binary_classification', 'multiclass_classification',
                  'multilabel_classification', 'regression']
    k: Optional[int] = Field(default=None, ge=2)


class SweepPointDocument(BaseModel):
    capacity: float = Field(gt=0)
    train_risk: float
    test_risk: float


class CapacitySweepDocument(BaseModel):
    points: List[SweepPointDocument]


class RequirementDocument(BaseModel):
    model_config = ConfigDict(extra='forbid')

    metric: str
    op: Literal['>=', '<=']
    bound: float


def parse_model_descriptor(document: Mapping) -> ModelDescriptor:
    try:
        doc = ModelDescriptorDocument.model_validate(document)
    except ValidationError as e:
        raise SchemaError(f"invalid model descriptor: {first_validation_message(e)}")

    try:
        if doc.task == 'binary_classification':
            task = TaskKind.binary()
        elif doc.task == 'regression':
            task = TaskKind.regression()
        else:
            task = TaskKind(TaskType(doc.task), doc.k)
    except ValueError as e:
        raise SchemaError(f"invalid model descriptor: {e}")

    output_k = doc.output.k
    if output_k is None and doc.output.kind in ('probability_vector', 'real_vector'):
        output_k = task.k
    if output_k is not None and task.k is not None and output_k != task.k:
        raise SchemaError(f"output k={output_k} is inconsistent with task k={task.k}")

    return ModelDescriptor(
        family_name=doc.family_name,
        declared_loss=LossKind(doc.declared_loss),
        output_spec=OutputSpec(kind=OutputKind(doc.output.kind), k=output_k),
        task=task,
        capacity_proxy=doc.capacity_proxy
    )


def parse_capacity_sweep(document: Mapping) -> CapacitySweep:
    try:
        doc = CapacitySweepDocument.model_validate(document)
    except ValidationError as e:
        raise SchemaError(f"invalid capacity sweep: {first_validation_message(e)}")
    points = tuple(SweepPoint(p.capacity, p.train_risk, p.test_risk) for p in doc.points)
    return CapacitySweep(points=points)


def parse_performance_requirements(document: Sequence) -> List[PerformanceRequirement]:
    if not isinstance(document, list):
        raise SchemaError("performance requirements must be a JSON array")
    requirements = []
    for index, entry in enumerate(document):
        try:
            doc = RequirementDocument.model_validate(entry)
            requirements.append(PerformanceRequirement(doc.metric, Comparator(doc.op), doc.bound))
        except ValidationError as e:
            raise SchemaError(f"requirement {index}: {first_validation_message(e)}")
        except ValueError as e:
            raise SchemaError(f"requirement {index}: {e}")
    return requirements


def overfit_gap(train_value: float, test_value: float, higher_is_better: bool = True,
                rel_threshold: float = DEFAULT_SETTINGS.overfit_threshold) -> OverfitVerdict:
    """Flag a train/test gap wider than the threshold"""
    if not (math.isfinite(train_value) and math.isfinite(test_value)):
        raise InputError("train and test values must be finite")

    gap = (train_value - test_value) if higher_is_better else (test_value - train_value)
    verdict = 'OVERFIT_SUSPECTED' if gap > rel_threshold else 'OK'
    logger.info(f"Overfit gap {gap:.6f} against threshold {rel_threshold}: {verdict}")
    return OverfitVerdict(verdict=verdict, gap=gap, threshold=rel_threshold,
                          higher_is_better=higher_is_better)


def capacity_sweep_analysis(sweep: CapacitySweep) -> SweepAnalysis:
    """Locate the sweet spot (minimum test risk) and label the regimes either side of it.

    Ties go to the smallest capacity. Regime labels assume the classical
    U-shaped test risk; any other shape carries the NON_UNIMODAL flag.
    """
    points = sweep.points
    if len(points) < 3:
        raise InputError(f"capacity sweep needs at least 3 points, got {len(points)}")
    capacities = np.array([point.capacity for point in points], dtype=float)
    test_risk = np.array([point.test_risk for point in points], dtype=float)
    if not np.all(np.isfinite(capacities)) or not np.all(np.isfinite(test_risk)):
        raise InputError("capacity sweep values must be finite")
    if np.any(capacities <= 0) or np.any(np.diff(capacities) <= 0):
        raise InputError("capacities must be positive and strictly increasing")

    best = int(np.argmin(test_risk))
    regimes = []
    for index, point in enumerate(points):
        if index < best:
            regimes.append((point.capacity, Regime.UNDERFITTING))
        elif index == best:
            regimes.append((point.capacity, Regime.SWEET_SPOT))
        else:
            regimes.append((point.capacity, Regime.OVERFITTING))

    steps = np.diff(test_risk)
    flags = []
    if np.any(steps[:best] > 0) or np.any(steps[best:] < 0):
        flags.append('NON_UNIMODAL')
        logger.warning("Test risk is not unimodal over the sweep; regime labels assume a U-shaped curve")

    return SweepAnalysis(
        sweet_spot=points[best].capacity,
        regimes=regimes,
        gaps=[point.gap for point in points],
        flags=tuple(flags)
    )


def _violation(reason: str) -> ConsistencyVerdict:
    return ConsistencyVerdict(verdict='VIOLATION', reason=reason)


def check_loss_task_consistency(descriptor: ModelDescriptor) -> ConsistencyVerdict:
    """Check the declared loss and output layout against the task kind"""
    task = descriptor.task
    loss = descriptor.declared_loss
    output = descriptor.output_spec

    if task.kind == TaskType.MULTICLASS:
        if loss != LossKind.CROSS_ENTROPY:
            return _violation("cross-entropy required")
        if output.kind != OutputKind.PROBABILITY_VECTOR or output.k != task.k:
            return _violation(f"cross-entropy needs a probability_vector({task.k}) output, got {output}")
        return ConsistencyVerdict('PASS')

    if task.kind == TaskType.BINARY:
        if loss == LossKind.BINARY_CROSS_ENTROPY:
            if output.kind == OutputKind.SCALAR_PROBABILITY:
                return ConsistencyVerdict('PASS')
            if output.kind == OutputKind.PROBABILITY_VECTOR and output.k == 2:
                return ConsistencyVerdict('PASS')
            return _violation(f"binary cross-entropy needs a scalar_probability or probability_vector(2) output, got {output}")
        if loss == LossKind.CROSS_ENTROPY:
            if output.kind == OutputKind.PROBABILITY_VECTOR and output.k == 2:
                return ConsistencyVerdict('PASS')
            return _violation(f"cross-entropy needs a probability_vector(2) output, got {output}")
        return _violation("binary cross-entropy required")

    if task.kind == TaskType.MULTILABEL:
        if loss != LossKind.BINARY_CROSS_ENTROPY:
            return _violation("binary cross-entropy per label required")
        if output.kind != OutputKind.REAL_VECTOR or output.k not in (None, task.k):
            return _violation(f"per-label probabilities need a real_vector({task.k}) output, got {output}")
        return ConsistencyVerdict('PASS')

    # regression
    if loss not in (LossKind.SQUARED, LossKind.ABSOLUTE):
        return _violation("squared or absolute loss required")
    if output.kind not in (OutputKind.REAL_VALUE, OutputKind.REAL_VECTOR):
        return _violation(f"regression needs a real_value or real_vector output, got {output}")
    return ConsistencyVerdict('PASS')


def validate_probability_outputs(matrix, tol: float = DEFAULT_SETTINGS.probability_tolerance,
                                 max_listed: int = DEFAULT_SETTINGS.max_listed_rows) -> ProbabilityCheck:
    """Every row must be non-negative (within tol) and sum to 1 (within tol)"""
    rows = np.atleast_2d(np.asarray(matrix, dtype=float))
    if rows.ndim != 2:
        raise InputError("probability outputs must be an n x k matrix")

    finite = np.all(np.isfinite(rows), axis=1)
    non_negative = np.all(rows >= -tol, axis=1)
    normalized = np.abs(rows.sum(axis=1) - 1.0) <= tol
    bad = np.nonzero(~(finite & non_negative & normalized))[0]

    check = ProbabilityCheck(
        passed=bad.size == 0,
        violating_rows=[int(row) for row in bad[:max_listed]],
        violation_count=int(bad.size),
        rows_checked=int(rows.shape[0]),
        tolerance=tol
    )
    if not check.passed:
        logger.info(f"{check.violation_count} of {check.rows_checked} rows are not probability vectors")
    return check


def check_min_performance(measured: Mapping[str, Metric],
                          requirements: Sequence[PerformanceRequirement]) -> PerformanceVerdict:
    """Compare measured metrics with the required bounds"""
    for requirement in requirements:
        if requirement.metric not in measured:
            raise InputError(f"metric '{requirement.metric}' required but not measured")

    outcomes = [
        RequirementOutcome(requirement=requirement, measured=measured[requirement.metric],
                           passed=requirement.holds(measured[requirement.metric]))
        for requirement in requirements
    ]
    verdict = PerformanceVerdict(outcomes=outcomes)
    logger.info(f"Minimum performance: {sum(o.passed for o in outcomes)}/{len(outcomes)} requirement(s) met")
    return verdict


def baseline_majority_performance(class_dist: ClassDistribution) -> BaselinePerformance:
    k = len(class_dist.counts)
    return BaselinePerformance(
        accuracy=class_dist.majority_proportion,
        minority_recall=0.0,
        balanced_accuracy=1 / k,
        majority_class=class_dist.majority_class,
        minority_class=class_dist.minority_class
    )


def baseline_confusion_matrix(class_dist: ClassDistribution) -> ConfusionMatrix:
    """Confusion matrix of the constant majority-class predictor"""
    k = len(class_dist.counts)
    cells = np.zeros((k, k), dtype=np.int64)
    for label, count in class_dist.counts.items():
        cells[label, class_dist.majority_class] = count
    return ConfusionMatrix(cells=cells)
