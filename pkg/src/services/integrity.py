"""
Data Integrity Checks
Cross-split duplicate leakage, fold and cluster discipline, label-leak probing and metric appropriateness
"""

import logging
from collections import Counter, defaultdict
from itertools import combinations
from typing import Dict, Hashable, List, Mapping, Optional, Sequence

import numpy as np

from src.config import DEFAULT_SETTINGS
from src.errors import InputError, ModeError, SplitError, TaskError
from src.models.dataset import (
    MISSING, ClassDistribution, Dataset, FeatureValue, SplitAssignment, SplitLabel, TaskKind, Target
)
from src.models.findings import (
    ClusterFoldReport, ClusterViolation, Collision, DuplicateLabelReport, FeatureProbe,
    LabelLeakProbe, LeakageReport, MetricAdvisory
)
from src.models.report import Verdict
from src.services.data_core import conflicting_duplicates, fingerprint_groups

logger = logging.getLogger(__name__)

RECOMMENDED_FOR_IMBALANCE = ('recall', 'miss_rate', 'balanced_accuracy')


def _require_coverage(dataset: Dataset, split: SplitAssignment) -> None:
    if set(split.membership) != set(range(dataset.n)):
        raise SplitError(f"split covers {len(split.membership)} row id(s), dataset has {dataset.n} rows")


def _leakage(dataset: Dataset, split: SplitAssignment, rounding: Optional[int]) -> LeakageReport:
    _require_coverage(dataset, split)
    order = {label: position for position, label in enumerate(split.labels())}

    collisions = []
    for fingerprint, members in fingerprint_groups(dataset, rounding):
        if len(members) < 2:
            continue
        by_label: Dict[SplitLabel, List[int]] = defaultdict(list)
        for row_id in members:
            by_label[split.membership[row_id]].append(row_id)
        if len(by_label) >= 2:
            rows = {label: by_label[label] for label in sorted(by_label, key=order.__getitem__)}
            collisions.append(Collision(fingerprint=fingerprint.hex, rows=rows))

    sizes = split.sizes()
    pairs_checked = sum(sizes[a] * sizes[b] for a, b in combinations(sizes, 2))
    report = LeakageReport(mode=split.mode, collisions=collisions, pairs_checked=pairs_checked)
    logger.info(f"Leakage check ({split.mode}): {len(collisions)} collision(s), {pairs_checked} cross-split pairs")
    return report


def check_split_disjoint(dataset: Dataset, split: SplitAssignment, rounding: Optional[int] = None) -> LeakageReport:
    """Fingerprints shared between train, validation and test.

    Duplicates inside a single split are not leakage; duplicate_census reports them.
    """
    if split.mode != 'holdout':
        raise ModeError("check_split_disjoint needs a holdout split; use check_fold_disjoint for k-fold")
    return _leakage(dataset, split, rounding)


def check_fold_disjoint(dataset: Dataset, split: SplitAssignment, rounding: Optional[int] = None) -> LeakageReport:
    """Fingerprints shared between two or more cross-validation folds"""
    if split.mode != 'kfold':
        raise ModeError("check_fold_disjoint needs a k-fold split; use check_split_disjoint for holdout")
    return _leakage(dataset, split, rounding)


def check_cluster_fold_assignment(cluster_labels: Mapping[int, Hashable], split: SplitAssignment) -> ClusterFoldReport:
    """Every cluster must sit inside a single fold"""
    if split.mode != 'kfold':
        raise ModeError("cluster-fold assignment needs a k-fold split")

    for row_id in sorted(split.membership):
        if row_id not in cluster_labels:
            raise InputError("row has no cluster label", row=row_id)
    for row_id in sorted(cluster_labels):
        if row_id not in split.membership:
            raise InputError("cluster label for a row outside the split", row=row_id)

    folds_by_cluster: Dict[Hashable, set] = {}
    for row_id in sorted(split.membership):
        folds_by_cluster.setdefault(cluster_labels[row_id], set()).add(split.membership[row_id])

    violations = [
        ClusterViolation(cluster=cluster, folds=tuple(sorted(folds)))
        for cluster, folds in folds_by_cluster.items() if len(folds) >= 2
    ]
    logger.info(f"Cluster-fold check: {len(violations)} of {len(folds_by_cluster)} cluster(s) span several folds")
    return ClusterFoldReport(violations=violations, clusters_checked=len(folds_by_cluster))


def _majority(targets: Sequence[Target]) -> Target:
    counts = Counter(targets)
    top = max(counts.values())
    return min(target for target, count in counts.items() if count == top)


def _lookup_keys(train_values: List[FeatureValue], eval_values: List[FeatureValue], kind: str, bins: int):
    """Raw values as keys, or quantile-bin indices for real features with many distinct values"""
    present = [value for value in train_values if value is not MISSING]
    if kind != 'real' or len(set(present)) <= bins:
        return train_values, eval_values, False

    edges = np.quantile(np.array(present, dtype=float), np.linspace(0, 1, bins + 1)[1:-1])

    def bin_of(value):
        if value is MISSING:
            return MISSING
        return int(np.searchsorted(edges, value, side='right'))

    return [bin_of(v) for v in train_values], [bin_of(v) for v in eval_values], True


def check_label_leakage(dataset: Dataset, split: SplitAssignment,
                        threshold: float = DEFAULT_SETTINGS.leak_threshold,
                        margin: float = DEFAULT_SETTINGS.leak_margin,
                        bins: int = DEFAULT_SETTINGS.quantile_bins) -> LabelLeakProbe:
    """Probe each feature with a lookup table fitted on train rows.

    A feature is flagged when the table alone scores at least `threshold` on
    held-out rows and beats the majority baseline by at least `margin`.
    """
    if not dataset.task.is_classification:
        raise TaskError("label-leak probing needs a classification task")
    if split.mode != 'holdout':
        raise ModeError("label-leak probing needs a holdout split")
    _require_coverage(dataset, split)

    groups = split.groups()
    train_rows = groups.get('train', [])
    evaluated_on = 'validation' if groups.get('validation') else 'test'
    eval_rows = groups.get(evaluated_on, [])
    if not train_rows or not eval_rows:
        raise SplitError("label-leak probing needs non-empty train and validation or test rows")

    targets = dataset.targets()
    train_targets = [targets[row_id] for row_id in train_rows]
    eval_targets = [targets[row_id] for row_id in eval_rows]
    fallback = _majority(train_targets)
    baseline = float(np.mean([target == fallback for target in eval_targets]))

    probes = []
    for index, spec in enumerate(dataset.schema.features):
        train_values = [dataset.rows[row_id].features[index] for row_id in train_rows]
        eval_values = [dataset.rows[row_id].features[index] for row_id in eval_rows]
        train_keys, eval_keys, binned = _lookup_keys(train_values, eval_values, spec.kind, bins)

        by_key: Dict[Hashable, List[Target]] = defaultdict(list)
        for key, target in zip(train_keys, train_targets):
            by_key[key].append(target)
        table = {key: _majority(values) for key, values in by_key.items()}

        hits = [table.get(key, fallback) == target for key, target in zip(eval_keys, eval_targets)]
        accuracy = float(np.mean(hits))
        flagged = accuracy >= threshold and accuracy >= baseline + margin
        probes.append(FeatureProbe(feature=spec.name, probe_accuracy=accuracy,
                                   majority_baseline=baseline, flagged=flagged, binned=binned))
        if flagged:
            logger.warning(f"Feature '{spec.name}' predicts the target with accuracy {accuracy:.4f} (baseline {baseline:.4f})")

    return LabelLeakProbe(probes=probes, threshold=threshold, margin=margin, evaluated_on=evaluated_on)


def check_metric_appropriateness(task: TaskKind, class_dist: ClassDistribution, chosen_metric: str,
                                 imbalance_threshold: float = DEFAULT_SETTINGS.imbalance_threshold) -> MetricAdvisory:
    """Warn when accuracy is reported on data whose minority share is below the threshold"""
    if not task.is_classification:
        raise TaskError("metric appropriateness applies to classification tasks")

    minority = class_dist.minority_proportion
    baseline = class_dist.majority_proportion
    if chosen_metric == 'accuracy' and minority < imbalance_threshold:
        message = (f"accuracy is misleading at minority share {minority:g}: always predicting the majority "
                   f"class already scores {baseline:g}; report recall, miss_rate or balanced_accuracy instead")
        logger.info(f"Metric advisory: {message}")
        return MetricAdvisory(Verdict.WARN, chosen_metric, minority, baseline, imbalance_threshold,
                              recommended=RECOMMENDED_FOR_IMBALANCE, message=message)

    return MetricAdvisory(Verdict.PASS, chosen_metric, minority, baseline, imbalance_threshold,
                          message=f"{chosen_metric} is appropriate at minority share {minority:g}")


def check_duplicate_labels(dataset: Dataset, rounding: Optional[int] = None) -> DuplicateLabelReport:
    groups = conflicting_duplicates(dataset, rounding)
    if groups:
        logger.warning(f"{len(groups)} duplicate group(s) carry conflicting targets")
    return DuplicateLabelReport(conflicting_groups=groups)
