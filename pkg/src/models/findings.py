"""
Integrity Findings
Results of split leakage, cluster-fold, label-leak and metric-fit checks
"""

from dataclasses import dataclass, field
from typing import Dict, Hashable, List, Optional, Tuple

from src.models.dataset import SplitLabel
from src.models.report import Verdict


@dataclass(frozen=True)
class Collision:
    """One feature fingerprint found under two or more split labels"""
    fingerprint: str
    rows: Dict[SplitLabel, List[int]]

    @property
    def labels(self) -> List[SplitLabel]:
        return list(self.rows)

    def to_dict(self):
        return {
            'fingerprint': self.fingerprint,
            'rows': {str(label): list(row_ids) for label, row_ids in self.rows.items()}
        }


@dataclass(frozen=True)
class LeakageReport:
    mode: str
    collisions: List[Collision]
    pairs_checked: int

    @property
    def leak_present(self) -> bool:
        return bool(self.collisions)

    @property
    def report_verdict(self) -> Verdict:
        return Verdict.FAIL if self.leak_present else Verdict.PASS

    def to_dict(self, max_listed: Optional[int] = None):
        listed = self.collisions if max_listed is None else self.collisions[:max_listed]
        return {
            'mode': self.mode,
            'leak_present': self.leak_present,
            'collision_count': len(self.collisions),
            'pairs_checked': self.pairs_checked,
            'collisions': [collision.to_dict() for collision in listed]
        }


@dataclass(frozen=True)
class ClusterViolation:
    cluster: Hashable
    folds: Tuple[int, ...]

    def to_dict(self):
        return {'cluster': self.cluster, 'folds': list(self.folds)}


@dataclass(frozen=True)
class ClusterFoldReport:
    violations: List[ClusterViolation]
    clusters_checked: int

    @property
    def report_verdict(self) -> Verdict:
        return Verdict.FAIL if self.violations else Verdict.PASS

    def to_dict(self):
        return {
            'clusters_checked': self.clusters_checked,
            'violations': [violation.to_dict() for violation in self.violations]
        }


@dataclass(frozen=True)
class FeatureProbe:
    feature: str
    probe_accuracy: float
    majority_baseline: float
    flagged: bool
    binned: bool = False

    def to_dict(self):
        return {
            'feature': self.feature,
            'probe_accuracy': self.probe_accuracy,
            'majority_baseline': self.majority_baseline,
            'flagged': self.flagged,
            'binned': self.binned
        }


@dataclass(frozen=True)
class LabelLeakProbe:
    probes: List[FeatureProbe]
    threshold: float
    margin: float
    evaluated_on: str

    @property
    def flagged_features(self) -> List[str]:
        return [probe.feature for probe in self.probes if probe.flagged]

    def probe(self, feature: str) -> FeatureProbe:
        for probe in self.probes:
            if probe.feature == feature:
                return probe
        raise KeyError(feature)

    @property
    def report_verdict(self) -> Verdict:
        return Verdict.FAIL if self.flagged_features else Verdict.PASS

    def to_dict(self):
        return {
            'threshold': self.threshold,
            'margin': self.margin,
            'evaluated_on': self.evaluated_on,
            'flagged_features': self.flagged_features,
            'features': [probe.to_dict() for probe in self.probes]
        }


@dataclass(frozen=True)
class MetricAdvisory:
    verdict: Verdict
    chosen_metric: str
    minority_proportion: float
    baseline_accuracy: float
    threshold: float
    recommended: Tuple[str, ...] = ()
    message: str = ''

    def to_dict(self):
        return {
            'verdict': self.verdict.value,
            'chosen_metric': self.chosen_metric,
            'minority_proportion': self.minority_proportion,
            'baseline_accuracy': self.baseline_accuracy,
            'threshold': self.threshold,
            'recommended': list(self.recommended),
            'message': self.message
        }


@dataclass(frozen=True)
class DuplicateLabelReport:
    """Identical feature rows that disagree on the target"""
    conflicting_groups: List[Tuple[int, ...]] = field(default_factory=list)

    @property
    def report_verdict(self) -> Verdict:
        return Verdict.WARN if self.conflicting_groups else Verdict.PASS

    def to_dict(self):
        return {'conflicting_groups': [list(group) for group in self.conflicting_groups]}
