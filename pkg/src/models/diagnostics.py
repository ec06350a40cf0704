"""
Diagnostics Models
Model descriptors, capacity sweeps, performance requirements and their verdicts
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Tuple

from src.models.dataset import TaskKind
from src.models.evaluation import METRIC_NAMES, LossKind, Metric
from src.models.report import Verdict


class OutputKind(str, Enum):
    PROBABILITY_VECTOR = 'probability_vector'
    SCALAR_PROBABILITY = 'scalar_probability'
    REAL_VALUE = 'real_value'
    REAL_VECTOR = 'real_vector'


@dataclass(frozen=True)
class OutputSpec:
    kind: OutputKind
    k: Optional[int] = None

    def __str__(self):
        return f"{self.kind.value}({self.k})" if self.k is not None else self.kind.value


@dataclass(frozen=True)
class ModelDescriptor:
    """What the auditee declares about a trained model; parameters are never inspected"""
    family_name: str
    declared_loss: LossKind
    output_spec: OutputSpec
    task: TaskKind
    capacity_proxy: Optional[float] = None


@dataclass(frozen=True)
class SweepPoint:
    capacity: float
    train_risk: float
    test_risk: float

    @property
    def gap(self) -> float:
        return self.test_risk - self.train_risk


@dataclass(frozen=True)
class CapacitySweep:
    points: Tuple[SweepPoint, ...]


class Regime(str, Enum):
    UNDERFITTING = 'underfitting'
    SWEET_SPOT = 'sweet_spot'
    OVERFITTING = 'overfitting'


@dataclass(frozen=True)
class OverfitVerdict:
    verdict: str  # OK, OVERFIT_SUSPECTED
    gap: float
    threshold: float
    higher_is_better: bool

    @property
    def suspected(self) -> bool:
        return self.verdict == 'OVERFIT_SUSPECTED'

    @property
    def report_verdict(self) -> Verdict:
        return Verdict.WARN if self.suspected else Verdict.PASS

    def to_dict(self):
        return {
            'verdict': self.verdict,
            'gap': self.gap,
            'threshold': self.threshold,
            'higher_is_better': self.higher_is_better
        }


@dataclass(frozen=True)
class SweepAnalysis:
    sweet_spot: float
    regimes: List[Tuple[float, Regime]]
    gaps: List[float]
    flags: Tuple[str, ...] = ()

    @property
    def overfitting_capacities(self) -> List[float]:
        return [capacity for capacity, regime in self.regimes if regime == Regime.OVERFITTING]

    @property
    def report_verdict(self) -> Verdict:
        return Verdict.WARN if 'NON_UNIMODAL' in self.flags else Verdict.PASS

    def to_dict(self):
        return {
            'sweet_spot': self.sweet_spot,
            'points': [
                {'capacity': capacity, 'regime': regime.value, 'gap': gap}
                for (capacity, regime), gap in zip(self.regimes, self.gaps)
            ],
            'flags': list(self.flags)
        }


@dataclass(frozen=True)
class ConsistencyVerdict:
    verdict: str  # PASS, VIOLATION
    reason: str = ''

    @property
    def passed(self) -> bool:
        return self.verdict == 'PASS'

    @property
    def report_verdict(self) -> Verdict:
        return Verdict.PASS if self.passed else Verdict.FAIL

    def to_dict(self):
        return {'verdict': self.verdict, 'reason': self.reason}


@dataclass(frozen=True)
class ProbabilityCheck:
    passed: bool
    violating_rows: List[int]
    violation_count: int
    rows_checked: int
    tolerance: float

    @property
    def report_verdict(self) -> Verdict:
        return Verdict.PASS if self.passed else Verdict.FAIL

    def to_dict(self):
        return {
            'verdict': 'PASS' if self.passed else 'FAIL',
            'rows_checked': self.rows_checked,
            'violation_count': self.violation_count,
            'violating_rows': list(self.violating_rows),
            'tolerance': self.tolerance
        }


class Comparator(str, Enum):
    GE = '>='
    LE = '<='


@dataclass(frozen=True)
class PerformanceRequirement:
    metric: str
    comparator: Comparator
    bound: float

    def __post_init__(self):
        if self.metric not in METRIC_NAMES:
            raise ValueError(f"unknown metric '{self.metric}'")

    def holds(self, value: Metric) -> bool:
        """Inclusive comparison; an undefined value never meets a requirement"""
        if value is None:
            return False
        if self.comparator == Comparator.GE:
            return value >= self.bound
        return value <= self.bound

    def __str__(self):
        return f"{self.metric} {self.comparator.value} {self.bound}"


@dataclass(frozen=True)
class RequirementOutcome:
    requirement: PerformanceRequirement
    measured: Metric
    passed: bool

    def to_dict(self):
        return {
            'metric': self.requirement.metric,
            'op': self.requirement.comparator.value,
            'bound': self.requirement.bound,
            'measured': self.measured,
            'passed': self.passed
        }


@dataclass(frozen=True)
class PerformanceVerdict:
    outcomes: List[RequirementOutcome] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(outcome.passed for outcome in self.outcomes)

    @property
    def report_verdict(self) -> Verdict:
        return Verdict.PASS if self.passed else Verdict.FAIL

    def to_dict(self):
        return {'passed': self.passed, 'requirements': [outcome.to_dict() for outcome in self.outcomes]}


@dataclass(frozen=True)
class BaselinePerformance:
    """Scores of the predictor that always answers the majority class"""
    accuracy: float
    minority_recall: float
    balanced_accuracy: float
    majority_class: int
    minority_class: int

    def to_dict(self):
        return {
            'accuracy': self.accuracy,
            'minority_recall': self.minority_recall,
            'balanced_accuracy': self.balanced_accuracy,
            'majority_class': self.majority_class,
            'minority_class': self.minority_class
        }
