"""
Dataset Models
Rows, schema, task kinds, split assignments and row fingerprints
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union


class Missing(Enum):
    """Marker for an empty feature cell"""
    MISSING = 'missing'

    def __repr__(self):
        return 'MISSING'


MISSING = Missing.MISSING

FeatureValue = Union[float, str, Missing]
Target = Union[int, float, Tuple[int, ...]]
SplitLabel = Union[str, int]

HOLDOUT_LABELS = ('train', 'validation', 'test')


class TaskType(str, Enum):
    BINARY = 'binary_classification'
    MULTICLASS = 'multiclass_classification'
    MULTILABEL = 'multilabel_classification'
    REGRESSION = 'regression'


@dataclass(frozen=True)
class TaskKind:
    """Learning task with its class count where one applies"""
    kind: TaskType
    k: Optional[int] = None

    def __post_init__(self):
        if self.kind == TaskType.REGRESSION:
            if self.k is not None:
                raise ValueError("regression tasks have no class count")
        elif self.k is None or self.k < 2:
            raise ValueError(f"{self.kind.value} needs k >= 2")
        if self.kind == TaskType.BINARY and self.k != 2:
            raise ValueError("binary classification has exactly 2 classes")

    @classmethod
    def binary(cls) -> 'TaskKind':
        return cls(TaskType.BINARY, 2)

    @classmethod
    def multiclass(cls, k: int) -> 'TaskKind':
        return cls(TaskType.MULTICLASS, k)

    @classmethod
    def multilabel(cls, k: int) -> 'TaskKind':
        return cls(TaskType.MULTILABEL, k)

    @classmethod
    def regression(cls) -> 'TaskKind':
        return cls(TaskType.REGRESSION)

    @property
    def is_classification(self) -> bool:
        return self.kind != TaskType.REGRESSION

    def to_dict(self):
        return {'kind': self.kind.value, 'k': self.k}


@dataclass(frozen=True)
class FeatureSpec:
    name: str
    kind: str = 'real'  # real, text


@dataclass(frozen=True)
class DatasetSchema:
    """Declared columns: ordered features, target and task"""
    features: Tuple[FeatureSpec, ...]
    target: str
    task: TaskKind
    classes: Optional[Tuple[str, ...]] = None
    temporal_column: Optional[str] = None

    @property
    def arity(self) -> int:
        return len(self.features)

    @property
    def feature_names(self) -> List[str]:
        return [spec.name for spec in self.features]

    def feature_index(self, name: str) -> int:
        for index, spec in enumerate(self.features):
            if spec.name == name:
                return index
        raise KeyError(name)

    def class_names(self) -> Tuple[str, ...]:
        if self.classes is not None:
            return self.classes
        if self.task.k is None:
            return ()
        return tuple(str(index) for index in range(self.task.k))


@dataclass(frozen=True)
class DataPoint:
    """One labelled row (x, z) at its position in the source file"""
    features: Tuple[FeatureValue, ...]
    target: Target
    row_id: int


@dataclass(frozen=True)
class Dataset:
    schema: DatasetSchema
    rows: Tuple[DataPoint, ...]

    def __post_init__(self):
        for expected_id, point in enumerate(self.rows):
            if point.row_id != expected_id:
                raise ValueError(f"row ids must be 0..n-1, found {point.row_id} at position {expected_id}")
            if len(point.features) != self.schema.arity:
                raise ValueError(f"row {point.row_id} has {len(point.features)} features, schema declares {self.schema.arity}")

    @property
    def n(self) -> int:
        return len(self.rows)

    @property
    def task(self) -> TaskKind:
        return self.schema.task

    def targets(self) -> List[Target]:
        return [point.target for point in self.rows]

    def column(self, name: str) -> List[FeatureValue]:
        index = self.schema.feature_index(name)
        return [point.features[index] for point in self.rows]


@dataclass(frozen=True)
class Fingerprint:
    """128-bit digest of a row's canonical feature bytes (target excluded)"""
    digest: bytes
    canonical_bytes: bytes

    @property
    def hex(self) -> str:
        return self.digest.hex()


@dataclass(frozen=True)
class SplitAssignment:
    """Per-row membership in holdout splits or cross-validation folds"""
    mode: str  # holdout, kfold
    membership: Mapping[int, SplitLabel]
    folds: Optional[int] = None

    def labels(self) -> List[SplitLabel]:
        if self.mode == 'kfold':
            return list(range(self.folds or 0))
        present = set(self.membership.values())
        return [label for label in HOLDOUT_LABELS if label in present]

    def groups(self) -> Dict[SplitLabel, List[int]]:
        """Row ids per split label, each list ascending"""
        result: Dict[SplitLabel, List[int]] = {label: [] for label in self.labels()}
        for row_id in sorted(self.membership):
            result.setdefault(self.membership[row_id], []).append(row_id)
        return result

    def sizes(self) -> Dict[SplitLabel, int]:
        return {label: len(rows) for label, rows in self.groups().items()}

    def to_dict(self):
        return {
            'mode': self.mode,
            'membership': {str(row_id): self.membership[row_id] for row_id in sorted(self.membership)}
        }


# Split strategies accepted by assign_splits

@dataclass(frozen=True)
class RandomSplit:
    seed: int
    ratios: Tuple[float, ...] = (0.8, 0.1, 0.1)


@dataclass(frozen=True)
class TemporalSplit:
    column: str
    ratios: Tuple[float, ...] = (0.8, 0.1, 0.1)


@dataclass(frozen=True)
class PredefinedSplit:
    mapping: Mapping[int, SplitLabel]


@dataclass(frozen=True)
class KFoldSplit:
    folds: int
    seed: int


SplitStrategy = Union[RandomSplit, TemporalSplit, PredefinedSplit, KFoldSplit]


@dataclass(frozen=True)
class ClassDistribution:
    """Per-class counts with minority and majority shares"""
    counts: Dict[int, int]
    n: int

    @property
    def minority_proportion(self) -> float:
        return min(self.counts.values()) / self.n

    @property
    def majority_proportion(self) -> float:
        return max(self.counts.values()) / self.n

    @property
    def majority_class(self) -> int:
        top = max(self.counts.values())
        return min(label for label, count in self.counts.items() if count == top)

    @property
    def minority_class(self) -> int:
        low = min(self.counts.values())
        candidates = [label for label, count in self.counts.items() if count == low]
        others = [label for label in candidates if label != self.majority_class]
        return min(others or candidates)

    def to_dict(self, class_names: Sequence[str] = ()):
        document = {
            'counts': {str(label): count for label, count in sorted(self.counts.items())},
            'n': self.n,
            'minority_proportion': self.minority_proportion,
            'majority_proportion': self.majority_proportion
        }
        if class_names:
            document['class_names'] = {str(label): class_names[label] for label in sorted(self.counts)}
        return document


@dataclass(frozen=True)
class DatasetProfile:
    n: int
    task: TaskKind
    class_distribution: Optional[ClassDistribution]
    duplicate_groups: List[Tuple[int, ...]] = field(default_factory=list)
    conflicting_groups: List[Tuple[int, ...]] = field(default_factory=list)

    def to_dict(self):
        return {
            'n': self.n,
            'task': self.task.to_dict(),
            'class_distribution': self.class_distribution.to_dict() if self.class_distribution else None,
            'duplicate_groups': [list(group) for group in self.duplicate_groups],
            'conflicting_groups': [list(group) for group in self.conflicting_groups]
        }
