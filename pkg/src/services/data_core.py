"""
Dataset Core Services
CSV ingestion, canonical row fingerprints, split construction and class statistics
"""

import hashlib
import json
import logging
import math
from collections import defaultdict
from pathlib import Path
from typing import IO, Dict, List, Literal, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from src.errors import (
    ConfigError, InputError, SchemaError, SplitError, TaskError, first_validation_message
)
from src.models.dataset import (
    HOLDOUT_LABELS, MISSING, ClassDistribution, DataPoint, Dataset, DatasetProfile, DatasetSchema,
    FeatureSpec, FeatureValue, Fingerprint, KFoldSplit, PredefinedSplit, RandomSplit,
    SplitAssignment, SplitLabel, SplitStrategy, TaskKind, TaskType, TemporalSplit
)

logger = logging.getLogger(__name__)

# Canonical encoding bytes
FIELD_SEPARATOR = b'\x1f'
MISSING_SENTINEL = b'\x00'
REAL_TAG = b'R'
TEXT_TAG = b'T'

NAN_TOKENS = {'nan', 'NaN', 'NAN'}
RATIO_TOLERANCE = 1e-9


class SchemaSpec(BaseModel):
    """Column declarations accompanying a CSV file"""
    model_config = ConfigDict(extra='forbid')

    target: str
    task: Literal['binary_classification', 'multiclass_classification',
                  'multilabel_classification', 'regression']
    k: Optional[int] = Field(default=None, ge=2)
    temporal_column: Optional[str] = None
    features: Optional[Dict[str, Literal['real', 'text']]] = None
    classes: Optional[List[str]] = None


class SplitDocument(BaseModel):
    model_config = ConfigDict(extra='forbid')

    mode: Literal['holdout', 'kfold']
    membership: Dict[int, Union[int, str]]


def _task_from_spec(spec: SchemaSpec) -> TaskKind:
    try:
        if spec.task == 'binary_classification':
            return TaskKind.binary() if spec.k in (None, 2) else TaskKind(TaskType.BINARY, spec.k)
        if spec.task == 'regression':
            if spec.k is not None:
                raise ValueError("regression tasks take no k")
            return TaskKind.regression()
        if spec.k is None:
            raise ValueError(f"{spec.task} requires k")
        return TaskKind(TaskType(spec.task), spec.k)
    except ValueError as e:
        raise SchemaError(str(e))


def parse_schema_spec(document: Mapping, header: Sequence[str]) -> DatasetSchema:
    """Validate a schema spec against a CSV header row"""
    try:
        spec = SchemaSpec.model_validate(document)
    except ValidationError as e:
        raise SchemaError(f"invalid schema spec: {first_validation_message(e)}")

    columns = list(header)
    if spec.target not in columns:
        raise SchemaError(f"target column '{spec.target}' not in CSV header")
    if spec.temporal_column is not None and spec.temporal_column not in columns:
        raise SchemaError(f"temporal column '{spec.temporal_column}' not in CSV header")
    if spec.temporal_column == spec.target:
        raise SchemaError("temporal column cannot be the target")
    declared = spec.features or {}
    for name in declared:
        if name not in columns:
            raise SchemaError(f"declared feature '{name}' not in CSV header")
        if name == spec.target:
            raise SchemaError(f"target column '{name}' cannot be declared as a feature")

    task = _task_from_spec(spec)
    classes = None
    if spec.classes is not None:
        if task.k is None or len(spec.classes) != task.k:
            raise SchemaError(f"classes list has {len(spec.classes)} names, task declares k={task.k}")
        classes = tuple(spec.classes)

    features = tuple(
        FeatureSpec(name=name, kind=declared.get(name, 'real'))
        for name in columns if name != spec.target
    )
    return DatasetSchema(features=features, target=spec.target, task=task,
                         classes=classes, temporal_column=spec.temporal_column)


def _parse_feature(cell: str, kind: str, row_id: int, column: str) -> FeatureValue:
    if not isinstance(cell, str) or cell == '':
        return MISSING
    if kind == 'text':
        return cell
    if cell.strip() in NAN_TOKENS:
        return MISSING
    try:
        value = float(cell)
    except ValueError:
        raise InputError(f"column '{column}' expects a real value, got '{cell}'", row=row_id)
    if not math.isfinite(value):
        raise InputError(f"column '{column}' has non-finite value '{cell}'", row=row_id)
    return value


def _parse_class_index(token: str, k: int, row_id: int) -> int:
    try:
        value = float(token)
    except ValueError:
        raise InputError(f"target '{token}' is not a class index", row=row_id)
    if not math.isfinite(value):
        raise InputError(f"target '{token}' is not finite", row=row_id)
    if value != int(value) or not 0 <= value < k:
        raise InputError(f"target '{token}' is not a class index in 0..{k - 1}", row=row_id)
    return int(value)


def _parse_target(cell: str, task: TaskKind, row_id: int):
    text = cell.strip() if isinstance(cell, str) else ''
    if text == '' or text in NAN_TOKENS:
        raise InputError("missing target", row=row_id)

    if task.kind == TaskType.REGRESSION:
        try:
            value = float(text)
        except ValueError:
            raise InputError(f"target '{cell}' is not a real number", row=row_id)
        if not math.isfinite(value):
            raise InputError(f"target '{cell}' is not finite", row=row_id)
        return value

    if task.kind == TaskType.MULTILABEL:
        labels = {_parse_class_index(token, task.k, row_id) for token in text.split(';') if token.strip()}
        return tuple(sorted(labels))

    return _parse_class_index(text, task.k, row_id)


def load_dataset(source: Union[str, Path, IO[str]], schema_spec: Mapping) -> Dataset:
    """Read a CSV document into a Dataset, rows in file order"""
    try:
        frame = pd.read_csv(source, dtype=str, keep_default_na=False, na_filter=False,
                            encoding='utf-8', skip_blank_lines=True)
    except pd.errors.EmptyDataError:
        raise InputError("CSV document is empty")
    except (pd.errors.ParserError, UnicodeDecodeError) as e:
        raise InputError(f"cannot parse CSV: {e}")

    if frame.empty:
        raise InputError("CSV document has no data rows")

    schema = parse_schema_spec(schema_spec, list(frame.columns))
    target_values = frame[schema.target].tolist()
    feature_columns = [frame[spec.name].tolist() for spec in schema.features]

    rows = []
    for row_id in range(len(frame)):
        target = _parse_target(target_values[row_id], schema.task, row_id)
        features = tuple(
            _parse_feature(column[row_id], spec.kind, row_id, spec.name)
            for spec, column in zip(schema.features, feature_columns)
        )
        rows.append(DataPoint(features=features, target=target, row_id=row_id))

    dataset = Dataset(schema=schema, rows=tuple(rows))
    logger.info(f"Loaded dataset with {dataset.n} rows, {schema.arity} features, task {schema.task.kind.value}")
    return dataset


def load_dataset_files(csv_path: Path, schema_path: Path) -> Dataset:
    """Load a dataset from a CSV path and a schema JSON path"""
    try:
        schema_spec = json.loads(Path(schema_path).read_text(encoding='utf-8'))
    except (OSError, json.JSONDecodeError) as e:
        raise SchemaError(f"cannot read schema spec {schema_path}: {e}")
    return load_dataset(csv_path, schema_spec)


def _encode_value(value: FeatureValue, rounding: Optional[int]) -> bytes:
    if value is MISSING:
        return MISSING_SENTINEL
    if isinstance(value, str):
        encoded = value.encode('utf-8')
        return TEXT_TAG + str(len(encoded)).encode('ascii') + b':' + encoded
    number = float(value)
    if rounding is not None:
        number = round(number, rounding)
    if number == 0.0:
        number = 0.0  # folds -0.0
    return REAL_TAG + repr(number).encode('ascii')


def fingerprint_row(point: DataPoint, rounding: Optional[int] = None) -> Fingerprint:
    """Digest a row's features; the target never enters the encoding"""
    canonical = FIELD_SEPARATOR.join(_encode_value(value, rounding) for value in point.features)
    digest = hashlib.blake2b(canonical, digest_size=16).digest()
    return Fingerprint(digest=digest, canonical_bytes=canonical)


def fingerprint_groups(dataset: Dataset, rounding: Optional[int] = None) -> List[Tuple[Fingerprint, List[int]]]:
    """Rows grouped by confirmed canonical equality, in order of first appearance"""
    buckets: Dict[bytes, List[Tuple[Fingerprint, List[int]]]] = defaultdict(list)
    ordered: List[Tuple[Fingerprint, List[int]]] = []

    for point in dataset.rows:
        fingerprint = fingerprint_row(point, rounding)
        for candidate, members in buckets[fingerprint.digest]:
            # Equal digests are only trusted after a full byte comparison
            if candidate.canonical_bytes == fingerprint.canonical_bytes:
                members.append(point.row_id)
                break
        else:
            entry = (fingerprint, [point.row_id])
            buckets[fingerprint.digest].append(entry)
            ordered.append(entry)

    return ordered


def duplicate_census(dataset: Dataset, rounding: Optional[int] = None) -> List[Tuple[int, ...]]:
    """Maximal groups of rows with identical features, each of size >= 2"""
    census = [tuple(members) for _, members in fingerprint_groups(dataset, rounding) if len(members) >= 2]
    logger.info(f"Duplicate census: {len(census)} group(s) over {dataset.n} rows")
    return census


def class_distribution(dataset: Dataset) -> ClassDistribution:
    """Per-class counts; for multilabel data, label occurrences"""
    task = dataset.task
    if not task.is_classification:
        raise TaskError("class distribution is undefined for regression tasks")

    counts = {label: 0 for label in range(task.k)}
    for target in dataset.targets():
        if task.kind == TaskType.MULTILABEL:
            for label in target:
                counts[label] += 1
        else:
            counts[target] += 1
    return ClassDistribution(counts=counts, n=dataset.n)


def _validate_ratios(ratios: Sequence[float]) -> Tuple[str, ...]:
    if len(ratios) not in (2, 3):
        raise ConfigError("ratios must be (train, test) or (train, validation, test)")
    if any(not math.isfinite(r) or r < 0 for r in ratios):
        raise ConfigError(f"ratios must be non-negative, got {tuple(ratios)}")
    if abs(sum(ratios) - 1.0) > RATIO_TOLERANCE:
        raise ConfigError(f"ratios must sum to 1, got {sum(ratios)}")
    if ratios[0] <= 0:
        raise ConfigError("train ratio must be positive")
    return ('train', 'test') if len(ratios) == 2 else HOLDOUT_LABELS


def split_sizes(n: int, ratios: Sequence[float]) -> List[int]:
    """Largest-remainder allocation of n rows; remainder ties go to the earlier split"""
    quotas = [n * ratio for ratio in ratios]
    sizes = [int(math.floor(quota + RATIO_TOLERANCE)) for quota in quotas]
    while sum(sizes) > n:
        sizes[sizes.index(max(sizes))] -= 1
    remainders = [quota - size for quota, size in zip(quotas, sizes)]
    leftover = n - sum(sizes)
    for index in sorted(range(len(ratios)), key=lambda i: (-remainders[i], i))[:leftover]:
        sizes[index] += 1
    return sizes


def _holdout_from_order(order: Sequence[int], ratios: Sequence[float]) -> SplitAssignment:
    labels = _validate_ratios(ratios)
    sizes = split_sizes(len(order), ratios)
    membership: Dict[int, SplitLabel] = {}
    position = 0
    for label, ratio, size in zip(labels, ratios, sizes):
        if ratio > 0 and size == 0:
            raise SplitError(f"split '{label}' would be empty with {len(order)} rows")
        for row_id in order[position:position + size]:
            membership[int(row_id)] = label
        position += size
    return SplitAssignment(mode='holdout', membership=membership)


def _temporal_order(dataset: Dataset, column: str) -> List[int]:
    if column not in dataset.schema.feature_names:
        raise ConfigError(f"temporal column '{column}' is not a feature column")
    values = dataset.column(column)
    if any(value is MISSING for value in values):
        raise ConfigError(f"temporal column '{column}' has missing values")
    return sorted(range(dataset.n), key=lambda row_id: (values[row_id], row_id))


def _kfold(dataset: Dataset, folds: int, seed: int) -> SplitAssignment:
    if folds < 2:
        raise ConfigError(f"k-fold needs at least 2 folds, got {folds}")
    if folds > dataset.n:
        raise SplitError(f"{folds} folds leave empty folds with {dataset.n} rows")
    order = np.random.default_rng(seed).permutation(dataset.n)
    base, extra = divmod(dataset.n, folds)
    membership: Dict[int, SplitLabel] = {}
    position = 0
    for fold in range(folds):
        size = base + (1 if fold < extra else 0)
        for row_id in order[position:position + size]:
            membership[int(row_id)] = fold
        position += size
    return SplitAssignment(mode='kfold', membership=membership, folds=folds)


def validate_assignment(membership: Mapping[int, SplitLabel], n: int) -> SplitAssignment:
    """Check coverage and label validity of an externally supplied split"""
    ids = set(membership)
    expected = set(range(n))
    if ids != expected:
        missing = sorted(expected - ids)
        extra = sorted(ids - expected)
        if missing:
            raise SplitError(f"split does not cover row(s) {missing[:10]}")
        raise SplitError(f"split references unknown row(s) {extra[:10]}")

    labels = set(membership.values())
    if labels and all(isinstance(label, str) for label in labels):
        unknown = labels - set(HOLDOUT_LABELS)
        if unknown:
            raise SplitError(f"unknown holdout label(s) {sorted(unknown)}")
        if 'train' not in labels:
            raise SplitError("holdout split has an empty train set")
        return SplitAssignment(mode='holdout', membership=dict(membership))

    if labels and all(isinstance(label, int) and not isinstance(label, bool) for label in labels):
        folds = max(labels) + 1
        if min(labels) < 0 or labels != set(range(folds)):
            raise SplitError(f"fold labels must be 0..f-1 with every fold non-empty, got {sorted(labels)}")
        if folds < 2:
            raise SplitError("k-fold split needs at least 2 non-empty folds")
        return SplitAssignment(mode='kfold', membership=dict(membership), folds=folds)

    raise SplitError("split labels must be all holdout names or all fold indices")


def assign_splits(dataset: Dataset, strategy: SplitStrategy) -> SplitAssignment:
    """Partition every row of the dataset according to the strategy"""
    if isinstance(strategy, RandomSplit):
        _validate_ratios(strategy.ratios)
        order = np.random.default_rng(strategy.seed).permutation(dataset.n)
        split = _holdout_from_order(order.tolist(), strategy.ratios)
    elif isinstance(strategy, TemporalSplit):
        _validate_ratios(strategy.ratios)
        split = _holdout_from_order(_temporal_order(dataset, strategy.column), strategy.ratios)
    elif isinstance(strategy, KFoldSplit):
        split = _kfold(dataset, strategy.folds, strategy.seed)
    elif isinstance(strategy, PredefinedSplit):
        split = validate_assignment(strategy.mapping, dataset.n)
    else:
        raise ConfigError(f"unknown split strategy {type(strategy).__name__}")

    logger.info(f"Assigned {split.mode} split over {dataset.n} rows: {split.sizes()}")
    return split


def read_split_file(path: Path, n: Optional[int] = None) -> SplitAssignment:
    """Read a split JSON document; checks coverage when the row count is known"""
    try:
        raw = json.loads(Path(path).read_text(encoding='utf-8'))
        document = SplitDocument.model_validate(raw)
    except (OSError, json.JSONDecodeError) as e:
        raise InputError(f"cannot read split file {path}: {e}")
    except ValidationError as e:
        raise SchemaError(f"invalid split file {path}: {first_validation_message(e)}")

    membership = dict(document.membership)
    row_count = n if n is not None else len(membership)
    split = validate_assignment(membership, row_count)
    if split.mode != document.mode:
        raise SchemaError(f"split file declares mode '{document.mode}' but labels imply '{split.mode}'")
    return split


def write_split_file(split: SplitAssignment, path: Path) -> None:
    Path(path).write_text(json.dumps(split.to_dict(), indent=2) + '\n', encoding='utf-8')


def conflicting_duplicates(dataset: Dataset, rounding: Optional[int] = None) -> List[Tuple[int, ...]]:
    """Duplicate groups whose rows disagree on the target (label noise)"""
    targets = dataset.targets()
    return [group for group in duplicate_census(dataset, rounding)
            if len({targets[row_id] for row_id in group}) > 1]


def profile_dataset(dataset: Dataset, rounding: Optional[int] = None) -> DatasetProfile:
    distribution = class_distribution(dataset) if dataset.task.is_classification else None
    return DatasetProfile(
        n=dataset.n,
        task=dataset.task,
        class_distribution=distribution,
        duplicate_groups=duplicate_census(dataset, rounding),
        conflicting_groups=conflicting_duplicates(dataset, rounding)
    )
