import csv
import io
import json

import pytest
from hypothesis import strategies as st

from src.config import DEFAULT_SETTINGS
from src.services.catalog import load_catalog
from src.services.data_core import load_dataset


def csv_text(header, rows):
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue()


def make_dataset(header, rows, spec):
    """Dataset straight from in-memory rows, through the CSV reader"""
    return load_dataset(io.StringIO(csv_text(header, rows)), spec)


def write_json(path, document):
    path.write_text(json.dumps(document), encoding='utf-8')
    return path


@pytest.fixture
def write_dataset(tmp_path):
    """Write a CSV and its schema spec; returns both paths"""
    def _write(header, rows, spec, name='data'):
        data_path = tmp_path / f'{name}.csv'
        data_path.write_text(csv_text(header, rows), encoding='utf-8')
        schema_path = write_json(tmp_path / f'{name}_schema.json', spec)
        return data_path, schema_path
    return _write


@pytest.fixture
def write_file(tmp_path):
    def _write(name, document):
        path = tmp_path / name
        if isinstance(document, str):
            path.write_text(document, encoding='utf-8')
        else:
            write_json(path, document)
        return path
    return _write


BINARY_SPEC = {'target': 'label', 'task': 'binary_classification'}


@pytest.fixture(scope='session')
def imbalanced_rows():
    """10000 rows, the first 100 positive, every feature row distinct"""
    return [[index, index % 7, 1 if index < 100 else 0] for index in range(10000)]


@pytest.fixture
def imbalanced_files(write_dataset, imbalanced_rows):
    return write_dataset(['x', 'y', 'label'], imbalanced_rows, BINARY_SPEC, name='imbalanced')


@pytest.fixture(scope='session')
def sample_catalog():
    return load_catalog()


@pytest.fixture
def settings():
    return DEFAULT_SETTINGS


def rows_dataset(feature_rows, targets=None, task=None):
    """Dataset built directly from feature tuples, bypassing CSV parsing"""
    from src.models.dataset import DataPoint, Dataset, DatasetSchema, FeatureSpec, TaskKind

    arity = len(feature_rows[0])
    schema = DatasetSchema(features=tuple(FeatureSpec(f'f{i}') for i in range(arity)),
                           target='y', task=task or TaskKind.binary())
    targets = [0] * len(feature_rows) if targets is None else targets
    rows = tuple(DataPoint(features=tuple(row), target=target, row_id=index)
                 for index, (row, target) in enumerate(zip(feature_rows, targets)))
    return Dataset(schema=schema, rows=rows)


@st.composite
def rows_with_duplicates(draw, max_rows=200, width=2):
    """Feature rows with copies of earlier rows injected at random positions"""
    base = draw(st.lists(st.tuples(*[st.integers(0, 9).map(float)] * width), min_size=1, max_size=max_rows // 2))
    copies = draw(st.lists(st.integers(0, len(base) - 1), max_size=max_rows - len(base)))
    return draw(st.permutations(base + [base[index] for index in copies]))
