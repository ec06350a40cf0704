"""End-to-end scenarios over many seeds"""

import numpy as np
import pytest

from src.models.catalog import Assessment, AssessmentEntry, Decision, Status
from src.models.dataset import RandomSplit
from src.services.catalog import determine_cl, evaluate_assessment, load_catalog, parse_impact
from src.services.data_core import assign_splits, class_distribution
from src.services.diagnostics import baseline_majority_performance, check_min_performance, parse_performance_requirements
from src.services.integrity import check_label_leakage, check_metric_appropriateness, check_split_disjoint
from src.services.metrics import classification_report, confusion_matrix
from tests.conftest import rows_dataset

SEEDS = range(100)


def _oversampled(seed, copies=5):
    """450 majority and 50 minority rows; each minority row copied before any split"""
    rng = np.random.default_rng(seed)
    values = rng.permutation(100000)[:500].astype(float)
    rows = [(value,) for value in values]
    targets = [1 if index < 50 else 0 for index in range(500)]
    for index in range(50):
        rows.extend([rows[index]] * (copies - 1))
        targets.extend([1] * (copies - 1))
    return rows_dataset(rows, targets)


def test_oversampling_before_splitting_leaks_for_almost_every_seed():
    leaking = 0
    for seed in SEEDS:
        dataset = _oversampled(seed)
        split = assign_splits(dataset, RandomSplit(seed=seed, ratios=(0.8, 0.2)))
        leaking += check_split_disjoint(dataset, split).leak_present
    assert leaking >= 99


def test_oversampling_after_splitting_is_clean():
    dataset = _oversampled(0, copies=1)
    split = assign_splits(dataset, RandomSplit(seed=0, ratios=(0.8, 0.2)))
    assert not check_split_disjoint(dataset, split).leak_present


def _probe_dataset(seed, n=500):
    rng = np.random.default_rng(seed)
    targets = rng.integers(0, 2, size=n).tolist()
    noise = rng.normal(size=n)
    rows = [(float(target), float(value)) for target, value in zip(targets, noise)]
    return rows_dataset(rows, targets)


def test_label_leak_probe_over_seeds():
    embedded_flagged = 0
    noise_flagged = 0
    for seed in SEEDS:
        dataset = _probe_dataset(seed)
        probe = check_label_leakage(dataset, assign_splits(dataset, RandomSplit(seed=seed)))
        embedded_flagged += probe.probe('f0').flagged
        noise_flagged += probe.probe('f1').flagged
    assert embedded_flagged == 100
    assert noise_flagged <= 1


def test_always_negative_audit(imbalanced_rows):
    dataset = rows_dataset([tuple(row[:2]) for row in imbalanced_rows], [row[2] for row in imbalanced_rows])
    distribution = class_distribution(dataset)

    advisory = check_metric_appropriateness(dataset.task, distribution, 'accuracy')
    baseline = baseline_majority_performance(distribution)
    report = classification_report(confusion_matrix(dataset.targets(), [0] * dataset.n, 2))
    requirements = parse_performance_requirements([
        {'metric': 'accuracy', 'op': '>=', 'bound': 0.95},
        {'metric': 'recall', 'op': '>=', 'bound': 0.8},
    ])
    verdict = check_min_performance(report.metrics(), requirements)

    assert advisory.verdict.value == 'WARN'
    assert report.accuracy == pytest.approx(0.99)
    assert baseline.accuracy == report.accuracy
    assert report.sensitivity == 0.0
    assert report.miss_rate == 1.0
    assert report.cohens_kappa == 0.0
    assert report.balanced_accuracy == 0.5
    assert [outcome.passed for outcome in verdict.outcomes] == [True, False]


def test_conformity_is_downward_monotone_over_random_assessments():
    catalog = load_catalog()
    ids = [requirement.id for requirement in catalog.requirements()]
    statuses = [Status.FULFILLED, Status.PARTIALLY_FULFILLED, Status.NOT_FULFILLED]
    rank = {Decision.GRANTED: 2, Decision.GRANTED_WITH_CONDITIONS: 1, Decision.DENIED: 0}
    rng = np.random.default_rng(2021)

    for _ in range(1000):
        # mostly fulfilled, so that granted outcomes actually occur
        picks = rng.choice(3, size=len(ids), p=[0.85, 0.1, 0.05])
        assessment = Assessment(entries={rid: AssessmentEntry(status=statuses[pick]) for rid, pick in zip(ids, picks)})
        decisions = [evaluate_assessment(catalog, assessment, cl).decision for cl in range(1, 5)]
        for lower, higher in zip(decisions, decisions[1:]):
            assert rank[lower] >= rank[higher]


@pytest.mark.parametrize('dimensions, expected_cl, decision', [
    ({'harm_to_life': 1, 'privacy': 1}, 1, Decision.GRANTED),
    ({'harm_to_life': 1, 'data_confidentiality': 2}, 2, Decision.DENIED),
])
def test_impact_drives_the_decision(sample_catalog, dimensions, expected_cl, decision):
    # MS-4 (field test, CL 2) is the only item not fulfilled
    entries = {requirement.id: AssessmentEntry(status=Status.FULFILLED) for requirement in sample_catalog.requirements()}
    entries['MS-4'] = AssessmentEntry(status=Status.NOT_FULFILLED)

    target_cl = determine_cl(parse_impact({'dimensions': dimensions}))
    assert target_cl == expected_cl
    assert evaluate_assessment(sample_catalog, Assessment(entries=entries), target_cl).decision == decision
