"""
Integrity Commands
Split and fold leakage, cluster-fold discipline, label leakage and metric fit
"""

import logging

import click

from src.commands.common import (
    EXISTING_FILE, dataset_options, emit, output_options, pick, read_json, settings_from
)
from src.errors import InputError
from src.models.report import Verdict
from src.services.data_core import class_distribution, duplicate_census, load_dataset_files, read_split_file
from src.services.diagnostics import baseline_majority_performance
from src.services.integrity import (
    check_cluster_fold_assignment, check_fold_disjoint, check_label_leakage,
    check_metric_appropriateness, check_split_disjoint
)
from src.services.reporting import add_section, new_report

logger = logging.getLogger(__name__)


@click.group('check')
def check_group():
    """Data-split and label integrity checks"""


def _split_option(command):
    return click.option('--split', 'split_path', type=EXISTING_FILE, required=True,
                        help='Split JSON {"mode": ..., "membership": {row_id: label}}')(command)


def _rounding_option(command):
    return click.option('--rounding', type=int, default=None,
                        help='Decimal places for duplicate matching (default: exact)')(command)


def _leakage_report(ctx, command, check, checker, data_path, schema_path, split_path, rounding, fmt, out):
    settings = settings_from(ctx)
    dataset = load_dataset_files(data_path, schema_path)
    split = read_split_file(split_path, dataset.n)
    leakage = checker(dataset, split, rounding)

    report = new_report(command, {'data': str(data_path), 'schema': str(schema_path),
                                  'split': str(split_path), 'rounding': rounding})
    add_section(report, check, leakage.report_verdict, leakage.to_dict(settings.max_listed_rows))

    # Duplicates inside one split are not leakage; listed for the record only
    census = duplicate_census(dataset, rounding)
    colliding = {row_id for collision in leakage.collisions for rows in collision.rows.values() for row_id in rows}
    within = [group for group in census if not set(group) & colliding]
    details = {'group_count': len(within), 'groups': [list(group) for group in within[:settings.max_listed_rows]]}
    if within:
        details['message'] = f"{len(within)} duplicate group(s) inside single splits, not leakage"
    add_section(report, 'within_split_duplicates', Verdict.PASS, details)
    emit(ctx, report, fmt, out)


@check_group.command('splits')
@dataset_options
@_split_option
@_rounding_option
@output_options
@click.pass_context
def splits_command(ctx, data_path, schema_path, split_path, rounding, fmt, out):
    """Duplicate rows shared by train, validation and test"""
    _leakage_report(ctx, 'check splits', 'split_disjoint', check_split_disjoint,
                    data_path, schema_path, split_path, rounding, fmt, out)


@check_group.command('folds')
@dataset_options
@_split_option
@_rounding_option
@output_options
@click.pass_context
def folds_command(ctx, data_path, schema_path, split_path, rounding, fmt, out):
    """Duplicate rows shared by cross-validation folds"""
    _leakage_report(ctx, 'check folds', 'fold_disjoint', check_fold_disjoint,
                    data_path, schema_path, split_path, rounding, fmt, out)


@check_group.command('clusters')
@click.option('--clusters', 'clusters_path', type=EXISTING_FILE, required=True,
              help='Cluster labels JSON {row_id: cluster_id}')
@_split_option
@output_options
@click.pass_context
def clusters_command(ctx, clusters_path, split_path, fmt, out):
    """Every cluster must stay inside one fold"""
    raw = read_json(clusters_path)
    if not isinstance(raw, dict):
        raise InputError("cluster labels must be a JSON object {row_id: cluster_id}")
    try:
        clusters = {int(row_id): cluster for row_id, cluster in raw.items()}
    except ValueError:
        raise InputError("cluster label keys must be row ids")

    split = read_split_file(split_path)
    result = check_cluster_fold_assignment(clusters, split)
    report = new_report('check clusters', {'clusters': str(clusters_path), 'split': str(split_path)})
    add_section(report, 'cluster_folds', result.report_verdict, result.to_dict())
    emit(ctx, report, fmt, out)


@check_group.command('label-leak')
@dataset_options
@_split_option
@click.option('--threshold', type=float, default=None, help='Probe accuracy that raises suspicion')
@click.option('--margin', type=float, default=None, help='Required lead over the majority baseline')
@output_options
@click.pass_context
def label_leak_command(ctx, data_path, schema_path, split_path, threshold, margin, fmt, out):
    """Features that predict the target on their own"""
    settings = settings_from(ctx)
    dataset = load_dataset_files(data_path, schema_path)
    split = read_split_file(split_path, dataset.n)
    probe = check_label_leakage(dataset, split,
                                threshold=pick(threshold, settings.leak_threshold),
                                margin=pick(margin, settings.leak_margin),
                                bins=settings.quantile_bins)

    report = new_report('check label-leak', {'data': str(data_path), 'schema': str(schema_path),
                                             'split': str(split_path)})
    add_section(report, 'label_leakage', probe.report_verdict, probe.to_dict())
    emit(ctx, report, fmt, out)


@check_group.command('metric-fit')
@dataset_options
@click.option('--metric', default='accuracy', show_default=True, help='Metric the auditee reports')
@click.option('--imbalance-threshold', type=float, default=None)
@output_options
@click.pass_context
def metric_fit_command(ctx, data_path, schema_path, metric, imbalance_threshold, fmt, out):
    """Is the reported metric meaningful for this class balance?"""
    settings = settings_from(ctx)
    dataset = load_dataset_files(data_path, schema_path)
    distribution = class_distribution(dataset)
    advisory = check_metric_appropriateness(dataset.task, distribution, metric,
                                            pick(imbalance_threshold, settings.imbalance_threshold))
    baseline = baseline_majority_performance(distribution)

    report = new_report('check metric-fit', {'data': str(data_path), 'schema': str(schema_path),
                                             'metric': metric})
    details = advisory.to_dict()
    details['majority_baseline'] = baseline.to_dict()
    details['class_names'] = dict(enumerate(dataset.schema.class_names()))
    add_section(report, 'metric_fit', advisory.verdict, details)
    emit(ctx, report, fmt, out)
