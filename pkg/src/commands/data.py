"""
Data Commands
Split construction and dataset profiling
"""

import logging

import click

from src.commands.common import (
    OUTPUT_FILE, dataset_options, emit, output_options, parse_ratios, settings_from
)
from src.errors import ConfigError
from src.models.dataset import KFoldSplit, RandomSplit, TemporalSplit
from src.models.report import Verdict
from src.services.data_core import assign_splits, load_dataset_files, profile_dataset, write_split_file
from src.services.integrity import check_duplicate_labels
from src.services.reporting import add_section, new_report

logger = logging.getLogger(__name__)


@click.group('data')
def data_group():
    """Build splits and profile datasets"""


@data_group.command('split')
@dataset_options
@click.option('--strategy', type=click.Choice(['random', 'temporal', 'kfold']), default='random', show_default=True)
@click.option('--seed', type=int, default=None, help='Seed for random and k-fold splits')
@click.option('--ratios', default='0.8,0.1,0.1', show_default=True, help='train,validation,test or train,test')
@click.option('--column', default=None, help='Ordering column for temporal splits')
@click.option('--folds', type=int, default=5, show_default=True)
@click.option('--split-out', type=OUTPUT_FILE, required=True, help='Where to write the split JSON')
@output_options
@click.pass_context
def split_command(ctx, data_path, schema_path, strategy, seed, ratios, column, folds, split_out, fmt, out):
    """Assign every row to train/validation/test or to a fold"""
    dataset = load_dataset_files(data_path, schema_path)
    ratio_values = parse_ratios(ratios)

    if strategy in ('random', 'kfold') and seed is None:
        raise ConfigError(f"{strategy} splits need an explicit --seed")
    if strategy == 'random':
        split_strategy = RandomSplit(seed=seed, ratios=ratio_values)
    elif strategy == 'temporal':
        column = column or dataset.schema.temporal_column
        if column is None:
            raise ConfigError("temporal splits need --column or a temporal_column in the schema")
        split_strategy = TemporalSplit(column=column, ratios=ratio_values)
    else:
        split_strategy = KFoldSplit(folds=folds, seed=seed)

    split = assign_splits(dataset, split_strategy)
    write_split_file(split, split_out)

    report = new_report('data split', {'data': str(data_path), 'schema': str(schema_path),
                                       'strategy': strategy, 'seed': seed})
    add_section(report, 'split_assignment', Verdict.PASS, {
        'mode': split.mode,
        'sizes': split.sizes(),
        'split_file': str(split_out)
    })
    emit(ctx, report, fmt, out)


@data_group.command('profile')
@dataset_options
@click.option('--rounding', type=int, default=None, help='Decimal places for duplicate matching')
@output_options
@click.pass_context
def profile_command(ctx, data_path, schema_path, rounding, fmt, out):
    """Class distribution and duplicate census of a dataset"""
    settings = settings_from(ctx)
    dataset = load_dataset_files(data_path, schema_path)
    profile = profile_dataset(dataset, rounding)

    report = new_report('data profile', {'data': str(data_path), 'schema': str(schema_path),
                                         'rounding': rounding})
    if profile.class_distribution is None:
        add_section(report, 'class_distribution', Verdict.UNDEFINED,
                    {'n': profile.n, 'message': 'class distribution is undefined for regression'})
    else:
        distribution = profile.class_distribution
        verdict = Verdict.WARN if distribution.minority_proportion < settings.imbalance_threshold else Verdict.PASS
        add_section(report, 'class_distribution', verdict, distribution.to_dict(dataset.schema.class_names()))

    groups = profile.duplicate_groups
    add_section(report, 'duplicate_census', Verdict.WARN if groups else Verdict.PASS, {
        'group_count': len(groups),
        'duplicate_rows': sum(len(group) for group in groups),
        'groups': [list(group) for group in groups[:settings.max_listed_rows]]
    })

    conflicts = check_duplicate_labels(dataset, rounding)
    add_section(report, 'duplicate_labels', conflicts.report_verdict, {
        'conflict_count': len(conflicts.conflicting_groups),
        'conflicting_groups': [list(group) for group in conflicts.conflicting_groups[:settings.max_listed_rows]]
    })
    emit(ctx, report, fmt, out)
