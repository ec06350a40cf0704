"""
Diagnostics Commands
Overfitting, capacity sweeps, loss consistency, probability outputs and minimum performance
"""

import logging

import click

from src.commands.common import EXISTING_FILE, emit, output_options, pick, read_json, read_matrix, settings_from
from src.errors import InputError
from src.services.diagnostics import (
    capacity_sweep_analysis, check_loss_task_consistency, check_min_performance, overfit_gap,
    parse_capacity_sweep, parse_model_descriptor, parse_performance_requirements,
    validate_probability_outputs
)
from src.services.reporting import add_section, new_report

logger = logging.getLogger(__name__)


@click.group('diagnose')
def diagnose_group():
    """Model-level diagnostics"""


@diagnose_group.command('overfit')
@click.option('--train-value', type=float, required=True)
@click.option('--test-value', type=float, required=True)
@click.option('--lower-is-better', is_flag=True, help='Values are risks or losses rather than scores')
@click.option('--threshold', type=float, default=None)
@output_options
@click.pass_context
def overfit_command(ctx, train_value, test_value, lower_is_better, threshold, fmt, out):
    """Gap between training and test performance"""
    settings = settings_from(ctx)
    verdict = overfit_gap(train_value, test_value, higher_is_better=not lower_is_better,
                          rel_threshold=pick(threshold, settings.overfit_threshold))
    report = new_report('diagnose overfit', {'train_value': train_value, 'test_value': test_value})
    add_section(report, 'overfit_gap', verdict.report_verdict, verdict.to_dict())
    emit(ctx, report, fmt, out)


@diagnose_group.command('sweep')
@click.option('--sweep', 'sweep_path', type=EXISTING_FILE, required=True,
              help='Capacity sweep JSON {"points": [{"capacity", "train_risk", "test_risk"}]}')
@output_options
@click.pass_context
def sweep_command(ctx, sweep_path, fmt, out):
    """Sweet-spot capacity and regime of each sweep point"""
    analysis = capacity_sweep_analysis(parse_capacity_sweep(read_json(sweep_path)))
    report = new_report('diagnose sweep', {'sweep': str(sweep_path)})
    add_section(report, 'capacity_sweep', analysis.report_verdict, analysis.to_dict())
    emit(ctx, report, fmt, out)


@diagnose_group.command('loss')
@click.option('--descriptor', 'descriptor_path', type=EXISTING_FILE, required=True,
              help='Model descriptor JSON')
@output_options
@click.pass_context
def loss_command(ctx, descriptor_path, fmt, out):
    """Declared training loss against the task and output layout"""
    descriptor = parse_model_descriptor(read_json(descriptor_path))
    verdict = check_loss_task_consistency(descriptor)
    report = new_report('diagnose loss', {'descriptor': str(descriptor_path),
                                          'family_name': descriptor.family_name})
    details = verdict.to_dict()
    details.update({
        'task': descriptor.task.to_dict(),
        'declared_loss': descriptor.declared_loss.value,
        'output': str(descriptor.output_spec)
    })
    add_section(report, 'loss_task_consistency', verdict.report_verdict, details)
    emit(ctx, report, fmt, out)


@diagnose_group.command('prob-outputs')
@click.option('--matrix', 'matrix_path', type=EXISTING_FILE, required=True,
              help='n x k model outputs (CSV with header, or JSON rows)')
@click.option('--tolerance', type=float, default=None)
@output_options
@click.pass_context
def prob_outputs_command(ctx, matrix_path, tolerance, fmt, out):
    """Every output row must be a probability distribution"""
    settings = settings_from(ctx)
    check = validate_probability_outputs(read_matrix(matrix_path),
                                         tol=pick(tolerance, settings.probability_tolerance),
                                         max_listed=settings.max_listed_rows)
    report = new_report('diagnose prob-outputs', {'matrix': str(matrix_path)})
    add_section(report, 'probability_outputs', check.report_verdict, check.to_dict())
    emit(ctx, report, fmt, out)


@diagnose_group.command('min-perf')
@click.option('--measured', 'measured_path', type=EXISTING_FILE, required=True,
              help='Measured metrics JSON {metric: value}')
@click.option('--requirements', 'requirements_path', type=EXISTING_FILE, required=True,
              help='Requirements JSON [{"metric", "op", "bound"}]')
@output_options
@click.pass_context
def min_perf_command(ctx, measured_path, requirements_path, fmt, out):
    """Measured metrics against the defined minimum performance"""
    measured = read_json(measured_path)
    if not isinstance(measured, dict):
        raise InputError("measured metrics must be a JSON object")
    for name, value in measured.items():
        if value is not None and (isinstance(value, bool) or not isinstance(value, (int, float))):
            raise InputError(f"measured value for '{name}' must be a number or null")

    requirements = parse_performance_requirements(read_json(requirements_path))
    verdict = check_min_performance(measured, requirements)
    report = new_report('diagnose min-perf', {'measured': str(measured_path),
                                              'requirements': str(requirements_path)})
    add_section(report, 'min_performance', verdict.report_verdict, verdict.to_dict())
    emit(ctx, report, fmt, out)
