"""
Certification Case Commands
Open a case, apply lifecycle events and query certificate status
"""

import logging

import click

from src.commands.common import EXISTING_FILE, ISO_DATE, OUTPUT_FILE, emit, output_options, settings_from
from src.errors import InputError
from src.models.certification import STATUS_VERDICTS
from src.models.report import Verdict
from src.services.reporting import add_section, new_report
from src.services.workflow import (
    advance, allowed_events, certificate_status, load_case, new_case, parse_event, save_case
)

logger = logging.getLogger(__name__)


@click.group('case')
def case_group():
    """Certification case lifecycle"""


def _payload(pairs):
    payload = {}
    for pair in pairs:
        key, sep, value = pair.partition('=')
        if not sep or not key:
            raise click.BadParameter(f"expected key=value, got '{pair}'", param_hint='--payload')
        payload[key.strip()] = value.strip()
    return payload


@case_group.command('init')
@click.option('--scope', required=True, help='Certified application and its operational domain')
@click.option('--cl', 'target_cl', type=click.IntRange(1, 4), required=True, help='Target criticality level')
@click.option('--date', 'on', type=ISO_DATE, required=True, help='Opening date (YYYY-MM-DD)')
@click.option('--case-file', type=OUTPUT_FILE, required=True, help='Where to write the case event log')
@click.option('--case-id', default=None)
@output_options
@click.pass_context
def init_command(ctx, scope, target_cl, on, case_file, case_id, fmt, out):
    """Open a case in GapAnalysis"""
    if case_file.exists():
        raise InputError(f"case file {case_file} already exists")
    case = new_case(scope, target_cl, on.date(), case_id)
    save_case(case, case_file)

    report = new_report('case init', {'case_file': str(case_file)})
    add_section(report, 'case_state', Verdict.PASS, case.snapshot())
    emit(ctx, report, fmt, out)


@case_group.command('advance')
@click.option('--case-file', type=EXISTING_FILE, required=True)
@click.option('--event', 'kind', required=True, help='Event kind, e.g. complete_gap_analysis')
@click.option('--date', 'on', type=ISO_DATE, required=True, help='Event date (YYYY-MM-DD)')
@click.option('--payload', 'pairs', multiple=True, help='Event payload as key=value, repeatable')
@output_options
@click.pass_context
def advance_command(ctx, case_file, kind, on, pairs, fmt, out):
    """Apply one event and append it to the case log"""
    settings = settings_from(ctx)
    case = load_case(case_file, settings)
    previous = case.state
    event = parse_event(kind, on.date().isoformat(), _payload(pairs))
    advance(case, event, settings)
    save_case(case, case_file)

    report = new_report('case advance', {'case_file': str(case_file), 'event': event.to_dict()})
    details = case.snapshot()
    details['previous_state'] = previous.value
    details['next_events'] = [allowed.value for allowed in allowed_events(case, event.on)]
    add_section(report, 'case_state', Verdict.PASS, details)
    emit(ctx, report, fmt, out)


@case_group.command('status')
@click.option('--case-file', type=EXISTING_FILE, required=True)
@click.option('--date', 'on', type=ISO_DATE, required=True, help='Query date (YYYY-MM-DD)')
@output_options
@click.pass_context
def status_command(ctx, case_file, on, fmt, out):
    """Certificate status of a case on a given date"""
    settings = settings_from(ctx)
    case = load_case(case_file, settings)
    status = certificate_status(case, on.date(), settings.monitoring_grace_days)

    report = new_report('case status', {'case_file': str(case_file), 'date': on.date().isoformat()})
    details = {'status': status.value}
    details.update(case.snapshot())
    add_section(report, 'certificate_status', STATUS_VERDICTS[status], details)
    emit(ctx, report, fmt, out)
