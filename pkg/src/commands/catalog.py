"""
Catalog Commands
Criticality level and conformity evaluation against a requirements catalog
"""

import logging

import click

from src.commands.common import EXISTING_FILE, emit, output_options, read_json
from src.models.catalog import FindingClass
from src.models.report import Verdict
from src.services.catalog import (
    applicable_requirements, determine_cl, evaluate_assessment, load_catalog, parse_assessment, parse_impact
)
from src.services.reporting import add_section, new_report

logger = logging.getLogger(__name__)


@click.group('catalog')
def catalog_group():
    """Requirements catalog engine"""


def _catalog_option(command):
    return click.option('--catalog', 'catalog_path', type=EXISTING_FILE, default=None,
                        help='Catalog JSON (default: the shipped sample catalog)')(command)


@catalog_group.command('cl')
@click.option('--impact', 'impact_path', type=EXISTING_FILE, required=True,
              help='Impact JSON {"dimensions": {name: level}}')
@_catalog_option
@output_options
@click.pass_context
def cl_command(ctx, impact_path, catalog_path, fmt, out):
    """Criticality level: the highest impact on any dimension"""
    impact = parse_impact(read_json(impact_path))
    level = determine_cl(impact)
    catalog = load_catalog(catalog_path)
    applicable = applicable_requirements(catalog, level)

    report = new_report('catalog cl', {'impact': str(impact_path), 'catalog': catalog.name})
    add_section(report, 'criticality_level', Verdict.PASS, {
        'cl': level,
        'dimensions': impact.dimensions,
        'unassessed_dimensions': impact.unassessed(),
        'applicable_requirements': [requirement.id for requirement in applicable]
    })
    emit(ctx, report, fmt, out)


@catalog_group.command('evaluate')
@click.option('--assessment', 'assessment_path', type=EXISTING_FILE, required=True,
              help='Assessment JSON {"entries": {id: {"status", "evidence"}}}')
@click.option('--cl', 'target_cl', type=click.IntRange(1, 4), default=None, help='Target criticality level')
@click.option('--impact', 'impact_path', type=EXISTING_FILE, default=None,
              help='Derive the target CL from an impact assessment')
@_catalog_option
@output_options
@click.pass_context
def evaluate_command(ctx, assessment_path, target_cl, impact_path, catalog_path, fmt, out):
    """Conformity decision for an auditor assessment"""
    if (target_cl is None) == (impact_path is None):
        raise click.UsageError("give exactly one of --cl and --impact")
    if target_cl is None:
        target_cl = determine_cl(parse_impact(read_json(impact_path)))

    catalog = load_catalog(catalog_path)
    result = evaluate_assessment(catalog, parse_assessment(read_json(assessment_path)), target_cl)

    report = new_report('catalog evaluate', {'assessment': str(assessment_path), 'catalog': catalog.name,
                                             'catalog_version': catalog.version, 'target_cl': target_cl})
    if result.beyond_supported_cl:
        add_section(report, 'catalog_support', Verdict.WARN, {
            'message': f"catalog supports CL up to {catalog.max_supported_cl}, evaluated at CL {target_cl}"
        })
    add_section(report, 'conformity', result.report_verdict, {
        'decision': result.decision.value,
        'target_cl': target_cl,
        'findings': {finding_class.value: result.count(finding_class) for finding_class in FindingClass},
        'unevaluated': result.unevaluated
    })
    report.conformity = result.to_dict()
    emit(ctx, report, fmt, out)
