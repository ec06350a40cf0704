"""
Report Commands
Re-render a saved JSON report
"""

import click

from src.commands.common import EXISTING_FILE, emit, output_options
from src.errors import InputError
from src.services.reporting import parse_report


@click.group('report')
def report_group():
    """Work with saved audit reports"""


@report_group.command('render')
@click.option('--input', 'input_path', type=EXISTING_FILE, required=True, help='JSON report to render')
@output_options
@click.pass_context
def render_command(ctx, input_path, fmt, out):
    """Render a JSON report as text or canonical JSON; exits with its verdict"""
    try:
        text = input_path.read_text(encoding='utf-8')
    except (OSError, UnicodeDecodeError) as e:
        raise InputError(f"cannot read report {input_path}: {e}")
    emit(ctx, parse_report(text), fmt, out)
