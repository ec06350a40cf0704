"""
Command Helpers
Shared options, input readers and report output for the command groups
"""

import json
import logging
from pathlib import Path
from typing import Any, List, Optional

import click
import numpy as np
import pandas as pd

from src.config import AuditSettings
from src.errors import InputError
from src.models.report import AuditReport
from src.services.reporting import exit_code_for, render_report

logger = logging.getLogger(__name__)

EXISTING_FILE = click.Path(exists=True, dir_okay=False, path_type=Path)
OUTPUT_FILE = click.Path(dir_okay=False, path_type=Path)
ISO_DATE = click.DateTime(formats=['%Y-%m-%d'])


def output_options(command):
    """--format and --out, shared by every report-producing command"""
    command = click.option('--out', type=OUTPUT_FILE, default=None,
                           help='Write the report to a file instead of stdout')(command)
    command = click.option('--format', 'fmt', type=click.Choice(['text', 'json']), default='text',
                           show_default=True, help='Report format')(command)
    return command


def dataset_options(command):
    command = click.option('--schema', 'schema_path', type=EXISTING_FILE, required=True,
                           help='Schema spec JSON for the CSV')(command)
    command = click.option('--data', 'data_path', type=EXISTING_FILE, required=True,
                           help='Dataset CSV with a header row')(command)
    return command


def settings_from(ctx: click.Context) -> AuditSettings:
    return ctx.find_root().obj['settings']


def pick(flag_value, default):
    """Command flag wins over the settings value"""
    return default if flag_value is None else flag_value


def read_json(path: Path) -> Any:
    try:
        return json.loads(Path(path).read_text(encoding='utf-8'))
    except (OSError, UnicodeDecodeError, json.JSONDecodeError) as e:
        raise InputError(f"cannot read JSON file {path}: {e}")


def read_values(path: Path) -> List[Any]:
    """A JSON array, or the single column of a CSV file with a header row"""
    path = Path(path)
    if path.suffix.lower() == '.json':
        values = read_json(path)
        if not isinstance(values, list):
            raise InputError(f"{path} must hold a JSON array")
        return values
    try:
        frame = pd.read_csv(path)
    except (pd.errors.EmptyDataError, pd.errors.ParserError, UnicodeDecodeError) as e:
        raise InputError(f"cannot read CSV file {path}: {e}")
    if frame.shape[1] != 1:
        raise InputError(f"{path} must have exactly one column, found {frame.shape[1]}")
    return frame.iloc[:, 0].tolist()


def read_matrix(path: Path) -> np.ndarray:
    """An n x k real matrix: CSV with a header row, or a JSON array of rows"""
    path = Path(path)
    if path.suffix.lower() == '.json':
        rows = read_json(path)
        try:
            return np.asarray(rows, dtype=float)
        except (TypeError, ValueError) as e:
            raise InputError(f"{path} is not a numeric matrix: {e}")
    try:
        frame = pd.read_csv(path)
        return frame.to_numpy(dtype=float)
    except (pd.errors.EmptyDataError, pd.errors.ParserError, UnicodeDecodeError) as e:
        raise InputError(f"cannot read CSV file {path}: {e}")
    except (TypeError, ValueError) as e:
        raise InputError(f"{path} is not a numeric matrix: {e}")


def parse_ratios(text: str) -> tuple:
    try:
        return tuple(float(part) for part in text.split(','))
    except ValueError:
        raise click.BadParameter(f"expected comma-separated numbers, got '{text}'")


def emit(ctx: click.Context, report: AuditReport, fmt: str, out: Optional[Path]) -> None:
    """Write the report and leave with the exit code its verdicts imply"""
    document = render_report(report, fmt)
    if out is not None:
        Path(out).write_text(document, encoding='utf-8')
        logger.info(f"Report written to {out}")
    else:
        click.echo(document, nl=False)
    ctx.exit(int(exit_code_for(report)))
