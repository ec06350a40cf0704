"""
Report Assembly
Building, rendering and re-reading audit reports; mapping verdicts to exit codes
"""

import json
import logging
import math
from datetime import date
from enum import Enum
from typing import Any, Dict, List, Literal, Mapping, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, ValidationError

from src import __version__
from src.errors import ExitCode, SchemaError, first_validation_message
from src.models.report import SCHEMA_VERSION, AuditReport, ReportSection, Verdict

logger = logging.getLogger(__name__)

TOOL_NAME = 'mlaudit'


class SectionDocument(BaseModel):
    model_config = ConfigDict(extra='forbid')

    check: str
    verdict: Verdict
    details: Dict[str, Any]


class ReportDocument(BaseModel):
    model_config = ConfigDict(extra='forbid')

    schema_version: Literal[1]
    metadata: Dict[str, Any]
    overall: Verdict
    summary: Dict[str, int]
    sections: List[SectionDocument]
    conformity: Optional[Dict[str, Any]] = None


def plain(value):
    """JSON-ready copy: numpy scalars unwrapped, tuples as lists, non-finite floats as None"""
    if isinstance(value, Mapping):
        return {str(key) if not isinstance(key, str) else key: plain(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [plain(item) for item in value]
    if isinstance(value, np.ndarray):
        return plain(value.tolist())
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        number = float(value)
        return number if math.isfinite(number) else None
    return value


def new_report(command: str, inputs: Optional[Dict[str, Any]] = None) -> AuditReport:
    metadata = {
        'tool': TOOL_NAME,
        'version': __version__,
        'date': date.today().isoformat(),
        'command': command,
        'inputs': plain(inputs or {})
    }
    return AuditReport(metadata=metadata)


def add_section(report: AuditReport, check: str, verdict: Verdict, details: Mapping) -> ReportSection:
    section = report.add(check, verdict, plain(details))
    logger.info(f"{check}: {section.verdict.value}")
    return section


def exit_code_for(report: AuditReport) -> ExitCode:
    """PASS exits 0; any WARN or FAIL section exits 1"""
    return ExitCode.PASS if report.overall() == Verdict.PASS else ExitCode.FINDINGS


def _summarize(details: Mapping) -> str:
    if isinstance(details.get('message'), str) and details['message']:
        return details['message']
    parts = []
    for key, value in details.items():
        if isinstance(value, (str, int, float, bool)) or value is None:
            rendered = 'null' if value is None else (f"{value:.6g}" if isinstance(value, float) else str(value))
            parts.append(f"{key}={rendered}")
        elif isinstance(value, list) and key.endswith(('features', 'unevaluated', 'recommended')):
            parts.append(f"{key}={','.join(str(item) for item in value) or '-'}")
        if len(parts) == 6:
            break
    return ' '.join(parts)


def render_text(report: AuditReport) -> str:
    summary = report.summary()
    lines = [
        f"{report.metadata.get('tool', TOOL_NAME)} {report.metadata.get('command', '')} "
        f"({report.metadata.get('date', '')}): {report.overall().value}",
        '  '.join(f"{verdict}={count}" for verdict, count in summary.items())
    ]
    width = max([len(section.check) for section in report.sections] + [5])
    for section in report.sections:
        lines.append(f"{section.verdict.value:<9} {section.check:<{width}}  {_summarize(section.details)}")
    if report.conformity is not None:
        lines.append(f"conformity: {report.conformity.get('decision')} at CL {report.conformity.get('target_cl')}")
    return '\n'.join(lines) + '\n'


def render_report(report: AuditReport, fmt: str = 'json') -> str:
    """Serialize a report as JSON (stable key order) or a one-line-per-section text table"""
    if fmt == 'text':
        return render_text(report)
    if fmt != 'json':
        raise ValueError(f"unknown report format '{fmt}'")
    return json.dumps(plain(report.to_dict()), indent=2, allow_nan=False, ensure_ascii=False) + '\n'


def report_from_dict(document: Mapping) -> AuditReport:
    """Rebuild a report from its JSON form; derived fields must agree with the sections"""
    try:
        doc = ReportDocument.model_validate(document)
    except ValidationError as e:
        raise SchemaError(f"invalid report: {first_validation_message(e)}")

    report = AuditReport(metadata=dict(document['metadata']), conformity=document.get('conformity'))
    for raw, section in zip(document['sections'], doc.sections):
        report.sections.append(ReportSection(check=section.check, verdict=section.verdict,
                                             details=dict(raw['details'])))

    if report.summary() != doc.summary:
        raise SchemaError("report summary does not match its sections")
    if report.overall() != doc.overall:
        raise SchemaError("report overall verdict does not match its sections")
    return report


def parse_report(text: str) -> AuditReport:
    try:
        document = json.loads(text)
    except json.JSONDecodeError as e:
        raise SchemaError(f"report is not valid JSON: {e}")
    if not isinstance(document, dict):
        raise SchemaError("report must be a JSON object")
    if document.get('schema_version') != SCHEMA_VERSION:
        raise SchemaError(f"unsupported report schema_version {document.get('schema_version')!r}")
    return report_from_dict(document)
