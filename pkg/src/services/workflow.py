"""
Certification Workflow
Lifecycle state machine, certificate validity and monitoring audits, event-log persistence
"""

import json
import logging
import uuid
from datetime import date, timedelta
from pathlib import Path
from typing import Dict, List, Mapping, Optional

from dateutil.relativedelta import relativedelta
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from src.config import DEFAULT_SETTINGS, AuditSettings
from src.errors import DateError, InputError, SchemaError, TransitionError, first_validation_message
from src.models.catalog import Decision
from src.models.certification import (
    CaseEvent, CaseState, Certificate, CertificateStatus, CertificationCase, EventKind, MonitoringAudit
)

logger = logging.getLogger(__name__)

# Audit stages, each completed by one event
STAGES = {
    CaseState.GAP_ANALYSIS: (EventKind.COMPLETE_GAP_ANALYSIS, CaseState.KICKOFF),
    CaseState.KICKOFF: (EventKind.HOLD_KICKOFF, CaseState.DOCUMENTATION_REVIEW),
    CaseState.DOCUMENTATION_REVIEW: (EventKind.COMPLETE_DOC_REVIEW, CaseState.AUDIT_INTERVIEWS),
    CaseState.AUDIT_INTERVIEWS: (EventKind.COMPLETE_INTERVIEWS, CaseState.TECHNICAL_INSPECTION),
    CaseState.TECHNICAL_INSPECTION: (EventKind.COMPLETE_INSPECTION, CaseState.REPORTING),
}

# Events a state accepts; some are further gated by the case (see _check_guard)
TRANSITION_TABLE = {
    **{state: {event, EventKind.CLOSE} for state, (event, _) in STAGES.items()},
    CaseState.REPORTING: {EventKind.DELIVER_REPORT, EventKind.ISSUE_CERTIFICATE, EventKind.CLOSE},
    CaseState.CERTIFIED: {EventKind.RECORD_MONITORING_AUDIT, EventKind.MODEL_CHANGED,
                          EventKind.START_RECERTIFICATION, EventKind.CLOSE},
    CaseState.DENIED: {EventKind.CLOSE},
    CaseState.INVALIDATED: {EventKind.START_RECERTIFICATION, EventKind.CLOSE},
    CaseState.CLOSED: set(),
}

PASSING_DECISIONS = (Decision.GRANTED, Decision.GRANTED_WITH_CONDITIONS)

PAYLOAD_CHOICES = {
    EventKind.DELIVER_REPORT: ('decision', tuple(d.value for d in Decision)),
    EventKind.RECORD_MONITORING_AUDIT: ('outcome', ('passed', 'failed')),
    EventKind.MODEL_CHANGED: ('severity', ('major', 'minor')),
}


class EventDocument(BaseModel):
    model_config = ConfigDict(extra='forbid')

    kind: EventKind
    on: date = Field(alias='date')
    payload: Dict[str, str] = Field(default_factory=dict)


class CaseLogDocument(BaseModel):
    model_config = ConfigDict(extra='forbid')

    case_id: str = Field(min_length=1)
    scope: str
    target_cl: int = Field(ge=1, le=4)
    opened_on: date
    events: List[EventDocument] = Field(default_factory=list)


def new_case(scope: str, target_cl: int, on: date, case_id: Optional[str] = None) -> CertificationCase:
    """Open a case in GapAnalysis"""
    if isinstance(target_cl, bool) or not isinstance(target_cl, int) or not 1 <= target_cl <= 4:
        raise InputError(f"target CL must be in 1..4, got {target_cl}")
    case = CertificationCase(case_id=case_id or uuid.uuid4().hex, scope=scope,
                             target_cl=target_cl, opened_on=on)
    logger.info(f"Opened case {case.case_id} for '{scope}' at CL {target_cl}")
    return case


def expiry_for(issue_date: date, settings: AuditSettings = DEFAULT_SETTINGS) -> date:
    """Issue date plus the validity period; Feb 29 clamps to Feb 28"""
    return issue_date + relativedelta(years=settings.certificate_validity_years)


def _check_guard(case: CertificationCase, event: CaseEvent) -> None:
    if event.kind not in TRANSITION_TABLE[case.state]:
        raise TransitionError(case.state.value, event.kind.value)

    if case.state == CaseState.REPORTING:
        if event.kind == EventKind.DELIVER_REPORT and case.report_decision is not None:
            raise TransitionError(case.state.value, event.kind.value, "report already delivered")
        if event.kind == EventKind.ISSUE_CERTIFICATE and case.report_decision not in PASSING_DECISIONS:
            raise TransitionError(case.state.value, event.kind.value, "no granting report delivered")

    if (case.state == CaseState.CERTIFIED and event.kind == EventKind.START_RECERTIFICATION
            and event.on < case.certificate.expiry_date):
        raise TransitionError(case.state.value, event.kind.value,
                              f"certificate valid until {case.certificate.expiry_date.isoformat()}")


def _payload_value(event: CaseEvent) -> Optional[str]:
    if event.kind not in PAYLOAD_CHOICES:
        return None
    key, choices = PAYLOAD_CHOICES[event.kind]
    value = event.payload.get(key)
    if value not in choices:
        raise InputError(f"{event.kind.value} needs payload '{key}' in {list(choices)}, got {value!r}")
    return value


def advance(case: CertificationCase, event: CaseEvent,
            settings: AuditSettings = DEFAULT_SETTINGS) -> CertificationCase:
    """Apply one event to the case in place and append it to the history.

    Legality is checked before the date; an illegal event leaves the case untouched.
    """
    _check_guard(case, event)
    if event.on < case.last_date:
        raise DateError(f"event dated {event.on.isoformat()} precedes last event {case.last_date.isoformat()}")
    value = _payload_value(event)

    previous = case.state
    kind = event.kind
    if kind == EventKind.CLOSE:
        case.state = CaseState.CLOSED
        case.certificate = None
    elif case.state in STAGES:
        case.state = STAGES[case.state][1]
    elif kind == EventKind.DELIVER_REPORT:
        case.report_decision = Decision(value)
        case.report_date = event.on
        if case.report_decision not in PASSING_DECISIONS:
            case.state = CaseState.DENIED
    elif kind == EventKind.ISSUE_CERTIFICATE:
        case.certificate = Certificate(issue_date=event.on, expiry_date=expiry_for(event.on, settings))
        case.state = CaseState.CERTIFIED
        case.follow_up_due = False
    elif kind == EventKind.RECORD_MONITORING_AUDIT:
        case.certificate.monitoring_audits.append(MonitoringAudit(on=event.on, outcome=value))
        case.follow_up_due = value == 'failed'
    elif kind == EventKind.MODEL_CHANGED:
        if value == 'major':
            case.state = CaseState.INVALIDATED
        else:
            case.follow_up_due = True
    elif kind == EventKind.START_RECERTIFICATION:
        case.certificate = None
        case.report_decision = None
        case.report_date = None
        case.follow_up_due = False
        case.state = CaseState.GAP_ANALYSIS if settings.recertification_path == 'full' else CaseState.AUDIT_INTERVIEWS

    case.history.append(event)
    logger.info(f"Case {case.case_id}: {kind.value} on {event.on.isoformat()} ({previous.value} -> {case.state.value})")
    return case


def allowed_events(case: CertificationCase, on: date) -> List[EventKind]:
    """Events advance() would accept on the given date"""
    allowed = []
    for kind in EventKind:
        try:
            _check_guard(case, CaseEvent(kind=kind, on=on))
        except TransitionError:
            continue
        allowed.append(kind)
    return allowed


def certificate_status(case: CertificationCase, query_date: date,
                       grace_days: int = DEFAULT_SETTINGS.monitoring_grace_days) -> CertificateStatus:
    certificate = case.certificate
    if certificate is None:
        return CertificateStatus.NONE
    if case.state == CaseState.INVALIDATED:
        return CertificateStatus.INVALIDATED
    if query_date >= certificate.expiry_date:
        return CertificateStatus.EXPIRED

    grace = timedelta(days=grace_days)
    years = 1
    anniversary = certificate.issue_date + relativedelta(years=years)
    while anniversary < certificate.expiry_date and anniversary + grace < query_date:
        covered = any(anniversary <= audit.on <= anniversary + grace for audit in certificate.monitoring_audits)
        if not covered:
            logger.info(f"Case {case.case_id}: no monitoring audit within {grace_days} days of {anniversary.isoformat()}")
            return CertificateStatus.MONITORING_OVERDUE
        years += 1
        anniversary = certificate.issue_date + relativedelta(years=years)
    return CertificateStatus.VALID


def parse_event(kind: str, on: str, payload: Optional[Mapping[str, str]] = None) -> CaseEvent:
    try:
        doc = EventDocument.model_validate({'kind': kind, 'date': on, 'payload': dict(payload or {})})
    except ValidationError as e:
        raise InputError(f"invalid event: {first_validation_message(e)}")
    return CaseEvent(kind=doc.kind, on=doc.on, payload=dict(doc.payload))


def replay(log: Mapping, settings: AuditSettings = DEFAULT_SETTINGS) -> CertificationCase:
    """Rebuild a case from its event log"""
    try:
        doc = CaseLogDocument.model_validate(log)
    except ValidationError as e:
        raise SchemaError(f"invalid case log: {first_validation_message(e)}")

    case = CertificationCase(case_id=doc.case_id, scope=doc.scope, target_cl=doc.target_cl,
                             opened_on=doc.opened_on)
    for entry in doc.events:
        advance(case, CaseEvent(kind=entry.kind, on=entry.on, payload=dict(entry.payload)), settings)
    return case


def load_case(path: Path, settings: AuditSettings = DEFAULT_SETTINGS) -> CertificationCase:
    try:
        log = json.loads(Path(path).read_text(encoding='utf-8'))
    except (OSError, json.JSONDecodeError) as e:
        raise InputError(f"cannot read case log {path}: {e}")
    return replay(log, settings)


def save_case(case: CertificationCase, path: Path) -> None:
    Path(path).write_text(json.dumps(case.to_log(), indent=2) + '\n', encoding='utf-8')
