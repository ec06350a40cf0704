"""
Certification Models
Certification case, lifecycle events and certificate dates
"""

from dataclasses import dataclass, field
from datetime import date
from enum import Enum
from typing import Dict, List, Optional

from src.models.catalog import Decision
from src.models.report import Verdict


class CaseState(str, Enum):
    GAP_ANALYSIS = 'GapAnalysis'
    KICKOFF = 'Kickoff'
    DOCUMENTATION_REVIEW = 'DocumentationReview'
    AUDIT_INTERVIEWS = 'AuditInterviews'
    TECHNICAL_INSPECTION = 'TechnicalInspection'
    REPORTING = 'Reporting'
    CERTIFIED = 'Certified'
    DENIED = 'Denied'
    INVALIDATED = 'Invalidated'
    CLOSED = 'Closed'


class EventKind(str, Enum):
    COMPLETE_GAP_ANALYSIS = 'complete_gap_analysis'
    HOLD_KICKOFF = 'hold_kickoff'
    COMPLETE_DOC_REVIEW = 'complete_doc_review'
    COMPLETE_INTERVIEWS = 'complete_interviews'
    COMPLETE_INSPECTION = 'complete_inspection'
    DELIVER_REPORT = 'deliver_report'
    ISSUE_CERTIFICATE = 'issue_certificate'
    RECORD_MONITORING_AUDIT = 'record_monitoring_audit'
    MODEL_CHANGED = 'model_changed'
    START_RECERTIFICATION = 'start_recertification'
    CLOSE = 'close'


class CertificateStatus(str, Enum):
    VALID = 'valid'
    MONITORING_OVERDUE = 'monitoring_overdue'
    EXPIRED = 'expired'
    INVALIDATED = 'invalidated'
    NONE = 'none'


STATUS_VERDICTS = {
    CertificateStatus.VALID: Verdict.PASS,
    CertificateStatus.MONITORING_OVERDUE: Verdict.WARN,
    CertificateStatus.EXPIRED: Verdict.FAIL,
    CertificateStatus.INVALIDATED: Verdict.FAIL,
    CertificateStatus.NONE: Verdict.UNDEFINED,
}


@dataclass(frozen=True)
class CaseEvent:
    kind: EventKind
    on: date
    payload: Dict[str, str] = field(default_factory=dict)

    def to_dict(self):
        result = {'kind': self.kind.value, 'date': self.on.isoformat()}
        if self.payload:
            result['payload'] = dict(self.payload)
        return result


@dataclass(frozen=True)
class MonitoringAudit:
    on: date
    outcome: str  # passed, failed


@dataclass
class Certificate:
    issue_date: date
    expiry_date: date
    monitoring_audits: List[MonitoringAudit] = field(default_factory=list)

    def to_dict(self):
        return {
            'issue_date': self.issue_date.isoformat(),
            'expiry_date': self.expiry_date.isoformat(),
            'monitoring_audits': [
                {'date': audit.on.isoformat(), 'outcome': audit.outcome} for audit in self.monitoring_audits
            ]
        }


@dataclass
class CertificationCase:
    """One application's way through the certification lifecycle.

    Mutated only by advance(); the persisted form is the event log, the
    state is always re-derived from it.
    """
    case_id: str
    scope: str
    target_cl: int
    opened_on: date
    state: CaseState = CaseState.GAP_ANALYSIS
    history: List[CaseEvent] = field(default_factory=list)
    certificate: Optional[Certificate] = None
    report_decision: Optional[Decision] = None
    report_date: Optional[date] = None
    follow_up_due: bool = False

    @property
    def last_date(self) -> date:
        return self.history[-1].on if self.history else self.opened_on

    def to_log(self):
        return {
            'case_id': self.case_id,
            'scope': self.scope,
            'target_cl': self.target_cl,
            'opened_on': self.opened_on.isoformat(),
            'events': [event.to_dict() for event in self.history]
        }

    def snapshot(self):
        """Derived state, as shown by `case status`"""
        return {
            'case_id': self.case_id,
            'scope': self.scope,
            'target_cl': self.target_cl,
            'state': self.state.value,
            'report_decision': self.report_decision.value if self.report_decision else None,
            'report_date': self.report_date.isoformat() if self.report_date else None,
            'follow_up_due': self.follow_up_due,
            'certificate': self.certificate.to_dict() if self.certificate else None,
            'events': len(self.history)
        }
