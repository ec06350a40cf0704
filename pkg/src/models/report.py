"""
Report Models
Audit report sections, verdicts and summary tallies
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional

SCHEMA_VERSION = 1


class Verdict(str, Enum):
    PASS = 'PASS'
    WARN = 'WARN'
    FAIL = 'FAIL'
    UNDEFINED = 'UNDEFINED'


VERDICT_ORDER = (Verdict.PASS, Verdict.WARN, Verdict.FAIL, Verdict.UNDEFINED)


@dataclass
class ReportSection:
    """One check outcome: name, verdict and check-specific details"""
    check: str
    verdict: Verdict
    details: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self):
        return {'check': self.check, 'verdict': self.verdict.value, 'details': self.details}


@dataclass
class AuditReport:
    metadata: Dict[str, Any]
    sections: List[ReportSection] = field(default_factory=list)
    conformity: Optional[Dict[str, Any]] = None

    def add(self, check: str, verdict: Verdict, details: Optional[Dict[str, Any]] = None) -> ReportSection:
        section = ReportSection(check=check, verdict=Verdict(verdict), details=details or {})
        self.sections.append(section)
        return section

    def summary(self) -> Dict[str, int]:
        counts = {verdict.value: 0 for verdict in VERDICT_ORDER}
        for section in self.sections:
            counts[section.verdict.value] += 1
        return counts

    def overall(self) -> Verdict:
        """FAIL beats WARN beats PASS; UNDEFINED sections do not raise the verdict"""
        verdicts = {section.verdict for section in self.sections}
        if Verdict.FAIL in verdicts:
            return Verdict.FAIL
        if Verdict.WARN in verdicts:
            return Verdict.WARN
        return Verdict.PASS

    def to_dict(self):
        return {
            'schema_version': SCHEMA_VERSION,
            'metadata': self.metadata,
            'overall': self.overall().value,
            'summary': self.summary(),
            'sections': [section.to_dict() for section in self.sections],
            'conformity': self.conformity
        }
