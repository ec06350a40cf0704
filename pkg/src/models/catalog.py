"""
Catalog Models
Requirements catalog, impact and auditor assessments, and conformity decisions
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Tuple

from src.models.report import Verdict

# Dimensions named for impact assessments; others are accepted as well
IMPACT_DIMENSIONS = ('harm_to_life', 'data_confidentiality', 'privacy', 'environment', 'ethics', 'other')


@dataclass(frozen=True)
class Requirement:
    id: str
    cl: int
    critical: bool
    topic: str
    description: str
    proof_requirements: Tuple[str, ...] = ()

    def to_dict(self):
        return {
            'id': self.id,
            'cl': self.cl,
            'critical': self.critical,
            'topic': self.topic,
            'description': self.description,
            'proofs': list(self.proof_requirements)
        }


@dataclass(frozen=True)
class Section:
    title: str
    requirements: Tuple[Requirement, ...] = ()


@dataclass(frozen=True)
class Chapter:
    title: str
    requirements: Tuple[Requirement, ...] = ()
    sections: Tuple[Section, ...] = ()

    def all_requirements(self) -> List[Requirement]:
        """Chapter-level requirements first, then each section's in order"""
        collected = list(self.requirements)
        for section in self.sections:
            collected.extend(section.requirements)
        return collected


@dataclass(frozen=True)
class Catalog:
    name: str
    version: str
    chapters: Tuple[Chapter, ...]
    max_supported_cl: Optional[int] = None

    def requirements(self) -> List[Requirement]:
        return [requirement for chapter in self.chapters for requirement in chapter.all_requirements()]

    def requirement(self, requirement_id: str) -> Requirement:
        for requirement in self.requirements():
            if requirement.id == requirement_id:
                return requirement
        raise KeyError(requirement_id)

    def section(self, title: str) -> Section:
        for chapter in self.chapters:
            for section in chapter.sections:
                if section.title == title:
                    return section
        raise KeyError(title)


@dataclass(frozen=True)
class ImpactAssessment:
    dimensions: Dict[str, int]

    def unassessed(self) -> List[str]:
        """Named dimensions the assessment leaves out"""
        return [name for name in IMPACT_DIMENSIONS if name not in self.dimensions]


class Status(str, Enum):
    FULFILLED = 'fulfilled'
    PARTIALLY_FULFILLED = 'partially_fulfilled'
    NOT_FULFILLED = 'not_fulfilled'
    NOT_EVALUATED = 'not_evaluated'


# Strictness order used when tightening a status
STATUS_ORDER = (Status.FULFILLED, Status.PARTIALLY_FULFILLED, Status.NOT_FULFILLED)


@dataclass(frozen=True)
class AssessmentEntry:
    status: Status
    evidence: str = ''
    evidence_ref: Optional[str] = None


@dataclass(frozen=True)
class Assessment:
    entries: Dict[str, AssessmentEntry] = field(default_factory=dict)

    def status_of(self, requirement_id: str) -> Status:
        entry = self.entries.get(requirement_id)
        return entry.status if entry else Status.NOT_EVALUATED


class FindingClass(str, Enum):
    POSITIVE = 'positive'
    NON_SUBSTANTIAL = 'non_substantial'
    SUBSTANTIAL = 'substantial'


class Decision(str, Enum):
    GRANTED = 'granted'
    GRANTED_WITH_CONDITIONS = 'granted_with_conditions'
    DENIED = 'denied'
    INCOMPLETE = 'incomplete'


# Report verdict per decision
DECISION_VERDICTS = {
    Decision.GRANTED: Verdict.PASS,
    Decision.GRANTED_WITH_CONDITIONS: Verdict.WARN,
    Decision.INCOMPLETE: Verdict.WARN,
    Decision.DENIED: Verdict.FAIL,
}

# Ordering for "never improves" comparisons; incomplete is not ranked
DECISION_RANK = {Decision.GRANTED: 2, Decision.GRANTED_WITH_CONDITIONS: 1, Decision.DENIED: 0}


@dataclass(frozen=True)
class Finding:
    requirement_id: str
    finding_class: FindingClass
    note: str = ''
    evidence_ref: Optional[str] = None

    def to_dict(self):
        return {
            'requirement_id': self.requirement_id,
            'class': self.finding_class.value,
            'note': self.note,
            'evidence_ref': self.evidence_ref
        }


@dataclass(frozen=True)
class ConformityResult:
    target_cl: int
    decision: Decision
    findings: List[Finding] = field(default_factory=list)
    unevaluated: List[str] = field(default_factory=list)
    beyond_supported_cl: bool = False

    def count(self, finding_class: FindingClass) -> int:
        return sum(1 for finding in self.findings if finding.finding_class == finding_class)

    @property
    def report_verdict(self) -> Verdict:
        return DECISION_VERDICTS[self.decision]

    def to_dict(self):
        return {
            'target_cl': self.target_cl,
            'decision': self.decision.value,
            'findings': [finding.to_dict() for finding in self.findings],
            'unevaluated': list(self.unevaluated),
            'beyond_supported_cl': self.beyond_supported_cl
        }
