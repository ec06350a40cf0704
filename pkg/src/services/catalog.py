"""
Catalog Engine
Catalog parsing, criticality-level determination and conformity evaluation
"""

import json
import logging
from pathlib import Path
from typing import Dict, List, Mapping, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from src.errors import InputError, SchemaError, first_validation_message
from src.models.catalog import (
    Assessment, AssessmentEntry, Catalog, Chapter, ConformityResult, Decision, Finding,
    FindingClass, ImpactAssessment, Requirement, Section, Status
)

logger = logging.getLogger(__name__)

SAMPLE_CATALOG_PATH = Path(__file__).resolve().parent.parent / 'data' / 'sample_catalog.json'


class RequirementDocument(BaseModel):
    model_config = ConfigDict(extra='forbid')

    id: str = Field(min_length=1)
    cl: int = Field(ge=1, le=4)
    critical: bool = False
    topic: str
    description: str = ''
    proofs: List[str] = Field(default_factory=list)


class SectionDocument(BaseModel):
    model_config = ConfigDict(extra='forbid')

    title: str
    requirements: List[RequirementDocument] = Field(default_factory=list)


class ChapterDocument(BaseModel):
    model_config = ConfigDict(extra='forbid')

    title: str
    requirements: List[RequirementDocument] = Field(default_factory=list)
    sections: List[SectionDocument] = Field(default_factory=list)


class CatalogDocument(BaseModel):
    model_config = ConfigDict(extra='forbid')

    name: str
    version: str
    max_supported_cl: Optional[int] = Field(default=None, ge=1, le=4)
    chapters: List[ChapterDocument]


class ImpactDocument(BaseModel):
    model_config = ConfigDict(extra='forbid')

    dimensions: Dict[str, int]


class AssessmentEntryDocument(BaseModel):
    model_config = ConfigDict(extra='forbid')

    status: Status
    evidence: str = ''
    evidence_ref: Optional[str] = None


class AssessmentDocument(BaseModel):
    model_config = ConfigDict(extra='forbid')

    entries: Dict[str, AssessmentEntryDocument]


def _requirement(doc: RequirementDocument) -> Requirement:
    return Requirement(id=doc.id, cl=doc.cl, critical=doc.critical, topic=doc.topic,
                       description=doc.description, proof_requirements=tuple(doc.proofs))


def parse_catalog(document: Mapping) -> Catalog:
    """Validate a catalog document; requirement ids must be unique across chapters"""
    try:
        doc = CatalogDocument.model_validate(document)
    except ValidationError as e:
        raise SchemaError(f"invalid catalog: {first_validation_message(e)}")

    chapters = tuple(
        Chapter(
            title=chapter.title,
            requirements=tuple(_requirement(r) for r in chapter.requirements),
            sections=tuple(
                Section(title=section.title, requirements=tuple(_requirement(r) for r in section.requirements))
                for section in chapter.sections
            )
        )
        for chapter in doc.chapters
    )
    catalog = Catalog(name=doc.name, version=doc.version, chapters=chapters,
                      max_supported_cl=doc.max_supported_cl)

    seen = set()
    for requirement in catalog.requirements():
        if requirement.id in seen:
            raise SchemaError(f"duplicate requirement id '{requirement.id}'")
        seen.add(requirement.id)

    logger.info(f"Parsed catalog '{catalog.name}' {catalog.version}: {len(seen)} requirement(s)")
    return catalog


def load_catalog(path: Optional[Path] = None) -> Catalog:
    """Read a catalog file, or the shipped sample catalog when no path is given"""
    path = Path(path) if path is not None else SAMPLE_CATALOG_PATH
    try:
        document = json.loads(path.read_text(encoding='utf-8'))
    except (OSError, json.JSONDecodeError) as e:
        raise SchemaError(f"cannot read catalog {path}: {e}")
    return parse_catalog(document)


def parse_impact(document: Mapping) -> ImpactAssessment:
    try:
        doc = ImpactDocument.model_validate(document)
    except ValidationError as e:
        raise InputError(f"invalid impact assessment: {first_validation_message(e)}")
    for name, level in doc.dimensions.items():
        if not 1 <= level <= 4:
            raise InputError(f"impact level for '{name}' must be in 1..4, got {level}")
    return ImpactAssessment(dimensions=dict(doc.dimensions))


def parse_assessment(document: Mapping) -> Assessment:
    try:
        doc = AssessmentDocument.model_validate(document)
    except ValidationError as e:
        raise InputError(f"invalid assessment: {first_validation_message(e)}")
    return Assessment(entries={
        requirement_id: AssessmentEntry(status=entry.status, evidence=entry.evidence,
                                        evidence_ref=entry.evidence_ref)
        for requirement_id, entry in doc.entries.items()
    })


def determine_cl(impact: ImpactAssessment) -> int:
    """The highest impact level on any dimension"""
    if not impact.dimensions:
        raise InputError("impact assessment needs at least one dimension")
    for name, level in impact.dimensions.items():
        if not 1 <= level <= 4:
            raise InputError(f"impact level for '{name}' must be in 1..4, got {level}")
    return max(impact.dimensions.values())


def applicable_requirements(catalog: Catalog, target_cl: int) -> List[Requirement]:
    if not 1 <= target_cl <= 4:
        raise InputError(f"target CL must be in 1..4, got {target_cl}")
    return [requirement for requirement in catalog.requirements() if requirement.cl <= target_cl]


def classify(requirement: Requirement, status: Status) -> FindingClass:
    """Critical items admit no partial credit"""
    if status == Status.FULFILLED:
        return FindingClass.POSITIVE
    if status == Status.NOT_FULFILLED or requirement.critical:
        return FindingClass.SUBSTANTIAL
    return FindingClass.NON_SUBSTANTIAL


def evaluate_assessment(catalog: Catalog, assessment: Assessment, target_cl: int) -> ConformityResult:
    """Turn auditor statuses into findings and a certification decision.

    Any applicable requirement still not_evaluated makes the result
    incomplete before nonconformities are considered.
    """
    known = {requirement.id for requirement in catalog.requirements()}
    unknown = sorted(set(assessment.entries) - known)
    if unknown:
        raise InputError(f"assessment references unknown requirement id(s) {unknown}")

    applicable = applicable_requirements(catalog, target_cl)
    beyond = catalog.max_supported_cl is not None and target_cl > catalog.max_supported_cl
    if beyond:
        logger.warning(f"Catalog '{catalog.name}' supports CL up to {catalog.max_supported_cl}; evaluating at CL {target_cl}")

    unevaluated = [r.id for r in applicable if assessment.status_of(r.id) == Status.NOT_EVALUATED]
    if unevaluated:
        logger.info(f"Assessment incomplete: {len(unevaluated)} applicable requirement(s) not evaluated")
        return ConformityResult(target_cl=target_cl, decision=Decision.INCOMPLETE,
                                unevaluated=unevaluated, beyond_supported_cl=beyond)

    findings = []
    for requirement in applicable:
        entry = assessment.entries[requirement.id]
        finding_class = classify(requirement, entry.status)
        note = f"{requirement.topic}: {entry.status.value}"
        if requirement.critical and finding_class != FindingClass.POSITIVE:
            note += " (critical requirement must be fulfilled entirely)"
        findings.append(Finding(requirement_id=requirement.id, finding_class=finding_class,
                                note=note, evidence_ref=entry.evidence_ref))

    classes = {finding.finding_class for finding in findings}
    if FindingClass.SUBSTANTIAL in classes:
        decision = Decision.DENIED
    elif FindingClass.NON_SUBSTANTIAL in classes:
        decision = Decision.GRANTED_WITH_CONDITIONS
    else:
        decision = Decision.GRANTED

    logger.info(f"Conformity at CL {target_cl}: {decision.value} over {len(applicable)} requirement(s)")
    return ConformityResult(target_cl=target_cl, decision=decision, findings=findings,
                            beyond_supported_cl=beyond)
