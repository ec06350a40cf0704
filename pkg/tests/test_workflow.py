from dataclasses import replace
from datetime import date, timedelta

import pytest
from hypothesis import given
from hypothesis import strategies as st

from src.config import DEFAULT_SETTINGS
from src.errors import DateError, InputError, SchemaError, TransitionError
from src.models.catalog import Decision
from src.models.certification import CaseEvent, CaseState, CertificateStatus, EventKind
from src.services.workflow import (
    TRANSITION_TABLE, advance, allowed_events, certificate_status, expiry_for, load_case, new_case,
    parse_event, replay, save_case
)

OPENED = date(2021, 1, 4)
ISSUED = date(2021, 3, 17)

STAGE_EVENTS = [
    EventKind.COMPLETE_GAP_ANALYSIS, EventKind.HOLD_KICKOFF, EventKind.COMPLETE_DOC_REVIEW,
    EventKind.COMPLETE_INTERVIEWS, EventKind.COMPLETE_INSPECTION
]

VALID_PAYLOADS = {
    EventKind.DELIVER_REPORT: {'decision': 'granted'},
    EventKind.RECORD_MONITORING_AUDIT: {'outcome': 'passed'},
    EventKind.MODEL_CHANGED: {'severity': 'minor'},
}


def _event(kind, on, **payload):
    return CaseEvent(kind=EventKind(kind), on=on, payload=payload or VALID_PAYLOADS.get(EventKind(kind), {}))


def _to_reporting(on=OPENED):
    case = new_case('vision QA model', 2, OPENED, case_id='case-1')
    for kind in STAGE_EVENTS:
        advance(case, _event(kind, on))
    return case


def _certified(issued=ISSUED, decision='granted'):
    case = _to_reporting()
    advance(case, _event(EventKind.DELIVER_REPORT, issued, decision=decision))
    advance(case, _event(EventKind.ISSUE_CERTIFICATE, issued))
    return case


# new_case

def test_new_case_starts_in_gap_analysis():
    case = new_case('vision QA model', 2, OPENED)
    assert case.state == CaseState.GAP_ANALYSIS
    assert case.certificate is None
    assert case.history == []


def test_case_ids_are_distinct():
    assert new_case('a', 1, OPENED).case_id != new_case('a', 1, OPENED).case_id


@pytest.mark.parametrize('target_cl', [0, 5, True, '2'])
def test_new_case_rejects_bad_cl(target_cl):
    with pytest.raises(InputError):
        new_case('a', target_cl, OPENED)


# advance

def test_full_sequence_reaches_certified():
    case = _certified()

    assert case.state == CaseState.CERTIFIED
    assert case.report_decision == Decision.GRANTED
    assert case.report_date == ISSUED
    assert case.certificate.issue_date == ISSUED
    assert case.certificate.expiry_date == date(2024, 3, 17)
    assert len(case.history) == 7


def test_conditional_grant_also_certifies():
    assert _certified(decision='granted_with_conditions').state == CaseState.CERTIFIED


@pytest.mark.parametrize('decision', ['denied', 'incomplete'])
def test_failing_report_denies(decision):
    case = _to_reporting()
    advance(case, _event(EventKind.DELIVER_REPORT, ISSUED, decision=decision))
    assert case.state == CaseState.DENIED
    assert allowed_events(case, ISSUED) == [EventKind.CLOSE]


def test_issue_certificate_during_interviews_is_illegal():
    case = new_case('a', 1, OPENED)
    for kind in STAGE_EVENTS[:3]:
        advance(case, _event(kind, OPENED))
    assert case.state == CaseState.AUDIT_INTERVIEWS

    with pytest.raises(TransitionError) as error:
        advance(case, _event(EventKind.ISSUE_CERTIFICATE, OPENED))
    assert error.value.state == 'AuditInterviews'
    assert error.value.event == 'issue_certificate'


def test_certificate_needs_a_delivered_report():
    case = _to_reporting()
    with pytest.raises(TransitionError, match='no granting report'):
        advance(case, _event(EventKind.ISSUE_CERTIFICATE, ISSUED))


def test_report_is_delivered_once():
    case = _to_reporting()
    advance(case, _event(EventKind.DELIVER_REPORT, ISSUED))
    with pytest.raises(TransitionError, match='already delivered'):
        advance(case, _event(EventKind.DELIVER_REPORT, ISSUED, decision='denied'))


def test_major_model_change_invalidates():
    case = _certified()
    advance(case, _event(EventKind.MODEL_CHANGED, date(2022, 1, 1), severity='major'))

    assert case.state == CaseState.INVALIDATED
    assert case.certificate is not None
    assert certificate_status(case, date(2022, 1, 2)) == CertificateStatus.INVALIDATED


def test_minor_model_change_flags_a_follow_up_audit():
    case = _certified()
    advance(case, _event(EventKind.MODEL_CHANGED, date(2022, 1, 1), severity='minor'))
    assert case.state == CaseState.CERTIFIED
    assert case.follow_up_due


def test_failed_monitoring_audit_flags_a_follow_up():
    case = _certified()
    advance(case, _event(EventKind.RECORD_MONITORING_AUDIT, date(2022, 3, 20), outcome='failed'))
    assert case.follow_up_due
    advance(case, _event(EventKind.RECORD_MONITORING_AUDIT, date(2022, 4, 1), outcome='passed'))
    assert not case.follow_up_due


def test_recertification_takes_the_reduced_path():
    case = _certified()
    advance(case, _event(EventKind.MODEL_CHANGED, date(2022, 1, 1), severity='major'))
    advance(case, _event(EventKind.START_RECERTIFICATION, date(2022, 2, 1)))

    assert case.state == CaseState.AUDIT_INTERVIEWS
    assert case.certificate is None
    assert case.report_decision is None
    assert case.report_date is None


def test_recertification_full_path_is_configurable():
    case = _certified()
    advance(case, _event(EventKind.MODEL_CHANGED, date(2022, 1, 1), severity='major'))
    advance(case, _event(EventKind.START_RECERTIFICATION, date(2022, 2, 1)),
            replace(DEFAULT_SETTINGS, recertification_path='full'))
    assert case.state == CaseState.GAP_ANALYSIS


def test_recertification_waits_for_expiry():
    case = _certified()
    with pytest.raises(TransitionError, match='valid until 2024-03-17'):
        advance(case, _event(EventKind.START_RECERTIFICATION, date(2024, 3, 16)))
    advance(case, _event(EventKind.START_RECERTIFICATION, date(2024, 3, 17)))
    assert case.state == CaseState.AUDIT_INTERVIEWS


def test_close_ends_the_case():
    case = _certified()
    advance(case, _event(EventKind.CLOSE, date(2022, 1, 1)))
    assert case.state == CaseState.CLOSED
    assert case.certificate is None
    assert allowed_events(case, date(2022, 1, 1)) == []


def test_out_of_order_date_is_rejected():
    case = _certified()
    with pytest.raises(DateError):
        advance(case, _event(EventKind.RECORD_MONITORING_AUDIT, ISSUED - timedelta(days=1)))
    assert len(case.history) == 7


def test_missing_payload_is_an_input_error():
    case = _to_reporting()
    with pytest.raises(InputError, match='decision'):
        advance(case, CaseEvent(kind=EventKind.DELIVER_REPORT, on=ISSUED))


# state-machine totality

def _reach(state):
    """A case sitting in the given state, every event dated OPENED"""
    if state == CaseState.GAP_ANALYSIS:
        return new_case('a', 1, OPENED)
    stages = [CaseState.KICKOFF, CaseState.DOCUMENTATION_REVIEW, CaseState.AUDIT_INTERVIEWS,
              CaseState.TECHNICAL_INSPECTION, CaseState.REPORTING]
    if state in stages:
        case = new_case('a', 1, OPENED)
        for kind in STAGE_EVENTS[:stages.index(state) + 1]:
            advance(case, _event(kind, OPENED))
        return case

    case = _reach(CaseState.REPORTING)
    if state == CaseState.DENIED:
        return advance(case, _event(EventKind.DELIVER_REPORT, OPENED, decision='denied'))
    advance(case, _event(EventKind.DELIVER_REPORT, OPENED))
    advance(case, _event(EventKind.ISSUE_CERTIFICATE, OPENED))
    if state == CaseState.INVALIDATED:
        advance(case, _event(EventKind.MODEL_CHANGED, OPENED, severity='major'))
    elif state == CaseState.CLOSED:
        advance(case, _event(EventKind.CLOSE, OPENED))
    return case


EXPECTED_LEGAL = {
    CaseState.GAP_ANALYSIS: {EventKind.COMPLETE_GAP_ANALYSIS, EventKind.CLOSE},
    CaseState.KICKOFF: {EventKind.HOLD_KICKOFF, EventKind.CLOSE},
    CaseState.DOCUMENTATION_REVIEW: {EventKind.COMPLETE_DOC_REVIEW, EventKind.CLOSE},
    CaseState.AUDIT_INTERVIEWS: {EventKind.COMPLETE_INTERVIEWS, EventKind.CLOSE},
    CaseState.TECHNICAL_INSPECTION: {EventKind.COMPLETE_INSPECTION, EventKind.CLOSE},
    CaseState.REPORTING: {EventKind.DELIVER_REPORT, EventKind.CLOSE},
    CaseState.CERTIFIED: {EventKind.RECORD_MONITORING_AUDIT, EventKind.MODEL_CHANGED, EventKind.CLOSE},
    CaseState.DENIED: {EventKind.CLOSE},
    CaseState.INVALIDATED: {EventKind.START_RECERTIFICATION, EventKind.CLOSE},
    CaseState.CLOSED: set(),
}


@pytest.mark.parametrize('state', list(CaseState))
def test_exactly_the_legal_events_succeed(state):
    assert _reach(state).state == state
    for kind in EventKind:
        case = _reach(state)
        before = case.to_log()
        if kind in EXPECTED_LEGAL[state]:
            advance(case, _event(kind, OPENED))
        else:
            with pytest.raises(TransitionError):
                advance(case, _event(kind, OPENED))
            assert case.to_log() == before
            assert case.state == state
    assert set(allowed_events(_reach(state), OPENED)) == EXPECTED_LEGAL[state]


def test_transition_table_names_every_state():
    assert set(TRANSITION_TABLE) == set(CaseState)


def test_only_recertification_leaves_invalidated():
    for kind in EXPECTED_LEGAL[CaseState.INVALIDATED]:
        case = advance(_reach(CaseState.INVALIDATED), _event(kind, OPENED))
        assert case.state != CaseState.CERTIFIED


# certificate status

def test_valid_with_both_monitoring_audits():
    case = _certified()
    advance(case, _event(EventKind.RECORD_MONITORING_AUDIT, date(2022, 3, 17)))
    advance(case, _event(EventKind.RECORD_MONITORING_AUDIT, date(2023, 3, 17)))
    assert certificate_status(case, date(2024, 3, 16)) == CertificateStatus.VALID


def test_expired_on_the_expiry_date():
    assert certificate_status(_certified(), date(2024, 3, 17)) == CertificateStatus.EXPIRED


def test_monitoring_overdue_after_the_grace_window():
    case = _certified()
    assert certificate_status(case, date(2022, 4, 16)) == CertificateStatus.VALID
    assert certificate_status(case, date(2022, 5, 1)) == CertificateStatus.MONITORING_OVERDUE


def test_late_audit_outside_the_window_does_not_count():
    case = _certified()
    advance(case, _event(EventKind.RECORD_MONITORING_AUDIT, date(2022, 6, 1)))
    assert certificate_status(case, date(2022, 7, 1)) == CertificateStatus.MONITORING_OVERDUE


def test_no_certificate_has_status_none():
    assert certificate_status(new_case('a', 1, OPENED), OPENED) == CertificateStatus.NONE


def test_leap_day_expiry_clamps():
    assert expiry_for(date(2020, 2, 29)) == date(2023, 2, 28)


@given(st.dates(min_value=date(2000, 1, 1), max_value=date(2090, 12, 31)))
def test_expiry_is_three_calendar_years_later(issued):
    expiry = expiry_for(issued)
    assert expiry.year == issued.year + 3
    assert expiry.month == issued.month
    assert expiry.day == issued.day or (issued.month, issued.day, expiry.day) == (2, 29, 28)


# persistence

def test_replay_reconstructs_the_case():
    case = _certified()
    advance(case, _event(EventKind.MODEL_CHANGED, date(2022, 1, 1), severity='major'))
    assert replay(case.to_log()).snapshot() == case.snapshot()


def test_saved_log_round_trips_byte_identical(tmp_path):
    case = _certified()
    advance(case, _event(EventKind.RECORD_MONITORING_AUDIT, date(2022, 3, 20)))
    first = tmp_path / 'case.json'
    second = tmp_path / 'again.json'

    save_case(case, first)
    save_case(load_case(first), second)
    assert first.read_bytes() == second.read_bytes()


def test_replay_rejects_an_illegal_history():
    log = new_case('a', 1, OPENED, case_id='c').to_log()
    log['events'] = [{'kind': 'issue_certificate', 'date': '2021-02-01'}]
    with pytest.raises(TransitionError):
        replay(log)


def test_replay_rejects_a_malformed_log():
    with pytest.raises(SchemaError):
        replay({'case_id': 'c', 'scope': 'a', 'target_cl': 7, 'opened_on': '2021-01-01'})


def test_load_case_reports_a_missing_file(tmp_path):
    with pytest.raises(InputError):
        load_case(tmp_path / 'absent.json')


@pytest.mark.parametrize('kind, on', [
    ('teleport', '2021-01-01'),
    ('close', '2021-13-01'),
])
def test_parse_event_rejects(kind, on):
    with pytest.raises(InputError):
        parse_event(kind, on)


def test_parse_event():
    event = parse_event('deliver_report', '2021-03-17', {'decision': 'granted'})
    assert event == CaseEvent(EventKind.DELIVER_REPORT, ISSUED, {'decision': 'granted'})
