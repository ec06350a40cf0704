"""
Audit Errors
Error hierarchy shared by every service and the exit codes the CLI maps them to
"""

from enum import IntEnum
from typing import Optional


class ExitCode(IntEnum):
    """Process exit codes for CI/CD integration"""
    PASS = 0        # Every section passed
    FINDINGS = 1    # At least one WARN or FAIL section
    USAGE = 2       # Bad command line
    INPUT = 3       # Input, schema or domain error


class AuditError(Exception):
    """Base class for every error the toolkit raises on bad input"""
    exit_code = ExitCode.INPUT

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message


class InputError(AuditError):
    """Malformed or inconsistent input data"""

    def __init__(self, message: str, row: Optional[int] = None):
        if row is not None:
            message = f"row {row}: {message}"
        super().__init__(message)
        self.row = row


class SchemaError(AuditError):
    """Document does not match its declared schema"""


class ConfigError(AuditError):
    """Invalid parameters for an operation"""


class SplitError(AuditError):
    """Split would be empty or does not cover the dataset"""


class TaskError(AuditError):
    """Operation not defined for the dataset's task kind"""


class DegenerateError(AuditError):
    """Input has no variation where the operation needs some"""


class ModeError(AuditError):
    """Split assignment has the wrong mode for the check"""


class TransitionError(AuditError):
    """Event not allowed in the certification case's current state"""

    def __init__(self, state: str, event: str, reason: str = ""):
        message = f"event '{event}' not allowed in state {state}"
        if reason:
            message = f"{message}: {reason}"
        super().__init__(message)
        self.state = state
        self.event = event


class DateError(AuditError):
    """Event dated before the last recorded event"""


def first_validation_message(error) -> str:
    """Condense a pydantic ValidationError into one readable line"""
    try:
        details = error.errors()
    except AttributeError:
        return str(error)
    if not details:
        return str(error)
    first = details[0]
    location = '.'.join(str(part) for part in first.get('loc', ()))
    if location:
        return f"{location}: {first.get('msg', 'invalid value')}"
    return first.get('msg', 'invalid value')
