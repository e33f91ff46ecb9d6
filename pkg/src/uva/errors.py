"""Exception hierarchy shared by all pipeline stages.

Every error carries a short machine-parsable code; the CLI maps codes to
exit statuses and prints a single ``error <CODE>: <message>`` line.
"""


class UvaError(Exception):
    """Base class for all toolkit errors."""

    code = "E_GENERIC"
    exit_status = 1


class ParseError(UvaError):
    """A file did not conform to its line format."""

    code = "E_PARSE"
    exit_status = 2


class ValidationError(UvaError):
    """Inputs parsed but violate a corpus/pipeline invariant."""

    code = "E_VALIDATE"
    exit_status = 3


class ParameterError(UvaError):
    """A configuration value is out of range or inconsistent."""

    code = "E_PARAM"
    exit_status = 4


class NotFoundError(UvaError):
    """An identifier was looked up that the corpus does not contain."""

    code = "E_NOTFOUND"
    exit_status = 5


class JoinError(ValidationError):
    """Predictions and labels do not join one-to-one."""

    code = "E_JOIN"
    exit_status = 6
