"""
FiltraLab - Error Hierarchy
One root exception for every hard failure in the library and the CLI

Every error can flatten itself into the issue dict the CLI prints and
serializes:
    {'line': int, 'column': int, 'type': str, 'token': str, 'message': str}
"""


class FiltralabError(Exception):
    """Base class for all FiltraLab failures"""

    issue_type = 'Error'

    def __init__(self, message, **details):
        super().__init__(message)
        self.message = message
        self.details = details

    def to_issue(self):
        """Return the error as an issue dict (line/column are 0 when unknown)"""
        return {
            'line': self.details.get('line', 0),
            'column': self.details.get('column', 0),
            'type': self.issue_type,
            'token': self.details.get('token', ''),
            'message': self.message,
        }


class InputError(FiltralabError):
    """Malformed input: wrong vector length, ideals from different rings"""

    issue_type = 'Input Error'


class DomainError(FiltralabError):
    """Mathematically undefined request (colon by zero ideal, infinite colength)"""

    issue_type = 'Domain Error'


class UnsupportedError(FiltralabError):
    """Request outside the supported ambient (quotient integral closure, d != 2 tables)"""

    issue_type = 'Unsupported'


class FitError(FiltralabError):
    """No stable, integral Hilbert polynomial fit within the configured bounds"""

    issue_type = 'Fit Error'

    def __init__(self, message, diagnostics=None, **details):
        super().__init__(message, **details)
        self.diagnostics = diagnostics or {}


class UnstableError(FiltralabError):
    """Ratliff-Rush colon chain did not stabilize before k_max"""

    issue_type = 'Unstable'

    def __init__(self, message, partial_chain=None, **details):
        super().__init__(message, **details)
        self.partial_chain = list(partial_chain or [])


class InstanceSyntaxError(FiltralabError):
    """Instance file could not be parsed"""

    issue_type = 'Syntax Error'

    def __init__(self, message, line=0, column=0, token='', suggestion=None):
        if suggestion:
            message = f"{message} (did you mean '{suggestion}'?)"
        super().__init__(message, line=line, column=column, token=token)
        self.line = line
        self.column = column
        self.token = token
        self.suggestion = suggestion

    def __str__(self):
        return f"line {self.line}, column {self.column}: {self.message}"
