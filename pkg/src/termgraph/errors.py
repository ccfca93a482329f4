"""Exception hierarchy.

Law violations are reported as data (see ``LawReport``); exceptions are
reserved for malformed input.
"""


class TermGraphError(Exception):
    pass


class DuplicateName(TermGraphError):
    pass


class UnknownSort(TermGraphError):
    pass


class UnknownOp(TermGraphError):
    pass


class SortMismatch(TermGraphError):
    pass


class ArityMismatch(TermGraphError):
    pass


class UnknownElement(TermGraphError):
    pass


class UnknownNode(UnknownElement):
    pass


class NameClash(TermGraphError):
    pass


class CyclicInput(TermGraphError):
    pass


class LawViolation(TermGraphError):
    def __init__(self, report):
        super().__init__(str(report))
        self.report = report


class NotAPushout(TermGraphError):
    pass


class BoundaryMismatch(TermGraphError):
    pass


class Unsolvable(TermGraphError):
    pass


class MissingSolver(TermGraphError):
    pass


class ParseError(TermGraphError):
    """Syntax error with a 1-based source position."""

    def __init__(self, message, line=None, col=None):
        self.line = line
        self.col = col
        if line is not None:
            message = f"{line}:{col}: {message}"
        super().__init__(message)


class UnknownName(ParseError):
    pass


class ForwardReference(ParseError):
    pass
