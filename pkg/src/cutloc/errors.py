"""Exception hierarchy shared across the package.

Everything raised on purpose derives from CutlocError; parse failures for
the line-oriented file formats additionally derive from ParseError so the
CLI can map them to a distinct exit code.
"""

from __future__ import annotations


class CutlocError(Exception):
    """Base class for all domain errors raised by cutloc."""


class GraphValidationError(CutlocError):
    """A graph failed structural validation.

    Carries the full ValidationReport so callers can show every violation.
    """

    def __init__(self, report):
        self.report = report
        lines = "; ".join(f"{v.kind}: {v.detail}" for v in report.violations)
        super().__init__(f"invalid graph: {lines}")


class UnknownVertexError(CutlocError):
    pass


class UnknownEdgeError(CutlocError):
    pass


class CutError(CutlocError):
    """A vertex set does not describe a valid cut."""


class RootNotInCutError(CutError):
    pass


class EmptyComplementError(CutError):
    pass


class NotDownClosedError(CutError):
    """The set is not predecessor-closed; carries one witness back-edge."""

    def __init__(self, witness_src: int, witness_dst: int):
        self.witness = (witness_src, witness_dst)
        super().__init__(
            f"edge {witness_src}->{witness_dst} enters the set from outside"
        )


class CutGraphMismatchError(CutlocError):
    pass


class CutsNotOrderedError(CutlocError):
    pass


class PredicateSyntaxError(CutlocError):
    def __init__(self, message: str, position: int | None = None):
        self.position = position
        where = f" at {position}" if position is not None else ""
        super().__init__(f"{message}{where}")


class DuplicatePredicateIdError(CutlocError):
    pass


class UnscriptedCutError(CutlocError):
    pass


class VerdictMismatchError(CutlocError):
    """A fed verdict does not cover exactly the pending state's atoms."""


class SessionFinishedError(CutlocError):
    pass


class AnomalySpecError(CutlocError):
    pass


class InitialAnomalyError(CutlocError):
    pass


class TraceError(CutlocError):
    pass


class UseBeforeDefError(TraceError):
    def __init__(self, var: str, seq: int):
        self.var = var
        self.seq = seq
        super().__init__(f"variable {var!r} used at event {seq} before any assignment")


class BadCtrlRefError(TraceError):
    def __init__(self, seq: int, ctrl: int, reason: str):
        self.seq = seq
        self.ctrl = ctrl
        super().__init__(f"event {seq} has bad ctrl reference {ctrl}: {reason}")


class NoAssignEventError(TraceError):
    pass


class ParseError(CutlocError):
    """A line-oriented input file could not be parsed; carries the line number."""

    def __init__(self, message: str, line_no: int):
        self.line_no = line_no
        super().__init__(f"line {line_no}: {message}")


class GraphParseError(ParseError):
    pass


class TraceParseError(ParseError):
    pass
