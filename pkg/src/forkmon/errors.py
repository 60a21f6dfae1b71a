"""Exception hierarchy shared by all forkmon modules."""

from __future__ import annotations


class ForkmonError(Exception):
    """Base class for all errors raised by this package."""


class InputError(ForkmonError):
    """Malformed input data or configuration (CLI exit code 2)."""


class MalformedHeader(InputError):
    pass


class UnknownUnit(InputError):
    pass


class NonMonotoneTimestamps(InputError):
    def __init__(self, node_id: str, row: int):
        super().__init__(f"timestamps for node {node_id!r} decrease at data row {row}")
        self.node_id = node_id
        self.row = row


class InvalidValue(InputError):
    pass


class NoOverlap(ForkmonError):
    pass


class FrameMismatch(ForkmonError):
    pass


class CalibrationError(ForkmonError):
    """Calibration failures (CLI exit code 3)."""


class NotStationary(CalibrationError):
    pass


class TiltOutOfRange(CalibrationError):
    pass


class InsufficientMotion(CalibrationError):
    pass


class EmptySegment(ForkmonError):
    pass


class DutyOverflow(ForkmonError):
    pass


class Unachievable(ForkmonError):
    pass


class OverlappingSpecs(ForkmonError):
    pass


class UnknownParameter(ForkmonError):
    pass
