from typing import Optional, Dict, Any


EXIT_USAGE = 2
EXIT_RUNTIME = 1


class IrqSimException(Exception):
    """Base exception class for irqsim."""

    def __init__(
        self,
        detail: str,
        error_code: str = None,
        exit_code: int = EXIT_RUNTIME,
        location: Optional[str] = None,
    ):
        """Initialize the irqsim exception.

        Args:
            detail: Human-readable error description
            error_code: Machine-readable error code
            exit_code: Process exit code the CLI reports for this error
            location: Dotted key path (or line/column) the error refers to
        """
        self.detail = detail
        self.error_code = error_code or "IRQSIM_ERROR"
        self.exit_code = exit_code
        self.location = location
        super().__init__(str(self))

    def __str__(self) -> str:
        if self.location:
            return f"{self.location}: {self.detail}"
        return self.detail

    def __reduce__(self):
        # subclass constructors differ, so rebuild from the attribute dict
        return (_restore, (self.__class__, dict(self.__dict__)))

    def to_dict(self) -> Dict[str, Any]:
        """Convert the exception to a dictionary for diagnostics.

        Returns:
            Dict with error details
        """
        error = {
            "code": self.error_code,
            "message": self.detail,
            "exit_code": self.exit_code,
        }
        if self.location:
            error["location"] = self.location
        return {"error": error}


def _restore(cls, state: Dict[str, Any]) -> IrqSimException:
    exc = cls.__new__(cls)
    exc.__dict__.update(state)
    Exception.__init__(exc, str(exc))
    return exc


# Engine Exceptions
class PastDue(IrqSimException):
    """Exception raised when an event is scheduled before the current time."""

    def __init__(self, detail: str = "Event is due in the past"):
        super().__init__(detail=detail, error_code="IRQSIM_PAST_DUE")


class TimeOverflow(IrqSimException):
    """Exception raised when virtual time arithmetic leaves the 64-bit range."""

    def __init__(self, detail: str = "Virtual time overflow"):
        super().__init__(detail=detail, error_code="IRQSIM_TIME_OVERFLOW")


class BadDistribution(IrqSimException):
    """Exception raised when a distribution has malformed parameters."""

    def __init__(self, detail: str = "Malformed distribution parameters"):
        super().__init__(detail=detail, error_code="IRQSIM_BAD_DISTRIBUTION")


# Machine Exceptions
class UnknownLine(IrqSimException):
    """Exception raised when an IRQ line is not registered."""

    def __init__(self, detail: str = "Unknown IRQ line"):
        super().__init__(detail=detail, error_code="IRQSIM_UNKNOWN_LINE")


class NoHandler(IrqSimException):
    """Exception raised when a line is dispatched without a connected handler."""

    def __init__(self, detail: str = "No handler connected to IRQ line"):
        super().__init__(detail=detail, error_code="IRQSIM_NO_HANDLER")


class ArchMismatch(IrqSimException):
    """Exception raised when an operation needs the other dispatch architecture."""

    def __init__(self, detail: str = "Operation not available under this architecture"):
        super().__init__(detail=detail, error_code="IRQSIM_ARCH_MISMATCH")


class GuestContextError(IrqSimException):
    """Exception raised when soft masking is attempted outside the guest task."""

    def __init__(self, detail: str = "Soft masking is only available to the guest task"):
        super().__init__(detail=detail, error_code="IRQSIM_GUEST_CONTEXT")


class MaskNestingError(IrqSimException):
    """Exception raised when hard-mask sections of different subsystems nest."""

    def __init__(self, detail: str = "Hard-mask sections may not nest across subsystems"):
        super().__init__(detail=detail, error_code="IRQSIM_MASK_NESTING")


# Kernel Exceptions
class UnknownSemaphore(IrqSimException):
    """Exception raised when a semaphore id is not known to the kernel."""

    def __init__(self, detail: str = "Unknown semaphore"):
        super().__init__(detail=detail, error_code="IRQSIM_UNKNOWN_SEMAPHORE")


class SchedulerError(IrqSimException):
    """Exception raised when a scheduler precondition is violated."""

    def __init__(self, detail: str = "Scheduler precondition violated"):
        super().__init__(detail=detail, error_code="IRQSIM_SCHEDULER")


# Harness Exceptions
class ConfigError(IrqSimException):
    """Exception raised when a measurement configuration is unusable."""

    def __init__(self, detail: str = "Invalid measurement configuration"):
        super().__init__(detail=detail, error_code="IRQSIM_CONFIG", exit_code=EXIT_USAGE)


# Statistics Exceptions
class EmptyInput(IrqSimException):
    """Exception raised when statistics are requested for no samples."""

    def __init__(self, detail: str = "No samples to summarize"):
        super().__init__(detail=detail, error_code="IRQSIM_EMPTY_INPUT")


class BadWidth(IrqSimException):
    """Exception raised when a histogram bucket width is not positive."""

    def __init__(self, detail: str = "Histogram bucket width must be positive"):
        super().__init__(detail=detail, error_code="IRQSIM_BAD_WIDTH")


# Scenario Exceptions
class ScenarioError(IrqSimException):
    """Base exception for scenario file problems."""

    def __init__(self, detail: str, error_code: str = "IRQSIM_SCENARIO", location: Optional[str] = None):
        super().__init__(detail=detail, error_code=error_code, exit_code=EXIT_USAGE, location=location)


class ParseError(ScenarioError):
    """Exception raised when a scenario document is not valid JSON or cannot be read."""

    def __init__(self, detail: str = "Scenario is not valid JSON", location: Optional[str] = None):
        super().__init__(detail=detail, error_code="IRQSIM_PARSE", location=location)


class UnknownKey(ScenarioError):
    """Exception raised when a scenario contains a key the schema does not know."""

    def __init__(self, detail: str = "Unknown key", location: Optional[str] = None):
        super().__init__(detail=detail, error_code="IRQSIM_UNKNOWN_KEY", location=location)


class BadUnit(ScenarioError):
    """Exception raised when a duration lacks a recognised unit suffix."""

    def __init__(self, detail: str = "Duration needs a unit suffix (ns, us, ms, s)", location: Optional[str] = None):
        super().__init__(detail=detail, error_code="IRQSIM_BAD_UNIT", location=location)


class BadValue(ScenarioError):
    """Exception raised when a scenario value is out of range or of the wrong type."""

    def __init__(self, detail: str = "Bad value", location: Optional[str] = None):
        super().__init__(detail=detail, error_code="IRQSIM_BAD_VALUE", location=location)
