"""Exception hierarchy shared by every module of the package."""


class P6Error(Exception):
    """Base class for all errors raised by p6groups."""


class InvalidArgument(P6Error, ValueError):
    pass


class UnsupportedPrime(P6Error, ValueError):
    pass


class UncheckedPresentation(P6Error):
    """Raised when arithmetic is requested on a presentation that has not
    passed its consistency check."""


class ResourceBudgetExceeded(P6Error):
    pass


class MalformedSpec(P6Error):
    pass


class DslSyntaxError(P6Error):
    """Carries every diagnostic collected while parsing (at most 20)."""

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        first = self.diagnostics[0] if self.diagnostics else "unknown error"
        extra = len(self.diagnostics) - 1
        msg = str(first) if extra <= 0 else f"{first} (and {extra} more)"
        super().__init__(msg)
