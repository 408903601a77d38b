"""Exception types shared across the toolkit."""


class OpacheckError(Exception):
    """Base class for all toolkit-specific errors."""


class ObserverBlowup(OpacheckError):
    """The subset construction exceeded the configured cap on reachable estimates."""

    def __init__(self, cap: int):
        super().__init__(f"observer construction exceeded the cap of {cap} subsets")
        self.cap = cap


class PreconditionViolated(OpacheckError):
    """An operation was invoked on input outside its declared domain."""


class MalformedFormula(OpacheckError):
    """A CNF formula breaks a structural requirement."""


class InputNotDeterministic(OpacheckError):
    """A construction requiring deterministic input received a nondeterministic automaton."""


class TooLarge(OpacheckError):
    """Input exceeds the hard cap of a brute-force oracle."""


class ParseError(OpacheckError):
    """An input file does not match the expected format."""
