"""Exception hierarchy; the CLI maps each branch to a distinct exit code."""


class AqolabError(Exception):
    """Base class for all package errors."""


class InputError(AqolabError):
    """Malformed input file or unparsable configuration (exit code 1)."""


class PreconditionError(AqolabError):
    """A documented precondition of an operation was violated (exit code 2)."""


class NumericalError(AqolabError):
    """A numerical routine failed (bracket loss, step-size breakdown, ...) (exit code 3)."""


class PrecisionInsufficientError(AqolabError):
    """Oracle accuracy is too coarse for the requested extraction (exit code 4)."""

    def __init__(self, message, required_eps=None):
        super().__init__(message)
        self.required_eps = required_eps


class SizeError(PreconditionError):
    """Brute-force enumeration would exceed the configured ceiling."""


class SpectralConditionError(PreconditionError):
    """The spectrum fails the gap condition required by the certificate."""


class BracketError(NumericalError):
    """A secular-equation bisection bracket did not enclose a sign change."""


class StepSizeError(NumericalError):
    """The integrator could not meet the norm-drift budget within its step limits."""


class DecodeFailureError(NumericalError):
    """Error-tolerant polynomial decoding found no consistent codeword (retriable)."""


class InconsistentOracleError(NumericalError):
    """Exact-mode oracle answers are not consistent with any integer spectrum."""


EXIT_CODES = {
    InputError: 1,
    PreconditionError: 2,
    NumericalError: 3,
    PrecisionInsufficientError: 4,
}


def exit_code_for(exc: Exception) -> int:
    for klass in (InputError, PrecisionInsufficientError, NumericalError, PreconditionError):
        if isinstance(exc, klass):
            return EXIT_CODES[klass]
    return 1
