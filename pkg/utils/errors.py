# =====================================================
# utils/errors.py - Exception hierarchy and exit codes
# =====================================================

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_INPUT_ERROR = 2
EXIT_NO_CONVERGENCE = 3


class AccelRadError(Exception):
    """Base class for every error raised by accelrad."""

    exit_code = EXIT_INPUT_ERROR

    def __init__(self, message: str, **context):
        super().__init__(message)
        self.message = message
        self.context = context

    def to_dict(self):
        return {
            "type": type(self).__name__,
            "message": self.message,
            **{k: v for k, v in self.context.items()},
        }


# Input errors (exit 2)

class InputError(AccelRadError):
    exit_code = EXIT_INPUT_ERROR


class NonPositiveInput(InputError):
    pass


class WedgeViolation(InputError):
    pass


class DomainError(InputError):
    pass


class PoleError(InputError):
    pass


class ParameterPole(InputError):
    pass


# Numerical errors (exit 3)

class NumericalError(AccelRadError):
    exit_code = EXIT_NO_CONVERGENCE


class NoConvergence(NumericalError):
    pass
