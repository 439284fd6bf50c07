"""Exception types shared across the package.

Each carries a short ``code`` token that the CLI prints on stderr and maps
to an exit status.
"""


class QnrSimError(Exception):
    code = "E_QNRSIM"
    exit_status = 2


class InvalidInput(QnrSimError, ValueError):
    code = "E_INVALID_INPUT"


class NotPrime(InvalidInput):
    code = "E_NOT_PRIME"


class WrongResidueClass(InvalidInput):
    """Raised for primes not congruent to 1 mod 8.

    Callers should fall back to :func:`qnrsim.number_theory.qnr_shortcut`.
    """

    code = "E_WRONG_RESIDUE_CLASS"


class CountMismatch(InvalidInput):
    code = "E_COUNT_MISMATCH"


class MemoryCapExceeded(QnrSimError):
    code = "E_MEMORY_CAP"
    exit_status = 3


class InfeasibleAngle(QnrSimError, ArithmeticError):
    code = "E_INFEASIBLE_ANGLE"
    exit_status = 1


class MeanOffTarget(QnrSimError, ArithmeticError):
    code = "E_MEAN_OFF_TARGET"
    exit_status = 1


class NotNormalized(InvalidInput):
    code = "E_NOT_NORMALIZED"
