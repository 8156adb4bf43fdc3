"""Exception types. Each carries a short machine name used by the CLI."""


class QCorrError(Exception):
    code = "error"


class NonHermitian(QCorrError, ValueError):
    code = "non_hermitian"


class DomainError(QCorrError, ValueError):
    code = "domain_error"


class BadSubsystem(QCorrError, ValueError):
    code = "bad_subsystem"


class DimMismatch(QCorrError, ValueError):
    code = "dim_mismatch"


class InvalidParams(QCorrError, ValueError):
    code = "invalid_params"


class InvalidState(QCorrError, ValueError):
    code = "invalid_state"


class RankTooHigh(QCorrError, ValueError):
    code = "rank_too_high"


class SingularPurification(QCorrError, ArithmeticError):
    code = "singular_purification"

    def __init__(self, msg, cond=float("inf")):
        super().__init__(msg)
        self.cond = cond


class SingularR(QCorrError, ArithmeticError):
    code = "singular_r"

    def __init__(self, msg, cond=float("inf")):
        super().__init__(msg)
        self.cond = cond


class UnsupportedCut(QCorrError, ValueError):
    code = "unsupported_cut"


class DegenerateObservable(QCorrError, ValueError):
    code = "degenerate_observable"


class StepTooLarge(QCorrError, ArithmeticError):
    code = "step_too_large"


class BlochOutOfBall(QCorrError, ValueError):
    code = "bloch_out_of_ball"


class InvalidPOVM(QCorrError, ValueError):
    code = "invalid_povm"


class NonpositiveFisher(QCorrError, ValueError):
    code = "nonpositive_fisher"


class NonUnitary(QCorrError, ValueError):
    code = "non_unitary"


class StepUnstable(QCorrError, ArithmeticError):
    code = "step_unstable"


class InapplicableMeasure(QCorrError, ValueError):
    code = "inapplicable_measure"


class ZeroCorrelation(QCorrError, ValueError):
    code = "zero_correlation"
