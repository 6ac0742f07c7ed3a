"""Exception and warning types shared across the package."""


class TFAError(Exception):
    """Base class for all package errors."""


class NotSymplectic(TFAError):
    def __init__(self, residual, tol=None):
        self.residual = float(residual)
        msg = f"matrix is not symplectic: max|A^T J A - J| = {self.residual:.3e}"
        if tol is not None:
            msg += f" (tol {tol:.1e})"
        super().__init__(msg)


class SingularE(TFAError):
    pass


class NonSymmetricC(TFAError):
    pass


class FactorizationFailed(TFAError):
    pass


class GridMismatch(TFAError):
    pass


class OffGridTranslation(TFAError):
    pass


class InterpolationResidualExceeded(TFAError):
    def __init__(self, residual, tol):
        self.residual = float(residual)
        super().__init__(
            f"bandlimited resampling residual {self.residual:.3e} exceeds {tol:.1e}"
        )


class DegenerateWindowPair(TFAError):
    pass


class DegenerateOperator(TFAError):
    pass


class SvdFailure(TFAError):
    pass


class HypothesisViolated(TFAError):
    pass


class GridResolutionExceeded(TFAError):
    pass


class AliasWarning(UserWarning):
    """Input mass near the box boundary; linear convolution may be truncated."""
