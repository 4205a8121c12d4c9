"""Exception types shared across the package."""


class SkinbenchError(Exception):
    pass


class NoConvergence(SkinbenchError):
    """QR iteration exhausted its sweep budget."""

    def __init__(self, msg, context=None):
        super().__init__(msg)
        self.context = context or {}


class SingularMatrix(SkinbenchError):
    pass


class NotHermitian(SkinbenchError):
    pass


class InfiniteCondition(SkinbenchError):
    pass


class VanishingOverlap(SkinbenchError):
    pass


class NoClosedForm(SkinbenchError):
    pass


class ExceptionalBoundary(SkinbenchError):
    pass


class DegenerateOrbitals(SkinbenchError):
    """Orbital collapse during QR renormalization, with the failing time attached."""

    def __init__(self, msg, t=None):
        super().__init__(msg)
        self.t = t


class InsufficientWindow(SkinbenchError):
    pass


class DimensionTooLarge(SkinbenchError):
    pass


class FitFailure(SkinbenchError):
    pass
