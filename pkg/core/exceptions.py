"""
Exception hierarchy shared by the core packages.
"""


class FormalError(Exception):
    """Base class for every failure raised by a construction or a check."""


class CompositionError(FormalError):
    pass


class MorphismError(FormalError):
    pass


class NonCommutingSquareError(FormalError):
    pass


class PullbackError(FormalError):
    """No mediating morphism, or more than one, while pairing into a chosen pullback."""


class MaterializationError(FormalError):
    pass


class LCCError(FormalError):
    pass


class UniverseError(FormalError):
    pass


class CSystemError(FormalError):
    pass


class JStructureError(FormalError):
    pass


class HypothesisError(FormalError):
    """A theorem hypothesis failed; ``hypothesis`` names it."""

    def __init__(self, hypothesis: str, detail: str = ""):
        self.hypothesis = hypothesis
        self.detail = detail
        message = f"hypothesis '{hypothesis}' failed"
        if detail:
            message = f"{message}: {detail}"
        super().__init__(message)


class LiftingInvariantError(FormalError):
    pass


class CompatibilityError(FormalError):
    pass


class FixtureError(FormalError):
    pass
