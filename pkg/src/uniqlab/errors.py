"""Exception types shared across the package."""


class UniqlabError(Exception):
    """Base class for all package-specific errors."""


class ParameterError(UniqlabError, ValueError):
    """A precondition on an operation's parameters is violated."""


class ConjugacyError(ParameterError):
    """p and q are not Hölder conjugate within tolerance."""


class TooFewPointsError(ParameterError):
    """A sequence does not carry enough points for the requested tail."""


class RadiusError(UniqlabError):
    """Evaluation point lies outside the certified truncation radius."""


class NodeError(UniqlabError):
    """The requested node is not a zero of the product model."""


class WindowEmptyError(UniqlabError):
    """A selection window contains no point of the source sequence."""

    def __init__(self, n: int, s: int, lo: float, hi: float):
        self.n, self.s, self.lo, self.hi = n, s, lo, hi
        super().__init__(
            f"no point in window [{lo:g}, {hi:g}] (block n={n}, slot s={s})"
        )


class InfeasibleParametersError(ParameterError):
    """Selection windows cannot be disjoint: h >= L/m."""


class GridTouchesZeroError(UniqlabError):
    """A verification grid point is too close to a product zero."""


class HypothesisViolationError(UniqlabError):
    """A lemma hypothesis spot-check failed; carries diagnostics."""

    def __init__(self, message: str, diagnostics: dict):
        self.diagnostics = diagnostics
        super().__init__(f"{message}: {diagnostics}")


class ConditionError(UniqlabError):
    """The density condition required by an experiment does not hold."""


class DecompositionError(UniqlabError):
    """A matrix factorization failed; carries solver diagnostics."""
