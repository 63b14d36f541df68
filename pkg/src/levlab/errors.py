"""Exception and warning types shared across the package."""


class LevlabError(Exception):
    """Base class for package errors."""


class PoleOfGamma(LevlabError):
    """log-Gamma requested at a non-positive integer."""


class DomainError(LevlabError):
    """Argument outside the mathematical domain of the function."""


class NonConvergence(LevlabError):
    """An adaptive procedure hit its depth/size limit before stabilizing."""


class StiffIntegration(LevlabError):
    """The ODE integrator failed step control."""


class NearSingularBracket(LevlabError):
    """The bracket matrix of the extension S-matrix is numerically singular."""


class ExtrapolationUnstable(LevlabError):
    """Successive limit extrapolants diverge instead of stabilizing."""


class NonUnitaryInput(LevlabError):
    """A matrix required to be unitary is not, beyond tolerance."""


class DegenerateClassification(LevlabError):
    """A case discriminant sits too close to a boundary between table rows."""


class AmbiguousClassification(LevlabError):
    """Zero-energy extrapolation does not land near either allowed value."""


class ResonanceSuspected(LevlabError):
    """The threshold phase does not approach a multiple of pi."""


class IntegrabilityWarning(UserWarning):
    """Derivative norms diverge faster than an integrable bound."""


class TruncationWarning(UserWarning):
    """A truncated tail term exceeds the requested bound."""
