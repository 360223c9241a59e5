"""Exception hierarchy shared by the estimators, models and the CLI."""


class EstimationError(ValueError):
    """Base class for every domain error raised by this package."""


# sample construction
class EmptyOrTooSmall(EstimationError):
    pass


class NegativeOrNonFinite(EstimationError):
    pass


# tail-index estimation
class KOutOfRange(EstimationError):
    pass


class NonPositiveTailValue(EstimationError):
    pass


class SOutOfRange(EstimationError):
    pass


class NonPositiveGamma(EstimationError):
    pass


# threshold selection
class RangeInvalid(EstimationError):
    pass


# premiums
class TOutOfRange(EstimationError):
    pass


class RhoInvalid(EstimationError):
    pass


class HeavinessConditionViolated(EstimationError):
    """The fitted tail is too heavy for the distortion: gamma_hat * rho >= 1."""

    def __init__(self, gamma_hat: float, rho: float):
        self.gamma_hat = gamma_hat
        self.rho = rho
        self.product = gamma_hat * rho
        super().__init__(
            f"gamma_hat * rho = {gamma_hat:.6g} * {rho:.6g} = {self.product:.6g} >= 1; "
            "the premium is infinite under the fitted tail"
        )


class DivergentTailIntegral(EstimationError):
    pass


class ParameterDomainViolated(EstimationError):
    pass


# loss models
class OutOfSupport(EstimationError):
    pass


class UOutOfRange(EstimationError):
    pass


class RootNotBracketed(EstimationError):
    pass


class DivergentPremium(EstimationError):
    pass


# simulation
class AllReplicationsFailed(EstimationError):
    pass
