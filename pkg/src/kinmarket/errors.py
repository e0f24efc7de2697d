"""Exception types raised across the package."""


class KinMarketError(Exception):
    """Base class for all library errors."""


class NumericalError(KinMarketError):
    """A numerical procedure could not produce a valid answer."""


class BracketFailure(NumericalError):
    """No upper bracket for a monotone root could be found."""


class InitError(KinMarketError):
    """Initial price is inconsistent with the demand-supply relation."""


class DegenerateDistribution(NumericalError):
    """Moments describe a point mass (zero log-variance)."""


class EmptyEnsemble(KinMarketError, ValueError):
    pass


class AllZeroWealth(KinMarketError, ValueError):
    pass


class NonPositiveSample(KinMarketError, ValueError):
    pass


class ConfigError(KinMarketError, ValueError):
    """Invalid or unknown experiment configuration."""


class UnknownPreset(ConfigError):
    pass
