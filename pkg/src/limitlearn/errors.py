"""Exception types shared across the package."""


class LimitlearnError(Exception):
    """Base class for errors raised by this package."""


class ConfigError(LimitlearnError):
    """Malformed configuration, formula text, tree file, or CLI argument."""


class ContractViolation(LimitlearnError):
    """A component broke a stated interface contract (e.g. hypothesis range)."""


class UseViolation(ContractViolation):
    """A learner read an informant bit beyond its declared use bound."""

    def __init__(self, stage, position, bound):
        self.stage = stage
        self.position = position
        self.bound = bound
        super().__init__(
            f"stage {stage}: read position {position} beyond use bound {bound}"
        )


class UnsupportedAtomError(LimitlearnError):
    """Exact evaluation hit an atom it has no finite decision procedure for."""


class CrosscheckDisagreement(LimitlearnError):
    """Two deciders that must agree returned different answers."""

    def __init__(self, message, witness=None):
        self.witness = witness
        super().__init__(message)
