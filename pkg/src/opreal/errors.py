"""Exception types raised across the package."""


class DomainError(ValueError):
    """A parameter lies outside its admissible range."""


class DimensionError(ValueError):
    """An operator has the wrong dimension for the requested operation."""


class UndefinedConditionalError(ValueError):
    """Conditioning on an outcome that occurs with zero probability."""


class PurityError(ValueError):
    """A pure state was required but a mixed one was given."""


class TermCountError(ValueError):
    pass


class NoCertificateError(ValueError):
    """No OR-nonlocality certificate can be issued without a violation."""


class PromiseRequiredError(ValueError):
    pass


class ClassificationError(ValueError):
    """A preparation component is neither pure nor declared separable."""


class IncompatibleError(ValueError):
    pass
