"""Exception types shared across the package."""


class CapacityError(RuntimeError):
    """A dimension or enumeration cap would be exceeded."""


class ValidationError(ValueError):
    """Malformed input: channel file, config, or parameter bundle."""


class PackingError(RuntimeError):
    """Codebook packing condition could not be met.

    Carries the certificate of the worst-violating attempt, if any.
    """

    def __init__(self, message, certificate=None):
        super().__init__(message)
        self.certificate = certificate
