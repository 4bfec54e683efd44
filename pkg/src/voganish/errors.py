class VoganishError(Exception):
    pass


class InvariantError(VoganishError, ValueError):
    """Input data violates a stated invariant."""


class Unsupported(VoganishError):
    """The instance is outside what the engine can certify."""


class GenericityError(VoganishError):
    """A seeded random search ran out of retries."""


class BundleError(VoganishError):
    """A bundle file could not be parsed or cross-referenced."""
