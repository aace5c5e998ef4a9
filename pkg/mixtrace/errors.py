"""Exception hierarchy shared by the library, CLI and HTTP layers."""


class MixtraceError(ValueError):
    """Base class; callers can catch this to handle any lab error."""


class DomainError(MixtraceError):
    """Input outside the domain of an operation (non-finite, t <= 0, bad dimension)."""


class GridMismatchError(MixtraceError):
    """Fields or families that must share a grid do not."""


class ResolutionError(MixtraceError):
    """Grid too coarse for the requested construction."""


class UnsupportedError(MixtraceError):
    """Parameter combination the theory (and so the lab) does not cover."""


class WindowError(MixtraceError):
    """Dyadic window of a homogeneous symbol norm does not capture the symbol."""


class ExtensionFamilyError(MixtraceError):
    """Moment orthogonalization of the extension profile failed."""


class UnknownSuiteError(MixtraceError):
    """No verification suite registered under the given name."""


class ConfigError(MixtraceError):
    """Malformed experiment configuration."""


class FieldFormatError(MixtraceError):
    """Serialized field container could not be decoded."""
