"""Exception types shared across the engine, image layer, and service."""


class WisardError(Exception):
    """Base class for engine-level errors. Carries a stable machine code."""

    code = "wisard_error"


class DimensionMismatchError(WisardError):
    """Pattern dimensions do not match the model's retina."""

    code = "dimension_mismatch"


class UnknownLabelError(WisardError):
    """Referenced label has no discriminator in the model."""

    code = "unknown_label"


class ModelFormatError(WisardError):
    """A serialized model document is malformed or violates an invariant."""

    code = "model_format"

    def __init__(self, message: str, code: str | None = None):
        super().__init__(message)
        if code is not None:
            self.code = code


class VersionMismatchError(ModelFormatError):
    """Serialized model declares an unsupported format version."""

    def __init__(self, message: str):
        super().__init__(message, code="version_mismatch")


class PgmError(WisardError):
    """Malformed or unsupported PGM data."""

    code = "invalid_pgm"
