"""Exception and warning types shared across the package."""


class LttpError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(LttpError, ValueError):
    """Bad arguments, configuration, or input shape."""


class ImageFormatError(LttpError, ValueError):
    """An image file could not be decoded as 8-bit single-channel grayscale."""


class ManifestError(ValidationError):
    """A dataset manifest is malformed."""


class MissingImagesError(LttpError, OSError):
    """One or more images referenced by a manifest do not exist."""

    def __init__(self, paths):
        self.paths = list(paths)
        super().__init__(f"{len(self.paths)} image(s) missing")


class ManifestWarning(UserWarning):
    pass


class DegenerateVectorWarning(UserWarning):
    pass
