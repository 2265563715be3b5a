"""Exception hierarchy shared across the package."""


class MaskAttackError(Exception):
    """Base class for all package errors."""


class WavFormatError(MaskAttackError):
    pass


class UnsupportedCodecError(WavFormatError):
    pass


class SampleRateMismatchError(MaskAttackError):
    pass


class WavWriteError(MaskAttackError):
    pass


class TooShortError(MaskAttackError):
    pass


class DimensionError(MaskAttackError, ValueError):
    pass


class SelectionError(MaskAttackError, ValueError):
    pass


class UndefinedInputError(MaskAttackError, ValueError):
    pass


class ConfigError(MaskAttackError, ValueError):
    pass


class FrameProbeError(MaskAttackError):
    """A transcriber call failed while probing a specific frame."""

    def __init__(self, frame_index, cause):
        self.frame_index = frame_index
        self.cause = cause
        where = "baseline" if frame_index is None else f"frame {frame_index}"
        super().__init__(f"transcription failed while probing {where}: {cause}")


class TranscriberError(MaskAttackError):
    pass


class TranscriberTransportError(TranscriberError):
    pass


class TranscriberTimeoutError(TranscriberError):
    pass


class TranscriberStatusError(TranscriberError):
    def __init__(self, message, status=None):
        super().__init__(message)
        self.status = status
