class EditTransferBaseException(Exception):
    pass


class MediaFormatError(EditTransferBaseException):
    def __init__(self, message, offset=None):
        self.offset = offset
        if offset is not None:
            message = f"{message} (at byte offset {offset})"
        super().__init__(message)


class FrameDirectoryError(EditTransferBaseException):
    pass


class GeometryError(EditTransferBaseException):
    pass


class InsufficientPointsError(GeometryError):
    pass


class DegenerateConfigurationError(GeometryError):
    pass


class InsufficientInliersError(GeometryError):
    pass


class NonInvertibleHomographyError(GeometryError):
    pass


class AlignmentError(GeometryError):
    pass


class MosaicTooLargeError(EditTransferBaseException):
    pass


class InvalidSpeedError(EditTransferBaseException):
    pass


class DuplicateClipError(EditTransferBaseException):
    pass


class NoMatchingFootageError(EditTransferBaseException):
    def __init__(self, message, constraint=None, nearest_miss=None):
        self.constraint = constraint
        self.nearest_miss = nearest_miss
        super().__init__(message)


class FramingInfeasibleError(EditTransferBaseException):
    pass


class FrameIndexError(EditTransferBaseException):
    pass


class ConfigurationError(EditTransferBaseException):
    pass


class PipelineError(EditTransferBaseException):
    def __init__(self, stage, subject, message):
        self.stage = stage
        self.subject = subject
        super().__init__(f"[{stage}] {subject}: {message}")
