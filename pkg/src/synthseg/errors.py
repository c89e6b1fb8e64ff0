"""Exception hierarchy.

ParameterError covers invalid arguments and configuration (CLI exit 1);
DataError and its subclasses cover bad or inconsistent data encountered
while processing otherwise valid requests (CLI exit 2).
"""


class SynthsegError(Exception):
    pass


class ParameterError(SynthsegError, ValueError):
    pass


class DataError(SynthsegError):
    pass


class ObjParseError(DataError):
    def __init__(self, message: str, line_number: int):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


class GroupMappingError(DataError):
    pass


class SamplingError(DataError):
    pass


class UndefinedMetricError(DataError):
    pass
